//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::f64::consts::PI;
use std::process::ExitCode;

use num_complex::Complex64;
use serde_json::Value;

use susyosc::coherent::{
    mean_energy_sweep, overlap, BasisTable, CoherentState, MeasureSpec, FIGURE_NMAX,
};
use susyosc::jet::JetFn;
use susyosc::ladder::{LadderPair, Nu, SpectralState};
use susyosc::oscillator::{schrodinger_residual, FockState, SeedSolution};
use susyosc::phase_space::{
    default_phase_grid, mandel_q, mandel_q_of, mandel_sweep, number_moments, wigner,
    wigner_grid, wigner_marginals, CoherentSnapshot, RealState,
};
use susyosc::specfun::{bessel_k, hermite_fn, hyp_1f4, meijer_g4004};
use susyosc::quadrature::QuadConfig;
use susyosc::susy::{equivalence_report, ExtendedHamiltonian, SusyTransform};
use susyosc::{Grid, Result};

const FIGURE_PARAMS: [(f64, f64); 2] = [(-13.0 / 9.0, 4.0), (9.0 / 20.0, 4.0)];
const BOTH_NU: [Nu; 2] = [Nu::Minus2, Nu::One];

type Outcome = Result<(bool, String)>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn window() -> Grid {
    Grid::new(-6.0, 6.0, 121).expect("grid")
}

fn check_grid() -> Grid {
    Grid::new(-5.0, 5.0, 41).expect("grid")
}

fn equivalence() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (eps, gamma) in FIGURE_PARAMS {
        let r = equivalence_report(eps, gamma, &window())?;
        ok &= r.sup_deviation < 1e-8 && r.sup_omega_minus_2x < 1e-8;
        detail.push(format!(
            "eps={eps:.4}: sup|V2-V1-2|={:.2e} sup|Omega-2x|={:.2e} sup|Omega+2x|={:.2e}",
            r.sup_deviation, r.sup_omega_minus_2x, r.sup_omega_plus_2x
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn spectrum_placement() -> Outcome {
    let grid = window();
    let mut ok = true;
    let mut worst = 0.0f64;
    for (eps, gamma) in FIGURE_PARAMS {
        let t1 = SusyTransform::h1(eps, gamma)?;
        for which in [1, 2] {
            let f = t1.missing_normalized(which)?;
            let r = t1.schrodinger_residual(&f, f.energy(), &grid)?;
            worst = worst.max(r);
        }
        let spec = ExtendedHamiltonian::new(t1).spectrum(4);
        let energies: Vec<f64> = spec.iter().map(|s| s.1).collect();
        ok &= energies == vec![-1.5, eps, 0.5, 1.5];

        let t2 = SusyTransform::h2(eps, gamma)?;
        let missing = t2.missing_states(&grid)?;
        let at = |e: f64| missing.iter().find(|m| (m.energy - e).abs() < 1e-12);
        ok &= matches!(at(1.5), Some(m) if !m.normalizable);
        ok &= matches!(at(eps + 2.0), Some(m) if m.normalizable);
        let f = t2.missing_normalized(2)?;
        worst = worst.max(t2.schrodinger_residual(&f, eps + 2.0, &grid)?);
    }
    ok &= worst < 1e-5;
    Ok((ok, format!("max missing-state residual {worst:.2e}, ordering and normalizability checked")))
}

fn factorization() -> Outcome {
    let grid = window();
    let mut worst = 0.0f64;
    for (eps, gamma) in FIGURE_PARAMS {
        for t in [SusyTransform::h1(eps, gamma)?, SusyTransform::h2(eps, gamma)?] {
            for n in 0..=6 {
                if t.is_deleted(n) {
                    continue;
                }
                worst = worst.max(t.factorization_residual(&t.eigenfunction(n)?, &grid)?);
            }
        }
    }
    Ok((worst < 1e-5, format!("max relative residual {worst:.2e}")))
}

fn ladder_algebra() -> Outcome {
    let states: Vec<SpectralState> = BOTH_NU
        .iter()
        .flat_map(|&nu| (1..=3).map(move |n| SpectralState::ladder(nu, n)))
        .collect();
    let mut ok = true;
    let mut detail = Vec::new();
    for (eps, gamma) in [(0.0, 2.0), FIGURE_PARAMS[1]] {
        let rep = LadderPair::new(eps, gamma)?.pha_check(&states, &check_grid())?;
        let step_ok = rep.rows.iter().all(|r| (r.raise_energy_step - 2.0).abs() < 1e-12);
        ok &= rep.max_commutator() < 1e-5 && rep.max_bracket() < 1e-6 && step_ok;
        detail.push(format!(
            "eps={eps:.3}: commutator {:.2e} bracket {:.2e} step2 {step_ok}",
            rep.max_commutator(),
            rep.max_bracket()
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn ladder_kernel() -> Outcome {
    let k = LadderPair::new(0.0, 2.0)?.kernel_basis(&check_grid())?;
    let physical: Vec<_> = k.iter().filter(|e| e.physical).collect();
    let worst = physical.iter().map(|e| e.residual).fold(0.0f64, f64::max);
    let ok = physical.len() == 3 && worst < 1e-5 && physical.iter().all(|e| e.verdict.normalizable);
    let labels: Vec<&str> = physical.iter().map(|e| e.label.as_str()).collect();
    Ok((ok, format!("{} physical kernel states {labels:?}, max residual {worst:.2e}", physical.len())))
}

fn eigenvalue_equation() -> Outcome {
    let mut worst = 0.0f64;
    for nu in BOTH_NU {
        for r in [1.0, 10.0, 100.0] {
            let z = Complex64::from_polar(r, 0.7);
            worst = worst.max(CoherentState::new(nu, 0.0, 2.0, z)?.eigen_residual());
        }
    }
    Ok((worst < 1e-8, format!("max |L- z - z z| relative {worst:.2e}")))
}

fn normalization_and_overlap() -> Outcome {
    let zp = c(4.0, 1.0);
    let mut norm_dev = 0.0f64;
    let mut self_dev = 0.0f64;
    let mut largest = 0.0f64;
    for nu in BOTH_NU {
        for r in [0.5, 5.0, 50.0, 150.0] {
            let s = CoherentState::new(nu, 0.0, 2.0, Complex64::from_polar(r, 1.3))?;
            norm_dev = norm_dev.max((s.norm_sq() - 1.0).abs());
        }
        let sp = CoherentState::new(nu, 0.0, 2.0, zp)?;
        self_dev = self_dev.max((overlap(&sp, &sp)? - 1.0).norm());
        for k in 0..20 {
            let z = zp + Complex64::from_polar(0.25 * (k + 1) as f64, 0.9 * k as f64);
            let s = CoherentState::new(nu, 0.0, 2.0, z)?;
            largest = largest.max(overlap(&sp, &s)?.norm());
        }
    }
    let ok = norm_dev < 1e-10 && self_dev < 1e-10 && largest < 1.0;
    Ok((
        ok,
        format!("max |norm-1| {norm_dev:.2e}, |<z'|z'>-1| {self_dev:.2e}, max scan |<z'|z>| {largest:.6}"),
    ))
}

fn mean_energy() -> Outcome {
    let mut small = Vec::new();
    for nu in BOTH_NU {
        let e = CoherentState::new(nu, 0.0, 2.0, c(1e-4, 0.0))?.mean_energy()?;
        small.push((nu, (e.direct - (nu.value() as f64 + 0.5)).abs()));
    }
    let radii: Vec<f64> = (0..=200).map(|k| 0.5 * k as f64).collect();
    let mut monotone = true;
    let mut closed = 0.0f64;
    for eps in [-0.25, -0.75] {
        for nu in BOTH_NU {
            let sweep = mean_energy_sweep(nu, eps, &radii)?;
            monotone &= sweep.windows(2).all(|w| w[1].1.direct >= w[0].1.direct);
            for (_, e) in &sweep {
                closed = closed.max((e.direct - e.closed_form).abs() / e.direct.abs().max(1.0));
            }
        }
    }
    let ok = small.iter().all(|s| s.1 < 1e-8) && monotone && closed < 1e-8;
    let small: Vec<String> = small
        .iter()
        .map(|(nu, d)| format!("nu={} {d:.2e}", nu.value()))
        .collect();
    Ok((
        ok,
        format!(
            "|E(1e-4) - (nu+1/2)| {}, monotone sweeps {monotone}, closed form vs sum {closed:.2e}",
            small.join(" ")
        ),
    ))
}

fn density_periodicity() -> Outcome {
    let pair = LadderPair::new(0.0, 2.0)?;
    let grid = Grid::default();
    let mut worst = 0.0f64;
    for nu in BOTH_NU {
        let s = CoherentState::truncated(nu, 0.0, 2.0, c(10.0, 0.0), FIGURE_NMAX)?;
        let table = BasisTable::new(&pair, nu, FIGURE_NMAX, &grid)?;
        for t in [0.0, 0.3, 1.1] {
            let a = s.density_on(&table, t)?;
            let b = s.density_on(&table, t + PI)?;
            for (x, y) in a.values.iter().zip(&b.values) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok((worst < 1e-10, format!("max |rho(t+pi) - rho(t)| {worst:.2e}")))
}

fn measure() -> Outcome {
    let m = MeasureSpec::new(Nu::One, 0.0)?;
    let rows = m.moments(5)?;
    let moment_err = rows.iter().map(|r| r.rel_error).fold(0.0f64, f64::max);
    let mut f_min = f64::INFINITY;
    for k in 0..50 {
        let y = 10f64.powf(-3.0 + 6.0 * k as f64 / 49.0);
        f_min = f_min.min(m.f(y)?);
    }
    let res = m.resolution_block(2)?;
    let divergent = MeasureSpec::new(Nu::Minus2, 0.0)?.moments(1).is_err();
    let ok = rows.len() == 5 && moment_err < 1e-4 && f_min >= 0.0 && res.max_deviation < 1e-3;
    Ok((
        ok,
        format!(
            "nu=1 moments max rel err {moment_err:.2e}, min f {f_min:.3e}, resolution deviation {:.2e}, nu=-2 first moment divergent {divergent}",
            res.max_deviation
        ),
    ))
}

fn wigner_checks() -> Outcome {
    let psi0 = FockState::new(0);
    let f = RealState(&psi0);
    let mut gauss = 0.0f64;
    for i in 0..13 {
        for j in 0..13 {
            let (x, p) = (-3.0 + 0.5 * i as f64, -3.0 + 0.5 * j as f64);
            gauss = gauss.max((wigner(&f, x, p)? - (-x * x - p * p).exp() / PI).abs());
        }
    }
    let pair = LadderPair::new(0.0, 2.0)?;
    let (xg, pg) = default_phase_grid();
    let mut ok = gauss < 1e-6;
    let mut detail = vec![format!("ground state vs Gaussian {gauss:.2e}")];
    for nu in BOTH_NU {
        let s = CoherentState::truncated(nu, 0.0, 2.0, c(100.0, 0.0), FIGURE_NMAX)?;
        let basis = pair.basis_fns(nu, FIGURE_NMAX)?;
        let snap = CoherentSnapshot { state: &s, basis: &basis, t: 0.0 };
        let rep = wigner_marginals(&wigner_grid(&snap, &xg, &pg)?, &snap)?;
        ok &= (rep.mass - 1.0).abs() < 1e-4 && rep.marginal_error < 1e-4 && rep.min < 0.0;
        detail.push(format!(
            "nu={}: mass-1 {:.2e} marginal {:.2e} min {:.3e}",
            nu.value(),
            rep.mass - 1.0,
            rep.marginal_error,
            rep.min
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn mandel_sweeps() -> Result<Vec<(Nu, Vec<(f64, f64)>)>> {
    let radii: Vec<f64> = (2..=200).map(|k| 0.5 * k as f64).collect();
    BOTH_NU.iter().map(|&nu| Ok((nu, mandel_sweep(nu, 0.0, 2.0, &radii)?))).collect()
}

fn mandel() -> Outcome {
    let mut small = 0.0f64;
    for nu in BOTH_NU {
        small = small.max(mandel_q(&CoherentState::new(nu, 0.0, 2.0, c(1e-3, 0.0))?)?.abs());
    }
    let mut qmax = f64::NEG_INFINITY;
    for (_, sweep) in mandel_sweeps()? {
        qmax = sweep.iter().map(|s| s.1).fold(qmax, f64::max);
    }
    let w = c(1.7, -0.9);
    let mut coeffs = Vec::new();
    let mut cn = c((-0.5 * w.norm_sqr()).exp(), 0.0);
    for n in 0..80 {
        coeffs.push(cn);
        cn *= w / ((n + 1) as f64).sqrt();
    }
    let poisson = mandel_q_of(&coeffs)?.abs();
    let ok = small < 1e-6 && qmax < 0.0 && poisson < 1e-10;
    Ok((
        ok,
        format!("|Q(1e-3)| {small:.2e}, max Q on [1,100] {qmax:.4}, Poissonian |Q| {poisson:.2e}"),
    ))
}

fn mandel_adjacent_jumps() -> Outcome {
    let mut jump = 0.0f64;
    for (_, sweep) in mandel_sweeps()? {
        jump = sweep.windows(2).map(|w| (w[1].1 - w[0].1).abs()).fold(jump, f64::max);
    }
    Ok((jump <= 1e-3, format!("largest adjacent jump at step 0.5: {jump:.3e} (bound 1e-3)")))
}

fn goldens() -> Outcome {
    let text = include_str!("data/goldens.json");
    let data: Value = serde_json::from_str(text).expect("goldens parse");
    let num = |v: &Value| v.as_f64().expect("number");
    let arr4 = |v: &Value| -> [f64; 4] {
        let a: Vec<f64> = v.as_array().expect("array").iter().map(num).collect();
        [a[0], a[1], a[2], a[3]]
    };
    let mut worst = 0.0f64;
    let mut rel = |got: f64, want: f64| worst = worst.max(((got - want) / want).abs());
    for g in data["hermite"].as_array().expect("hermite") {
        rel(hermite_fn(num(&g["lambda"]), num(&g["x"]))?, num(&g["value"]));
    }
    for g in data["hyp_1f4"].as_array().expect("1f4") {
        rel(hyp_1f4(arr4(&g["b"]), num(&g["w"]))?.value, num(&g["value"]));
    }
    for g in data["bessel_k"].as_array().expect("bessel") {
        rel(bessel_k(num(&g["tau"]), num(&g["z"]))?, num(&g["value"]));
    }
    let golden_worst = worst;
    let mut meijer = 0.0f64;
    for g in data["meijer_g4004"].as_array().expect("meijer") {
        let got = meijer_g4004(arr4(&g["b"]), num(&g["y"]), &QuadConfig::default())?;
        meijer = meijer.max(((got - num(&g["value"])) / num(&g["value"])).abs());
    }
    let mut state = 0.0f64;
    for g in data["c0"].as_array().expect("c0") {
        let nu = Nu::from_value(g["nu"].as_i64().expect("nu") as i32)?;
        let s = CoherentState::new(nu, num(&g["eps"]), 2.0, c(num(&g["r"]), 0.0))?;
        state = state.max(((s.c0 - num(&g["value"])) / num(&g["value"])).abs());
    }
    for g in data["number_moments"].as_array().expect("moments") {
        let nu = Nu::from_value(g["nu"].as_i64().expect("nu") as i32)?;
        let m = number_moments(&CoherentState::new(nu, num(&g["eps"]), 2.0, c(num(&g["r"]), 0.0))?);
        state = state.max(((m.mean - num(&g["mean"])) / num(&g["mean"])).abs());
        state = state.max(((m.second - num(&g["second"])) / num(&g["second"])).abs());
    }

    // H'_l(x) = 2 l H_{l-1}(x) against a central difference.
    let h = 1e-5;
    let mut deriv = 0.0f64;
    for lambda in [-1.4, -0.5, 0.6, 1.5, 2.5] {
        for i in 0..=24 {
            let x = -3.0 + 0.25 * i as f64;
            let fd = (hermite_fn(lambda, x + h)? - hermite_fn(lambda, x - h)?) / (2.0 * h);
            let exact = 2.0 * lambda * hermite_fn(lambda - 1.0, x)?;
            deriv = deriv.max((fd - exact).abs() / exact.abs().max(1e-300));
        }
    }

    let mut seed = 0.0f64;
    for lambda in [-1.4, -0.5, 0.6, 1.5] {
        let s = SeedSolution::general(lambda, 4.0);
        let (mut num_max, mut den_max) = (0.0f64, 0.0f64);
        for x in window().xs() {
            let (r, sc) = schrodinger_residual(&s.jet(x, 3)?, 0.5 * x * x, s.energy());
            num_max = num_max.max(r.abs());
            den_max = den_max.max(sc);
        }
        seed = seed.max(num_max / den_max);
    }

    let ok = golden_worst < 1e-10 && meijer < 1e-6 && state < 1e-10 && deriv < 1e-6 && seed < 1e-10;
    Ok((
        ok,
        format!(
            "special functions {golden_worst:.2e}, Meijer-G {meijer:.2e}, state data {state:.2e}, Hermite derivative {deriv:.2e}, seed residual {seed:.2e}"
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("equivalence of the two transformations", equivalence),
        ("spectrum placement of added and moved levels", spectrum_placement),
        ("intertwiner factorization", factorization),
        ("polynomial Heisenberg algebra", ladder_algebra),
        ("kernel of the lowering operator", ladder_kernel),
        ("coherent-state eigenvalue equation", eigenvalue_equation),
        ("normalization and overlaps", normalization_and_overlap),
        ("mean energy", mean_energy),
        ("density periodicity", density_periodicity),
        ("completeness measure", measure),
        ("Wigner function", wigner_checks),
        ("Mandel parameter", mandel),
        ("Mandel parameter adjacent-jump invariant", mandel_adjacent_jumps),
        ("reference values and identities", goldens),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
