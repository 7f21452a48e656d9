use std::f64::consts::PI;

use clap::{Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;
use susyosc::coherent::{
    mean_energy_sweep, overlap, BasisTable, CoherentState, MeasureSpec, FIGURE_NMAX,
};
use susyosc::ladder::{LadderPair, Nu, SpectralState};
use susyosc::phase_space::{
    default_phase_grid, mandel_q_small_z, mandel_sweep, sign_changes, wigner_grid,
    wigner_marginals, CoherentSnapshot, RealState, Wavefunction, WignerGrid,
};
use susyosc::susy::{equivalence_report, SusyTransform};
use susyosc::Grid;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::Report;

pub const COMMUTATOR_TOL: f64 = 1e-5;
pub const BRACKET_TOL: f64 = 1e-6;
pub const KERNEL_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Partner potentials V1, V2 of the two transformations and V2 - V1.
    Potential,
    /// Ladder-algebra and kernel residuals; exits 3 if any exceeds its threshold.
    LadderCheck {
        /// Pair the first transformation with a second one built from this
        /// gamma instead of the configured one.
        #[arg(long, hide = true)]
        corrupt_gamma: Option<f64>,
    },
    /// Coherent-state data: density frames, overlap surface or mean energy.
    Coherent {
        #[arg(long, value_enum, default_value_t = CoherentOutput::Density)]
        what: CoherentOutput,
        /// Density frames over one period.
        #[arg(long, default_value_t = 8)]
        frames: usize,
        #[arg(long = "r-max", default_value_t = 100.0)]
        r_max: f64,
        #[arg(long = "r-step", default_value_t = 0.5)]
        r_step: f64,
    },
    /// Wigner function on a phase-space grid, long format `x,p,W`.
    Wigner {
        #[arg(long, value_enum, default_value_t = WignerState::Coherent)]
        state: WignerState,
    },
    /// Mandel Q along a |z| sweep.
    Mandel {
        #[arg(long = "r-max", default_value_t = 100.0)]
        r_max: f64,
        #[arg(long = "r-step", default_value_t = 0.5)]
        r_step: f64,
    },
    /// Moments of the completeness measure against their gamma products.
    Measure {
        #[arg(long = "s-max", default_value_t = 5)]
        s_max: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoherentOutput {
    Density,
    Overlap,
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WignerState {
    /// The coherent state of the configured subspace at time `t`.
    Coherent,
    /// Ground state at -3/2.
    Lowest,
    /// Added level at eps.
    Eps,
    /// Image of the oscillator ground state, energy 1/2.
    Image0,
}

pub fn run(command: &Command, cfg: &RunConfig) -> CliResult<()> {
    let report = match command {
        Command::Potential => potential(cfg)?,
        Command::LadderCheck { corrupt_gamma } => {
            let report = ladder_check(cfg, *corrupt_gamma)?;
            let pass = report.summary["pass"].as_bool().unwrap_or(false);
            report.emit(cfg)?;
            if !pass {
                return Err(CliError::CheckFailed(format!(
                    "ladder residuals above threshold: {}",
                    report.summary
                )));
            }
            return Ok(());
        }
        Command::Coherent { what, frames, r_max, r_step } => match what {
            CoherentOutput::Density => density(cfg, *frames)?,
            CoherentOutput::Overlap => overlap_surface(cfg)?,
            CoherentOutput::Energy => energy(cfg, &radii(*r_max, *r_step)?)?,
        },
        Command::Wigner { state } => wigner(cfg, *state)?,
        Command::Mandel { r_max, r_step } => mandel(cfg, &radii(*r_max, *r_step)?)?,
        Command::Measure { s_max } => measure(cfg, *s_max)?,
    };
    report.emit(cfg)
}

fn radii(r_max: f64, r_step: f64) -> CliResult<Vec<f64>> {
    if !(r_step > 0.0 && r_max >= 0.0 && r_max.is_finite()) {
        return Err(CliError::Config(format!("sweep r-max = {r_max}, r-step = {r_step}")));
    }
    let count = (r_max / r_step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| k as f64 * r_step).collect())
}

fn potential(cfg: &RunConfig) -> CliResult<Report> {
    let grid = cfg.grid(Grid::default())?;
    let t1 = SusyTransform::h1(cfg.eps, cfg.gamma)?;
    let t2 = SusyTransform::h2(cfg.eps, cfg.gamma)?;
    let eq = equivalence_report(cfg.eps, cfg.gamma, &grid)?;
    let mut r = Report::new("potential", vec!["x", "V1", "V2", "diff", "omega"]);
    for (x, omega) in &eq.omega_samples {
        let v1 = t1.partner_potential(*x)?;
        let v2 = t2.partner_potential(*x)?;
        r.push(vec![(*x).into(), v1.into(), v2.into(), (v2 - v1).into(), (*omega).into()]);
    }
    r.summary = json!({
        "sup_abs_diff_minus_2": eq.sup_deviation,
        "sup_abs_omega_minus_2x": eq.sup_omega_minus_2x,
        "sup_abs_omega_plus_2x": eq.sup_omega_plus_2x,
        "u_relation_residual": eq.u_relation_residual,
        "annihilation_residual": eq.annihilation_residual,
    });
    Ok(r)
}

fn state_label(s: &SpectralState) -> String {
    match s {
        SpectralState::Ladder { nu, n } => format!("ladder[nu={};n={n}]", nu.value()),
        SpectralState::Singlet => "singlet".into(),
    }
}

fn ladder_check(cfg: &RunConfig, corrupt_gamma: Option<f64>) -> CliResult<Report> {
    let grid = cfg.grid(Grid::new(-5.0, 5.0, 101)?)?;
    let t1 = SusyTransform::h1(cfg.eps, cfg.gamma)?;
    let t2 = SusyTransform::h2(cfg.eps, corrupt_gamma.unwrap_or(cfg.gamma))?;
    let pair = LadderPair::from_transforms(t1, t2)?;
    let states: Vec<SpectralState> = [Nu::Minus2, Nu::One]
        .into_iter()
        .flat_map(|nu| (1..=3).map(move |n| SpectralState::ladder(nu, n)))
        .collect();
    let pha = pair.pha_check(&states, &grid)?;
    let kernel = pair.kernel_basis(&grid)?;

    let mut r = Report::new("ladder-check", vec!["check", "state", "energy", "value", "threshold", "pass"]);
    let mut pass = true;
    let mut row = |r: &mut Report, check: &str, state: String, energy: f64, value: f64, tol: f64| {
        let ok = value.abs() <= tol;
        pass &= ok;
        r.push(vec![check.into(), state.into(), energy.into(), value.into(), tol.into(), ok.into()]);
    };
    for p in &pha.rows {
        let label = state_label(&p.state);
        row(&mut r, "commutator_lower", label.clone(), p.energy, p.commutator_lower, COMMUTATOR_TOL);
        row(&mut r, "commutator_raise", label.clone(), p.energy, p.commutator_raise, COMMUTATOR_TOL);
        row(&mut r, "bracket", label.clone(), p.energy, p.bracket_differential_rel, BRACKET_TOL);
        row(&mut r, "raise_step_minus_2", label, p.energy, p.raise_energy_step - 2.0, 1e-12);
    }
    for k in &kernel {
        let check = if k.physical { "kernel" } else { "kernel_nonphysical" };
        row(&mut r, check, k.label.clone(), k.energy, k.residual, KERNEL_TOL);
    }
    r.summary = json!({
        "pass": pass,
        "max_commutator": pha.max_commutator(),
        "max_bracket": pha.max_bracket(),
        "kernel": kernel.iter().map(|k| json!({
            "state": k.label,
            "energy": k.energy,
            "physical": k.physical,
            "normalizable": k.verdict.normalizable,
            "residual": k.residual,
        })).collect::<Vec<_>>(),
    });
    r.tolerances = json!({ "commutator": COMMUTATOR_TOL, "bracket": BRACKET_TOL, "kernel": KERNEL_TOL });
    Ok(r)
}

fn coherent_state(cfg: &RunConfig, nu: Nu) -> CliResult<CoherentState> {
    Ok(match cfg.nmax {
        Some(n) => CoherentState::truncated(nu, cfg.eps, cfg.gamma, cfg.z(), n)?,
        None => CoherentState::new(nu, cfg.eps, cfg.gamma, cfg.z())?,
    })
}

fn density(cfg: &RunConfig, frames: usize) -> CliResult<Report> {
    if frames == 0 {
        return Err(CliError::Config("frames must be positive".into()));
    }
    let grid = cfg.grid(Grid::default())?;
    let nu = cfg.nu_or(Nu::Minus2);
    let pair = LadderPair::new(cfg.eps, cfg.gamma)?;
    let s = coherent_state(cfg, nu)?;
    let table = BasisTable::new(&pair, nu, s.nmax(), &grid)?;
    let mut r = Report::new("coherent-density", vec!["x", "t", "rho"]);
    let mut integrals = Vec::with_capacity(frames);
    for k in 0..frames {
        let t = cfg.t + PI * k as f64 / frames as f64;
        let rho = s.density_on(&table, t)?;
        integrals.push(rho.integral());
        for (i, v) in rho.values.iter().enumerate() {
            r.push(vec![grid.x(i).into(), t.into(), (*v).into()]);
        }
    }
    let e = s.mean_energy()?;
    r.summary = json!({
        "nu": nu.value(),
        "nmax": s.nmax(),
        "norm_sq": s.norm_sq(),
        "frame_integrals": integrals,
        "mean_energy": e,
    });
    Ok(r)
}

fn overlap_surface(cfg: &RunConfig) -> CliResult<Report> {
    let offsets = cfg.grid(Grid::new(-4.0, 4.0, 101)?)?;
    let nu = cfg.nu_or(Nu::Minus2);
    let zp = cfg.z();
    let reference = CoherentState::new(nu, cfg.eps, cfg.gamma, zp)?;
    let mut r = Report::new("coherent-overlap", vec!["re", "im", "modulus", "phase"]);
    let mut peak = (0.0f64, zp);
    for u in offsets.xs() {
        for v in offsets.xs() {
            let z = zp + Complex64::new(u, v);
            let s = CoherentState::new(nu, cfg.eps, cfg.gamma, z)?;
            let o = overlap(&reference, &s)?;
            if o.norm() > peak.0 {
                peak = (o.norm(), z);
            }
            r.push(vec![z.re.into(), z.im.into(), o.norm().into(), o.arg().into()]);
        }
    }
    r.summary = json!({
        "nu": nu.value(),
        "reference": [zp.re, zp.im],
        "max_modulus": peak.0,
        "argmax": [peak.1.re, peak.1.im],
    });
    Ok(r)
}

fn energy(cfg: &RunConfig, radii: &[f64]) -> CliResult<Report> {
    let mut r = Report::new(
        "coherent-energy",
        vec!["nu", "|z|", "direct", "closed_form", "closed_form_alt"],
    );
    let mut monotone = true;
    for nu in cfg.nus() {
        let sweep = mean_energy_sweep(nu, cfg.eps, radii)?;
        monotone &= sweep.windows(2).all(|w| w[1].1.direct >= w[0].1.direct);
        for (z, e) in sweep {
            r.push(vec![nu.value().into(), z.into(), e.direct.into(), e.closed_form.into(), e.closed_form_alt.into()]);
        }
    }
    r.summary = json!({ "eps": cfg.eps, "monotone": monotone });
    Ok(r)
}

fn wigner_report<W: Wavefunction>(f: &W, grid: &Grid, label: &str) -> CliResult<Report> {
    let g = *grid;
    let w: WignerGrid = wigner_grid(f, &g, &g)?;
    let marg = wigner_marginals(&w, f)?;
    let mut r = Report::new("wigner", vec!["x", "p", "W"]);
    for i in 0..g.points {
        for j in 0..g.points {
            r.push(vec![g.x(i).into(), g.x(j).into(), w.at(i, j).into()]);
        }
    }
    let mid = g.xs().iter().position(|x| x.abs() < 1e-12);
    r.summary = json!({
        "state": label,
        "min": marg.min,
        "max": w.max(),
        "mass": marg.mass,
        "marginal_error": marg.marginal_error,
        "max_imag": marg.max_imag,
        "y_points": w.y_points,
        "sign_changes_p0": mid.map(|j| sign_changes(&w.cut_at_p(g.x(j)), 1e-8)),
    });
    Ok(r)
}

fn wigner(cfg: &RunConfig, which: WignerState) -> CliResult<Report> {
    let (default_x, _) = default_phase_grid();
    let grid = cfg.grid(default_x)?;
    let pair = LadderPair::new(cfg.eps, cfg.gamma)?;
    match which {
        WignerState::Coherent => {
            let nu = cfg.nu_or(Nu::Minus2);
            let nmax = cfg.nmax.unwrap_or(FIGURE_NMAX);
            let s = CoherentState::truncated(nu, cfg.eps, cfg.gamma, cfg.z(), nmax)?;
            let basis = pair.basis_fns(nu, nmax)?;
            let snap = CoherentSnapshot { state: &s, basis: &basis, t: cfg.t };
            wigner_report(&snap, &grid, &format!("coherent[nu={}]", nu.value()))
        }
        WignerState::Lowest => {
            let f = pair.t1.missing_normalized(2)?;
            wigner_report(&RealState(&f), &grid, "lowest")
        }
        WignerState::Eps => {
            let f = pair.t1.missing_normalized(1)?;
            wigner_report(&RealState(&f), &grid, "eps")
        }
        WignerState::Image0 => {
            let f = pair.t1.eigenfunction(0)?;
            wigner_report(&RealState(&f), &grid, "image0")
        }
    }
}

fn mandel(cfg: &RunConfig, radii: &[f64]) -> CliResult<Report> {
    let mut r = Report::new("mandel", vec!["nu", "|z|", "Q"]);
    let mut per_nu = Vec::new();
    for nu in cfg.nus() {
        let sweep = mandel_sweep(nu, cfg.eps, cfg.gamma, radii)?;
        let max_q = sweep.iter().filter(|s| s.0 >= 1.0).map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        per_nu.push(json!({
            "nu": nu.value(),
            "max_q_from_1": max_q,
            "small_z_slope": mandel_q_small_z(nu, cfg.eps, 1.0)?,
        }));
        for (z, q) in sweep {
            r.push(vec![nu.value().into(), z.into(), q.into()]);
        }
    }
    r.summary = json!({ "subspaces": per_nu });
    Ok(r)
}

fn measure(cfg: &RunConfig, s_max: usize) -> CliResult<Report> {
    let nu = cfg.nu_or(Nu::One);
    let m = MeasureSpec::new(nu, cfg.eps)?;
    let rows = m.moments(s_max)?;
    let res = m.resolution_block(2)?;
    let mut r = Report::new("measure", vec!["s", "quadrature", "gamma_product", "rel_error"]);
    for row in &rows {
        r.push(vec![row.s.into(), row.quadrature_value.into(), row.gamma_product.into(), row.rel_error.into()]);
    }
    r.summary = json!({
        "nu": nu.value(),
        "params": m.params(),
        "max_rel_error": rows.iter().map(|r| r.rel_error).fold(0.0f64, f64::max),
        "resolution_max_deviation": res.max_deviation,
        "resolution_radius": res.radius,
    });
    Ok(r)
}
