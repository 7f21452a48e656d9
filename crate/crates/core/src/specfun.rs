//! Special-function kernel.
//!
//! Every gamma factor goes through [`recip_gamma`], which is entire, so the
//! pole cases that switch off terms of the Hermite-function formula come out
//! as exact zeros instead of NaN.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_real_line, QuadConfig};

pub use statrs::function::gamma::{gamma, ln_gamma};

/// Value of a convergent series together with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    /// Magnitude of the first omitted term.
    pub truncation_estimate: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesConfig {
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Positive arguments above this use the large-argument expansion of
    /// `1F1` when it is accurate to `rel_tol`.
    pub asymptotic_threshold: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-16,
            max_terms: 10_000,
            asymptotic_threshold: 30.0,
        }
    }
}

fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.floor()
}

/// `sin(pi x)` with exact argument reduction.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    if r == 0.0 || r.abs() == 1.0 {
        0.0
    } else if r.abs() == 0.5 {
        r.signum()
    } else {
        (PI * r).sin()
    }
}

/// `1 / Gamma(x)`, exactly zero at the poles of Gamma.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x == x.floor() && x <= 30.0 {
        // Exact reciprocal factorial for small positive integers.
        return 1.0 / (1..x as u64).map(|k| k as f64).product::<f64>();
    }
    if x >= 0.5 {
        let g = gamma(x);
        if g.is_infinite() {
            0.0
        } else {
            1.0 / g
        }
    } else {
        // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi.
        sin_pi(x) * gamma(1.0 - x) / PI
    }
}

/// Confluent hypergeometric function `1F1(a; b; x)` with default settings.
pub fn kummer_1f1(a: f64, b: f64, x: f64) -> Result<SeriesResult> {
    kummer_1f1_with(a, b, x, &SeriesConfig::default())
}

pub fn kummer_1f1_with(a: f64, b: f64, x: f64, cfg: &SeriesConfig) -> Result<SeriesResult> {
    let terminating = is_nonpositive_integer(a);
    if is_nonpositive_integer(b) && !(terminating && a >= b) {
        return Err(Error::PoleAtB { b });
    }
    if x == 0.0 || a == 0.0 {
        return Ok(SeriesResult {
            value: 1.0,
            terms_used: 1,
            truncation_estimate: 0.0,
        });
    }
    if terminating {
        return kummer_maclaurin(a, b, x, cfg);
    }
    if x < 0.0 {
        // Kummer's transformation keeps all terms of one sign.
        let r = kummer_1f1_with(b - a, b, -x, cfg)?;
        let scale = x.exp();
        return Ok(SeriesResult {
            value: scale * r.value,
            terms_used: r.terms_used,
            truncation_estimate: scale * r.truncation_estimate,
        });
    }
    if x > cfg.asymptotic_threshold {
        if let Some(r) = kummer_asymptotic(a, b, x, cfg) {
            return Ok(r);
        }
    }
    kummer_maclaurin(a, b, x, cfg)
}

fn kummer_maclaurin(a: f64, b: f64, x: f64, cfg: &SeriesConfig) -> Result<SeriesResult> {
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 0..cfg.max_terms {
        let nf = n as f64;
        term *= (a + nf) / (b + nf) * x / (nf + 1.0);
        sum += term;
        if term == 0.0 {
            return Ok(SeriesResult {
                value: sum,
                terms_used: n + 1,
                truncation_estimate: 0.0,
            });
        }
        let next_ratio = ((a + nf + 1.0) * x / ((b + nf + 1.0) * (nf + 2.0))).abs();
        if term.abs() <= cfg.rel_tol * sum.abs() && next_ratio < 1.0 {
            return Ok(SeriesResult {
                value: sum,
                terms_used: n + 2,
                truncation_estimate: (term * next_ratio).abs(),
            });
        }
    }
    Err(Error::NonConvergent {
        terms: cfg.max_terms,
        last_term: term,
    })
}

/// Large positive `x`: `Gamma(b)/Gamma(a) e^x x^(a-b) sum (b-a)_k (1-a)_k / (k! x^k)`.
///
/// Returns `None` when the divergent tail cannot reach `rel_tol` or when the
/// recessive `x^(-a)` contribution is not negligible.
fn kummer_asymptotic(a: f64, b: f64, x: f64, cfg: &SeriesConfig) -> Option<SeriesResult> {
    let ra = recip_gamma(a);
    if ra == 0.0 {
        return None;
    }
    let mut sum: f64 = 1.0;
    let mut term: f64 = 1.0;
    let mut converged = None;
    for k in 0..cfg.max_terms.min(2 * x as usize + 10) {
        let kf = k as f64;
        let next = term * (b - a + kf) * (1.0 - a + kf) / ((kf + 1.0) * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        if term.abs() <= cfg.rel_tol * sum.abs() {
            converged = Some((k + 2, term.abs()));
            break;
        }
        sum += term;
    }
    let (terms_used, estimate) = converged?;
    let gb = gamma(b);
    let prefactor = gb * ra * x.exp() * x.powf(a - b);
    let recessive = (gb * recip_gamma(b - a)).abs() * x.powf(-a);
    let value = prefactor * sum;
    if !value.is_finite() || recessive > cfg.rel_tol * value.abs() {
        return None;
    }
    Some(SeriesResult {
        value,
        terms_used,
        truncation_estimate: (prefactor * estimate).abs(),
    })
}

/// Kummer-series form of `(H_lambda(x), H_lambda(-x))`. Accurate on the
/// growing side; on the decaying side the two terms cancel like `e^{x^2}`.
fn hermite_pair_kummer(lambda: f64, x: f64) -> Result<(f64, f64)> {
    let x2 = x * x;
    let base = 2f64.powf(lambda) * PI.sqrt();
    let even_pref = base * recip_gamma(0.5 * (1.0 - lambda));
    // Gamma(-1/2) = -2 sqrt(pi)
    let odd_pref = -2.0 * base * recip_gamma(-0.5 * lambda);
    let even = if even_pref != 0.0 {
        even_pref * kummer_1f1(-0.5 * lambda, 0.5, x2)?.value
    } else {
        0.0
    };
    let odd = if odd_pref != 0.0 {
        odd_pref * x * kummer_1f1(0.5 * (1.0 - lambda), 1.5, x2)?.value
    } else {
        0.0
    };
    Ok((even + odd, even - odd))
}

/// Large-`x` expansion `H_lambda(x) ~ (2x)^lambda sum_k (-1)^k (-lambda)_{2k} / (k! (2x)^{2k})`,
/// or `None` if it cannot reach full precision at this `x`.
fn hermite_asymptotic(lambda: f64, x: f64) -> Option<f64> {
    let inv = 1.0 / (4.0 * x * x);
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    for k in 0..200 {
        let kf = k as f64;
        let next = -term * (2.0 * kf - lambda) * (2.0 * kf + 1.0 - lambda) / (kf + 1.0) * inv;
        if next == 0.0 || next.abs() <= 1e-17 * sum.abs() {
            return Some((2.0 * x).powf(lambda) * (sum + next));
        }
        if next.abs() > term.abs() {
            return None;
        }
        sum += next;
        term = next;
    }
    None
}

const RECESSIVE_SWITCH: f64 = 1.0;
const RECESSIVE_START: f64 = 8.0;
const RECESSIVE_STEP: f64 = 0.125;
const RECESSIVE_TERMS: usize = 24;

/// `H_lambda(x)` for `x >= 1`, where it decays relative to the other
/// solution: start from the asymptotic series and integrate
/// `y'' = 2x y' - 2 lambda y` inward, the stable direction.
fn hermite_recessive(lambda: f64, x: f64) -> Option<f64> {
    if let Some(v) = hermite_asymptotic(lambda, x) {
        return Some(v);
    }
    let start = RECESSIVE_START.max(x);
    let mut y = hermite_asymptotic(lambda, start)?;
    let mut dy = 2.0 * lambda * hermite_asymptotic(lambda - 1.0, start)?;
    let steps = ((start - x) / RECESSIVE_STEP).ceil().max(1.0);
    let h = (x - start) / steps;
    let mut x0 = start;
    let mut c = [0.0f64; RECESSIVE_TERMS];
    for _ in 0..steps as usize {
        c[0] = y;
        c[1] = dy;
        for k in 0..RECESSIVE_TERMS - 2 {
            let kf = k as f64;
            c[k + 2] = (2.0 * x0 * (kf + 1.0) * c[k + 1] + 2.0 * (kf - lambda) * c[k])
                / ((kf + 2.0) * (kf + 1.0));
        }
        let mut ny = 0.0;
        let mut ndy = 0.0;
        for k in (0..RECESSIVE_TERMS).rev() {
            ny = ny * h + c[k];
            if k > 0 {
                ndy = ndy * h + k as f64 * c[k];
            }
        }
        y = ny;
        dy = ndy;
        x0 += h;
    }
    Some(y)
}

/// The pair `(H_lambda(x), H_lambda(-x))`.
pub fn hermite_pair(lambda: f64, x: f64) -> Result<(f64, f64)> {
    let (plus, minus) = hermite_pair_kummer(lambda, x)?;
    let polynomial = lambda >= 0.0 && lambda == lambda.floor();
    if polynomial || x.abs() < RECESSIVE_SWITCH {
        return Ok((plus, minus));
    }
    match hermite_recessive(lambda, x.abs()) {
        Some(r) if x > 0.0 => Ok((r, minus)),
        Some(r) => Ok((plus, r)),
        None => Ok((plus, minus)),
    }
}

/// Hermite function of real order `H_lambda(x)`.
pub fn hermite_fn(lambda: f64, x: f64) -> Result<f64> {
    Ok(hermite_pair(lambda, x)?.0)
}

/// `1Fq(a; b_1..b_q; w)` summed to convergence.
pub fn hyp_1fq(a: f64, b: &[f64], w: f64, cfg: &SeriesConfig) -> Result<SeriesResult> {
    if let Some(&bad) = b.iter().find(|&&bi| is_nonpositive_integer(bi)) {
        return Err(Error::PoleAtB { b: bad });
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 0..cfg.max_terms {
        let nf = n as f64;
        let denom: f64 = b.iter().map(|bi| bi + nf).product::<f64>() * (nf + 1.0);
        term *= (a + nf) * w / denom;
        sum += term;
        if term == 0.0 {
            return Ok(SeriesResult {
                value: sum,
                terms_used: n + 1,
                truncation_estimate: 0.0,
            });
        }
        let next_ratio = ((a + nf + 1.0) * w
            / (b.iter().map(|bi| bi + nf + 1.0).product::<f64>() * (nf + 2.0)))
            .abs();
        if term.abs() <= cfg.rel_tol * sum.abs() && next_ratio < 1.0 {
            return Ok(SeriesResult {
                value: sum,
                terms_used: n + 2,
                truncation_estimate: (term * next_ratio).abs(),
            });
        }
    }
    Err(Error::NonConvergent {
        terms: cfg.max_terms,
        last_term: term,
    })
}

/// `1Fq` at a complex argument; same stopping rule as [`hyp_1fq`].
pub fn hyp_1fq_complex(a: f64, b: &[f64], w: Complex64, cfg: &SeriesConfig) -> Result<Complex64> {
    if let Some(&bad) = b.iter().find(|&&bi| is_nonpositive_integer(bi)) {
        return Err(Error::PoleAtB { b: bad });
    }
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for n in 0..cfg.max_terms {
        let nf = n as f64;
        let denom: f64 = b.iter().map(|bi| bi + nf).product::<f64>() * (nf + 1.0);
        term *= w * ((a + nf) / denom);
        sum += term;
        if term.norm() == 0.0 {
            return Ok(sum);
        }
        let next_ratio = ((a + nf + 1.0) * w.norm()
            / (b.iter().map(|bi| bi + nf + 1.0).product::<f64>() * (nf + 2.0)))
            .abs();
        if term.norm() <= cfg.rel_tol * sum.norm() && next_ratio < 1.0 {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergent {
        terms: cfg.max_terms,
        last_term: term.norm(),
    })
}

/// `1F4(1; b1, b2, b3, b4; w) = sum_n w^n / [(b1)_n (b2)_n (b3)_n (b4)_n]`.
pub fn hyp_1f4(b: [f64; 4], w: f64) -> Result<SeriesResult> {
    hyp_1fq(1.0, &b, w, &SeriesConfig::default())
}

/// First `count` partial sums of [`hyp_1f4`].
pub fn hyp_1f4_partial_sums(b: [f64; 4], w: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut sum = 0.0;
    let mut term = 1.0;
    for n in 0..count {
        sum += term;
        out.push(sum);
        let nf = n as f64;
        term *= w / b.iter().map(|bi| bi + nf).product::<f64>();
    }
    out
}

// Taylor coefficients of 1/Gamma(z) = sum_k C[k] z^(k+1).
const RGAMMA_SERIES: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// Temme's auxiliary gamma quantities for `|mu| <= 1/2`:
/// `(gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu))`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let m2 = mu * mu;
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    let mut pw = 1.0;
    for k in 0..13 {
        gam2 += RGAMMA_SERIES[2 * k] * pw;
        gam1 -= RGAMMA_SERIES[2 * k + 1] * pw;
        pw *= m2;
    }
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

/// Modified Bessel function of the third kind `K_tau(z)` for real order.
///
/// Temme's series below `z = 2`, Steed's continued fraction above, then
/// forward recurrence in the order.
pub fn bessel_k(tau: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain {
            function: "bessel_k",
            arg: z,
        });
    }
    const EPS: f64 = 1e-16;
    const MAXIT: usize = 10_000;
    let nu = tau.abs();
    let nl = (nu + 0.5).floor() as usize;
    let mu = nu - nl as f64;
    let mu2 = mu * mu;
    let xi = 1.0 / z;
    let xi2 = 2.0 * xi;
    let (mut k_mu, mut k_mu1);
    if z < 2.0 {
        let x2 = 0.5 * z;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..=MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergent {
                terms: MAXIT,
                last_term: c * ff,
            });
        }
        k_mu = sum;
        k_mu1 = sum1 * xi2;
    } else {
        let mut b = 2.0 * (1.0 + z);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..=MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergent {
                terms: MAXIT,
                last_term: delh,
            });
        }
        h *= a1;
        k_mu = (PI / (2.0 * z)).sqrt() * (-z).exp() / s;
        k_mu1 = k_mu * (mu + z + 0.5 - h) * xi;
    }
    for i in 1..=nl {
        let next = (mu + i as f64) * xi2 * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = next;
    }
    Ok(k_mu)
}

/// `G^{2,0}_{0,2}(y | a, b) = 2 y^{(a+b)/2} K_{a-b}(2 sqrt(y))`.
pub fn meijer_g2002(a: f64, b: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain {
            function: "meijer_g2002",
            arg: y,
        });
    }
    let k = bessel_k(a - b, 2.0 * y.sqrt())?;
    if k == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * y.powf(0.5 * (a + b)) * k)
}

/// `G^{4,0}_{0,4}(y | b1, b2, b3, b4)` as the Mellin convolution
/// `int_0^inf g(y/t) h(t) dt/t` of `g = G^{2,0}_{0,2}(. | b1, b2)` and
/// `h = G^{2,0}_{0,2}(. | b3, b4)`, integrated in `v = ln t`.
pub fn meijer_g4004(b: [f64; 4], y: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain {
            function: "meijer_g4004",
            arg: y,
        });
    }
    let integrand = |v: f64| -> Result<f64> {
        let t = v.exp();
        let inner = y / t;
        if t == 0.0 || !t.is_finite() || inner == 0.0 || !inner.is_finite() {
            return Ok(0.0);
        }
        // Evaluate the exponentially small factor first.
        if v < 0.0 {
            let g = meijer_g2002(b[0], b[1], inner)?;
            if g == 0.0 {
                return Ok(0.0);
            }
            Ok(g * meijer_g2002(b[2], b[3], t)?)
        } else {
            let h = meijer_g2002(b[2], b[3], t)?;
            if h == 0.0 {
                return Ok(0.0);
            }
            Ok(h * meijer_g2002(b[0], b[1], inner)?)
        }
    };
    // Center the map on the saddle of the integrand, near t = sqrt(y).
    let shift = 0.5 * y.ln();
    Ok(integrate_real_line(|u| integrand(u + shift), cfg)?.value)
}
