//! Harmonic oscillator `H = -1/2 d^2/dx^2 + x^2/2`: eigenfunctions, the
//! divergent `phi_m` family, first-order ladder operators and the general
//! real-energy seed solutions.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{ode_jet, Jet, JetFn};
use crate::specfun::hermite_pair;

/// Largest oscillator index supported by [`psi_n`].
pub const MAX_FOCK: usize = 200;

const RESCALE: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FockState {
    pub n: usize,
}

impl FockState {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn energy(&self) -> f64 {
        self.n as f64 + 0.5
    }
}

/// Runs the normalized recurrence
/// `psi_{k+1} = sqrt(2/(k+1)) x psi_k - sqrt(k/(k+1)) psi_{k-1}`
/// with the Gaussian factor carried as a separate logarithm, calling
/// `visit(k, value)` for every `k <= n`.
fn fock_recurrence(n: usize, x: f64, mut visit: impl FnMut(usize, f64)) -> Result<()> {
    if n > MAX_FOCK {
        return Err(Error::Overflow { n, max: MAX_FOCK });
    }
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let emit = |v: f64, log_scale: f64| {
        if v == 0.0 {
            0.0
        } else {
            v.signum() * (v.abs().ln() + log_scale).exp()
        }
    };
    visit(0, emit(cur, log_scale));
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        visit(k + 1, emit(cur, log_scale));
    }
    Ok(())
}

/// Normalized oscillator eigenfunction `psi_n(x)`.
pub fn psi_n(n: usize, x: f64) -> Result<f64> {
    let mut out = 0.0;
    fock_recurrence(n, x, |k, v| {
        if k == n {
            out = v;
        }
    })?;
    Ok(out)
}

/// `[psi_0(x), ..., psi_nmax(x)]`.
pub fn psi_all(nmax: usize, x: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(nmax + 1);
    fock_recurrence(nmax, x, |_, v| out.push(v))?;
    Ok(out)
}

/// Jet of `psi_n` about `x0`, seeded by `psi_n' = -x psi_n + sqrt(2n) psi_{n-1}`.
pub fn psi_jet(n: usize, x0: f64, len: usize) -> Result<Jet> {
    let vals = psi_all(n, x0)?;
    let p = vals[n];
    let dp = -x0 * p + if n > 0 { (2.0 * n as f64).sqrt() * vals[n - 1] } else { 0.0 };
    Ok(ode_jet(x0, n as f64 + 0.5, p, dp, len))
}

impl JetFn for FockState {
    fn jet(&self, x0: f64, len: usize) -> Result<Jet> {
        psi_jet(self.n, x0, len)
    }
}

/// `P_m(x) = (-i)^m H_m(ix)` and `P_{m-1}(x)`, from
/// `P_{m+1} = 2x P_m + 2m P_{m-1}`.
fn phi_polynomials(m: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..m {
        let next = 2.0 * x * cur + 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `phi_m(x) = e^{x^2/2} (-i)^m H_m(ix)`, a nodeless-for-even-`m` solution at
/// energy `-(m + 1/2)`.
pub fn phi_m(m: usize, x: f64) -> f64 {
    (0.5 * x * x).exp() * phi_polynomials(m, x).0
}

fn phi_jet(m: usize, x0: f64, len: usize) -> Jet {
    let (p, pm1) = phi_polynomials(m, x0);
    let e = (0.5 * x0 * x0).exp();
    let dp = e * (x0 * p + 2.0 * m as f64 * pm1);
    ode_jet(x0, -(m as f64 + 0.5), e * p, dp, len)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Raise,
    Lower,
}

/// First-order ladder operators on the Fock basis.
pub fn ladder_a(direction: Direction, state: FockState) -> (f64, FockState) {
    match direction {
        Direction::Raise => (((state.n + 1) as f64).sqrt(), FockState::new(state.n + 1)),
        Direction::Lower if state.n == 0 => (0.0, state),
        Direction::Lower => ((state.n as f64).sqrt(), FockState::new(state.n - 1)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SeedKind {
    /// `e^{-x^2/2} [H_lambda(x) + gamma H_lambda(-x)]`.
    General,
    /// The normalized eigenfunction `psi_n`.
    Fock { n: usize },
    /// The divergent solution `phi_m`.
    Phi { m: usize },
}

/// A solution of `-u''/2 + x^2 u/2 = (lambda + 1/2) u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeedSolution {
    pub lambda: f64,
    pub gamma: f64,
    pub kind: SeedKind,
}

impl SeedSolution {
    pub fn general(lambda: f64, gamma: f64) -> Self {
        Self {
            lambda,
            gamma,
            kind: SeedKind::General,
        }
    }

    pub fn fock(n: usize) -> Self {
        Self {
            lambda: n as f64,
            gamma: 0.0,
            kind: SeedKind::Fock { n },
        }
    }

    pub fn phi(m: usize) -> Self {
        Self {
            lambda: -(m as f64) - 1.0,
            gamma: 0.0,
            kind: SeedKind::Phi { m },
        }
    }

    pub fn energy(&self) -> f64 {
        self.lambda + 0.5
    }
}

impl JetFn for SeedSolution {
    fn jet(&self, x0: f64, len: usize) -> Result<Jet> {
        match self.kind {
            SeedKind::Fock { n } => psi_jet(n, x0, len),
            SeedKind::Phi { m } => Ok(phi_jet(m, x0, len)),
            SeedKind::General => {
                let (lambda, gamma) = (self.lambda, self.gamma);
                let (h, hm) = hermite_pair(lambda, x0)?;
                // d/dx H_l(-x) = -2 l H_{l-1}(-x)
                let (d, dm) = hermite_pair(lambda - 1.0, x0)?;
                let g = (-0.5 * x0 * x0).exp();
                let s = h + gamma * hm;
                let u = g * s;
                let du = g * (-x0 * s + 2.0 * lambda * (d - gamma * dm));
                Ok(ode_jet(x0, self.energy(), u, du, len))
            }
        }
    }
}

/// `u`, `u'` or `u''` of a seed at `x`.
pub fn seed_value(seed: &SeedSolution, x: f64, deriv_order: usize) -> Result<f64> {
    if deriv_order > 2 {
        return Err(Error::InvalidParameter(format!(
            "seed derivative order {deriv_order} (at most 2)"
        )));
    }
    Ok(seed.jet(x, 3)?.derivative(deriv_order))
}

/// `-u''/2 + V u - E u` from a jet, with the scale of its largest term.
pub fn schrodinger_residual(j: &Jet, potential: f64, energy: f64) -> (f64, f64) {
    let u = j.value();
    let upp = j.derivative(2);
    let r = -0.5 * upp + potential * u - energy * u;
    let scale = (0.5 * upp).abs() + (potential * u).abs() + (energy * u).abs();
    (r, scale)
}
