//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] holds the Taylor coefficients of a function about a point. The
//! differential operators of the engine (intertwiners of order two, ladder
//! operators of order four, Hamiltonians applied to their images) are all
//! evaluated by composing jets, so every derivative is analytic.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::Result;

/// Maximum number of Taylor coefficients carried by a jet.
pub const JET_CAP: usize = 16;

/// `f(x0 + t) = sum_k c[k] t^k`, truncated after `len` coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; JET_CAP],
    len: usize,
}

impl Jet {
    pub fn zero(len: usize) -> Self {
        assert!((1..=JET_CAP).contains(&len), "jet length {len} out of range");
        Self {
            c: [0.0; JET_CAP],
            len,
        }
    }

    pub fn constant(value: f64, len: usize) -> Self {
        let mut j = Self::zero(len);
        j.c[0] = value;
        j
    }

    /// The identity function `x` expanded about `x0`.
    pub fn variable(x0: f64, len: usize) -> Self {
        let mut j = Self::constant(x0, len);
        if len > 1 {
            j.c[1] = 1.0;
        }
        j
    }

    /// Builds a jet from derivative values `f, f', f'', ...`.
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        let mut j = Self::zero(derivs.len());
        let mut fact = 1.0;
        for (k, d) in derivs.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            j.c[k] = d / fact;
        }
        j
    }

    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        let mut j = Self::zero(coeffs.len());
        j.c[..coeffs.len()].copy_from_slice(coeffs);
        j
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.len]
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        assert!(k < self.len, "derivative {k} beyond jet length {}", self.len);
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.c[k] * fact
    }

    /// Jet of `f'`, one coefficient shorter.
    pub fn differentiate(&self) -> Self {
        assert!(self.len >= 2, "cannot differentiate a length-1 jet");
        let mut j = Self::zero(self.len - 1);
        for k in 0..self.len - 1 {
            j.c[k] = (k + 1) as f64 * self.c[k + 1];
        }
        j
    }

    pub fn truncate(&self, len: usize) -> Self {
        let len = len.min(self.len);
        let mut j = Self::zero(len);
        j.c[..len].copy_from_slice(&self.c[..len]);
        j
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut j = *self;
        for v in &mut j.c[..j.len] {
            *v *= s;
        }
        j
    }

    /// Jet of `1/f`; the caller guarantees `f(x0) != 0`.
    pub fn recip(&self) -> Self {
        let mut r = Self::zero(self.len);
        let a0 = self.c[0];
        r.c[0] = 1.0 / a0;
        for k in 1..self.len {
            let s: f64 = (1..=k).map(|i| self.c[i] * r.c[k - i]).sum();
            r.c[k] = -s / a0;
        }
        r
    }

    pub fn div(&self, other: &Self) -> Self {
        *self * other.recip()
    }

    /// Jet of `exp(f)`.
    pub fn exp(&self) -> Self {
        let mut r = Self::zero(self.len);
        r.c[0] = self.c[0].exp();
        for k in 1..self.len {
            let s: f64 = (1..=k).map(|i| i as f64 * self.c[i] * r.c[k - i]).sum();
            r.c[k] = s / k as f64;
        }
        r
    }

    /// Largest derivative magnitude, a natural scale for operator residuals.
    pub fn derivative_magnitude(&self) -> f64 {
        (0..self.len).fold(0.0f64, |m, k| m.max(self.derivative(k).abs()))
    }

    /// Largest coefficient magnitude, used as a scale for residual checks.
    pub fn magnitude(&self) -> f64 {
        self.coeffs().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let len = self.len.min(rhs.len);
        let mut j = Jet::zero(len);
        for k in 0..len {
            j.c[k] = self.c[k] + rhs.c[k];
        }
        j
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let len = self.len.min(rhs.len);
        let mut j = Jet::zero(len);
        for k in 0..len {
            j.c[k] = (0..=k).map(|i| self.c[i] * rhs.c[k - i]).sum();
        }
        j
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

/// A function that can be expanded as a jet at any point.
pub trait JetFn: Sync {
    fn jet(&self, x0: f64, len: usize) -> Result<Jet>;

    fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.jet(x, 1)?.value())
    }
}

impl<F> JetFn for F
where
    F: Fn(f64, usize) -> Result<Jet> + Sync,
{
    fn jet(&self, x0: f64, len: usize) -> Result<Jet> {
        self(x0, len)
    }
}

/// Jet of the solution of `u'' = (x^2 - 2E) u` with `u(x0) = u0`, `u'(x0) = u1`.
pub fn ode_jet(x0: f64, energy: f64, u0: f64, u1: f64, len: usize) -> Jet {
    let mut j = Jet::zero(len);
    j.c[0] = u0;
    if len > 1 {
        j.c[1] = u1;
    }
    let q0 = x0 * x0 - 2.0 * energy;
    let q1 = 2.0 * x0;
    for k in 0..len.saturating_sub(2) {
        let mut rhs = q0 * j.c[k];
        if k >= 1 {
            rhs += q1 * j.c[k - 1];
        }
        if k >= 2 {
            rhs += j.c[k - 2];
        }
        j.c[k + 2] = rhs / ((k + 2) as f64 * (k + 1) as f64);
    }
    j
}
