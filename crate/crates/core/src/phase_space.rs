//! Wigner quasiprobability distributions and photon-number statistics.
//!
//! `W(x, p) = (1/2pi) int conj(psi(x - y/2)) psi(x + y/2) e^{ipy} dy` is
//! evaluated with Simpson's rule over `y` in `[-Y, Y]`, `Y = 2 max|x| + 12`.
//! Grid fills sample the state once on a lattice of spacing `h` that contains
//! every `x` node, so that `x +- y/2` always falls on the lattice.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coherent::{pochhammer_bases, CoherentState};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::jet::JetFn;
use crate::ladder::Nu;
use crate::quadrature::simpson_weights;

/// Target lattice spacing for the `y` integration (`y` step is twice this).
pub const LATTICE_H: f64 = 0.01;
/// States are taken to vanish beyond `|x| = STATE_SUPPORT`.
pub const STATE_SUPPORT: f64 = 18.0;

/// `[-15, 15]^2` with 301 x 301 nodes, wide enough for the turning points of
/// the `|z| = 100` states.
pub fn default_phase_grid() -> (Grid, Grid) {
    let g = Grid {
        min: -15.0,
        max: 15.0,
        points: 301,
    };
    (g, g)
}

/// Half-width of the `y` window for a phase-space box reaching `|x| = xmax`.
pub fn y_window(xmax: f64) -> f64 {
    2.0 * xmax + 12.0
}

/// A complex wavefunction.
pub trait Wavefunction: Sync {
    fn amplitude(&self, x: f64) -> Result<Complex64>;
}

/// A real state given by a [`JetFn`].
pub struct RealState<'a, F: JetFn>(pub &'a F);

impl<F: JetFn> Wavefunction for RealState<'_, F> {
    fn amplitude(&self, x: f64) -> Result<Complex64> {
        Ok(Complex64::new(self.0.eval(x)?, 0.0))
    }
}

/// `U(t)|z>` in position space, from the phase-fixed basis.
pub struct CoherentSnapshot<'a, F: JetFn> {
    pub state: &'a CoherentState,
    pub basis: &'a [F],
    pub t: f64,
}

impl<F: JetFn> Wavefunction for CoherentSnapshot<'_, F> {
    fn amplitude(&self, x: f64) -> Result<Complex64> {
        self.state.wavefunction(self.basis, x, self.t)
    }
}

/// A wavefunction multiplied by a constant.
pub struct Scaled<'a, W: Wavefunction>(pub &'a W, pub Complex64);

impl<W: Wavefunction> Wavefunction for Scaled<'_, W> {
    fn amplitude(&self, x: f64) -> Result<Complex64> {
        Ok(self.0.amplitude(x)? * self.1)
    }
}

fn amplitude_or_zero<W: Wavefunction + ?Sized>(f: &W, x: f64) -> Result<Complex64> {
    if x.abs() > STATE_SUPPORT {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let v = f.amplitude(x)?;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Domain {
            function: "wavefunction",
            arg: x,
        });
    }
    Ok(v)
}

/// `W(x, p)` with the `y` integral over `[-window, window]` on `points` nodes;
/// returns the real part and the imaginary residue.
pub fn wigner_point_with<W: Wavefunction + ?Sized>(
    f: &W,
    x: f64,
    p: f64,
    window: f64,
    points: usize,
) -> Result<(f64, f64)> {
    let h = 2.0 * window / (points - 1) as f64;
    let w = simpson_weights(points, h);
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, wj) in w.iter().enumerate() {
        let y = -window + j as f64 * h;
        let corr = amplitude_or_zero(f, x - 0.5 * y)?.conj() * amplitude_or_zero(f, x + 0.5 * y)?;
        acc += corr * Complex64::from_polar(*wj, p * y);
    }
    acc /= 2.0 * PI;
    Ok((acc.re, acc.im))
}

/// `W(x, p)` with the default window `y_window(|x|)` and `y` step `2 LATTICE_H`.
pub fn wigner<W: Wavefunction + ?Sized>(f: &W, x: f64, p: f64) -> Result<f64> {
    let window = y_window(x.abs());
    let points = 2 * (window / (2.0 * LATTICE_H)).ceil() as usize + 1;
    Ok(wigner_point_with(f, x, p, window, points)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerGrid {
    pub x: Grid,
    pub p: Grid,
    /// Row-major: `values[i * p.points + j] = W(x_i, p_j)`.
    pub values: Vec<f64>,
    pub max_imag: f64,
    pub window: f64,
    pub y_points: usize,
}

impl WignerGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p.points + j]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `int W dp` at every `x` node.
    pub fn position_marginal(&self) -> Vec<f64> {
        let wp = self.p.weights();
        (0..self.x.points)
            .map(|i| (0..self.p.points).map(|j| wp[j] * self.at(i, j)).sum())
            .collect()
    }

    pub fn mass(&self) -> f64 {
        let wx = self.x.weights();
        self.position_marginal().iter().zip(&wx).map(|(m, w)| m * w).sum()
    }

    /// Values of `W(x, p0)` along the `x` axis at the `p` node nearest `p0`.
    pub fn cut_at_p(&self, p0: f64) -> Vec<f64> {
        let j = (((p0 - self.p.min) / self.p.spacing()).round().max(0.0) as usize).min(self.p.points - 1);
        (0..self.x.points).map(|i| self.at(i, j)).collect()
    }
}

/// Fills `W` on `xg x pg`.
pub fn wigner_grid<W: Wavefunction + ?Sized>(f: &W, xg: &Grid, pg: &Grid) -> Result<WignerGrid> {
    let dx = xg.spacing();
    let k = ((dx / LATTICE_H).round() as usize).max(1);
    let h = dx / k as f64;
    let xmax = xg.min.abs().max(xg.max.abs());
    let window = y_window(xmax);
    let half = (window / (2.0 * h)).ceil() as usize;
    let y_points = 2 * half + 1;
    let window = 2.0 * h * half as f64;

    // Lattice index l <-> x = xg.min + (l - offset) h.
    let offset = half;
    let count = (xg.points - 1) * k + 2 * half + 1;
    let samples = (0..count)
        .into_par_iter()
        .map(|l| amplitude_or_zero(f, xg.min + (l as f64 - offset as f64) * h))
        .collect::<Result<Vec<_>>>()?;

    let wy = simpson_weights(y_points, 2.0 * h);
    let ys: Vec<f64> = (0..y_points).map(|j| 2.0 * h * (j as f64 - half as f64)).collect();
    let ps = pg.xs();
    let trig: Vec<(f64, f64)> = ps
        .iter()
        .flat_map(|p| ys.iter().map(move |y| (p * y).sin_cos()))
        .collect();

    let rows = (0..xg.points)
        .into_par_iter()
        .map(|i| {
            let c = offset + i * k;
            let corr: Vec<Complex64> = (0..y_points)
                .map(|j| {
                    // y_j = 2h (j - half), so x +- y/2 sit at lattice c +- (j - half).
                    let d = j as isize - half as isize;
                    let lo = samples[(c as isize - d) as usize];
                    let hi = samples[(c as isize + d) as usize];
                    lo.conj() * hi * wy[j]
                })
                .collect();
            let mut row = Vec::with_capacity(ps.len());
            let mut imag = 0.0f64;
            for jp in 0..ps.len() {
                let t = &trig[jp * y_points..(jp + 1) * y_points];
                let (mut re, mut im) = (0.0, 0.0);
                for (cj, (s, co)) in corr.iter().zip(t) {
                    re += cj.re * co - cj.im * s;
                    im += cj.re * s + cj.im * co;
                }
                row.push(re / (2.0 * PI));
                imag = imag.max((im / (2.0 * PI)).abs());
            }
            (row, imag)
        })
        .collect::<Vec<_>>();

    let mut values = Vec::with_capacity(xg.points * pg.points);
    let mut max_imag = 0.0f64;
    for (row, imag) in rows {
        values.extend(row);
        max_imag = max_imag.max(imag);
    }
    Ok(WignerGrid {
        x: *xg,
        p: *pg,
        values,
        max_imag,
        window,
        y_points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalReport {
    pub mass: f64,
    pub marginal_error: f64,
    pub min: f64,
    pub max_imag: f64,
}

/// Total mass and `sup_x |int W dp - |psi(x)|^2|`.
pub fn wigner_marginals<W: Wavefunction + ?Sized>(grid: &WignerGrid, f: &W) -> Result<MarginalReport> {
    let marginal = grid.position_marginal();
    let mut err = 0.0f64;
    for (i, m) in marginal.iter().enumerate() {
        let rho = amplitude_or_zero(f, grid.x.x(i))?.norm_sqr();
        err = err.max((m - rho).abs());
    }
    Ok(MarginalReport {
        mass: grid.mass(),
        marginal_error: err,
        min: grid.min(),
        max_imag: grid.max_imag,
    })
}

/// Sign changes of a sampled cut, ignoring samples with `|v| <= floor`.
pub fn sign_changes(values: &[f64], floor: f64) -> usize {
    let mut prev = 0.0f64;
    let mut count = 0;
    for &v in values.iter().filter(|v| v.abs() > floor) {
        if prev != 0.0 && v.signum() != prev.signum() {
            count += 1;
        }
        prev = v;
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumberMoments {
    pub mean: f64,
    pub second: f64,
}

impl NumberMoments {
    pub fn variance(&self) -> f64 {
        self.second - self.mean * self.mean
    }
}

/// `<N> = sum |c_n|^2 n` and `<N^2> = sum |c_n|^2 n^2`, normalized by `sum |c_n|^2`.
pub fn number_moments_of(coeffs: &[Complex64]) -> NumberMoments {
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let (mut mean, mut second) = (0.0, 0.0);
    for (n, c) in coeffs.iter().enumerate() {
        let p = c.norm_sqr() / norm;
        mean += p * n as f64;
        second += p * (n * n) as f64;
    }
    NumberMoments { mean, second }
}

pub fn number_moments(state: &CoherentState) -> NumberMoments {
    number_moments_of(&state.coeffs)
}

/// `Q = (<N^2> - <N>^2)/<N> - 1`, accumulated as `(<N(N-1)> - <N>^2)/<N>` so
/// that small `|z|` does not cancel.
pub fn mandel_q_of(coeffs: &[Complex64]) -> Result<f64> {
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let (mut mean, mut falling) = (0.0, 0.0);
    for (n, c) in coeffs.iter().enumerate() {
        let p = c.norm_sqr() / norm;
        mean += p * n as f64;
        falling += p * (n * n.saturating_sub(1)) as f64;
    }
    if mean == 0.0 {
        return Err(Error::ZeroMeanOccupation);
    }
    Ok((falling - mean * mean) / mean)
}

pub fn mandel_q(state: &CoherentState) -> Result<f64> {
    mandel_q_of(&state.coeffs)
}

/// [`mandel_q`], with the `z -> 0` limit `Q = 0` in place of the 0/0 error.
pub fn mandel_q_or_limit(state: &CoherentState) -> Result<f64> {
    match mandel_q(state) {
        Err(Error::ZeroMeanOccupation) => Ok(0.0),
        other => other,
    }
}

/// Leading small-`|z|` behaviour `Q ~ w (2 P1/P2 - 1/P1)`, `w = |z|^2/16`,
/// with `P_n = (a)_n (b)_n (c)_n (d)_n`.
pub fn mandel_q_small_z(nu: Nu, eps: f64, r: f64) -> Result<f64> {
    let p = pochhammer_bases(nu, eps)?;
    let p1: f64 = p.iter().product();
    let p2: f64 = p.iter().map(|b| b * (b + 1.0)).product();
    Ok(r * r / 16.0 * (2.0 * p1 / p2 - 1.0 / p1))
}

/// `|z| -> Q` over a sweep, in parallel.
pub fn mandel_sweep(nu: Nu, eps: f64, gamma: f64, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    radii
        .par_iter()
        .map(|&r| {
            let s = CoherentState::new(nu, eps, gamma, Complex64::new(r, 0.0))?;
            Ok((r, mandel_q_or_limit(&s)?))
        })
        .collect()
}
