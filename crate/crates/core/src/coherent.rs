//! Barut-Girardello coherent states `L- |z> = z |z>` on the ladders `nu = -2`
//! and `nu = 1`, their overlaps, mean energy, time evolution and position
//! densities, and the measure of their resolution of the identity.
//!
//! With Pochhammer bases `a = (2nu - 2eps + 5)/4`, `b = (2nu - 2eps + 1)/4`,
//! `c = (nu + 4)/2`, `d = (nu + 1)/2` and `w = |z|^2/16`,
//! `c_n = c0 (z/4)^n / sqrt((a)_n (b)_n (c)_n (d)_n)` and
//! `c0 = 1F4(1; a, b, c, d; w)^(-1/2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::jet::JetFn;
use crate::ladder::{n4, LadderPair, Nu, SpectralState};
use crate::quadrature::{gauss_legendre, integrate_real_line, QuadConfig};
use crate::specfun::{hyp_1f4, hyp_1fq, hyp_1fq_complex, meijer_g4004, recip_gamma, SeriesConfig};

/// Adaptive truncation stops once `|c_n|^2` falls below this.
pub const TAIL_TOL: f64 = 1e-16;
/// Truncation used for the published densities and Wigner functions.
pub const FIGURE_NMAX: usize = 12;
const MAX_TERMS: usize = 2000;

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > -1.5 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!("eps = {eps} outside (-3/2, 1/2)")));
    }
    Ok(())
}

/// `[a, b, c, d]` for the ladder `nu`.
pub fn pochhammer_bases(nu: Nu, eps: f64) -> Result<[f64; 4]> {
    check_eps(eps)?;
    let v = nu.value() as f64;
    let p = [
        (2.0 * v - 2.0 * eps + 5.0) / 4.0,
        (2.0 * v - 2.0 * eps + 1.0) / 4.0,
        (v + 4.0) / 2.0,
        (v + 1.0) / 2.0,
    ];
    if let Some(&base) = p.iter().find(|b| **b <= 0.0 && b.fract() == 0.0) {
        return Err(Error::ParameterPole { base });
    }
    Ok(p)
}

/// `c0 = 1F4(1; a, b, c, d; r^2/16)^(-1/2)`.
pub fn normalization_c0(nu: Nu, eps: f64, r: f64) -> Result<f64> {
    let p = pochhammer_bases(nu, eps)?;
    Ok(hyp_1f4(p, r * r / 16.0)?.value.powf(-0.5))
}

/// `(z/4)^n / sqrt((a)_n (b)_n (c)_n (d)_n)` for `n = 0..=nmax`.
fn raw_coefficients(p: &[f64; 4], z: Complex64, nmax: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(nmax + 1);
    let mut c = Complex64::new(1.0, 0.0);
    out.push(c);
    for n in 1..=nmax {
        let m = (n - 1) as f64;
        let prod: f64 = p.iter().map(|b| b + m).product();
        c *= z / 4.0 / prod.sqrt();
        out.push(c);
    }
    out
}

/// Normalized expansion coefficients `c_0..c_nmax`.
pub fn coefficients(nu: Nu, eps: f64, z: Complex64, nmax: usize) -> Result<Vec<Complex64>> {
    if nmax < 1 {
        return Err(Error::InvalidParameter("nmax must be at least 1".into()));
    }
    let p = pochhammer_bases(nu, eps)?;
    let c0 = normalization_c0(nu, eps, z.norm())?;
    Ok(raw_coefficients(&p, z, nmax).into_iter().map(|c| c * c0).collect())
}

/// Smallest `nmax` past the peak of `|c_n|^2` with `|c_nmax|^2 < TAIL_TOL`.
pub fn adaptive_nmax(nu: Nu, eps: f64, r: f64) -> Result<usize> {
    let p = pochhammer_bases(nu, eps)?;
    let c0 = normalization_c0(nu, eps, r)?;
    let w = r * r / 16.0;
    let mut weight = c0 * c0;
    for n in 1..MAX_TERMS {
        let m = (n - 1) as f64;
        let ratio = w / p.iter().map(|b| b + m).product::<f64>();
        weight *= ratio;
        if weight < TAIL_TOL && ratio < 1.0 {
            return Ok(n);
        }
    }
    Err(Error::NonConvergent {
        terms: MAX_TERMS,
        last_term: weight,
    })
}

/// Mean energy by three routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEnergy {
    /// `sum |c_n|^2 (nu + 2n + 1/2)`.
    pub direct: f64,
    /// `nu + 1/2 + 2w/(abcd) 1F4(2; a+1, b+1, c+1, d+1; w) / 1F4(1; a, b, c, d; w)`.
    pub closed_form: f64,
    /// The same ratio with the upper parameters `(2nu - 2eps + 8)/4` and `(nu + 5)/2`
    /// in place of `a + 1` and `c`.
    pub closed_form_alt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherentState {
    pub nu: Nu,
    pub eps: f64,
    pub gamma: f64,
    pub z: Complex64,
    pub pochhammer: [f64; 4],
    pub c0: f64,
    pub coeffs: Vec<Complex64>,
}

impl CoherentState {
    /// State truncated where `|c_n|^2 < TAIL_TOL`.
    pub fn new(nu: Nu, eps: f64, gamma: f64, z: Complex64) -> Result<Self> {
        let nmax = adaptive_nmax(nu, eps, z.norm())?;
        Self::truncated(nu, eps, gamma, z, nmax)
    }

    /// State with exactly `nmax + 1` coefficients and the untruncated `c0`.
    pub fn truncated(nu: Nu, eps: f64, gamma: f64, z: Complex64, nmax: usize) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("gamma = {gamma} must be positive")));
        }
        let pochhammer = pochhammer_bases(nu, eps)?;
        let c0 = normalization_c0(nu, eps, z.norm())?;
        Ok(Self {
            nu,
            eps,
            gamma,
            z,
            pochhammer,
            c0,
            coeffs: coefficients(nu, eps, z, nmax)?,
        })
    }

    pub fn nmax(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn rung_energy(&self, n: usize) -> f64 {
        SpectralState::ladder(self.nu, n).energy(self.eps)
    }

    /// `||L- |z> - z |z>||` with `L-` applied through `sqrt(N4)`; the last
    /// component, which needs the truncated `c_{nmax+1}`, is excluded.
    pub fn eigen_residual(&self) -> f64 {
        (0..self.nmax())
            .map(|m| {
                let lowered = self.coeffs[m + 1] * n4(self.eps, self.rung_energy(m + 1)).sqrt();
                (lowered - self.z * self.coeffs[m]).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn mean_energy(&self) -> Result<MeanEnergy> {
        let direct = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c.norm_sqr() * self.rung_energy(n))
            .sum::<f64>()
            / self.norm_sq();
        let [a, b, c, d] = self.pochhammer;
        let w = self.z.norm_sqr() / 16.0;
        let e0 = self.nu.value() as f64 + 0.5;
        let cfg = SeriesConfig::default();
        let den = hyp_1fq(1.0, &[a, b, c, d], w, &cfg)?.value;
        let num = hyp_1fq(2.0, &[a + 1.0, b + 1.0, c + 1.0, d + 1.0], w, &cfg)?.value;
        let closed_form = e0 + 2.0 * w / (a * b * c * d) * num / den;
        let v = self.nu.value() as f64;
        let den_alt = hyp_1fq(1.0, &[a, b, (v + 5.0) / 2.0, d], w, &cfg)?.value;
        let num_alt = hyp_1fq(
            2.0,
            &[(2.0 * v - 2.0 * self.eps + 8.0) / 4.0, b + 1.0, c + 1.0, d + 1.0],
            w,
            &cfg,
        )?
        .value;
        let closed_form_alt = e0 + 2.0 * w / (a * b * c * d) * num_alt / den_alt;
        Ok(MeanEnergy {
            direct,
            closed_form,
            closed_form_alt,
        })
    }

    /// `U(t)|z> = e^{-i(nu + 1/2)t} |z e^{-2it}>`.
    pub fn evolve(&self, t: f64) -> Result<(Complex64, CoherentState)> {
        let phase = Complex64::from_polar(1.0, -(self.nu.value() as f64 + 0.5) * t);
        let z = self.z * Complex64::from_polar(1.0, -2.0 * t);
        Ok((phase, Self::truncated(self.nu, self.eps, self.gamma, z, self.nmax())?))
    }

    /// `sum_n c_n e^{-2int} psi~_{nu+2n}(x)` from basis functions.
    pub fn wavefunction<F: JetFn>(&self, basis: &[F], x: f64, t: f64) -> Result<Complex64> {
        if basis.len() < self.coeffs.len() {
            return Err(Error::InvalidParameter(format!(
                "{} basis functions for {} coefficients",
                basis.len(),
                self.coeffs.len()
            )));
        }
        let mut psi = Complex64::new(0.0, 0.0);
        for (n, (c, f)) in self.coeffs.iter().zip(basis).enumerate() {
            psi += c * Complex64::from_polar(1.0, -2.0 * n as f64 * t) * f.eval(x)?;
        }
        Ok(psi)
    }

    /// `rho(x, t) = |<x| U(t) |z>|^2`.
    pub fn density<F: JetFn>(&self, basis: &[F], x: f64, t: f64) -> Result<f64> {
        Ok(self.wavefunction(basis, x, t)?.norm_sqr())
    }

    /// `rho(., t)` on the grid of a sampled basis.
    pub fn density_on(&self, table: &BasisTable, t: f64) -> Result<GridFunction> {
        table.check(self)?;
        let values = (0..table.grid.points)
            .into_par_iter()
            .map(|i| self.sampled_amplitude(table, i, t).norm_sqr())
            .collect();
        Ok(GridFunction {
            grid: table.grid,
            values,
        })
    }

    /// Complex wavefunction at `t` on the grid of a sampled basis.
    pub fn wavefunction_on(&self, table: &BasisTable, t: f64) -> Result<Vec<Complex64>> {
        table.check(self)?;
        Ok((0..table.grid.points)
            .map(|i| self.sampled_amplitude(table, i, t))
            .collect())
    }

    fn sampled_amplitude(&self, table: &BasisTable, i: usize, t: f64) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&table.states)
            .enumerate()
            .map(|(n, (c, s))| c * Complex64::from_polar(1.0, -2.0 * n as f64 * t) * s.values[i])
            .sum()
    }
}

/// The phase-fixed basis `|nu + 2n>` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTable {
    pub nu: Nu,
    pub eps: f64,
    pub gamma: f64,
    pub grid: Grid,
    pub states: Vec<GridFunction>,
}

impl BasisTable {
    pub fn new(pair: &LadderPair, nu: Nu, nmax: usize, grid: &Grid) -> Result<Self> {
        let states = pair
            .basis_fns(nu, nmax)?
            .iter()
            .map(|f| grid.sample_jet_fn(f))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            nu,
            eps: pair.eps,
            gamma: pair.gamma,
            grid: *grid,
            states,
        })
    }

    fn check(&self, s: &CoherentState) -> Result<()> {
        if self.nu != s.nu {
            return Err(Error::SubspaceMismatch {
                left: self.nu.value(),
                right: s.nu.value(),
            });
        }
        if self.eps != s.eps || self.gamma != s.gamma || self.states.len() < s.coeffs.len() {
            return Err(Error::InvalidParameter(
                "basis table does not match the coherent state".into(),
            ));
        }
        Ok(())
    }
}

fn check_same_family(s1: &CoherentState, s2: &CoherentState) -> Result<()> {
    if s1.nu != s2.nu {
        return Err(Error::SubspaceMismatch {
            left: s1.nu.value(),
            right: s2.nu.value(),
        });
    }
    if s1.eps != s2.eps || s1.gamma != s2.gamma {
        return Err(Error::InvalidParameter(
            "overlap of coherent states with different eps or gamma".into(),
        ));
    }
    Ok(())
}

/// `<z'|z> = c0(z') c0(z) 1F4(1; a, b, c, d; conj(z') z / 16)`.
pub fn overlap(s1: &CoherentState, s2: &CoherentState) -> Result<Complex64> {
    check_same_family(s1, s2)?;
    let w = s1.z.conj() * s2.z / 16.0;
    let f = hyp_1fq_complex(1.0, &s1.pochhammer, w, &SeriesConfig::default())?;
    Ok(f * s1.c0 * s2.c0)
}

/// As [`overlap`], but states on different ladders are orthogonal.
pub fn overlap_or_zero(s1: &CoherentState, s2: &CoherentState) -> Result<Complex64> {
    match overlap(s1, s2) {
        Err(Error::SubspaceMismatch { .. }) => Ok(Complex64::new(0.0, 0.0)),
        other => other,
    }
}

/// `sum_n conj(c'_n) c_n` over the common truncation.
pub fn overlap_from_coefficients(s1: &CoherentState, s2: &CoherentState) -> Result<Complex64> {
    check_same_family(s1, s2)?;
    Ok(s1.coeffs.iter().zip(&s2.coeffs).map(|(a, b)| a.conj() * b).sum())
}

/// `|z| -> MeanEnergy` over a sweep, in parallel.
pub fn mean_energy_sweep(nu: Nu, eps: f64, radii: &[f64]) -> Result<Vec<(f64, MeanEnergy)>> {
    radii
        .par_iter()
        .map(|&r| {
            let s = CoherentState::new(nu, eps, 1.0, Complex64::new(r, 0.0))?;
            Ok((r, s.mean_energy()?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentRow {
    pub s: usize,
    pub quadrature_value: f64,
    pub gamma_product: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionReport {
    /// `[m][m']` entries of `int mu(z) <m|z><z|m'> d^2z`.
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    pub max_deviation: f64,
    pub radius: f64,
}

/// Completeness measure `mu(z) = f(|z|^2) / (16 pi c0^2 Gamma(a)Gamma(b)Gamma(c)Gamma(d))`
/// with `f(y) = G^{4,0}_{0,4}(y/16 | a-1, b-1, c-1, d-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureSpec {
    pub nu: Nu,
    pub eps: f64,
}

/// Panels of the radial rule: `[0, 2^-20]` then doubling.
const RADIAL_FIRST: f64 = 9.5367431640625e-7;
const RADIAL_NODES: usize = 24;
const THETA_POINTS: usize = 128;

impl MeasureSpec {
    pub fn new(nu: Nu, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        Ok(Self { nu, eps })
    }

    /// `b_i = (2nu - 2eps + 1)/4, (2nu - 2eps - 3)/4, (nu + 2)/2, (nu - 1)/2`.
    pub fn params(&self) -> [f64; 4] {
        let v = self.nu.value() as f64;
        [
            (2.0 * v - 2.0 * self.eps + 1.0) / 4.0,
            (2.0 * v - 2.0 * self.eps - 3.0) / 4.0,
            (v + 2.0) / 2.0,
            (v - 1.0) / 2.0,
        ]
    }

    fn g_cfg() -> QuadConfig {
        QuadConfig::with_rel_tol(1e-11)
    }

    pub fn f(&self, y: f64) -> Result<f64> {
        meijer_g4004(self.params(), y / 16.0, &Self::g_cfg())
    }

    pub fn mu(&self, z: Complex64) -> Result<f64> {
        let r = z.norm();
        let c0 = normalization_c0(self.nu, self.eps, r)?;
        let gammas: f64 = pochhammer_bases(self.nu, self.eps)?
            .iter()
            .map(|a| 1.0 / recip_gamma(*a))
            .product();
        Ok(self.f(r * r)? / (16.0 * PI * c0 * c0 * gammas))
    }

    fn check_moment(&self, s: usize) -> Result<()> {
        for b in self.params() {
            if b + s as f64 <= 0.0 {
                return Err(Error::DivergentMoment { s, arg: b + s as f64 });
            }
        }
        Ok(())
    }

    /// `int_0^inf (y/16)^{s-1} f(y) dy/16` against `prod_i Gamma(b_i + s)`.
    pub fn moments(&self, s_max: usize) -> Result<Vec<MomentRow>> {
        if s_max == 0 || s_max > 6 {
            return Err(Error::InvalidParameter(format!("s_max = {s_max} outside 1..=6")));
        }
        let b = self.params();
        (1..=s_max)
            .into_par_iter()
            .map(|s| {
                self.check_moment(s)?;
                // In v = ln(y/16) the integrand peaks near v = 4 ln s.
                let center = 4.0 * (s as f64).ln();
                let sf = s as f64;
                let value = integrate_real_line(
                    |u| {
                        let v = u + center;
                        let t = v.exp();
                        if t == 0.0 || !t.is_finite() {
                            return Ok(0.0);
                        }
                        let g = meijer_g4004(b, t, &Self::g_cfg())?;
                        if g == 0.0 {
                            return Ok(0.0);
                        }
                        Ok((sf * v).exp() * g)
                    },
                    &QuadConfig::with_rel_tol(1e-9),
                )?
                .value;
                let gamma_product: f64 = b.iter().map(|bi| 1.0 / recip_gamma(bi + sf)).product();
                Ok(MomentRow {
                    s,
                    quadrature_value: value,
                    gamma_product,
                    rel_error: ((value - gamma_product) / gamma_product).abs(),
                })
            })
            .collect()
    }

    /// `int mu(z) <m|z><z|m'> d^2z` for `m, m' <= mmax`: composite
    /// Gauss-Legendre in `r` on doubling panels, trapezoid in `theta`.
    pub fn resolution_block(&self, mmax: usize) -> Result<ResolutionReport> {
        for m in 0..=mmax {
            self.check_moment(m + 1)?;
        }
        let p = pochhammer_bases(self.nu, self.eps)?;
        let (nodes, weights) = gauss_legendre(RADIAL_NODES);
        let dim = mmax + 1;
        let mut re = vec![vec![0.0; dim]; dim];
        let mut im = vec![vec![0.0; dim]; dim];

        let panel = |lo: f64, hi: f64| -> Result<Vec<Vec<Complex64>>> {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            let contributions = nodes
                .par_iter()
                .zip(weights.par_iter())
                .map(|(xi, wi)| -> Result<Vec<Vec<Complex64>>> {
                    let r = mid + half * xi;
                    let mu = self.mu(Complex64::new(r, 0.0))?;
                    let mut acc = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
                    for k in 0..THETA_POINTS {
                        let theta = 2.0 * PI * k as f64 / THETA_POINTS as f64;
                        let z = Complex64::from_polar(r, theta);
                        let c0 = normalization_c0(self.nu, self.eps, r)?;
                        let c: Vec<Complex64> =
                            raw_coefficients(&p, z, mmax).into_iter().map(|c| c * c0).collect();
                        let wt = wi * half * r * mu * 2.0 * PI / THETA_POINTS as f64;
                        for m in 0..dim {
                            for mp in 0..dim {
                                // <m|z> = conj(c_m), <z|m'> = c_m'.
                                acc[m][mp] += c[m].conj() * c[mp] * wt;
                            }
                        }
                    }
                    Ok(acc)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut sum = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
            for acc in contributions {
                for m in 0..dim {
                    for mp in 0..dim {
                        sum[m][mp] += acc[m][mp];
                    }
                }
            }
            Ok(sum)
        };

        let mut add = |block: &[Vec<Complex64>]| -> f64 {
            let mut biggest = 0.0f64;
            for m in 0..dim {
                for mp in 0..dim {
                    re[m][mp] += block[m][mp].re;
                    im[m][mp] += block[m][mp].im;
                    biggest = biggest.max(block[m][mp].norm());
                }
            }
            biggest
        };

        add(&panel(0.0, RADIAL_FIRST)?);
        let mut lo = RADIAL_FIRST;
        while lo < 1.0 {
            add(&panel(lo, 2.0 * lo)?);
            lo *= 2.0;
        }
        // Outer panels until the tail contribution is negligible.
        loop {
            let contribution = add(&panel(lo, 2.0 * lo)?);
            lo *= 2.0;
            if lo >= 16.0 && contribution < 1e-12 {
                break;
            }
            if lo > 1e7 {
                return Err(Error::QuadratureFailure {
                    reason: "radial tail of the resolution of identity does not decay",
                    estimate: contribution,
                    error: contribution,
                });
            }
        }
        let mut max_deviation = 0.0f64;
        for m in 0..dim {
            for mp in 0..dim {
                let target = if m == mp { 1.0 } else { 0.0 };
                max_deviation = max_deviation.max(Complex64::new(re[m][mp] - target, im[m][mp]).norm());
            }
        }
        Ok(ResolutionReport {
            re,
            im,
            max_deviation,
            radius: lo,
        })
    }
}
