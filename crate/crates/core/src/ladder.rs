//! Fourth-order ladder operators `L- = B2+ B1` and `L+ = B1+ B2` built from
//! the two equivalent transformations, acting on the eigenstates of the `H1`
//! partner Hamiltonian.
//!
//! The spectrum `{-3/2, eps, 1/2, 3/2, ...}` splits into the ladders
//! `nu = -2` (`-3/2, 1/2, 5/2, ...`), `nu = 1` (`3/2, 7/2, ...`) and the
//! singlet at `eps`. On a ladder state of energy `E`,
//! `L+ L- = N4(E) = (E - eps)(E + 3/2)(E - 3/2)(E - eps - 2)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::jet::{Jet, JetFn};
use crate::oscillator::Direction;
use crate::susy::{expect_label, normalizability, TransformLabel, NormalizabilityVerdict, SusyTransform, TransformedFn};

/// Subspace label of an infinite ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Nu {
    #[serde(rename = "-2")]
    Minus2,
    #[serde(rename = "1")]
    One,
}

impl Nu {
    pub fn value(self) -> i32 {
        match self {
            Nu::Minus2 => -2,
            Nu::One => 1,
        }
    }

    pub fn from_value(nu: i32) -> Result<Self> {
        match nu {
            -2 => Ok(Nu::Minus2),
            1 => Ok(Nu::One),
            other => Err(Error::InvalidParameter(format!("nu = {other} (expected -2 or 1)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SpectralState {
    Ladder { nu: Nu, n: usize },
    Singlet,
}

impl SpectralState {
    pub fn ladder(nu: Nu, n: usize) -> Self {
        SpectralState::Ladder { nu, n }
    }

    pub fn energy(&self, eps: f64) -> f64 {
        match *self {
            SpectralState::Ladder { nu, n } => nu.value() as f64 + 2.0 * n as f64 + 0.5,
            SpectralState::Singlet => eps,
        }
    }
}

/// `N4(E)` from the level bookkeeping alone: the moved level `eps`, the
/// created level `-3/2`, and the `H2` seed energies `3/2` and `eps + 2`.
pub fn n4(eps: f64, energy: f64) -> f64 {
    (energy - eps) * (energy + 1.5) * (energy - 1.5) * (energy - eps - 2.0)
}

/// Probe points for the relative sign of the two transformations' states.
const SIGN_PROBES: [f64; 6] = [0.37, -0.61, 1.13, -1.42, 2.05, -2.3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderPair {
    pub t1: SusyTransform,
    pub t2: SusyTransform,
    pub eps: f64,
    pub gamma: f64,
    /// Normalized `H1` missing states at `-3/2` and at `eps`.
    ground: TransformedFn,
    singlet: TransformedFn,
}

impl LadderPair {
    pub fn new(eps: f64, gamma: f64) -> Result<Self> {
        Self::from_transforms(SusyTransform::h1(eps, gamma)?, SusyTransform::h2(eps, gamma)?)
    }

    /// Pairs two transformations without checking that they share `eps` and
    /// `gamma`; a mismatched pair makes the consistency checks fail.
    pub fn from_transforms(t1: SusyTransform, t2: SusyTransform) -> Result<Self> {
        expect_label(&t1, TransformLabel::H1)?;
        expect_label(&t2, TransformLabel::H2)?;
        Ok(Self {
            eps: t1.eps1,
            gamma: t1.seed1.gamma,
            ground: t1.missing_normalized(2)?,
            singlet: t1.missing_normalized(1)?,
            t1,
            t2,
        })
    }

    /// `N4(E) = (E - E1)(E - E2)(E - E~1)(E - E~2)`.
    pub fn n4(&self, energy: f64) -> f64 {
        self.t1.factorization_product(energy) * self.t2.factorization_product(energy)
    }

    /// Spectral action of `L-` or `L+`.
    pub fn apply_ladder(&self, direction: Direction, state: SpectralState) -> (f64, SpectralState) {
        match (direction, state) {
            (_, SpectralState::Singlet) => (0.0, state),
            (Direction::Lower, SpectralState::Ladder { n: 0, .. }) => (0.0, state),
            (Direction::Lower, SpectralState::Ladder { nu, n }) => (
                self.n4(state.energy(self.eps)).max(0.0).sqrt(),
                SpectralState::Ladder { nu, n: n - 1 },
            ),
            (Direction::Raise, SpectralState::Ladder { nu, n }) => (
                self.n4(state.energy(self.eps) + 2.0).max(0.0).sqrt(),
                SpectralState::Ladder { nu, n: n + 1 },
            ),
        }
    }

    /// The unsigned normalized `H1` eigenfunction behind a spectral state.
    pub fn eigenfunction(&self, state: SpectralState) -> Result<TransformedFn> {
        match state {
            SpectralState::Singlet => Ok(self.singlet),
            SpectralState::Ladder { nu: Nu::Minus2, n: 0 } => Ok(self.ground),
            SpectralState::Ladder { nu: Nu::Minus2, n } => self.t1.eigenfunction(2 * n - 2),
            SpectralState::Ladder { nu: Nu::One, n } => self.t1.eigenfunction(2 * n + 1),
        }
    }

    /// Sign `t` with `psi(2)_{E+2} = t psi~_E`, where `psi(2)` is the
    /// normalized `H2` eigenstate one level up in oscillator numbering.
    pub fn relative_sign(&self, state: SpectralState) -> Result<f64> {
        let e = state.energy(self.eps);
        let m = e + 1.5;
        if matches!(state, SpectralState::Singlet) || m < 0.0 || m != m.floor() {
            return Err(Error::InvalidParameter(format!(
                "no H2 partner level for energy {e}"
            )));
        }
        let f1 = self.eigenfunction(state)?;
        let f2 = self.t2.eigenfunction(m as usize)?;
        let (mut best, mut ratio) = (0.0f64, 0.0);
        for x in SIGN_PROBES {
            let a = f1.eval(x)?;
            if a.abs() > best {
                best = a.abs();
                ratio = f2.eval(x)? / a;
            }
        }
        if !((ratio.abs() - 1.0).abs() < 1e-6) {
            return Err(Error::InvalidParameter(format!(
                "H2 state at {} is not a unit multiple of the H1 state at {e} (ratio {ratio})",
                e + 2.0
            )));
        }
        Ok(ratio.signum())
    }

    /// Sign of the basis state `|nu + 2n>` relative to the unsigned
    /// eigenfunction, fixed by `|nu + 2n> = L+ |nu + 2(n-1)> / sqrt(N4)`.
    pub fn basis_sign(&self, nu: Nu, n: usize) -> Result<f64> {
        let mut s = 1.0;
        for k in 0..n {
            s *= self.relative_sign(SpectralState::ladder(nu, k))?;
        }
        Ok(s)
    }

    /// Phase-fixed basis function of a spectral state.
    pub fn basis_fn(&self, state: SpectralState) -> Result<TransformedFn> {
        let f = self.eigenfunction(state)?;
        match state {
            SpectralState::Singlet => Ok(f),
            SpectralState::Ladder { nu, n } => Ok(f.rescaled(self.basis_sign(nu, n)?)),
        }
    }

    /// All basis functions `|nu>, ..., |nu + 2 nmax>`, signs accumulated once.
    pub fn basis_fns(&self, nu: Nu, nmax: usize) -> Result<Vec<TransformedFn>> {
        let mut out = Vec::with_capacity(nmax + 1);
        let mut s = 1.0;
        for n in 0..=nmax {
            let state = SpectralState::ladder(nu, n);
            out.push(self.eigenfunction(state)?.rescaled(s));
            if n < nmax {
                s *= self.relative_sign(state)?;
            }
        }
        Ok(out)
    }

    pub fn basis_state(&self, nu: Nu, n: usize, grid: &Grid) -> Result<GridFunction> {
        grid.sample_jet_fn(&self.basis_fn(SpectralState::ladder(nu, n))?)
    }

    /// `L- f` at `x0` with `len` output coefficients.
    pub fn lower_jet<F: JetFn + ?Sized>(&self, f: &F, x0: f64, len: usize) -> Result<Jet> {
        let o1 = self.t1.local(x0, len + 2)?;
        let o2 = self.t2.local(x0, len)?;
        Ok(o2.b_plus(&o1.b(&f.jet(x0, len + 4)?)))
    }

    /// `L+ f` at `x0` with `len` output coefficients.
    pub fn raise_jet<F: JetFn + ?Sized>(&self, f: &F, x0: f64, len: usize) -> Result<Jet> {
        let o1 = self.t1.local(x0, len)?;
        let o2 = self.t2.local(x0, len + 2)?;
        Ok(o1.b_plus(&o2.b(&f.jet(x0, len + 4)?)))
    }

    pub fn apply_differential<F: JetFn + ?Sized>(&self, direction: Direction, f: &F, x: f64) -> Result<f64> {
        Ok(match direction {
            Direction::Lower => self.lower_jet(f, x, 1)?,
            Direction::Raise => self.raise_jet(f, x, 1)?,
        }
        .value())
    }

    /// Pointwise `(H~ L - L H~ -+ 2 L) f` and the sum of the term magnitudes.
    fn commutator_point<F: JetFn + ?Sized>(&self, direction: Direction, f: &F, x: f64) -> Result<(f64, f64)> {
        let ops = self.t1.local(x, 7)?;
        let fj = f.jet(x, 7)?;
        let hf = ops.hamiltonian(&fj);
        let apply = |j: &Jet, len: usize| -> Result<Jet> {
            let g = |_: f64, want: usize| Ok(j.truncate(want));
            match direction {
                Direction::Lower => self.lower_jet(&g, x, len),
                Direction::Raise => self.raise_jet(&g, x, len),
            }
        };
        let lf = apply(&fj, 3)?;
        let h_lf = ops.hamiltonian(&lf).value();
        let l_hf = apply(&hf, 1)?.value();
        let shift = match direction {
            Direction::Lower => -2.0,
            Direction::Raise => 2.0,
        };
        let r = h_lf - l_hf - shift * lf.value();
        Ok((r, h_lf.abs() + l_hf.abs() + 2.0 * lf.value().abs()))
    }

    /// `(L- L+ - L+ L-) f` at `x`.
    fn bracket_point<F: JetFn + ?Sized>(&self, f: &F, x: f64) -> Result<f64> {
        let fj = f.jet(x, 9)?;
        let g = |_: f64, want: usize| Ok(fj.truncate(want));
        let up = self.raise_jet(&g, x, 5)?;
        let down = self.lower_jet(&g, x, 5)?;
        let gu = |_: f64, want: usize| Ok(up.truncate(want));
        let gd = |_: f64, want: usize| Ok(down.truncate(want));
        Ok(self.lower_jet(&gu, x, 1)?.value() - self.raise_jet(&gd, x, 1)?.value())
    }

    /// Polynomial Heisenberg algebra residuals on `states`, sampled on `grid`.
    pub fn pha_check(&self, states: &[SpectralState], grid: &Grid) -> Result<PhaReport> {
        let mut rows = Vec::with_capacity(states.len());
        for &state in states {
            let f = self.basis_fn(state)?;
            let e = state.energy(self.eps);
            let mut comm = [(0.0f64, 0.0f64); 2];
            let mut bracket_err = 0.0f64;
            let mut bracket_ref = 0.0f64;
            let spectral_bracket = self.n4(e + 2.0) - self.n4(e);
            for x in grid.xs() {
                for (k, dir) in [Direction::Lower, Direction::Raise].into_iter().enumerate() {
                    let (r, s) = self.commutator_point(dir, &f, x)?;
                    comm[k].0 = comm[k].0.max(r.abs());
                    comm[k].1 = comm[k].1.max(s);
                }
                let b = self.bracket_point(&f, x)?;
                let target = spectral_bracket * f.eval(x)?;
                bracket_err = bracket_err.max((b - target).abs());
                bracket_ref = bracket_ref.max(target.abs());
            }
            let ratio = |(r, s): (f64, f64)| if s > 0.0 { r / s } else { r };
            let (up_c, up_s) = self.apply_ladder(Direction::Raise, state);
            let (down_c, down_s) = self.apply_ladder(Direction::Lower, state);
            let lowered_back = self.apply_ladder(Direction::Lower, up_s).0;
            let raised_back = self.apply_ladder(Direction::Raise, down_s).0;
            let spectral_from_coeffs = up_c * lowered_back - down_c * raised_back;
            rows.push(PhaRow {
                state,
                energy: e,
                commutator_lower: ratio(comm[0]),
                commutator_raise: ratio(comm[1]),
                bracket_spectral: spectral_bracket,
                bracket_from_coefficients: spectral_from_coeffs,
                bracket_differential_rel: if bracket_ref > 0.0 {
                    bracket_err / bracket_ref
                } else {
                    bracket_err
                },
                raise_energy_step: up_s.energy(self.eps) - e,
            });
        }
        Ok(PhaReport { rows })
    }

    /// The four formal solutions of `L- f = 0` with their verdicts.
    pub fn kernel_basis(&self, grid: &Grid) -> Result<Vec<KernelElement>> {
        let t1 = self.t1;
        let u22 = self.t2.seed2;
        let extra = move |x0: f64, len: usize| -> Result<Jet> {
            Ok(t1.local(x0, len)?.b_plus(&u22.jet(x0, len + 2)?))
        };
        let named: [(&str, f64, bool, Box<dyn JetFn>); 4] = [
            ("psi~_{E-2}", -1.5, true, Box::new(self.ground)),
            ("psi~_eps", self.eps, true, Box::new(self.singlet)),
            ("psi~_1", 1.5, true, Box::new(self.t1.eigenfunction(1)?)),
            ("B1+ u2(2)", self.eps + 2.0, false, Box::new(extra)),
        ];
        let mut out = Vec::with_capacity(4);
        for (label, energy, physical, f) in named {
            let residual = self.kernel_residual(f.as_ref(), grid)?;
            let verdict = normalizability(f.as_ref())?;
            out.push(KernelElement {
                label: label.to_string(),
                energy,
                physical,
                residual,
                verdict,
            });
        }
        Ok(out)
    }

    /// `sup |L- f| / sup s(x)`, with `s(x) = (1 + x^2)^2 max_k |f^(k)(x)|`
    /// (`k <= 4`) the natural size of a fourth-order operator with quadratic
    /// coefficients.
    pub fn kernel_residual<F: JetFn + ?Sized>(&self, f: &F, grid: &Grid) -> Result<f64> {
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for x in grid.xs() {
            num = num.max(self.lower_jet(f, x, 1)?.value().abs());
            den = den.max(f.jet(x, 5)?.derivative_magnitude() * (1.0 + x * x).powi(2));
        }
        Ok(num / den)
    }

    /// Relative L2 error between `L- |nu + 2n>` applied differentially and
    /// `sqrt(N4) |nu + 2(n-1)>`.
    pub fn spectral_vs_differential(&self, nu: Nu, n: usize, grid: &Grid) -> Result<f64> {
        let state = SpectralState::ladder(nu, n);
        let f = self.basis_fn(state)?;
        let (c, lower) = self.apply_ladder(Direction::Lower, state);
        let target = match lower {
            SpectralState::Ladder { n: m, .. } if m + 1 == n => Some(self.basis_fn(lower)?),
            _ => None,
        };
        let diff = grid.sample(|x| {
            let d = self.lower_jet(&f, x, 1)?.value();
            Ok(match &target {
                Some(t) => d - c * t.eval(x)?,
                None => d,
            })
        })?;
        let reference = if c > 0.0 { c } else { 1.0 };
        Ok(diff.norm() / reference)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaRow {
    pub state: SpectralState,
    pub energy: f64,
    pub commutator_lower: f64,
    pub commutator_raise: f64,
    pub bracket_spectral: f64,
    pub bracket_from_coefficients: f64,
    pub bracket_differential_rel: f64,
    pub raise_energy_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaReport {
    pub rows: Vec<PhaRow>,
}

impl PhaReport {
    pub fn max_commutator(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.commutator_lower.max(r.commutator_raise))
            .fold(0.0, f64::max)
    }

    pub fn max_bracket(&self) -> f64 {
        self.rows.iter().map(|r| r.bracket_differential_rel).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelElement {
    pub label: String,
    pub energy: f64,
    /// Member of the spectrum of `H1`.
    pub physical: bool,
    pub residual: f64,
    pub verdict: NormalizabilityVerdict,
}
