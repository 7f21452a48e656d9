//! Second-order SUSY transformations of the oscillator.
//!
//! Two equivalent transformations are built from general Hermite-function
//! seeds: `H1` adds two levels below the ground state (seeds `u(lambda1)` and
//! `phi_1`), `H2` moves the first excited level (seeds `psi_1` and
//! `u(lambda1 + 2)`). Both partner Hamiltonians differ by the constant 2.
//!
//! Operators act on jets. With `g = W'/W` and
//! `h = g'/2 + g^2/2 - 2V + e1 + e2`,
//!
//! * `B+ f = (f'' - g f' + h f) / 2`
//! * `B  f = (f'' + g f' + (g' + h) f) / 2`
//! * `V~ = x^2/2 - g'`

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::jet::{Jet, JetFn};
use crate::oscillator::{psi_jet, schrodinger_residual, SeedKind, SeedSolution};

/// Relative size below which a Wronskian counts as vanishing.
pub const WRONSKIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransformLabel {
    H1,
    H2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SusyTransform {
    pub seed1: SeedSolution,
    pub seed2: SeedSolution,
    pub eps1: f64,
    pub eps2: f64,
    pub label: TransformLabel,
}

fn validate_eps_gamma(eps: f64, gamma: f64) -> Result<()> {
    if !(eps > -1.5 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} must lie in (-3/2, 1/2)"
        )));
    }
    if eps == -0.5 {
        // lambda1 = -1: u(lambda2) collapses onto psi_1 and H2 is singular.
        return Err(Error::InvalidParameter(
            "eps = -1/2 gives an integer Hermite order".into(),
        ));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} must be positive for a nodeless Wronskian"
        )));
    }
    Ok(())
}

/// The local operator data of a transformation at one point.
#[derive(Debug, Clone, Copy)]
pub struct LocalOps {
    /// `W'/W`, one coefficient longer than `h`.
    pub g: Jet,
    pub h: Jet,
    /// Partner potential.
    pub v: Jet,
}

impl LocalOps {
    /// `B+ f`; the result is two coefficients shorter than `f`.
    pub fn b_plus(&self, f: &Jet) -> Jet {
        let m = f.len() - 2;
        let fp = f.differentiate();
        let fpp = fp.differentiate();
        let g = self.g.truncate(m);
        let h = self.h.truncate(m);
        (fpp - g * fp.truncate(m) + h * f.truncate(m)).scale(0.5)
    }

    /// `B f`; the result is two coefficients shorter than `f`.
    pub fn b(&self, f: &Jet) -> Jet {
        let m = f.len() - 2;
        let fp = f.differentiate();
        let fpp = fp.differentiate();
        let g = self.g.truncate(m);
        let gp = self.g.differentiate().truncate(m);
        let h = self.h.truncate(m);
        (fpp + g * fp.truncate(m) + (gp + h) * f.truncate(m)).scale(0.5)
    }

    /// `H~ f = -f''/2 + V~ f`.
    pub fn hamiltonian(&self, f: &Jet) -> Jet {
        let m = f.len() - 2;
        let fpp = f.differentiate().differentiate();
        fpp.scale(-0.5) + self.v.truncate(m) * f.truncate(m)
    }
}

impl SusyTransform {
    /// Adds levels at `eps` and `-3/2` below the oscillator ground state.
    pub fn h1(eps: f64, gamma: f64) -> Result<Self> {
        validate_eps_gamma(eps, gamma)?;
        Ok(Self::from_seeds(
            SeedSolution::general(eps - 0.5, gamma),
            SeedSolution::phi(1),
            TransformLabel::H1,
        ))
    }

    /// Moves the first excited level `3/2` to `eps + 2`.
    pub fn h2(eps: f64, gamma: f64) -> Result<Self> {
        validate_eps_gamma(eps, gamma)?;
        Ok(Self::from_seeds(
            SeedSolution::fock(1),
            SeedSolution::general(eps + 1.5, gamma),
            TransformLabel::H2,
        ))
    }

    /// Unvalidated constructor; the factorization energies follow the seeds.
    pub fn from_seeds(seed1: SeedSolution, seed2: SeedSolution, label: TransformLabel) -> Self {
        Self {
            seed1,
            seed2,
            eps1: seed1.energy(),
            eps2: seed2.energy(),
            label,
        }
    }

    /// Jet of `W = u1 u2' - u1' u2` with `len` coefficients.
    pub fn wronskian_jet(&self, x0: f64, len: usize) -> Result<Jet> {
        let u1 = self.seed1.jet(x0, len + 1)?;
        let u2 = self.seed2.jet(x0, len + 1)?;
        let w = u1.truncate(len) * u2.differentiate() - u1.differentiate() * u2.truncate(len);
        let scale = (u1.value() * u2.derivative(1)).abs() + (u1.derivative(1) * u2.value()).abs();
        if !(w.value().abs() >= WRONSKIAN_TOL * scale) || !w.value().is_finite() {
            return Err(Error::ZeroWronskian {
                x: x0,
                w: w.value().abs(),
                scale,
            });
        }
        Ok(w)
    }

    /// `(W, W', W'')`, the derivatives from `W' = 2 (e1 - e2) u1 u2`.
    pub fn wronskian2(&self, x: f64) -> Result<(f64, f64, f64)> {
        let w = self.wronskian_jet(x, 1)?.value();
        let u1 = self.seed1.jet(x, 2)?;
        let u2 = self.seed2.jet(x, 2)?;
        let c = 2.0 * (self.eps1 - self.eps2);
        let w1 = c * u1.value() * u2.value();
        let w2 = c * (u1.derivative(1) * u2.value() + u1.value() * u2.derivative(1));
        Ok((w, w1, w2))
    }

    /// Operator data at `x0`, good for outputs of up to `len` coefficients.
    pub fn local(&self, x0: f64, len: usize) -> Result<LocalOps> {
        let w = self.wronskian_jet(x0, len + 2)?;
        let g = w.differentiate().div(&w.truncate(len + 1));
        let gp = g.differentiate();
        let x = Jet::variable(x0, len);
        let v0 = (x * x).scale(0.5);
        let gt = g.truncate(len);
        // The constant is e1 + e2: it is what makes B+ annihilate both seeds.
        let h = gp.scale(0.5) + (gt * gt).scale(0.5) - v0.scale(2.0) + (self.eps1 + self.eps2);
        let v = v0 - gp;
        Ok(LocalOps { g, h, v })
    }

    pub fn partner_potential(&self, x: f64) -> Result<f64> {
        Ok(self.local(x, 1)?.v.value())
    }

    /// `g = W'/W` at `x`.
    pub fn log_derivative(&self, x: f64) -> Result<f64> {
        Ok(self.local(x, 1)?.g.value())
    }

    pub fn apply_b_plus<F: JetFn + ?Sized>(&self, f: &F, x: f64) -> Result<f64> {
        Ok(self.local(x, 1)?.b_plus(&f.jet(x, 3)?).value())
    }

    pub fn apply_b<F: JetFn + ?Sized>(&self, f: &F, x: f64) -> Result<f64> {
        Ok(self.local(x, 1)?.b(&f.jet(x, 3)?).value())
    }

    /// `W(u1, u2, f) / (2 W(u1, u2))`, the determinant form of `B+ f`.
    pub fn apply_b_plus_wronskian<F: JetFn + ?Sized>(&self, f: &F, x: f64) -> Result<f64> {
        let u1 = self.seed1.jet(x, 3)?;
        let u2 = self.seed2.jet(x, 3)?;
        let fj = f.jet(x, 3)?;
        let col = |j: &Jet| [j.value(), j.derivative(1), j.derivative(2)];
        let (a, b, c) = (col(&u1), col(&u2), col(&fj));
        let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1])
            + c[0] * (a[1] * b[2] - a[2] * b[1]);
        let w = self.wronskian_jet(x, 1)?.value();
        Ok(0.5 * det / w)
    }

    /// Oscillator levels deleted by the transformation.
    pub fn is_deleted(&self, n: usize) -> bool {
        let e = n as f64 + 0.5;
        e == self.eps1 || e == self.eps2
    }

    /// `(E_n - e1)(E_n - e2)`.
    pub fn factorization_product(&self, energy: f64) -> f64 {
        (energy - self.eps1) * (energy - self.eps2)
    }

    /// `B+ psi_n / sqrt((E_n - e1)(E_n - e2))` as a jet-evaluable function.
    pub fn eigenfunction(&self, n: usize) -> Result<TransformedFn> {
        if self.is_deleted(n) {
            return Err(Error::DeletedLevel { n });
        }
        let p = self.factorization_product(n as f64 + 0.5);
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "factorization product {p} for level {n} is not positive"
            )));
        }
        Ok(TransformedFn {
            transform: *self,
            source: Source::Image { n },
            scale: 1.0 / p.sqrt(),
        })
    }

    /// The missing state at `e1` (`which = 1`, `u2/W`) or `e2` (`which = 2`,
    /// `u1/W`), unnormalized.
    pub fn missing_fn(&self, which: usize) -> TransformedFn {
        assert!(which == 1 || which == 2, "missing state index {which}");
        TransformedFn {
            transform: *self,
            source: Source::Missing { which },
            scale: 1.0,
        }
    }

    /// Normalized transformed eigenstate sampled on `grid`.
    pub fn transformed_eigenstate(&self, n: usize, grid: &Grid) -> Result<GridFunction> {
        grid.sample_jet_fn(&self.eigenfunction(n)?)
    }

    /// Both missing states with their normalizability verdicts.
    pub fn missing_states(&self, grid: &Grid) -> Result<Vec<MissingState>> {
        [1usize, 2]
            .into_iter()
            .map(|which| {
                let f = self.missing_fn(which);
                let verdict = normalizability(&f)?;
                let sampled = grid.sample_jet_fn(&f)?;
                let norm = sampled.norm();
                let state = if verdict.normalizable {
                    sampled.scaled(1.0 / norm)
                } else {
                    sampled
                };
                Ok(MissingState {
                    energy: if which == 1 { self.eps1 } else { self.eps2 },
                    which,
                    state,
                    normalizable: verdict.normalizable,
                    verdict,
                })
            })
            .collect()
    }

    /// Normalized missing state as a jet-evaluable function.
    pub fn missing_normalized(&self, which: usize) -> Result<TransformedFn> {
        let f = self.missing_fn(which);
        let verdict = normalizability(&f)?;
        if !verdict.normalizable {
            return Err(Error::InvalidParameter(format!(
                "missing state {which} of {:?} is not square integrable",
                self.label
            )));
        }
        Ok(f.rescaled(1.0 / verdict.norm_inner.sqrt()))
    }

    /// `||B+ B f - (H~ - e1)(H~ - e2) f|| / ||f||` on `grid`, both sides
    /// applied differentially.
    pub fn factorization_residual<F: JetFn + ?Sized>(&self, f: &F, grid: &Grid) -> Result<f64> {
        let diff = grid.sample(|x| {
            let fj = f.jet(x, 5)?;
            let ops = self.local(x, 3)?;
            let lhs = ops.b_plus(&ops.b(&fj)).value();
            let shifted = ops.hamiltonian(&fj) - fj.truncate(3).scale(self.eps2);
            let rhs = (ops.hamiltonian(&shifted) - shifted.truncate(1).scale(self.eps1)).value();
            Ok(lhs - rhs)
        })?;
        Ok(diff.norm() / grid.sample_jet_fn(f)?.norm())
    }

    /// `sup |H~ f - E f| / sup (|f''|/2 + |V~ f| + |E f|)` on `grid`.
    pub fn schrodinger_residual<F: JetFn + ?Sized>(&self, f: &F, energy: f64, grid: &Grid) -> Result<f64> {
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for x in grid.xs() {
            let j = f.jet(x, 3)?;
            let v = self.local(x, 1)?.v.value();
            let (r, s) = schrodinger_residual(&j, v, energy);
            num = num.max(r.abs());
            den = den.max(s);
        }
        Ok(num / den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Source {
    Image { n: usize },
    Missing { which: usize },
}

/// An eigenfunction of a partner Hamiltonian, evaluated through jets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformedFn {
    pub transform: SusyTransform,
    pub source: Source,
    pub scale: f64,
}

impl TransformedFn {
    pub fn rescaled(&self, s: f64) -> Self {
        Self {
            scale: self.scale * s,
            ..*self
        }
    }

    pub fn energy(&self) -> f64 {
        match self.source {
            Source::Image { n } => n as f64 + 0.5,
            Source::Missing { which: 1 } => self.transform.eps1,
            Source::Missing { .. } => self.transform.eps2,
        }
    }
}

impl JetFn for TransformedFn {
    fn jet(&self, x0: f64, len: usize) -> Result<Jet> {
        let t = &self.transform;
        let raw = match self.source {
            Source::Image { n } => t.local(x0, len)?.b_plus(&psi_jet(n, x0, len + 2)?),
            Source::Missing { which } => {
                let w = t.wronskian_jet(x0, len)?;
                let u = if which == 1 { &t.seed2 } else { &t.seed1 };
                u.jet(x0, len)?.div(&w)
            }
        };
        Ok(raw.scale(self.scale))
    }
}

/// Inner and outer window norms of a candidate bound state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizabilityVerdict {
    pub norm_inner: f64,
    pub norm_outer: f64,
    pub relative_change: f64,
    pub normalizable: bool,
}

/// Window used for normalization and the tail-extension test.
pub const INNER_WINDOW: f64 = 10.0;
pub const OUTER_WINDOW: f64 = 14.0;
pub const NORMALIZABLE_TOL: f64 = 1e-6;

/// Squared norms on `[-10, 10]` and `[-14, 14]`; normalizable when they agree
/// to `1e-6` relative.
pub fn normalizability<F: JetFn + ?Sized>(f: &F) -> Result<NormalizabilityVerdict> {
    let inner = Grid::symmetric(INNER_WINDOW, 0.01).sample_jet_fn(f)?.norm_sq();
    let outer = Grid::symmetric(OUTER_WINDOW, 0.01).sample_jet_fn(f)?.norm_sq();
    let relative_change = ((outer - inner) / inner).abs();
    Ok(NormalizabilityVerdict {
        norm_inner: inner,
        norm_outer: outer,
        relative_change,
        normalizable: relative_change.is_finite() && relative_change < NORMALIZABLE_TOL,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissingState {
    pub energy: f64,
    pub which: usize,
    pub state: GridFunction,
    pub normalizable: bool,
    pub verdict: NormalizabilityVerdict,
}

/// The `H1` partner Hamiltonian with its spectral bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtendedHamiltonian {
    pub transform: SusyTransform,
}

impl ExtendedHamiltonian {
    pub fn new(transform: SusyTransform) -> Self {
        Self { transform }
    }

    /// Lowest `count` levels as `(label, energy)`, increasing.
    pub fn spectrum(&self, count: usize) -> Vec<(String, f64)> {
        let t = &self.transform;
        let mut levels: Vec<(String, f64)> = match t.label {
            TransformLabel::H1 => {
                let mut v = vec![
                    ("E-2".to_string(), t.eps2),
                    ("eps".to_string(), t.eps1),
                ];
                v.extend((0..count).map(|n| (format!("E{n}"), n as f64 + 0.5)));
                v
            }
            TransformLabel::H2 => {
                let mut v = vec![("E0".to_string(), 0.5), ("eps+2".to_string(), t.eps2)];
                v.extend((2..count + 2).map(|n| (format!("E{n}"), n as f64 + 0.5)));
                v
            }
        };
        levels.sort_by(|a, b| a.1.total_cmp(&b.1));
        levels.truncate(count);
        levels
    }

    pub fn potential(&self, x: f64) -> Result<f64> {
        self.transform.partner_potential(x)
    }
}

/// Deviations and samples of the `H1`/`H2` equivalence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub eps1: f64,
    pub gamma: f64,
    /// `sup |V2 - V1 - 2|`.
    pub sup_deviation: f64,
    /// `(x, Omega(x))` with `Omega = W2'/W2 - W1'/W1`.
    pub omega_samples: Vec<(f64, f64)>,
    pub sup_omega_minus_2x: f64,
    pub sup_omega_plus_2x: f64,
    /// `sup |sqrt(2 sqrt(pi)) e^{x^2} psi_1 - phi_1|`, relative.
    pub u_relation_residual: f64,
    /// `sup |a- a- u2(2) - 2 l2 (l2 - 1) u1(1)|`, relative to the largest term.
    pub annihilation_residual: f64,
}

/// Samples the equivalence of the two transformations on `grid`.
pub fn equivalence_report(eps1: f64, gamma: f64, grid: &Grid) -> Result<EquivalenceReport> {
    let t1 = SusyTransform::h1(eps1, gamma)?;
    let t2 = SusyTransform::h2(eps1, gamma)?;
    let lambda2 = t2.seed2.lambda;
    let xs = grid.xs();
    let mut sup_deviation = 0.0f64;
    let mut omega_samples = Vec::with_capacity(xs.len());
    let mut sup_minus = 0.0f64;
    let mut sup_plus = 0.0f64;
    let mut u_rel = 0.0f64;
    let mut ann = 0.0f64;
    for &x in &xs {
        let l1 = t1.local(x, 1)?;
        let l2 = t2.local(x, 1)?;
        sup_deviation = sup_deviation.max((l2.v.value() - l1.v.value() - 2.0).abs());
        let omega = l2.g.value() - l1.g.value();
        omega_samples.push((x, omega));
        sup_minus = sup_minus.max((omega - 2.0 * x).abs());
        sup_plus = sup_plus.max((omega + 2.0 * x).abs());

        let psi1 = t2.seed1.jet(x, 1)?.value();
        let phi1 = t1.seed2.jet(x, 1)?.value();
        let lhs = (2.0 * std::f64::consts::PI.sqrt()).sqrt() * (x * x).exp() * psi1;
        if phi1 != 0.0 {
            u_rel = u_rel.max(((lhs - phi1) / phi1).abs());
        }

        // a- = (x + d/dx) / sqrt 2
        let u22 = t2.seed2.jet(x, 3)?;
        let xj = Jet::variable(x, 3);
        let once = (xj * u22.truncate(2) + u22.differentiate()).scale(std::f64::consts::FRAC_1_SQRT_2);
        let twice = (xj.truncate(1) * once.truncate(1) + once.differentiate())
            .scale(std::f64::consts::FRAC_1_SQRT_2)
            .value();
        let target = 2.0 * lambda2 * (lambda2 - 1.0) * t1.seed1.jet(x, 1)?.value();
        let scale = twice.abs().max(target.abs()).max(f64::MIN_POSITIVE);
        ann = ann.max((twice - target).abs() / scale);
    }
    Ok(EquivalenceReport {
        eps1,
        gamma,
        sup_deviation,
        omega_samples,
        sup_omega_minus_2x: sup_minus,
        sup_omega_plus_2x: sup_plus,
        u_relation_residual: u_rel,
        annihilation_residual: ann,
    })
}

/// `true` when `W(u1, u2)` keeps one sign on every node of `grid`.
pub fn wronskian_is_nodeless(t: &SusyTransform, grid: &Grid) -> Result<bool> {
    let w = grid.sample(|x| Ok(t.wronskian_jet(x, 1)?.value()))?;
    Ok(w.sign_changes() == 0 && w.values.iter().all(|v| *v != 0.0))
}

/// Sanity check used by constructors of derived objects.
pub(crate) fn expect_label(t: &SusyTransform, label: TransformLabel) -> Result<()> {
    if t.label != label {
        return Err(Error::InvalidParameter(format!(
            "expected a {label:?} transformation, got {:?}",
            t.label
        )));
    }
    if let (TransformLabel::H2, SeedKind::Fock { n }) = (label, t.seed1.kind) {
        if n != 1 {
            return Err(Error::InvalidParameter(format!("H2 first seed is psi_{n}, expected psi_1")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::FockState;
    use approx::assert_relative_eq;

    const FIG_EPS: [f64; 2] = [-13.0 / 9.0, 9.0 / 20.0];

    fn default_grid() -> Grid {
        Grid::default()
    }

    #[test]
    fn validation() {
        assert!(SusyTransform::h1(0.0, 0.0).is_err());
        assert!(SusyTransform::h1(0.0, -1.0).is_err());
        assert!(SusyTransform::h1(0.5, 2.0).is_err());
        assert!(SusyTransform::h1(-1.5, 2.0).is_err());
        assert!(SusyTransform::h1(-0.5, 2.0).is_err());
        let t = SusyTransform::h1(0.0, 2.0).unwrap();
        assert_eq!((t.eps1, t.eps2), (0.0, -1.5));
        let t2 = SusyTransform::h2(0.0, 2.0).unwrap();
        assert_eq!((t2.eps1, t2.eps2), (1.5, 2.0));
        assert_eq!(t2.seed2.lambda, t.seed1.lambda + 2.0);
    }

    #[test]
    fn wronskian_derivative_identity() {
        // Pins the sign convention W' = +2 (e1 - e2) u1 u2.
        let h = 1e-5;
        for eps in FIG_EPS {
            for t in [SusyTransform::h1(eps, 4.0).unwrap(), SusyTransform::h2(eps, 4.0).unwrap()] {
                for i in 0..=24 {
                    let x = -6.0 + 0.5 * i as f64;
                    let (_, w1, _) = t.wronskian2(x).unwrap();
                    let fd = (t.wronskian2(x + h).unwrap().0 - t.wronskian2(x - h).unwrap().0) / (2.0 * h);
                    assert!((w1 - fd).abs() <= 1e-8 * w1.abs().max(1.0), "{:?} x {x}: {w1} vs {fd}", t.label);
                    let jet = t.wronskian_jet(x, 3).unwrap();
                    assert_relative_eq!(jet.derivative(1), w1, max_relative = 1e-10);
                }
            }
        }
    }

    #[test]
    fn wronskians_are_nodeless() {
        let g = default_grid();
        for eps in FIG_EPS {
            assert!(wronskian_is_nodeless(&SusyTransform::h1(eps, 4.0).unwrap(), &g).unwrap());
            assert!(wronskian_is_nodeless(&SusyTransform::h2(eps, 4.0).unwrap(), &g).unwrap());
        }
    }

    #[test]
    fn wronskian_nodeless_parameter_scan() {
        let g = Grid::new(-10.0, 10.0, 401).unwrap();
        for i in 0..20 {
            let eps = -1.45 + 1.9 * (i as f64 + 0.5) / 20.0;
            let eps = if (eps + 0.5).abs() < 1e-9 { eps + 0.01 } else { eps };
            let gamma = 0.1 + 9.9 * ((i * 7) % 20) as f64 / 19.0;
            let t = SusyTransform::h1(eps, gamma).unwrap();
            assert!(wronskian_is_nodeless(&t, &g).unwrap(), "eps {eps} gamma {gamma}");
        }
    }

    #[test]
    fn singular_seed_pair_is_reported() {
        // Two copies of the same seed have identically zero Wronskian.
        let s = SeedSolution::general(-0.7, 1.0);
        let t = SusyTransform::from_seeds(s, s, TransformLabel::H1);
        assert!(matches!(t.wronskian2(0.3), Err(Error::ZeroWronskian { .. })));
    }

    #[test]
    fn potential_asymptotics() {
        for eps in FIG_EPS {
            let t1 = SusyTransform::h1(eps, 4.0).unwrap();
            let t2 = SusyTransform::h2(eps, 4.0).unwrap();
            for (t, c) in [(t1, -2.0), (t2, 0.0)] {
                let far: Vec<f64> = [6.0, 8.0, 10.0]
                    .iter()
                    .map(|&x| (t.partner_potential(x).unwrap() - 0.5 * x * x - c).abs())
                    .collect();
                assert!(far[2] < far[0], "{:?}: {far:?}", t.label);
                assert!(far[2] < 0.05, "{:?}: {far:?}", t.label);
                let left = (t.partner_potential(-10.0).unwrap() - 50.0 - c).abs();
                assert!(left < 0.05, "{:?}: {left}", t.label);
            }
        }
    }

    #[test]
    fn symmetric_seed_gives_even_potential() {
        // The seed e^{-x^2/2}[H(x) + gamma H(-x)] is even only for gamma = 1.
        let t = SusyTransform::h1(-0.3, 1.0).unwrap();
        for i in 0..=30 {
            let x = 0.2 * i as f64;
            let (a, b) = (t.partner_potential(x).unwrap(), t.partner_potential(-x).unwrap());
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "x {x}");
        }
        let skew = SusyTransform::from_seeds(
            SeedSolution::general(-0.8, 0.0),
            SeedSolution::phi(1),
            TransformLabel::H1,
        );
        let asym = (skew.partner_potential(1.0).unwrap() - skew.partner_potential(-1.0).unwrap()).abs();
        assert!(asym > 1e-3, "gamma = 0 potential unexpectedly even ({asym})");
    }

    #[test]
    fn partners_differ_by_two() {
        let g = Grid::new(-6.0, 6.0, 241).unwrap();
        for eps in FIG_EPS {
            let r = equivalence_report(eps, 4.0, &g).unwrap();
            assert!(r.sup_deviation < 1e-8, "eps {eps}: {}", r.sup_deviation);
            assert!(r.u_relation_residual < 1e-12);
            assert!(r.annihilation_residual < 1e-7, "{}", r.annihilation_residual);
        }
    }

    #[test]
    fn omega_equals_minus_two_x() {
        // With W' = +2 (e1 - e2) u1 u2 the log-derivative difference is -2x.
        let g = Grid::new(-6.0, 6.0, 121).unwrap();
        for eps in FIG_EPS {
            let r = equivalence_report(eps, 4.0, &g).unwrap();
            assert!(r.sup_omega_plus_2x < 1e-8, "{}", r.sup_omega_plus_2x);
            assert!(r.sup_omega_minus_2x > 1.0);
        }
    }

    #[test]
    fn seeds_span_kernel_of_b_plus() {
        for eps in FIG_EPS {
            for t in [SusyTransform::h1(eps, 4.0).unwrap(), SusyTransform::h2(eps, 4.0).unwrap()] {
                for i in 0..=20 {
                    let x = -5.0 + 0.5 * i as f64;
                    for s in [t.seed1, t.seed2] {
                        let j = s.jet(x, 3).unwrap();
                        let scale = j.magnitude() * (1.0 + x * x);
                        let v = t.apply_b_plus(&s, x).unwrap();
                        assert!(v.abs() <= 1e-8 * scale, "{:?} x {x}: {v}", t.label);
                    }
                }
            }
        }
    }

    #[test]
    fn image_norms_match_factorization() {
        let g = default_grid();
        for eps in FIG_EPS {
            let t = SusyTransform::h1(eps, 4.0).unwrap();
            for n in [0usize, 2, 3] {
                let f = g.sample(|x| t.apply_b_plus(&FockState::new(n), x)).unwrap();
                let expected = t.factorization_product(n as f64 + 0.5);
                assert_relative_eq!(f.norm_sq(), expected, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn determinant_route_matches() {
        for eps in FIG_EPS {
            for t in [SusyTransform::h1(eps, 4.0).unwrap(), SusyTransform::h2(eps, 4.0).unwrap()] {
                for n in [0usize, 2, 3, 5] {
                    let f = FockState::new(n);
                    for i in 0..=16 {
                        let x = -4.0 + 0.5 * i as f64;
                        let a = t.apply_b_plus(&f, x).unwrap();
                        let b = t.apply_b_plus_wronskian(&f, x).unwrap();
                        let scale = f.jet(x, 3).unwrap().magnitude() * (1.0 + x * x);
                        assert!((a - b).abs() <= 1e-8 * scale, "{:?} n {n} x {x}", t.label);
                    }
                }
            }
        }
    }

    #[test]
    fn b_annihilates_missing_states() {
        for eps in FIG_EPS {
            for t in [SusyTransform::h1(eps, 4.0).unwrap(), SusyTransform::h2(eps, 4.0).unwrap()] {
                for which in [1, 2] {
                    let m = t.missing_fn(which);
                    for i in 0..=16 {
                        let x = -4.0 + 0.5 * i as f64;
                        let j = m.jet(x, 3).unwrap();
                        let v = t.apply_b(&m, x).unwrap();
                        let scale = j.magnitude() * (1.0 + x * x);
                        assert!(v.abs() <= 1e-6 * scale, "{:?} {which} x {x}", t.label);
                    }
                }
            }
        }
    }

    #[test]
    fn b_b_plus_factorization() {
        for eps in FIG_EPS {
            let t = SusyTransform::h1(eps, 4.0).unwrap();
            for n in 0..=4usize {
                let e = n as f64 + 0.5;
                for i in 0..=12 {
                    let x = -3.0 + 0.5 * i as f64;
                    let ops = t.local(x, 3).unwrap();
                    let bb = ops.b(&ops.b_plus(&psi_jet(n, x, 5).unwrap())).value();
                    let target = t.factorization_product(e) * psi_jet(n, x, 1).unwrap().value();
                    let scale = target.abs().max(1e-3 * t.factorization_product(e));
                    assert!((bb - target).abs() <= 1e-6 * scale, "n {n} x {x}: {bb} vs {target}");
                }
            }
        }
    }

    #[test]
    fn ground_state_round_trip_is_positive() {
        let t = SusyTransform::h1(0.0, 2.0).unwrap();
        let ratios: Vec<f64> = (0..=10)
            .map(|i| {
                let x = -2.5 + 0.5 * i as f64;
                let ops = t.local(x, 3).unwrap();
                ops.b(&ops.b_plus(&psi_jet(0, x, 5).unwrap())).value() / psi_jet(0, x, 1).unwrap().value()
            })
            .collect();
        for r in &ratios {
            assert!(*r > 0.0);
            assert_relative_eq!(*r, ratios[0], max_relative = 1e-8);
        }
    }

    #[test]
    fn transformed_eigenstate_properties() {
        let g = default_grid();
        let t = SusyTransform::h1(-13.0 / 9.0, 4.0).unwrap();
        let f = t.transformed_eigenstate(0, &g).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-6);
        let e = t.eigenfunction(0).unwrap();
        for i in 0..=40 {
            let x = -5.0 + 0.25 * i as f64;
            let ops = t.local(x, 1).unwrap();
            let j = e.jet(x, 3).unwrap();
            let r = ops.hamiltonian(&j).value() - 0.5 * j.value();
            let scale = j.magnitude() * (1.0 + x * x);
            assert!(r.abs() < 1e-5 * scale, "x {x}");
        }
        let t2 = SusyTransform::h2(-13.0 / 9.0, 4.0).unwrap();
        assert!(matches!(t2.transformed_eigenstate(1, &g), Err(Error::DeletedLevel { n: 1 })));
        let missing = t.missing_states(&g).unwrap();
        for m in &missing {
            assert!(f.inner(&m.state).abs() < 1e-6);
        }
    }

    #[test]
    fn missing_state_normalizability() {
        let g = default_grid();
        for eps in FIG_EPS {
            let h1 = SusyTransform::h1(eps, 4.0).unwrap().missing_states(&g).unwrap();
            assert!(h1.iter().all(|m| m.normalizable));
            let h2 = SusyTransform::h2(eps, 4.0).unwrap().missing_states(&g).unwrap();
            assert_eq!(h2[0].energy, 1.5);
            assert!(!h2[0].normalizable);
            assert!(h2[1].normalizable);
        }
    }

    #[test]
    fn missing_states_solve_their_equations() {
        let t = SusyTransform::h1(-13.0 / 9.0, 4.0).unwrap();
        for which in [1, 2] {
            let m = t.missing_fn(which);
            let e = m.energy();
            for i in 0..=40 {
                let x = -5.0 + 0.25 * i as f64;
                let ops = t.local(x, 1).unwrap();
                let j = m.jet(x, 3).unwrap();
                let r = ops.hamiltonian(&j).value() - e * j.value();
                let scale = j.magnitude() * (1.0 + x * x);
                assert!(r.abs() < 1e-5 * scale, "which {which} x {x}");
            }
        }
    }

    #[test]
    fn intertwining_with_fourth_derivatives() {
        for eps in FIG_EPS {
            let t = SusyTransform::h1(eps, 4.0).unwrap();
            for n in 0..=6usize {
                for i in 0..=12 {
                    let x = -3.0 + 0.5 * i as f64;
                    let ops = t.local(x, 3).unwrap();
                    let image = ops.b_plus(&psi_jet(n, x, 5).unwrap());
                    let r = ops.hamiltonian(&image).value() - (n as f64 + 0.5) * image.value();
                    let scale = image.magnitude() * (1.0 + x * x);
                    assert!(r.abs() < 1e-5 * scale, "n {n} x {x}");
                }
            }
        }
    }

    #[test]
    fn gram_matrix_is_identity() {
        let g = default_grid();
        let t = SusyTransform::h1(0.0, 2.0).unwrap();
        let mut fs = vec![
            g.sample_jet_fn(&t.missing_normalized(2).unwrap()).unwrap(),
            g.sample_jet_fn(&t.missing_normalized(1).unwrap()).unwrap(),
        ];
        for n in 0..=5 {
            fs.push(t.transformed_eigenstate(n, &g).unwrap());
        }
        for i in 0..fs.len() {
            for j in 0..fs.len() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((fs[i].inner(&fs[j]) - expected).abs() < 1e-6, "({i},{j})");
            }
        }
    }

    #[test]
    fn residual_helpers() {
        let grid = Grid::new(-6.0, 6.0, 61).unwrap();
        for eps in FIG_EPS {
            for t in [SusyTransform::h1(eps, 4.0).unwrap(), SusyTransform::h2(eps, 4.0).unwrap()] {
                for n in 0..=6 {
                    if t.is_deleted(n) {
                        continue;
                    }
                    let f = t.eigenfunction(n).unwrap();
                    let fr = t.factorization_residual(&f, &grid).unwrap();
                    let sr = t.schrodinger_residual(&f, f.energy(), &grid).unwrap();
                    assert!(fr < 1e-5, "{:?} n={n}: {fr}", t.label);
                    assert!(sr < 1e-8, "{:?} n={n}: {sr}", t.label);
                }
                let wrong = t.eigenfunction(2).unwrap();
                assert!(t.schrodinger_residual(&wrong, 3.5, &grid).unwrap() > 1e-2);
            }
        }
    }

    #[test]
    fn spectra_are_ordered() {
        let t1 = SusyTransform::h1(-13.0 / 9.0, 4.0).unwrap();
        let s = ExtendedHamiltonian::new(t1).spectrum(4);
        let e: Vec<f64> = s.iter().map(|l| l.1).collect();
        assert_eq!(e, vec![-1.5, -13.0 / 9.0, 0.5, 1.5]);
        let t2 = SusyTransform::h2(-13.0 / 9.0, 4.0).unwrap();
        let e2: Vec<f64> = ExtendedHamiltonian::new(t2).spectrum(4).iter().map(|l| l.1).collect();
        assert_eq!(e2, vec![0.5, -13.0 / 9.0 + 2.0, 2.5, 3.5]);
    }
}
