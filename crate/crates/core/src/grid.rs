//! Uniform evaluation grids and sampled functions.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::JetFn;
use crate::quadrature::simpson_weights;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            min: -10.0,
            max: 10.0,
            points: 2001,
        }
    }
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min < max) || points < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid [{min}, {max}] with {points} points"
            )));
        }
        Ok(Self { min, max, points })
    }

    /// Symmetric grid `[-half, half]` with spacing `h`.
    pub fn symmetric(half: f64, h: f64) -> Self {
        let points = (2.0 * half / h).round() as usize + 1;
        Self {
            min: -half,
            max: half,
            points,
        }
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.max
        } else {
            self.min + i as f64 * self.spacing()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.x(i)).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        simpson_weights(self.points, self.spacing())
    }

    /// Samples `f` at every node, in parallel.
    pub fn sample<F>(&self, f: F) -> Result<GridFunction>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let values = (0..self.points)
            .into_par_iter()
            .map(|i| f(self.x(i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridFunction { grid: *self, values })
    }

    pub fn sample_jet_fn<F: JetFn + ?Sized>(&self, f: &F) -> Result<GridFunction> {
        self.sample(|x| f.eval(x))
    }
}

/// Values of a real function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn integral(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }

    pub fn inner(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.grid, other.grid, "inner product across different grids");
        self.grid
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn normalized(&self) -> GridFunction {
        self.scaled(1.0 / self.norm())
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Number of sign changes between consecutive nonzero samples.
    pub fn sign_changes(&self) -> usize {
        let mut prev = 0.0f64;
        let mut count = 0;
        for &v in &self.values {
            if v != 0.0 {
                if prev != 0.0 && v.signum() != prev.signum() {
                    count += 1;
                }
                prev = v;
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_grid_matches_design() {
        let g = Grid::default();
        assert_relative_eq!(g.spacing(), 0.01, max_relative = 1e-14);
        assert_eq!(g.x(1000), 0.0);
        assert_eq!(g.x(2000), 10.0);
    }

    #[test]
    fn gaussian_norm() {
        let g = Grid::default();
        let f = g.sample(|x| Ok((-x * x / 2.0).exp())).unwrap();
        assert_relative_eq!(f.norm_sq(), std::f64::consts::PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Grid::new(1.0, 1.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 2).is_err());
    }

    #[test]
    fn counts_sign_changes() {
        let g = Grid::new(-3.0, 3.0, 61).unwrap();
        let f = g.sample(|x| Ok(x * x - 1.0)).unwrap();
        assert_eq!(f.sign_changes(), 2);
    }
}
