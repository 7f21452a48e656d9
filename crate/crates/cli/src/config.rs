//! Run configuration: defaults, then an optional `key = value` file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use susyosc::ladder::Nu;
use susyosc::susy::SusyTransform;
use susyosc::Grid;

use crate::error::{CliError, CliResult};

pub const GRID_POINTS_ENV: &str = "SUSYOSC_GRID_POINTS";
pub const MIN_GRID_POINTS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every subcommand. All are optional so that a config file
/// can supply them.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Factorization energy of the added level, in (-3/2, 1/2).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    /// Seed mixing parameter, > 0.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Ladder subspace, -2 or 1.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub nu: Option<i32>,
    #[arg(long = "z-re", global = true, allow_hyphen_values = true)]
    pub z_re: Option<f64>,
    #[arg(long = "z-im", global = true, allow_hyphen_values = true)]
    pub z_im: Option<f64>,
    /// Coherent-state truncation; adaptive when absent.
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    #[arg(long = "grid-min", global = true, allow_hyphen_values = true)]
    pub grid_min: Option<f64>,
    #[arg(long = "grid-max", global = true, allow_hyphen_values = true)]
    pub grid_max: Option<f64>,
    #[arg(long = "grid-points", global = true)]
    pub grid_points: Option<usize>,
    /// Evolution time.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Plain-text `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub eps: f64,
    pub gamma: f64,
    /// `None` lets sweep commands cover both subspaces.
    pub nu: Option<i32>,
    pub z_re: f64,
    pub z_im: f64,
    pub nmax: Option<usize>,
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub t: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eps: 0.0,
            gamma: 2.0,
            nu: None,
            z_re: 10.0,
            z_im: 0.0,
            nmax: None,
            grid_min: None,
            grid_max: None,
            grid_points: None,
            t: 0.0,
            out: None,
            format: Format::Csv,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value {value:?} for {key}")))
}

impl RunConfig {
    /// Merges defaults, `SUSYOSC_GRID_POINTS`, the config file and flags, then
    /// validates.
    pub fn resolve(flags: &Overrides, env_points: Option<&str>) -> CliResult<Self> {
        let mut cfg = Self::default();
        if let Some(raw) = env_points {
            cfg.grid_points = Some(parse_value(GRID_POINTS_ENV, raw.trim())?);
        }
        if let Some(path) = &flags.config {
            cfg.apply_file(path)?;
        }
        cfg.apply_flags(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, path: &Path) -> CliResult<()> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigFile {
            path: path.to_path_buf(),
            source,
        })?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("{}:{}: expected key = value", path.display(), lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key.replace('-', "_").as_str() {
            "eps" => self.eps = parse_value(key, value)?,
            "gamma" => self.gamma = parse_value(key, value)?,
            "nu" => self.nu = Some(parse_value(key, value)?),
            "z_re" => self.z_re = parse_value(key, value)?,
            "z_im" => self.z_im = parse_value(key, value)?,
            "nmax" => self.nmax = Some(parse_value(key, value)?),
            "grid_min" => self.grid_min = Some(parse_value(key, value)?),
            "grid_max" => self.grid_max = Some(parse_value(key, value)?),
            "grid_points" => self.grid_points = Some(parse_value(key, value)?),
            "t" => self.t = parse_value(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => {
                self.format = Format::from_str(value, true)
                    .map_err(|_| CliError::Config(format!("unknown format {value:?}")))?
            }
            other => return Err(CliError::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    fn apply_flags(&mut self, f: &Overrides) {
        macro_rules! take {
            ($($field:ident),*) => {$(if let Some(v) = f.$field { self.$field = v; })*};
        }
        macro_rules! take_opt {
            ($($field:ident),*) => {$(if f.$field.is_some() { self.$field = f.$field; })*};
        }
        take!(eps, gamma, z_re, z_im, t);
        take_opt!(nu, nmax, grid_min, grid_max, grid_points);
        if let Some(format) = f.format {
            self.format = format;
        }
        if f.out.is_some() {
            self.out = f.out.clone();
        }
    }

    fn validate(&self) -> CliResult<()> {
        for (name, v) in [("eps", self.eps), ("gamma", self.gamma), ("z-re", self.z_re), ("z-im", self.z_im), ("t", self.t)] {
            if !v.is_finite() {
                return Err(CliError::Config(format!("{name} must be finite")));
            }
        }
        // The transformation constructor owns the admissible (eps, gamma) set.
        SusyTransform::h1(self.eps, self.gamma).map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(nu) = self.nu {
            Nu::from_value(nu).map_err(|e| CliError::Config(e.to_string()))?;
        }
        if let Some(points) = self.grid_points {
            if points < MIN_GRID_POINTS {
                return Err(CliError::Config(format!(
                    "grid-points = {points}, at least {MIN_GRID_POINTS} required"
                )));
            }
        }
        Ok(())
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.z_re, self.z_im)
    }

    /// The configured subspace, or `default` when none was given.
    pub fn nu_or(&self, default: Nu) -> Nu {
        self.nu.and_then(|v| Nu::from_value(v).ok()).unwrap_or(default)
    }

    /// The configured subspace, or both.
    pub fn nus(&self) -> Vec<Nu> {
        match self.nu.and_then(|v| Nu::from_value(v).ok()) {
            Some(nu) => vec![nu],
            None => vec![Nu::Minus2, Nu::One],
        }
    }

    /// Grid with unset fields taken from `default`.
    pub fn grid(&self, default: Grid) -> CliResult<Grid> {
        let g = Grid::new(
            self.grid_min.unwrap_or(default.min),
            self.grid_max.unwrap_or(default.max),
            self.grid_points.unwrap_or(default.points),
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(g)
    }
}
