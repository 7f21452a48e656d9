use thiserror::Error;

/// Failure modes shared by every module of the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series did not converge after {terms} terms (last term {last_term:e})")]
    NonConvergent { terms: usize, last_term: f64 },

    #[error("lower parameter {b} is a pole of the series")]
    PoleAtB { b: f64 },

    #[error("argument {arg} outside the domain of {function}")]
    Domain { function: &'static str, arg: f64 },

    #[error("adaptive quadrature failed: {reason} (estimate {estimate:e}, error {error:e})")]
    QuadratureFailure {
        reason: &'static str,
        estimate: f64,
        error: f64,
    },

    #[error("Wronskian vanishes at x = {x} (|W| = {w:e}, scale {scale:e})")]
    ZeroWronskian { x: f64, w: f64, scale: f64 },

    #[error("level n = {n} is deleted by the transformation")]
    DeletedLevel { n: usize },

    #[error("coherent states live in different subspaces (nu = {left} vs {right})")]
    SubspaceMismatch { left: i32, right: i32 },

    #[error("Pochhammer base {base} is a non-positive integer")]
    ParameterPole { base: f64 },

    #[error("mean occupation is zero; the Mandel parameter is 0/0")]
    ZeroMeanOccupation,

    #[error("oscillator index {n} exceeds the supported maximum {max}")]
    Overflow { n: usize, max: usize },

    #[error("moment s = {s} diverges: Gamma({arg}) argument is not positive")]
    DivergentMoment { s: usize, arg: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
