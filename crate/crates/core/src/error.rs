use crate::complex::Complex;
use thiserror::Error;

/// Errors raised anywhere in the construction or verification pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Blaschke zero {0}: require 0 < |a| < 1")]
    InvalidZero(Complex),

    #[error("pole: denominator modulus {0:e} is below the evaluation threshold")]
    Pole(f64),

    #[error("{0} lies outside the square-root branch domain Re w > 0")]
    BranchDomain(Complex),

    #[error("invalid post-composition map: {0}")]
    InvalidMu(String),

    #[error("requested depth {requested} exceeds the enumeration guard {max}")]
    Size { requested: usize, max: usize },

    #[error("theta series not convergent at tau = {0} (imaginary part too small)")]
    Convergence(Complex),

    #[error("{0} maps to a puncture")]
    Puncture(Complex),

    #[error("invalid holomorphic data: {0}")]
    InvalidData(String),

    #[error("quadrature along path failed: {0}")]
    Path(String),

    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("finite-difference stencil failed: {0}")]
    Stencil(String),

    #[error("path left the hororegion: {0}")]
    Region(String),

    #[error("point outside the domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
