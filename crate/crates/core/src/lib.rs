//! Homogeneous hyperkähler metrics from holomorphic data on the disc.
//!
//! A holomorphic `ψ: 𝔻 → Q₂` (built here from Blaschke products) and the
//! modular covering `Φ: 𝔻 → S² ∖ {3 points}` determine a Gibbons–Hawking
//! potential `V` and connection `η` on `𝔻 × ℝ × S¹`. The crate assembles the
//! metric and its three symplectic forms, then checks them numerically.
//!
//! Module map, roughly in pipeline order:
//!
//! - [`complex`]: Blaschke products, `ψ = i√(1 − B)`, post-compositions `μ`.
//! - [`tessellation`]: the ideal-triangle tessellation, Farey labels, cusps.
//! - [`covering`]: theta series, `λ`, the covering `Φ` and hororegions.
//! - [`ansatz`]: `V`, `η`, `Ω_i`, `g` and the canonical slice.
//! - [`verify`]: identity residuals, curvature, contact geometry.
//! - [`paths`]: path lengths under the various metrics, divergence sweeps.
//!
//! ```
//! use gh_ansatz::ansatz::{FourPoint, HolomorphicData};
//! use gh_ansatz::Complex;
//!
//! let flat = HolomorphicData::flat_reference(0.5).unwrap();
//! let s = flat.assemble(FourPoint::new(Complex::new(0.1, 0.2), 0.0, 0.0)).unwrap();
//! // One-centre potential: V = Im φ / ρ.
//! assert!((s.v - 0.5 / s.rho).abs() < 1e-12);
//! ```

pub mod complex;
pub mod error;
pub mod sampling;

pub use complex::Complex;
pub use error::{Error, Result};
pub mod ansatz;
pub mod covering;
pub mod fd;
pub mod paths;
pub mod quadrature;
pub mod tessellation;
pub mod verify;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/tessellation.md")]
    mod tessellation {}
    #[doc = include_str!("../../../book/src/covering.md")]
    mod covering {}
    #[doc = include_str!("../../../book/src/ansatz.md")]
    mod ansatz {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/paths.md")]
    mod paths {}
}
