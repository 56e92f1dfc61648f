//! Dispersion analysis for the p-th order continuous interior penalty FEM
//! (CIP-FEM) on tensor-product meshes.
//!
//! The crate has three layers:
//!
//! - an exact layer ([`exact`], [`basis`], [`series`]) doing rational and
//!   Gaussian-rational arithmetic, Lagrange/Legendre polynomial algebra and
//!   truncated power series, used to extract phase-error expansions with
//!   exact coefficients;
//! - a symbol layer ([`symbol`]) building the p^d x p^d Bloch symbol of the
//!   CIP-FEM scheme in one to three dimensions, both as complex matrices and
//!   as matrices of series, together with the static-condensation transform;
//! - a numeric layer ([`dispersion`], [`fem`]) computing discrete wave
//!   numbers by determinant root finding, penalty parameters, and validating
//!   the predictions against an actual 1D/2D CIP-FEM Helmholtz solver.
//!
//! [`verify`] bundles the identity suites that cross-check the closed forms
//! against brute-force evaluations.

pub mod basis;
pub mod dispersion;
pub mod error;
pub mod exact;
pub mod fem;
pub mod linalg;
pub mod series;
pub mod symbol;
pub mod verify;

pub use error::{Error, Result};
