//! Classification of real square matrices by their eventual sign and total
//! positivity properties.
//!
//! The crate is layered bottom-up:
//!
//! - [`matrix`] and [`scalar`]: dense arithmetic over exact rationals or
//!   binary64, with powers, LU solves and determinants.
//! - [`exterior`]: lexicographic index sets, compound matrices, exterior
//!   and tensor products.
//! - [`signs`]: sign patterns, sign-change counts, J-sign-symmetry
//!   detection, and brute-force minor oracles (TP, STP, P, TSA, ...).
//! - [`spectral`]: power and inverse iteration, spectra from compound
//!   spectral radii, and the Perron-Frobenius style certificates.
//! - [`classify`]: tri-state verdicts for eventual properties, each backed
//!   by a spectral certificate and a finite power search.
//! - [`generate`]: fixed-seed generators for test corpora.

pub mod classify;
pub mod error;
pub mod exterior;
pub mod generate;
pub mod matrix;
pub mod scalar;
pub mod signs;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{AnyMatrix, Matrix, Vector};
pub use num_rational::BigRational;
pub use scalar::{Backend, Scalar, Sign};
