//! Probabilistic distance clustering (PD-clustering) and factor PD-clustering
//! (FPDC), together with the tooling needed to study them: a Tucker3
//! decomposition of the unit × variable × cluster distance tensor, seeded
//! benchmark generators, and cluster validation metrics.
//!
//! The numerical core is generic over the floating point type through
//! [`Scalar`]. Most users want the `f64` aliases exported at the crate root.

pub mod error;
pub mod evaluation;
pub mod fpdc;
pub mod linalg;
pub mod pdc;
pub mod scalar;
pub mod simdata;
pub mod tucker;

mod sampling;

pub use error::{Error, Result};
pub use linalg::{kronecker, truncated_basis, Matrix, Mode, Tensor3};
pub use scalar::Scalar;

/// Dense `f64` matrix.
pub type Matrix64 = Matrix<f64>;
/// Dense `f32` matrix.
pub type Matrix32 = Matrix<f32>;
/// Three-way `f64` array.
pub type Tensor64 = Tensor3<f64>;
/// Three-way `f32` array.
pub type Tensor32 = Tensor3<f32>;

pub type PdcConfig64 = pdc::PdcConfig<f64>;
pub type PdcModel64 = pdc::PdcModel<f64>;
pub type PdcConfig32 = pdc::PdcConfig<f32>;
pub type PdcModel32 = pdc::PdcModel<f32>;

pub type TuckerFactors64 = tucker::TuckerFactors<f64>;
pub type TuckerFactors32 = tucker::TuckerFactors<f32>;

pub type FpdcConfig64 = fpdc::FpdcConfig<f64>;
pub type FpdcModel64 = fpdc::FpdcModel<f64>;
pub type FpdcConfig32 = fpdc::FpdcConfig<f32>;
pub type FpdcModel32 = fpdc::FpdcModel<f32>;
