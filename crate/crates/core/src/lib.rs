//! Killing tensors on flat and conformally flat tori.
//!
//! Symmetric tensor fields are stored as momentum polynomials whose
//! coefficients are trigonometric polynomials on `T^n`. On top of that sit
//! the flat and conformal Killing operators, their band-limited spectral
//! matrices and exact or floating nullspaces, the scalar recursion for the
//! last-axis components, and a geodesic integrator for drift checks.

pub mod diffops;
pub mod error;
pub mod geoflow;
pub mod kernelsolve;
pub mod odelemma;
pub mod random;
pub mod report;
pub mod scalar;
pub mod symalg;
pub mod torusfn;

pub use diffops::{assemble_operator, killing_residual, KillingOperator, OperatorVariant, SparseLinearMap};
pub use error::{Error, Result};
pub use geoflow::{DriftReport, GeodesicState};
pub use kernelsolve::{
    compute_kernel, predicted_dimension, span_basis, verify_theorem, KernelBasis, VerificationReport,
    VerifyOptions,
};
pub use report::RunConfig;
pub use scalar::{Arith, Rational, Scalar};
pub use symalg::{MultiIndex, SymTensorField};
pub use torusfn::{ConformalFactor, Freq, TorusScalar};
