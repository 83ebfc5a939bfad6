//! Complex LMS adaptation on proper and improper Gaussian inputs.
//!
//! The crate simulates LMS ensembles and predicts their mean-square error
//! with a second-order model that keeps the cross term `k = q - C w*`
//! dropped by the classical independence analysis.
//!
//! * [`numerics`]: complex vectors and matrices, Hermitian eigensolver, Takagi factorization.
//! * [`signals`]: improper white sources and the two scenario plants.
//! * [`statistics`]: analytic moments and the Wiener solution.
//! * [`theory`]: mean-weight and MSE recursions, step-size bounds, closed forms.
//! * [`simulator`]: deterministic, parallel Monte Carlo.
//! * [`experiment`]: JSON configs, comparison reports and CSV output.

// `!(x > 0.0)` guards are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod numerics;
pub mod signals;
pub mod simulator;
pub mod statistics;
pub mod theory;

pub use error::{LmsError, Result};
pub use numerics::{CplxMat, CplxVec, C64};
