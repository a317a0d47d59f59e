//! Compound matrices, log norms of compounds, and compound-free sufficient
//! conditions for k-contraction of dynamical systems.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the CLI uses.

// `!(x > 0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod compounds;
pub mod duality;
pub mod dynamics;
pub mod error;
pub mod lexidx;
pub mod linalg;
pub mod lognorms;
pub mod matrix;
pub mod scalar;

/// Version of this crate, echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::Real;

pub use compounds::{CompoundKind, CompoundMatrix};
pub use certify::{Certificate, JacobianSampler, Method};
pub use duality::DualityMatrix;
pub use dynamics::{HopfieldModel, Trajectory};
pub use lexidx::{IndexSeq, LexTable};
pub use lognorms::{LogNormSpec, NormKind, Scaling, TauSpec};

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type CompoundMatrix64 = CompoundMatrix<f64>;
pub type LogNormSpec64 = LogNormSpec<f64>;
pub type TauSpec64 = TauSpec<f64>;
pub type Scaling64 = Scaling<f64>;
pub type Certificate64 = certify::Certificate<f64>;
pub type HopfieldModel64 = dynamics::HopfieldModel<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
