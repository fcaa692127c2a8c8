//! Explicit generalized Killing spinors and the two-eigenvalue classification.

pub mod classify;
pub mod dim15;
pub mod rho;
pub mod s3;
pub mod s7;

pub use classify::{two_eig_classify, Reason, TwoEigData, TwoEigVerdict};
pub use dim15::{cross_product_from_spinor, dim15_obstruction, Dim15Report};
pub use rho::{rho_module_check, RhoReport};
pub use s3::{s3_example, S3Example};
pub use s7::{canonical_s7, solve_psi1, CanonicalS7, QuaternionicStructure};
