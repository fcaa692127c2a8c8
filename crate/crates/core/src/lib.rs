//! Verification kernels for generalized Killing spinors on round spheres.
//!
//! Spinor fields on `Sⁿ` are polynomial maps from `ℝ^{n+1}` into a module of
//! `Cl_{n+1}`, read through the flat cone: `X·ψ = X·x·ψ` and
//! `∇_X ψ = D_X ψ + ½ X·x·ψ`. Every canonical field is polynomial, so all
//! derivatives are exact.

pub mod clifford;
pub mod constructions;
pub mod error;
pub mod field;
pub mod gks;
pub mod linalg;
pub mod poly;
pub mod report;
pub mod sampling;
pub mod sphere;
pub mod spinor;
pub mod weitzenbock;

pub use error::{GksError, Result};
