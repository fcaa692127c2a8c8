use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GksError {
    #[error("{what} = {value} is outside the supported range {range}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        range: &'static str,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point is not on the unit sphere (|x| = {0})")]
    NotOnSphere(f64),
    #[error("vector is not tangent to the sphere (|<v, x>| = {0:e})")]
    NotTangent(f64),
    #[error("field is not tangential at a sample (defect {0:e})")]
    NotTangential(f64),
    #[error("matrix is not skew-symmetric (|F + Fᵀ| = {0:e})")]
    NotSkew(f64),
    #[error("spinor is not of unit length (|ψ| = {0})")]
    NotUnit(f64),
    #[error("symmetric tensor is not trace-free (|tr h| = {0:e})")]
    NotTraceFree(f64),
    #[error("symmetric tensor is not divergence-free (|δ∇h| = {0:e})")]
    NotDivergenceFree(f64),
    #[error("not a generalized Killing spinor at x (residual {0:e})")]
    NotGeneralizedKilling(f64),
    #[error("joint kernel has dimension {got}, expected {expected}")]
    KernelDimension { expected: usize, got: usize },
    #[error("endomorphism is not two-eigenvalue at a sample: {0}")]
    NotTwoEigenvalue(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, GksError>;
