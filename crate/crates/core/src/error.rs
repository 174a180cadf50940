use thiserror::Error;

/// Errors surfaced by state construction, strategy building and sampling.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("Weyl basis requires odd dimension, got d = {0}")]
    EvenDimension(usize),
    #[error("numerical domain violation: {0}")]
    NumericalDomain(String),
    #[error("coefficients are not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("degenerate state: normalization constant {0:.3e} below tolerance")]
    DegenerateState(f64),
    #[error("singular angle tau = {0}: strategy undefined, use a special-case strategy")]
    SingularAngle(f64),
    #[error("state is not separable (Schmidt rank > 1)")]
    NotSeparable,
    #[error("states are not orthogonal (|overlap| = {0:.3e})")]
    NotOrthogonal(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("target is not pure (sum of chi^2 deviates from 1 by {0:.3e})")]
    ImpureTarget(f64),
    #[error("unsupported dimension d = {0} (max {1})")]
    UnsupportedDimension(usize, usize),
    #[error("characteristic functions use different bases or dimensions")]
    BasisMismatch,
    #[error("characteristic function is incomplete: {0}")]
    IncompleteFunction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
