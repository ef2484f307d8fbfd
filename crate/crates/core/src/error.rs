use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty dimension")]
    EmptyDimension,
    #[error("non-finite value")]
    NonFinite,
    #[error("QR iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("matrix singular to working tolerance (pivot magnitude {pivot:e})")]
    SingularToTolerance { pivot: f64 },
    #[error("family evaluator failed: {0}")]
    EvaluatorFailure(String),
    #[error("polynomial degree {degree} exceeds the cap of {cap}")]
    DegreeTooHigh { degree: usize, cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("eigenvalue is not simple: gap {gap:e} <= threshold {threshold:e}")]
    NotSimple { gap: f64, threshold: f64 },
    #[error("left eigenvalue pairing is ambiguous: {0}")]
    PairingAmbiguous(String),
    #[error("right and left eigenvectors are nearly orthogonal (|y*x| = {product:e} relative)")]
    NearOrthogonalPair { product: f64 },
    #[error("could not move the eigenvalue to the front of the Schur form")]
    ReorderFailure,
    #[error("square-root argument {re:e}{im:+e}i is within the guard band of the branch cut")]
    BranchCutViolation { re: f64, im: f64 },
    #[error("pinned entry {index} is zero to tolerance (|entry| = {magnitude:e})")]
    PinnedEntryZero { index: usize, magnitude: f64 },
    #[error("eigenvector is isotropic (|xᵀx| = {magnitude:e} relative)")]
    IsotropicVector { magnitude: f64 },
    #[error("reference entry has negligible real and imaginary parts")]
    AmbiguousSign,
    #[error("no unique eigenvalue near the reference at step {step:e}")]
    MatchingFailure { step: f64 },
    #[error("normalization {0} cannot be verified by finite differences")]
    NotVerifiable(String),
    #[error("resolvent solve failed at a quadrature node: {0}")]
    ResolventBreakdown(String),
    #[error("contour count {value} is not within 0.1 of an integer")]
    NonIntegerResult { value: f64 },
}
