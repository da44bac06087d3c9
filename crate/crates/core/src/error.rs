//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} is not supported here (need d >= 2)")]
    InvalidDimension { dim: usize },

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: String },

    #[error("matrix is not Hermitian: max |a[i][j] - conj(a[j][i])| = {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("operator is not positive: min eigenvalue {min_eigenvalue:.6e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace:.12}, expected {expected}")]
    TraceMismatch { trace: f64, expected: f64 },

    #[error("effect eigenvalues [{min_eigenvalue:.6e}, {max_eigenvalue:.6e}] fall outside [0, 1]")]
    EffectOutOfRange {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("POVM must have at least one outcome")]
    EmptyPovm,

    #[error("operator sum deviates from the expected total by {residual:.3e}")]
    SumMismatch { residual: f64 },

    #[error("ontic space labels must be unique and nonempty")]
    BadOnticSpace,

    #[error("ontic spaces disagree (sizes {left} vs {right}, or labels differ)")]
    OnticSpaceMismatch { left: usize, right: usize },

    #[error("lengths disagree: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("mixture weights invalid: {reason}")]
    BadWeights { reason: String },

    #[error("basis is not orthonormal: max |Tr[B_i B_j] - δ_ij| = {max_deviation:.3e}")]
    BasisNotOrthonormal { max_deviation: f64 },

    #[error("frame operator has rank {rank}, need {needed} for a canonical dual")]
    RankDeficientFrame { rank: usize, needed: usize },

    #[error("canonical dual element at label {label:?} has trace {trace:.12}, expected 1")]
    DualTraceViolation { label: String, trace: f64 },

    #[error("sample operators span a subspace of rank {rank}, need {needed}")]
    RankDeficientSamples { rank: usize, needed: usize },

    #[error("sampled values are inconsistent with a linear functional: fit residual {residual:.3e}")]
    InconsistentSamples { residual: f64 },

    #[error("operator has rank {rank}, expected rank 1")]
    NotRankOne { rank: usize },

    #[error("decomposition term {index} is not positive: min eigenvalue {min_eigenvalue:.6e}")]
    TermsNotPositive {
        index: usize,
        min_eigenvalue: f64,
    },

    #[error("input {item} is not diagonal in the computational basis")]
    NotDiagonal { item: String },

    #[error("measurement bases share a proportional element: outcome {index_a} of A vs outcome {index_b} of B")]
    BasesShareElement { index_a: usize, index_b: usize },

    #[error("invalid configuration: {reason}")]
    ConfigInvalid { reason: String },

    #[error("eigensolver failed to converge")]
    EigensolverFailure,

    #[error("premises passed but no proportionality witness was found")]
    NoWitnessFound,

    #[error("parse error: {message}")]
    Parse { message: String },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}
