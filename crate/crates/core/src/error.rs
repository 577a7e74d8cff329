use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is {rows}x{cols}, expected a square matrix of dimension 2, 4 or 8")]
    BadShape { rows: usize, cols: usize },

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("state is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("expectation value has imaginary residue {0:e}; argument is not Hermitian")]
    ComplexExpectation(f64),

    #[error("variance {0:e} is negative beyond rounding")]
    NegativeVariance(f64),

    #[error("{name} = {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("r_H = r_V = {0}: contextual values are unbounded in the weak limit")]
    DegenerateSlide(f64),

    #[error("estimate undefined for outcome w = {outcome:+}: outcome probability {probability:e}")]
    UndefinedEstimate { outcome: i8, probability: f64 },

    #[error("estimator value {0} is not finite")]
    NonFiniteEstimator(f64),

    #[error("reconstructed squared inaccuracy {0:e} is negative beyond tolerance; input data is inconsistent")]
    InconsistentData(f64),

    #[error("{name} = {value} must be nonnegative")]
    NegativeInput { name: &'static str, value: f64 },

    #[error("estimators do not commute (commutator norm {0:e})")]
    NonCommutingEstimators(f64),

    #[error("effects do not sum to the identity (deviation {0:e})")]
    IncompleteFamily(f64),

    #[error("no operator registered under `{0}`")]
    UnknownOperator(String),

    #[error("ordering is only established for optimal estimates of {0}")]
    NotApplicable(&'static str),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing record for outcome (m, y, w) = ({m:+}, {y:+}, {w:+})")]
    MissingOutcome { m: i8, y: i8, w: i8 },

    #[error("duplicate record for outcome (m, y, w) = ({m:+}, {y:+}, {w:+})")]
    DuplicateOutcome { m: i8, y: i8, w: i8 },

    #[error("probabilities sum to {sum}, outside 1 ± {tolerance}")]
    Normalization { sum: f64, tolerance: f64 },

    #[error("missing metadata key `{0}`")]
    MissingMetadata(&'static str),

    #[error("unknown tolerance profile `{0}`")]
    UnknownProfile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
