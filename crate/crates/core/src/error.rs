use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dataset has no variables")]
    NoVariables,
    #[error("variable names must be unique; `{0}` appears more than once")]
    DuplicateName(String),
    #[error("record has {found} fields, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("invalid mass {0}: masses must be finite and non-negative")]
    InvalidMass(f64),
    #[error("total mass must be positive")]
    EmptyMass,
    #[error("code {code} out of range for variable `{variable}` with {cardinality} levels")]
    CodeOutOfRange {
        variable: String,
        code: u32,
        cardinality: usize,
    },
    #[error("column lengths disagree")]
    RaggedColumns,
    #[error("variable index {0} out of range")]
    UnknownVariable(usize),
    #[error("variable `{0}` not found")]
    UnknownName(String),
    #[error("variable index {0} listed twice")]
    RepeatedIndex(usize),
    #[error("empty variable set")]
    EmptyIndexSet,
    #[error("response variable {0} is also an explanatory member")]
    Overlap(usize),
    #[error("operation requires unit-mass rows; expand the weighted table to unit rows first")]
    WeightedRows,
    #[error("masses are not whole numbers and cannot be expanded to unit rows")]
    NonIntegralMass,
    #[error("fraction {0} must lie strictly between 0 and 1")]
    InvalidFraction(f64),
    #[error("response has a single level with positive mass")]
    DegenerateResponse,
    #[error("weight vector has {found} components, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("weights must be finite, non-negative and not all zero")]
    InvalidWeights,
    #[error("weights sum to {0}, not 1")]
    NotOnSimplex(f64),
    #[error("weights are not regular (some component is zero)")]
    IrregularWeights,
    #[error("inverse-probability weights need every response level to have positive mass")]
    ZeroProbabilityLevel,
    #[error("{quantity} = {value} is outside [0, 1] beyond rounding")]
    OutOfRange { quantity: &'static str, value: f64 },
    #[error("no candidate variables")]
    NoCandidates,
    #[error("subset is not contained in the full variable set")]
    NotSubset,
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("test response level `{0}` does not occur in training data")]
    UnseenResponseLevel(String),
    #[error("variable `{0}` missing from test data")]
    MissingTestVariable(String),
    #[error("stratum is empty")]
    EmptyStratum,
    #[error("bootstrap failed on {failed} of {iterations} iterations")]
    TooManyFailures { failed: usize, iterations: usize },
    #[error("confidence {0} must lie strictly between 0 and 1")]
    InvalidConfidence(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
