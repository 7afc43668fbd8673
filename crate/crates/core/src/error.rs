use thiserror::Error;

/// Errors raised anywhere in the crate.
///
/// Every variant maps to a stable machine-readable code via [`Error::code`],
/// which the command-line front end reports on failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative probability mass {value} at cell {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("tensor has {actual} entries but the declared shape needs {expected}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("duplicate variable label `{0}`")]
    DuplicateVariable(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` appears in more than one argument set")]
    OverlappingSets(String),

    #[error("a Markov chain needs at least 3 links, got {0}")]
    ChainTooShort(usize),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("operation requires a single destination, network has L = {0}")]
    MultipleDestinations(usize),

    #[error("malformed document: {0}")]
    Parse(String),

    #[error("document does not match the network schema: {0}")]
    Schema(String),

    #[error("invalid cooperation plan {plan:?}: {reason}")]
    InvalidPlan { plan: Vec<usize>, reason: String },

    #[error("{count} cooperation plans exceed the cap of {cap}; supply an explicit plan")]
    TooManyPlans { count: u128, cap: usize },

    #[error("{what} has size {size}, above the cap of {cap}")]
    TooLarge { what: &'static str, size: u128, cap: u128 },

    #[error("network is not degraded (physically degraded: {physical}, side information: {side_info})")]
    NotDegraded { physical: bool, side_info: bool },

    #[error("network does not have the common-broadcast shape: {0}")]
    NotBroadcastShape(String),

    #[error("network does not have the single-relay broadcast shape: {0}")]
    NotLemmaShape(String),

    #[error("the typical set is empty for m = {m}, epsilon = {epsilon}")]
    DegenerateTypicalSet { m: usize, epsilon: f64 },

    #[error("plan does not fit the simulated scheme: {0}")]
    PlanMismatch(String),

    #[error("B = {b} is too small, the schedule needs at least {min}")]
    BTooSmall { b: usize, min: usize },

    #[error("backward decoding is implemented for K <= 2, network has K = {0}")]
    UnsupportedK(usize),

    #[error("sequence `{label}` has length {actual}, expected {expected}")]
    LengthMismatch { label: String, expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Stable identifier for the error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NegativeMass { .. } => "NegativeMass",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::DuplicateVariable(_) => "DuplicateVariable",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::OverlappingSets(_) => "OverlappingSets",
            Error::ChainTooShort(_) => "ChainTooShort",
            Error::AlphabetMismatch(_) => "AlphabetMismatch",
            Error::MultipleDestinations(_) => "MultipleDestinations",
            Error::Parse(_) => "ParseError",
            Error::Schema(_) => "SchemaError",
            Error::InvalidPlan { .. } => "InvalidPlan",
            Error::TooManyPlans { .. } => "TooManyPlans",
            Error::TooLarge { .. } => "TooLarge",
            Error::NotDegraded { .. } => "NotDegraded",
            Error::NotBroadcastShape(_) => "NotBroadcastShape",
            Error::NotLemmaShape(_) => "NotLemmaShape",
            Error::DegenerateTypicalSet { .. } => "DegenerateTypicalSet",
            Error::PlanMismatch(_) => "PlanMismatch",
            Error::BTooSmall { .. } => "BTooSmall",
            Error::UnsupportedK(_) => "UnsupportedK",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
