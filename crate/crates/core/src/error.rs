use thiserror::Error;

use crate::rational::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid feature space: {0}")]
    InvalidSpace(String),

    #[error("objects are bound to different feature spaces")]
    SpaceMismatch,

    #[error("feature index {index} out of range for {n} features")]
    FeatureOutOfRange { index: usize, n: usize },

    #[error("value index {value} out of range for feature {feature} (domain size {size})")]
    ValueOutOfRange { feature: usize, value: usize, size: usize },

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("value `{value}` is not in the domain of feature `{feature}`")]
    UnknownValue { feature: String, value: String },

    #[error("invalid probability {value} for feature {feature}")]
    InvalidProbability { feature: usize, value: Rational },

    #[error("marginal of feature {feature} sums to {sum}, expected 1")]
    NotNormalized { feature: usize, sum: Rational },

    #[error("mixture parameter must be nonnegative, got {0}")]
    NegativeMixture(Rational),

    #[error("inclusion probability {value} for feature {feature} is outside [0, 1]")]
    ThetaOutOfRange { feature: usize, value: Rational },

    #[error("feature {0} is already a member of the coalition")]
    FeatureInCoalition(usize),

    #[error("target set and coalition overlap")]
    OverlappingSets,

    #[error("target set must be nonempty")]
    EmptySet,

    #[error("target set has {size} features; at most {max} are supported")]
    SetTooLarge { size: usize, max: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("converse reduction inapplicable: q_0 must be positive")]
    ConverseInapplicable,

    #[error("interpolation nodes must be pairwise distinct")]
    DuplicateNodes,

    #[error("invalid interpolation nodes: {0}")]
    InvalidNodes(String),

    #[error("singular linear system")]
    Singular,

    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("table with {0} entries exceeds the 2^24 limit")]
    TableTooLarge(u128),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("cannot parse rational literal `{0}`")]
    ParseRational(String),

    #[error("{0}")]
    Schema(String),
}
