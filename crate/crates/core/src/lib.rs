//! Exact power indices for discrete models under product distributions.
//!
//! Every quantity is computed over ℚ. Models only need to answer
//! `evaluate` and `expected_value` queries; the index algorithms reduce to
//! a handful of expectation calls under reweighted product distributions
//! and never enumerate coalitions. The [`oracle`] module does enumerate,
//! and exists to check the fast paths.

pub mod converse;
pub mod distribution;
pub mod error;
pub mod exec;
pub mod gen;
pub mod indices;
pub mod interaction;
pub mod io;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod rational;
pub mod space;

pub use distribution::{bernoulli_mixture, condition, mixture_distribution, ProductDistribution};
pub use error::{Error, Result};
pub use indices::{
    attribute_all, compute_bernoulli_index, compute_simple_index, AttributionReport, BernoulliWeights, ComputationPath,
    IndexPreset, Scheme, SimpleWeights,
};
pub use models::{
    conditional_expectation, AdditiveModel, CountingModel, EnsembleModel, Model, TableModel, TreeModel, TreeNode,
};
pub use rational::Rational;
pub use space::{Coalition, Feature, FeatureSpace, Instance};
