//! Models `F: Ω → ℚ` and their expected-value engines.
//!
//! Every reduction in this crate talks to a model only through
//! [`Model::expected_value`] (plus [`Model::evaluate`] for the closed-form
//! marginal index), so any class with a polynomial-time expectation can be
//! plugged in by implementing the trait.

mod additive;
mod ensemble;
mod table;
mod tree;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

pub use additive::AdditiveModel;
pub use ensemble::EnsembleModel;
pub use table::TableModel;
pub use tree::{TreeModel, TreeNode};

use crate::distribution::{condition, ProductDistribution};
use crate::error::Result;
use crate::rational::Rational;
use crate::space::{same_space, Coalition, FeatureSpace, Instance};

pub trait Model: Send + Sync {
    fn space(&self) -> &Arc<FeatureSpace>;

    /// `F(ω)`.
    fn evaluate(&self, point: &Instance) -> Result<Rational>;

    /// `Σ_ω F(ω) P(Y = ω)` under a product distribution.
    fn expected_value(&self, dist: &ProductDistribution) -> Result<Rational>;
}

pub(crate) fn check_instance(model: &(impl Model + ?Sized), point: &Instance) -> Result<()> {
    same_space(model.space(), point.space())
}

pub(crate) fn check_dist(model: &(impl Model + ?Sized), dist: &ProductDistribution) -> Result<()> {
    same_space(model.space(), dist.space())
}

/// `E[F | S]`: the expectation after pinning every feature of `set` to `e`.
pub fn conditional_expectation(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    set: &Coalition,
) -> Result<Rational> {
    model.expected_value(&condition(dist, e, set)?)
}

/// Wraps a model and counts calls into its engines.
pub struct CountingModel<'a> {
    inner: &'a dyn Model,
    expectations: AtomicUsize,
    evaluations: AtomicUsize,
}

impl<'a> CountingModel<'a> {
    pub fn new(inner: &'a dyn Model) -> Self {
        CountingModel {
            inner,
            expectations: AtomicUsize::new(0),
            evaluations: AtomicUsize::new(0),
        }
    }

    pub fn expectation_calls(&self) -> usize {
        self.expectations.load(Ordering::SeqCst)
    }

    pub fn evaluation_calls(&self) -> usize {
        self.evaluations.load(Ordering::SeqCst)
    }

    pub fn reset(&self) {
        self.expectations.store(0, Ordering::SeqCst);
        self.evaluations.store(0, Ordering::SeqCst);
    }
}

impl Model for CountingModel<'_> {
    fn space(&self) -> &Arc<FeatureSpace> {
        self.inner.space()
    }

    fn evaluate(&self, point: &Instance) -> Result<Rational> {
        self.evaluations.fetch_add(1, Ordering::SeqCst);
        self.inner.evaluate(point)
    }

    fn expected_value(&self, dist: &ProductDistribution) -> Result<Rational> {
        self.expectations.fetch_add(1, Ordering::SeqCst);
        self.inner.expected_value(dist)
    }
}

impl<M: Model + ?Sized> Model for Arc<M> {
    fn space(&self) -> &Arc<FeatureSpace> {
        (**self).space()
    }

    fn evaluate(&self, point: &Instance) -> Result<Rational> {
        (**self).evaluate(point)
    }

    fn expected_value(&self, dist: &ProductDistribution) -> Result<Rational> {
        (**self).expected_value(dist)
    }
}

impl<M: Model + ?Sized> Model for Box<M> {
    fn space(&self) -> &Arc<FeatureSpace> {
        (**self).space()
    }

    fn evaluate(&self, point: &Instance) -> Result<Rational> {
        (**self).evaluate(point)
    }

    fn expected_value(&self, dist: &ProductDistribution) -> Result<Rational> {
        (**self).expected_value(dist)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn and_space() -> Arc<FeatureSpace> {
        Arc::new(FeatureSpace::binary(2).unwrap())
    }

    pub fn and_table() -> TableModel {
        TableModel::from_fn(and_space(), |w| Rational::from((w.value(0) & w.value(1)) as u64)).unwrap()
    }

    pub fn and_tree() -> TreeModel {
        TreeModel::new(
            and_space(),
            TreeNode::split(
                0,
                vec![
                    TreeNode::leaf(Rational::zero()),
                    TreeNode::split(
                        1,
                        vec![TreeNode::leaf(Rational::zero()), TreeNode::leaf(Rational::one())],
                    ),
                ],
            ),
        )
        .unwrap()
    }

    pub fn ones(space: &Arc<FeatureSpace>) -> Instance {
        Instance::new(space.clone(), vec![1; space.n()]).unwrap()
    }
}
