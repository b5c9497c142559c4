use std::sync::Arc;

use super::{check_dist, check_instance, Model};
use crate::distribution::ProductDistribution;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::{Coalition, FeatureSpace, Instance};

/// A decision-tree node. Internal nodes branch on the exact value of one
/// feature, with one child per domain value in domain order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Leaf(Rational),
    Split { feature: usize, children: Vec<TreeNode> },
}

impl TreeNode {
    pub fn leaf(value: Rational) -> Self {
        TreeNode::Leaf(value)
    }

    pub fn split(feature: usize, children: Vec<TreeNode>) -> Self {
        TreeNode::Split { feature, children }
    }

    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 1,
            TreeNode::Split { children, .. } => 1 + children.iter().map(TreeNode::node_count).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Split { children, .. } => 1 + children.iter().map(TreeNode::depth).max().unwrap_or(0),
        }
    }

    fn validate(&self, space: &FeatureSpace, on_path: &mut Coalition) -> Result<()> {
        let TreeNode::Split { feature, children } = self else {
            return Ok(());
        };
        let feature = *feature;
        space.check_feature(feature)?;
        if on_path.contains(feature) {
            return Err(Error::InvalidTree(format!(
                "feature `{}` is tested twice on one path",
                space.feature(feature).name()
            )));
        }
        if children.len() != space.domain_size(feature) {
            return Err(Error::InvalidTree(format!(
                "split on `{}` has {} children, domain has {} values",
                space.feature(feature).name(),
                children.len(),
                space.domain_size(feature)
            )));
        }
        on_path.insert(feature);
        for child in children {
            child.validate(space, on_path)?;
        }
        on_path.remove(feature);
        Ok(())
    }

    fn expectation(&self, dist: &ProductDistribution) -> Rational {
        match self {
            TreeNode::Leaf(v) => v.clone(),
            TreeNode::Split { feature, children } => {
                let mut acc = Rational::zero();
                for (child, p) in children.iter().zip(dist.marginal(*feature)) {
                    if !p.is_zero() {
                        acc += p * child.expectation(dist);
                    }
                }
                acc
            }
        }
    }
}

/// Decision tree with exact-value branching. Its expectation under a
/// product distribution is one traversal multiplying branch probabilities,
/// which is valid because no feature repeats along a path.
#[derive(Debug, Clone)]
pub struct TreeModel {
    space: Arc<FeatureSpace>,
    root: TreeNode,
}

impl TreeModel {
    pub fn new(space: Arc<FeatureSpace>, root: TreeNode) -> Result<Self> {
        root.validate(&space, &mut Coalition::empty())?;
        Ok(TreeModel { space, root })
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }
}

impl Model for TreeModel {
    fn space(&self) -> &Arc<FeatureSpace> {
        &self.space
    }

    fn evaluate(&self, point: &Instance) -> Result<Rational> {
        check_instance(self, point)?;
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf(v) => return Ok(v.clone()),
                TreeNode::Split { feature, children } => node = &children[point.value(*feature)],
            }
        }
    }

    fn expected_value(&self, dist: &ProductDistribution) -> Result<Rational> {
        check_dist(self, dist)?;
        Ok(self.root.expectation(dist))
    }
}
