//! Seeded random fixtures: spaces, trees, distributions, weights.

use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distribution::ProductDistribution;
use crate::indices::SimpleWeights;
use crate::models::{AdditiveModel, TreeModel, TreeNode};
use crate::rational::Rational;
use crate::space::{FeatureSpace, Instance};

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_space(rng: &mut impl Rng, n: RangeInclusive<usize>, domain: RangeInclusive<usize>) -> Arc<FeatureSpace> {
    let n = rng.gen_range(n);
    let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(domain.clone())).collect();
    Arc::new(FeatureSpace::with_domain_sizes(&sizes).expect("nonempty domains"))
}

/// A small rational `p/q` with `|p| ≤ 12`, `q ≤ 4`.
pub fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(-12..=12), rng.gen_range(1..=4))
}

/// Random tree over a random space. Depth is capped at five splits, and the
/// split probability falls with depth so trees stay small.
pub fn random_tree(
    rng: &mut impl Rng,
    n: RangeInclusive<usize>,
    domain: RangeInclusive<usize>,
) -> (TreeModel, Arc<FeatureSpace>) {
    let space = random_space(rng, n, domain);
    (random_tree_on(rng, &space), space)
}

pub fn random_tree_on(rng: &mut impl Rng, space: &Arc<FeatureSpace>) -> TreeModel {
    let mut unused: Vec<usize> = (0..space.n()).collect();
    let root = grow(rng, space, &mut unused, 0);
    TreeModel::new(space.clone(), root).expect("generated tree is well formed")
}

const MAX_DEPTH: usize = 5;

fn grow(rng: &mut impl Rng, space: &FeatureSpace, unused: &mut Vec<usize>, depth: usize) -> TreeNode {
    let split_chance = if depth == 0 { 1.0 } else { 0.85 - 0.15 * depth as f64 };
    if unused.is_empty() || depth >= MAX_DEPTH || !rng.gen_bool(split_chance.max(0.0)) {
        return TreeNode::leaf(random_rational(rng));
    }
    let pick = rng.gen_range(0..unused.len());
    let feature = unused.swap_remove(pick);
    let children = (0..space.domain_size(feature))
        .map(|_| grow(rng, space, unused, depth + 1))
        .collect();
    unused.push(feature);
    TreeNode::split(feature, children)
}

/// Marginals proportional to integer weights in `0..=4`; zero-probability
/// values occur, but every marginal keeps some mass.
pub fn random_distribution(rng: &mut impl Rng, space: &Arc<FeatureSpace>) -> ProductDistribution {
    let marginals = (0..space.n())
        .map(|i| {
            let k = space.domain_size(i);
            let mut w: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=4)).collect();
            if w.iter().all(|&x| x == 0) {
                let j = rng.gen_range(0..k);
                w[j] = 1;
            }
            let total: i64 = w.iter().sum();
            w.into_iter().map(|x| Rational::new(x, total)).collect()
        })
        .collect();
    ProductDistribution::new(space.clone(), marginals).expect("normalized by construction")
}

pub fn random_instance(rng: &mut impl Rng, space: &Arc<FeatureSpace>) -> Instance {
    let values = (0..space.n()).map(|i| rng.gen_range(0..space.domain_size(i))).collect();
    Instance::new(space.clone(), values).expect("values drawn from the domains")
}

/// Random normalized cardinality weights. With `positive_first`, `q_0 > 0`.
pub fn random_simple_weights(rng: &mut impl Rng, n: usize, positive_first: bool) -> SimpleWeights {
    loop {
        let mut raw: Vec<Rational> = (0..n).map(|_| Rational::from(rng.gen_range(0..=5u64))).collect();
        if positive_first && raw[0].is_zero() {
            raw[0] = Rational::one();
        }
        if let Ok(w) = SimpleWeights::normalize(n, raw) {
            return w;
        }
    }
}

/// Random `θ` vector with entries in `{0, 1/4, 1/3, 1/2, 2/3, 3/4, 1}`.
pub fn random_theta(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    let choices = [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)];
    (0..n)
        .map(|_| {
            let (p, q) = *choices.choose(rng).expect("nonempty");
            Rational::new(p, q)
        })
        .collect()
}

pub fn random_additive(rng: &mut impl Rng, space: &Arc<FeatureSpace>) -> AdditiveModel {
    let terms = (0..space.n())
        .map(|i| (0..space.domain_size(i)).map(|_| random_rational(rng)).collect())
        .collect();
    AdditiveModel::new(space.clone(), random_rational(rng), terms).expect("shapes match")
}

/// One randomly drawn tree, distribution and instance on a shared space.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub model: TreeModel,
    pub dist: ProductDistribution,
    pub instance: Instance,
}

pub fn fixture(rng: &mut impl Rng, n: RangeInclusive<usize>, domain: RangeInclusive<usize>) -> Fixture {
    let (model, space) = random_tree(rng, n, domain);
    Fixture {
        dist: random_distribution(rng, &space),
        instance: random_instance(rng, &space),
        model,
    }
}

pub fn corpus(seed: u64, count: usize, n: RangeInclusive<usize>, domain: RangeInclusive<usize>) -> Vec<Fixture> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| fixture(&mut rng, n.clone(), domain.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Model;

    #[test]
    fn seeded_corpus_is_reproducible() {
        let a = corpus(11, 5, 2..=6, 2..=3);
        let b = corpus(11, 5, 2..=6, 2..=3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.model.root(), y.model.root());
            assert_eq!(x.dist, y.dist);
            assert_eq!(x.instance.values(), y.instance.values());
        }
    }

    #[test]
    fn generated_objects_are_valid() {
        let mut r = rng(3);
        for _ in 0..50 {
            let f = fixture(&mut r, 1..=8, 2..=3);
            let n = f.model.space().n();
            assert!((1..=8).contains(&n));
            assert!(f.model.root().depth() <= MAX_DEPTH);
            let w = random_simple_weights(&mut r, n, true);
            assert!(w.q()[0].is_positive());
            assert!(random_theta(&mut r, n).iter().all(Rational::is_unit_interval));
        }
    }
}
