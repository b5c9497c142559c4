//! Product distributions over a [`FeatureSpace`] and the mixtures used by
//! every reduction: the `z`-mixture `Y^z`, the Bernoulli mixture `Y^θ`, and
//! product-substitution conditioning on a coalition.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::{same_space, Coalition, FeatureSpace, Instance};

/// Independent per-feature marginals, each an exact probability vector
/// indexed by domain position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductDistribution {
    space: Arc<FeatureSpace>,
    marginals: Vec<Vec<Rational>>,
}

impl ProductDistribution {
    pub fn new(space: Arc<FeatureSpace>, marginals: Vec<Vec<Rational>>) -> Result<Self> {
        if marginals.len() != space.n() {
            return Err(Error::DimensionMismatch {
                expected: space.n(),
                actual: marginals.len(),
            });
        }
        for (feature, m) in marginals.iter().enumerate() {
            if m.len() != space.domain_size(feature) {
                return Err(Error::DimensionMismatch {
                    expected: space.domain_size(feature),
                    actual: m.len(),
                });
            }
            if let Some(bad) = m.iter().find(|p| !p.is_unit_interval()) {
                return Err(Error::InvalidProbability {
                    feature,
                    value: bad.clone(),
                });
            }
            let sum: Rational = m.iter().sum();
            if !sum.is_one() {
                return Err(Error::NotNormalized { feature, sum });
            }
        }
        Ok(ProductDistribution { space, marginals })
    }

    pub fn uniform(space: Arc<FeatureSpace>) -> Self {
        let marginals = space
            .features()
            .iter()
            .map(|f| vec![Rational::new(1, f.domain_size() as u64); f.domain_size()])
            .collect();
        ProductDistribution { space, marginals }
    }

    pub fn point_mass(at: &Instance) -> Self {
        let space = at.space().clone();
        let marginals = (0..space.n())
            .map(|i| delta(space.domain_size(i), at.value(i)))
            .collect();
        ProductDistribution { space, marginals }
    }

    pub fn space(&self) -> &Arc<FeatureSpace> {
        &self.space
    }

    pub fn marginals(&self) -> &[Vec<Rational>] {
        &self.marginals
    }

    pub fn marginal(&self, feature: usize) -> &[Rational] {
        &self.marginals[feature]
    }

    pub fn prob(&self, feature: usize, value: usize) -> &Rational {
        &self.marginals[feature][value]
    }

    /// Replaces one marginal; the new vector must be a valid distribution.
    pub fn with_marginal(&self, feature: usize, marginal: Vec<Rational>) -> Result<Self> {
        self.space.check_feature(feature)?;
        let mut marginals = self.marginals.clone();
        marginals[feature] = marginal;
        ProductDistribution::new(self.space.clone(), marginals)
    }

    pub(crate) fn set_marginal_unchecked(&mut self, feature: usize, marginal: Vec<Rational>) {
        self.marginals[feature] = marginal;
    }

    pub(crate) fn set_point_mass(&mut self, feature: usize, value: usize) {
        self.marginals[feature] = delta(self.space.domain_size(feature), value);
    }
}

fn delta(size: usize, at: usize) -> Vec<Rational> {
    (0..size)
        .map(|v| if v == at { Rational::one() } else { Rational::zero() })
        .collect()
}

fn check_instance(dist: &ProductDistribution, e: &Instance) -> Result<()> {
    same_space(dist.space(), e.space())
}

/// Blends each marginal with a point mass at `e_i`:
/// `P(Y^z_i = ω) = (z·[ω = e_i] + P(Y_i = ω)) / (1 + z)`.
pub fn mixture_distribution(dist: &ProductDistribution, e: &Instance, z: &Rational) -> Result<ProductDistribution> {
    check_instance(dist, e)?;
    if z.is_negative() {
        return Err(Error::NegativeMixture(z.clone()));
    }
    let denom = Rational::one() + z;
    let marginals = dist
        .marginals
        .iter()
        .enumerate()
        .map(|(i, m)| {
            m.iter()
                .enumerate()
                .map(|(v, p)| if v == e.value(i) { (z + p) / &denom } else { p / &denom })
                .collect()
        })
        .collect();
    Ok(ProductDistribution {
        space: dist.space.clone(),
        marginals,
    })
}

fn check_theta(theta: &[Rational], n: usize) -> Result<()> {
    if theta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: theta.len(),
        });
    }
    match theta.iter().position(|t| !t.is_unit_interval()) {
        Some(feature) => Err(Error::ThetaOutOfRange {
            feature,
            value: theta[feature].clone(),
        }),
        None => Ok(()),
    }
}

pub(crate) fn bernoulli_marginal(m: &[Rational], at: usize, theta: &Rational) -> Vec<Rational> {
    let keep = Rational::one() - theta;
    m.iter()
        .enumerate()
        .map(|(v, p)| {
            let base = &keep * p;
            if v == at {
                base + theta
            } else {
                base
            }
        })
        .collect()
}

/// Per-feature mixture `θ_i·[ω = e_i] + (1 − θ_i)·P(Y_i = ω)`.
pub fn bernoulli_mixture(dist: &ProductDistribution, e: &Instance, theta: &[Rational]) -> Result<ProductDistribution> {
    check_instance(dist, e)?;
    check_theta(theta, dist.space.n())?;
    let marginals = dist
        .marginals
        .iter()
        .enumerate()
        .map(|(i, m)| bernoulli_marginal(m, e.value(i), &theta[i]))
        .collect();
    Ok(ProductDistribution {
        space: dist.space.clone(),
        marginals,
    })
}

/// Replaces the marginal of every feature in `set` by a point mass at `e_i`.
pub fn condition(dist: &ProductDistribution, e: &Instance, set: &Coalition) -> Result<ProductDistribution> {
    check_instance(dist, e)?;
    dist.space.check_coalition(set)?;
    let mut out = dist.clone();
    for i in set.iter() {
        out.set_point_mass(i, e.value(i));
    }
    Ok(out)
}
