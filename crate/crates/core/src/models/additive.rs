use std::sync::Arc;

use super::{check_dist, check_instance, Model};
use crate::distribution::ProductDistribution;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::{FeatureSpace, Instance};

/// `F(ω) = bias + Σ_i f_i(ω_i)`.
#[derive(Debug, Clone)]
pub struct AdditiveModel {
    space: Arc<FeatureSpace>,
    bias: Rational,
    terms: Vec<Vec<Rational>>,
}

impl AdditiveModel {
    pub fn new(space: Arc<FeatureSpace>, bias: Rational, terms: Vec<Vec<Rational>>) -> Result<Self> {
        if terms.len() != space.n() {
            return Err(Error::DimensionMismatch {
                expected: space.n(),
                actual: terms.len(),
            });
        }
        for (i, t) in terms.iter().enumerate() {
            if t.len() != space.domain_size(i) {
                return Err(Error::DimensionMismatch {
                    expected: space.domain_size(i),
                    actual: t.len(),
                });
            }
        }
        Ok(AdditiveModel { space, bias, terms })
    }

    pub fn bias(&self) -> &Rational {
        &self.bias
    }

    pub fn terms(&self) -> &[Vec<Rational>] {
        &self.terms
    }
}

impl Model for AdditiveModel {
    fn space(&self) -> &Arc<FeatureSpace> {
        &self.space
    }

    fn evaluate(&self, point: &Instance) -> Result<Rational> {
        check_instance(self, point)?;
        Ok(self
            .terms
            .iter()
            .zip(point.values())
            .fold(self.bias.clone(), |acc, (t, &v)| acc + &t[v]))
    }

    fn expected_value(&self, dist: &ProductDistribution) -> Result<Rational> {
        check_dist(self, dist)?;
        let mut acc = self.bias.clone();
        for (i, t) in self.terms.iter().enumerate() {
            for (term, p) in t.iter().zip(dist.marginal(i)) {
                acc += term * p;
            }
        }
        Ok(acc)
    }
}
