use std::sync::Arc;

use super::{check_dist, check_instance, Model};
use crate::distribution::ProductDistribution;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::{FeatureSpace, Instance};

const MAX_ENTRIES: u128 = 1 << 24;

/// A model given by its full value table, in row-major order with the last
/// feature varying fastest.
#[derive(Debug, Clone)]
pub struct TableModel {
    space: Arc<FeatureSpace>,
    outputs: Vec<Rational>,
    strides: Vec<usize>,
}

fn strides(space: &FeatureSpace) -> Vec<usize> {
    let mut strides = vec![1; space.n()];
    for i in (0..space.n().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * space.domain_size(i + 1);
    }
    strides
}

fn check_size(space: &FeatureSpace) -> Result<usize> {
    let count = space.outcome_count();
    if count > MAX_ENTRIES {
        return Err(Error::TableTooLarge(count));
    }
    Ok(count as usize)
}

impl TableModel {
    pub fn new(space: Arc<FeatureSpace>, outputs: Vec<Rational>) -> Result<Self> {
        let count = check_size(&space)?;
        if outputs.len() != count {
            return Err(Error::DimensionMismatch {
                expected: count,
                actual: outputs.len(),
            });
        }
        let strides = strides(&space);
        Ok(TableModel {
            space,
            outputs,
            strides,
        })
    }

    /// Tabulates `f` over every outcome.
    pub fn from_fn(space: Arc<FeatureSpace>, mut f: impl FnMut(&Instance) -> Rational) -> Result<Self> {
        let count = check_size(&space)?;
        let mut outputs = Vec::with_capacity(count);
        let mut point = vec![0; space.n()];
        for _ in 0..count {
            outputs.push(f(&Instance::new_unchecked(space.clone(), point.clone())));
            for i in (0..point.len()).rev() {
                point[i] += 1;
                if point[i] < space.domain_size(i) {
                    break;
                }
                point[i] = 0;
            }
        }
        TableModel::new(space, outputs)
    }

    /// Tabulates any other model over the same space.
    pub fn from_model(model: &dyn Model) -> Result<Self> {
        let mut err = None;
        let table = TableModel::from_fn(model.space().clone(), |w| {
            model.evaluate(w).unwrap_or_else(|e| {
                err.get_or_insert(e);
                Rational::zero()
            })
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(table),
        }
    }

    pub fn outputs(&self) -> &[Rational] {
        &self.outputs
    }

    fn offset(&self, values: &[usize]) -> usize {
        values.iter().zip(&self.strides).map(|(v, s)| v * s).sum()
    }

    /// True iff the table is constant along every line varying only `feature`.
    pub fn ignores_feature(&self, feature: usize) -> bool {
        let stride = self.strides[feature];
        let size = self.space.domain_size(feature);
        (0..self.outputs.len())
            .filter(|idx| (idx / stride) % size == 0)
            .all(|base| (1..size).all(|v| self.outputs[base + v * stride] == self.outputs[base]))
    }

    fn expectation_from(
        &self,
        dist: &ProductDistribution,
        feature: usize,
        offset: usize,
        weight: &Rational,
    ) -> Rational {
        if feature == self.space.n() {
            return weight * &self.outputs[offset];
        }
        let mut acc = Rational::zero();
        for (v, p) in dist.marginal(feature).iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            acc += self.expectation_from(dist, feature + 1, offset + v * self.strides[feature], &(weight * p));
        }
        acc
    }
}

impl Model for TableModel {
    fn space(&self) -> &Arc<FeatureSpace> {
        &self.space
    }

    fn evaluate(&self, point: &Instance) -> Result<Rational> {
        check_instance(self, point)?;
        Ok(self.outputs[self.offset(point.values())].clone())
    }

    fn expected_value(&self, dist: &ProductDistribution) -> Result<Rational> {
        check_dist(self, dist)?;
        Ok(self.expectation_from(dist, 0, 0, &Rational::one()))
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn and_lookup_and_expectation() {
        let f = and_table();
        let space = f.space().clone();
        assert_eq!(f.evaluate(&ones(&space)).unwrap(), Rational::one());
        let w = Instance::new(space.clone(), vec![1, 0]).unwrap();
        assert_eq!(f.evaluate(&w).unwrap(), Rational::zero());
        assert_eq!(
            f.expected_value(&ProductDistribution::uniform(space)).unwrap(),
            Rational::new(1, 4)
        );
    }

    #[test]
    fn point_mass_expectation_is_evaluation() {
        let space = Arc::new(FeatureSpace::with_domain_sizes(&[3, 2, 4]).unwrap());
        let f = TableModel::from_fn(space.clone(), |w| {
            Rational::from((w.value(0) * 7 + w.value(1) * 3 + w.value(2)) as u64)
        })
        .unwrap();
        let w = Instance::new(space, vec![2, 1, 3]).unwrap();
        assert_eq!(
            f.expected_value(&ProductDistribution::point_mass(&w)).unwrap(),
            f.evaluate(&w).unwrap()
        );
        assert_eq!(f.evaluate(&w).unwrap(), Rational::from(20));
    }

    #[test]
    fn dummy_detection() {
        let space = Arc::new(FeatureSpace::with_domain_sizes(&[2, 3, 2]).unwrap());
        let f = TableModel::from_fn(space, |w| Rational::from((w.value(0) + w.value(2)) as u64)).unwrap();
        assert!(!f.ignores_feature(0));
        assert!(f.ignores_feature(1));
        assert!(!f.ignores_feature(2));
    }

    #[test]
    fn size_guard() {
        let space = Arc::new(FeatureSpace::binary(25).unwrap());
        assert!(matches!(
            TableModel::from_fn(space, |_| Rational::zero()),
            Err(Error::TableTooLarge(_))
        ));
        let small = Arc::new(FeatureSpace::binary(2).unwrap());
        assert!(TableModel::new(small, vec![Rational::zero(); 3]).is_err());
    }
}
