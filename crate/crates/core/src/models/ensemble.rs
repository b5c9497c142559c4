use std::sync::Arc;

use super::{check_dist, check_instance, Model};
use crate::distribution::ProductDistribution;
use crate::error::Result;
use crate::rational::Rational;
use crate::space::{same_space, FeatureSpace, Instance};

/// Weighted sum `Σ_j w_j F_j` of models over one space.
#[derive(Clone)]
pub struct EnsembleModel {
    space: Arc<FeatureSpace>,
    components: Vec<(Rational, Arc<dyn Model>)>,
}

impl EnsembleModel {
    pub fn new(space: Arc<FeatureSpace>, components: Vec<(Rational, Arc<dyn Model>)>) -> Result<Self> {
        for (_, m) in &components {
            same_space(&space, m.space())?;
        }
        Ok(EnsembleModel { space, components })
    }

    pub fn components(&self) -> &[(Rational, Arc<dyn Model>)] {
        &self.components
    }
}

impl std::fmt::Debug for EnsembleModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EnsembleModel")
            .field("components", &self.components.len())
            .finish()
    }
}

impl Model for EnsembleModel {
    fn space(&self) -> &Arc<FeatureSpace> {
        &self.space
    }

    fn evaluate(&self, point: &Instance) -> Result<Rational> {
        check_instance(self, point)?;
        self.components
            .iter()
            .map(|(w, m)| Ok(w * m.evaluate(point)?))
            .sum::<Result<Rational>>()
    }

    fn expected_value(&self, dist: &ProductDistribution) -> Result<Rational> {
        check_dist(self, dist)?;
        self.components
            .iter()
            .map(|(w, m)| Ok(w * m.expected_value(dist)?))
            .sum::<Result<Rational>>()
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn two_and_plus_three_and() {
        let and: Arc<dyn Model> = Arc::new(and_table());
        let space = and.space().clone();
        let f = EnsembleModel::new(
            space.clone(),
            vec![
                (Rational::from(2), and.clone()),
                (Rational::from(3), Arc::new(and_tree())),
            ],
        )
        .unwrap();
        let d = ProductDistribution::uniform(space.clone());
        assert_eq!(f.expected_value(&d).unwrap(), Rational::new(5, 4));
        assert_eq!(f.evaluate(&ones(&space)).unwrap(), Rational::from(5));
    }

    #[test]
    fn components_must_share_the_space() {
        let other = Arc::new(FeatureSpace::binary(3).unwrap());
        let and: Arc<dyn Model> = Arc::new(and_table());
        assert!(EnsembleModel::new(other, vec![(Rational::one(), and)]).is_err());
    }
}
