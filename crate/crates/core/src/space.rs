//! Feature spaces, instances and coalitions.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// One feature: a name plus an ordered, finite domain of opaque value tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    name: String,
    values: Vec<String>,
}

impl Feature {
    pub fn new(name: impl Into<String>, values: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Feature {
            name: name.into(),
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    pub fn value_index(&self, token: &str) -> Option<usize> {
        self.values.iter().position(|v| v == token)
    }
}

/// The feature index set `{0..n}` together with each feature's domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpace {
    features: Vec<Feature>,
}

impl FeatureSpace {
    pub fn new(features: Vec<Feature>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::InvalidSpace("at least one feature is required".into()));
        }
        let mut names = HashSet::new();
        for f in &features {
            if !names.insert(f.name.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate feature name `{}`", f.name)));
            }
            if f.values.is_empty() {
                return Err(Error::InvalidSpace(format!("feature `{}` has an empty domain", f.name)));
            }
            let mut seen = HashSet::new();
            for v in &f.values {
                if !seen.insert(v.as_str()) {
                    return Err(Error::InvalidSpace(format!(
                        "feature `{}` lists value `{v}` twice",
                        f.name
                    )));
                }
            }
        }
        Ok(FeatureSpace { features })
    }

    /// Features `x1..xn` with domain sizes taken from `sizes`; values are `"0".."k-1"`.
    pub fn with_domain_sizes(sizes: &[usize]) -> Result<Self> {
        FeatureSpace::new(
            sizes
                .iter()
                .enumerate()
                .map(|(i, &k)| Feature::new(format!("x{}", i + 1), (0..k).map(|v| v.to_string())))
                .collect(),
        )
    }

    pub fn binary(n: usize) -> Result<Self> {
        FeatureSpace::with_domain_sizes(&vec![2; n])
    }

    pub fn n(&self) -> usize {
        self.features.len()
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature(&self, index: usize) -> &Feature {
        &self.features[index]
    }

    pub fn domain_size(&self, index: usize) -> usize {
        self.features[index].values.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.features
            .iter()
            .position(|f| f.name == name)
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    /// Total number of outcomes `Π|Ω_i|`, saturating at `u128::MAX`.
    pub fn outcome_count(&self) -> u128 {
        self.features
            .iter()
            .try_fold(1u128, |acc, f| acc.checked_mul(f.values.len() as u128))
            .unwrap_or(u128::MAX)
    }

    pub fn check_feature(&self, index: usize) -> Result<()> {
        if index < self.n() {
            Ok(())
        } else {
            Err(Error::FeatureOutOfRange { index, n: self.n() })
        }
    }

    pub fn check_coalition(&self, set: &Coalition) -> Result<()> {
        match set.max_member() {
            Some(m) if m >= self.n() => Err(Error::FeatureOutOfRange { index: m, n: self.n() }),
            _ => Ok(()),
        }
    }
}

pub(crate) fn same_space(a: &Arc<FeatureSpace>, b: &Arc<FeatureSpace>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// A complete assignment `ω ∈ Ω`, stored as one domain index per feature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    space: Arc<FeatureSpace>,
    values: Vec<usize>,
}

impl Instance {
    pub fn new(space: Arc<FeatureSpace>, values: Vec<usize>) -> Result<Self> {
        if values.len() != space.n() {
            return Err(Error::DimensionMismatch {
                expected: space.n(),
                actual: values.len(),
            });
        }
        for (feature, &value) in values.iter().enumerate() {
            let size = space.domain_size(feature);
            if value >= size {
                return Err(Error::ValueOutOfRange { feature, value, size });
            }
        }
        Ok(Instance { space, values })
    }

    pub fn from_tokens<S: AsRef<str>>(space: Arc<FeatureSpace>, tokens: &[S]) -> Result<Self> {
        if tokens.len() != space.n() {
            return Err(Error::DimensionMismatch {
                expected: space.n(),
                actual: tokens.len(),
            });
        }
        let values = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let f = space.feature(i);
                f.value_index(t.as_ref()).ok_or_else(|| Error::UnknownValue {
                    feature: f.name().to_string(),
                    value: t.as_ref().to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance { space, values })
    }

    pub(crate) fn new_unchecked(space: Arc<FeatureSpace>, values: Vec<usize>) -> Self {
        Instance { space, values }
    }

    pub fn space(&self) -> &Arc<FeatureSpace> {
        &self.space
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value(&self, feature: usize) -> usize {
        self.values[feature]
    }

    pub fn tokens(&self) -> Vec<&str> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| self.space.feature(i).values()[v].as_str())
            .collect()
    }

    /// Copy of `self` with one coordinate replaced.
    pub fn with_value(&self, feature: usize, value: usize) -> Result<Self> {
        self.space.check_feature(feature)?;
        let size = self.space.domain_size(feature);
        if value >= size {
            return Err(Error::ValueOutOfRange { feature, value, size });
        }
        let mut values = self.values.clone();
        values[feature] = value;
        Ok(Instance {
            space: self.space.clone(),
            values,
        })
    }
}

const WORD: usize = 64;

/// A set of feature indices with bitset semantics.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition {
    // no trailing zero words, so derived equality is set equality
    words: Vec<u64>,
}

impl Coalition {
    pub fn empty() -> Self {
        Coalition::default()
    }

    pub fn full(n: usize) -> Self {
        (0..n).collect()
    }

    pub fn singleton(i: usize) -> Self {
        let mut c = Coalition::empty();
        c.insert(i);
        c
    }

    pub fn from_mask(mask: u64) -> Self {
        let mut c = Coalition { words: vec![mask] };
        c.trim();
        c
    }

    /// The members as a single word, if they all fit below index 64.
    pub fn mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / WORD).is_some_and(|w| w & (1 << (i % WORD)) != 0)
    }

    pub fn insert(&mut self, i: usize) {
        let w = i / WORD;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        if let Some(w) = self.words.get_mut(i / WORD) {
            *w &= !(1 << (i % WORD));
        }
        self.trim();
    }

    pub fn with(&self, i: usize) -> Self {
        let mut c = self.clone();
        c.insert(i);
        c
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn max_member(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * WORD + (WORD - 1 - last.leading_zeros() as usize))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + bit)
            })
        })
    }

    pub fn union(&self, other: &Coalition) -> Coalition {
        let len = self.words.len().max(other.words.len());
        let words = (0..len)
            .map(|i| self.words.get(i).copied().unwrap_or(0) | other.words.get(i).copied().unwrap_or(0))
            .collect();
        Coalition { words }
    }

    pub fn difference(&self, other: &Coalition) -> Coalition {
        let words = self
            .words
            .iter()
            .enumerate()
            .map(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0))
            .collect();
        let mut c = Coalition { words };
        c.trim();
        c
    }

    pub fn is_disjoint(&self, other: &Coalition) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.difference(other).is_empty()
    }

    /// `{0..n} \ self`.
    pub fn complement(&self, n: usize) -> Coalition {
        Coalition::full(n).difference(self)
    }

    /// All `2^len` subsets of this set, in binary-counter order over the
    /// ascending member list. Panics if the set has 64 or more members.
    pub fn subsets(&self) -> impl Iterator<Item = Coalition> + '_ {
        let members: Vec<usize> = self.iter().collect();
        assert!(members.len() < 64, "too many members to enumerate subsets");
        (0..1u64 << members.len()).map(move |bits| {
            members
                .iter()
                .enumerate()
                .filter(|(j, _)| bits >> j & 1 == 1)
                .map(|(_, &i)| i)
                .collect()
        })
    }
}

impl FromIterator<usize> for Coalition {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut c = Coalition::empty();
        for i in iter {
            c.insert(i);
        }
        c
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_malformed_spaces() {
        assert!(FeatureSpace::new(vec![]).is_err());
        assert!(FeatureSpace::new(vec![Feature::new("a", Vec::<String>::new())]).is_err());
        assert!(FeatureSpace::new(vec![Feature::new("a", ["0", "0"])]).is_err());
        assert!(FeatureSpace::new(vec![Feature::new("a", ["0"]), Feature::new("a", ["1"])]).is_err());
    }

    #[test]
    fn instance_validation() {
        let space = Arc::new(FeatureSpace::with_domain_sizes(&[2, 3]).unwrap());
        assert!(Instance::new(space.clone(), vec![1, 2]).is_ok());
        assert!(matches!(
            Instance::new(space.clone(), vec![2, 0]),
            Err(Error::ValueOutOfRange { feature: 0, .. })
        ));
        assert!(Instance::new(space.clone(), vec![0]).is_err());
        let e = Instance::from_tokens(space.clone(), &["1", "2"]).unwrap();
        assert_eq!(e.values(), &[1, 2]);
        assert_eq!(e.tokens(), vec!["1", "2"]);
        assert!(Instance::from_tokens(space, &["1", "7"]).is_err());
    }

    #[test]
    fn outcome_count_saturates() {
        let space = FeatureSpace::with_domain_sizes(&[3, 2, 2]).unwrap();
        assert_eq!(space.outcome_count(), 12);
        let huge = FeatureSpace::with_domain_sizes(&vec![1 << 20; 8]).unwrap();
        assert_eq!(huge.outcome_count(), u128::MAX);
    }

    #[test]
    fn coalition_basics() {
        let mut c = Coalition::empty();
        c.insert(3);
        c.insert(70);
        assert!(c.contains(3) && c.contains(70) && !c.contains(4));
        assert_eq!(c.len(), 2);
        assert_eq!(c.iter().collect::<Vec<_>>(), vec![3, 70]);
        assert_eq!(c.max_member(), Some(70));
        assert_eq!(c.mask(), None);
        c.remove(70);
        assert_eq!(c.mask(), Some(1 << 3));
        assert_eq!(c, Coalition::singleton(3));
        assert_eq!(Coalition::full(3).complement(5), [3, 4].into_iter().collect());
    }

    #[test]
    fn subsets_enumerates_power_set() {
        let a: Coalition = [1, 4, 6].into_iter().collect();
        let subs: Vec<Coalition> = a.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert_eq!(subs[0], Coalition::empty());
        assert_eq!(subs[7], a);
        assert!(subs.iter().all(|s| s.is_subset(&a)));
    }

    proptest! {
        #[test]
        fn set_algebra_matches_masks(x in any::<u64>(), y in any::<u64>()) {
            let (a, b) = (Coalition::from_mask(x), Coalition::from_mask(y));
            prop_assert_eq!(a.union(&b).mask(), Some(x | y));
            prop_assert_eq!(a.difference(&b).mask(), Some(x & !y));
            prop_assert_eq!(a.is_disjoint(&b), x & y == 0);
            prop_assert_eq!(a.len(), x.count_ones() as usize);
        }
    }
}
