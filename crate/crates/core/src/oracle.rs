//! Brute-force reference values by explicit enumeration.
//!
//! Nothing here calls a model's `expected_value`: every expectation is a sum
//! of `evaluate` calls weighted by products of marginal probabilities, and
//! every index is a sum over coalitions. Slow by design, and bounded by
//! [`OracleBudget`].

use crate::distribution::ProductDistribution;
use crate::error::{Error, Result};
use crate::indices::{BernoulliWeights, SimpleWeights};
use crate::interaction::InteractionScheme;
use crate::models::{Model, TableModel};
use crate::rational::Rational;
use crate::space::{same_space, Coalition, FeatureSpace, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_features: usize,
    pub max_outcomes: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_features: 12,
            max_outcomes: 1 << 20,
        }
    }
}

impl OracleBudget {
    pub fn check(&self, space: &FeatureSpace) -> Result<()> {
        if space.n() > self.max_features {
            return Err(Error::BudgetExceeded(format!(
                "{} features, oracle limit is {}",
                space.n(),
                self.max_features
            )));
        }
        let outcomes = space.outcome_count();
        if outcomes > self.max_outcomes {
            return Err(Error::BudgetExceeded(format!(
                "{outcomes} outcomes, oracle limit is {}",
                self.max_outcomes
            )));
        }
        Ok(())
    }
}

fn check_all(model: &dyn Model, dist: &ProductDistribution, e: Option<&Instance>) -> Result<()> {
    same_space(model.space(), dist.space())?;
    if let Some(e) = e {
        same_space(model.space(), e.space())?;
    }
    OracleBudget::default().check(model.space())
}

/// `Σ_ω F(ω) Π_i P(Y_i = ω_i)` over the outcomes that agree with `e` on
/// `pinned`.
fn enumerate(model: &dyn Model, dist: &ProductDistribution, e: &Instance, pinned: &Coalition) -> Result<Rational> {
    let space = model.space();
    let n = space.n();
    let free: Vec<usize> = (0..n).filter(|i| !pinned.contains(*i)).collect();
    let mut point = e.clone();
    let mut digits = vec![0usize; free.len()];
    let mut acc = Rational::zero();
    loop {
        let mut weight = Rational::one();
        for (&i, &v) in free.iter().zip(&digits) {
            weight *= dist.prob(i, v);
            point = point.with_value(i, v)?;
        }
        if !weight.is_zero() {
            acc += weight * model.evaluate(&point)?;
        }
        let mut pos = free.len();
        loop {
            if pos == 0 {
                return Ok(acc);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < space.domain_size(free[pos]) {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// `E[F]` by full outcome enumeration.
pub fn brute_expectation(model: &dyn Model, dist: &ProductDistribution) -> Result<Rational> {
    check_all(model, dist, None)?;
    let anchor = Instance::new(model.space().clone(), vec![0; model.space().n()])?;
    enumerate(model, dist, &anchor, &Coalition::empty())
}

/// `E[F|S]` by enumerating the features outside `S`.
pub fn brute_conditional_expectation(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    set: &Coalition,
) -> Result<Rational> {
    check_all(model, dist, Some(e))?;
    model.space().check_coalition(set)?;
    enumerate(model, dist, e, set)
}

/// `E[F|S]` for every coalition `S ⊆ N`.
///
/// Built from the full value table by marginalizing one feature at a time:
/// after feature `i` is processed, its coordinate takes only two states,
/// pinned at `e_i` or averaged out. Storage never exceeds the outcome count.
#[derive(Debug, Clone)]
pub struct CoalitionTable {
    n: usize,
    values: Vec<Rational>,
}

impl CoalitionTable {
    pub fn enumerate(model: &dyn Model, dist: &ProductDistribution, e: &Instance) -> Result<Self> {
        check_all(model, dist, Some(e))?;
        let space = model.space();
        let n = space.n();
        let mut table = TableModel::from_model(model)?.outputs().to_vec();
        // layout: [prefix of 2-state coords 0..i] [coord i] [suffix of full coords i+1..n]
        let mut suffix: usize = (0..n).map(|i| space.domain_size(i)).product();
        for i in 0..n {
            let k = space.domain_size(i);
            suffix /= k;
            let prefix = 1usize << i;
            let pinned = e.value(i);
            let mut next = Vec::with_capacity(prefix * 2 * suffix);
            for p in 0..prefix {
                let block = &table[p * k * suffix..(p + 1) * k * suffix];
                next.extend_from_slice(&block[pinned * suffix..(pinned + 1) * suffix]);
                for s in 0..suffix {
                    let mut acc = Rational::zero();
                    for (v, prob) in dist.marginal(i).iter().enumerate() {
                        if !prob.is_zero() {
                            acc += prob * &block[v * suffix + s];
                        }
                    }
                    next.push(acc);
                }
            }
            table = next;
        }
        // state bit of coordinate i sits at position n-1-i; 0 means pinned
        let full = (1usize << n) - 1;
        let mut values = vec![Rational::zero(); 1 << n];
        for (index, v) in table.into_iter().enumerate() {
            let mut mask = 0usize;
            for i in 0..n {
                if index >> (n - 1 - i) & 1 == 0 {
                    mask |= 1 << i;
                }
            }
            values[mask & full] = v;
        }
        Ok(CoalitionTable { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `E[F|S]`.
    pub fn get(&self, set: &Coalition) -> &Rational {
        let mask = set.mask().expect("oracle coalitions fit in 64 bits") as usize;
        &self.values[mask]
    }

    fn at(&self, mask: usize) -> &Rational {
        &self.values[mask]
    }

    /// `Σ_{S⊆{a}^c} q_{|S|} m(a;S)`.
    pub fn simple_index(&self, a: usize, w: &SimpleWeights) -> Result<Rational> {
        self.check_feature(a)?;
        if w.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: w.n(),
            });
        }
        let bit = 1usize << a;
        let mut acc = Rational::zero();
        for s in 0..1usize << self.n {
            if s & bit != 0 {
                continue;
            }
            let q = w.weight(s.count_ones() as usize);
            if !q.is_zero() {
                acc += q * (self.at(s | bit) - self.at(s));
            }
        }
        Ok(acc)
    }

    /// `Σ_{S⊆{a}^c} Π_{i∈S} θ_i Π_{i∉S, i≠a} (1−θ_i) m(a;S)`.
    pub fn bernoulli_index(&self, a: usize, w: &BernoulliWeights) -> Result<Rational> {
        self.check_feature(a)?;
        self.check_theta(w.theta())?;
        let bit = 1usize << a;
        let mut acc = Rational::zero();
        for s in 0..1usize << self.n {
            if s & bit != 0 {
                continue;
            }
            let q = self.bernoulli_weight(w.theta(), s, bit);
            if !q.is_zero() {
                acc += q * (self.at(s | bit) - self.at(s));
            }
        }
        Ok(acc)
    }

    fn bernoulli_weight(&self, theta: &[Rational], s: usize, excluded: usize) -> Rational {
        let mut q = Rational::one();
        for (i, t) in theta.iter().enumerate() {
            let bit = 1usize << i;
            if excluded & bit != 0 {
                continue;
            }
            if s & bit != 0 {
                q *= t;
            } else {
                q *= Rational::one() - t;
            }
        }
        q
    }

    /// `m(A;S) = Σ_{B⊆A} (−1)^{|A∖B|} E[F|S∪B]`.
    pub fn interaction_marginal(&self, set: &Coalition, coalition: &Coalition) -> Result<Rational> {
        let a = self.check_set(set)?;
        let s = self.check_set(coalition)?;
        if a & s != 0 {
            return Err(Error::OverlappingSets);
        }
        Ok(self.marginal_masks(a, s))
    }

    fn marginal_masks(&self, a: usize, s: usize) -> Rational {
        let m = a.count_ones();
        let mut acc = Rational::zero();
        // every submask b of a, including 0
        let mut b = a;
        loop {
            let v = self.at(s | b);
            if (m - b.count_ones()) % 2 == 0 {
                acc += v;
            } else {
                acc -= v;
            }
            if b == 0 {
                break;
            }
            b = (b - 1) & a;
        }
        acc
    }

    /// `Σ_{S⊆A^c} Q_A(S) m(A;S)`.
    pub fn interaction_index(&self, set: &Coalition, scheme: &InteractionScheme) -> Result<Rational> {
        let a = self.check_set(set)?;
        if a == 0 {
            return Err(Error::EmptySet);
        }
        let m = a.count_ones() as usize;
        let mut acc = Rational::zero();
        for s in 0..1usize << self.n {
            if s & a != 0 {
                continue;
            }
            let q = match scheme {
                InteractionScheme::Simple(w) => {
                    if w.n() != self.n {
                        return Err(Error::DimensionMismatch {
                            expected: self.n,
                            actual: w.n(),
                        });
                    }
                    w.row(m)?[s.count_ones() as usize].clone()
                }
                InteractionScheme::Bernoulli(w) => {
                    self.check_theta(w.theta())?;
                    self.bernoulli_weight(w.theta(), s, a)
                }
            };
            if !q.is_zero() {
                acc += q * self.marginal_masks(a, s);
            }
        }
        Ok(acc)
    }

    /// `c_ℓ = Σ_{|S|=ℓ} E[F|S]` for `ℓ = 0..n`.
    pub fn coalition_sums(&self) -> Vec<Rational> {
        let mut sums = vec![Rational::zero(); self.n + 1];
        for (s, v) in self.values.iter().enumerate() {
            sums[s.count_ones() as usize] += v;
        }
        sums
    }

    fn check_feature(&self, a: usize) -> Result<()> {
        if a >= self.n {
            return Err(Error::FeatureOutOfRange { index: a, n: self.n });
        }
        Ok(())
    }

    fn check_set(&self, set: &Coalition) -> Result<usize> {
        match (set.max_member(), set.mask()) {
            (Some(max), _) if max >= self.n => Err(Error::FeatureOutOfRange { index: max, n: self.n }),
            (_, Some(mask)) => Ok(mask as usize),
            _ => Err(Error::FeatureOutOfRange { index: 64, n: self.n }),
        }
    }

    fn check_theta(&self, theta: &[Rational]) -> Result<()> {
        if theta.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: theta.len(),
            });
        }
        Ok(())
    }
}

pub fn brute_simple_index(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    a: usize,
    w: &SimpleWeights,
) -> Result<Rational> {
    CoalitionTable::enumerate(model, dist, e)?.simple_index(a, w)
}

pub fn brute_bernoulli_index(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    a: usize,
    w: &BernoulliWeights,
) -> Result<Rational> {
    CoalitionTable::enumerate(model, dist, e)?.bernoulli_index(a, w)
}

pub fn brute_interaction_index(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    set: &Coalition,
    scheme: &InteractionScheme,
) -> Result<Rational> {
    CoalitionTable::enumerate(model, dist, e)?.interaction_index(set, scheme)
}

/// `c_ℓ = Σ_{|S|=ℓ} E[F|S]` for `ℓ = 0..n`; `c_0 = E[F]`, `c_n = F(e)`.
pub fn brute_coalition_sums(model: &dyn Model, dist: &ProductDistribution, e: &Instance) -> Result<Vec<Rational>> {
    Ok(CoalitionTable::enumerate(model, dist, e)?.coalition_sums())
}
