//! Single-feature power indices.
//!
//! A cardinality-based ("simple") index `I(a;F) = Σ_k q_k m_k(a)` is
//! computed from the coalition-size sums `m_k(a) = Σ_{|S|=k} m(a;S)`.
//! Those sums are the coefficients of the polynomial
//! `(1+z)^{n-1} (E[F(Y^{1,z})] − E[F(Y^{0,z})])`, so sampling it at `n`
//! nodes and solving the Vandermonde system recovers them with `2n`
//! expectation calls. Bernoulli indices need only two expectations, taken
//! under the mixtures with `θ_a = 1` and `θ_a = 0`.

use std::fmt;

use crate::distribution::{bernoulli_mixture, mixture_distribution, ProductDistribution};
use crate::error::{Error, Result};
use crate::exec::try_map;
use crate::linalg::solve_vandermonde;
use crate::models::{conditional_expectation, CountingModel, Model};
use crate::rational::{binomial, factorial, Rational};
use crate::space::{same_space, Coalition, Instance};

/// Cardinality weights `q_0..q_{n-1}` with `Σ_k C(n−1,k) q_k = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleWeights {
    q: Vec<Rational>,
}

impl SimpleWeights {
    pub fn new(n: usize, q: Vec<Rational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidWeights("at least one feature is required".into()));
        }
        if q.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: q.len(),
            });
        }
        if let Some(k) = q.iter().position(Rational::is_negative) {
            return Err(Error::InvalidWeights(format!("q_{k} = {} is negative", q[k])));
        }
        let total = coalition_mass(&q);
        if !total.is_one() {
            return Err(Error::InvalidWeights(format!("Σ C(n-1,k) q_k = {total}, expected 1")));
        }
        Ok(SimpleWeights { q })
    }

    /// Rescales nonnegative raw weights so that they satisfy the normalization.
    pub fn normalize(n: usize, raw: Vec<Rational>) -> Result<Self> {
        if raw.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: raw.len(),
            });
        }
        if raw.iter().any(Rational::is_negative) {
            return Err(Error::InvalidWeights("weights must be nonnegative".into()));
        }
        let total = coalition_mass(&raw);
        let inv = total
            .recip()
            .ok_or_else(|| Error::InvalidWeights("all weights are zero".into()))?;
        SimpleWeights::new(n, raw.into_iter().map(|x| x * &inv).collect())
    }

    /// `q_k = k!(n−1−k)!/n!`.
    pub fn shapley(n: usize) -> Self {
        let nf = factorial(n);
        let q = (0..n).map(|k| factorial(k) * factorial(n - 1 - k) / &nf).collect();
        SimpleWeights { q }
    }

    /// `q_k = 1/2^{n−1}`.
    pub fn banzhaf(n: usize) -> Self {
        let w = Rational::new(1, 2).pow(n as u32 - 1);
        SimpleWeights { q: vec![w; n] }
    }

    /// `q_k = θ^k (1−θ)^{n−1−k}` for `θ ∈ (0, 1)`.
    pub fn binomial(n: usize, theta: &Rational) -> Result<Self> {
        check_open_unit(theta)?;
        let rest = Rational::one() - theta;
        let q = (0..n)
            .map(|k| theta.pow(k as u32) * rest.pow((n - 1 - k) as u32))
            .collect();
        Ok(SimpleWeights { q })
    }

    pub fn dictatorial(n: usize) -> Self {
        let mut q = vec![Rational::zero(); n];
        q[0] = Rational::one();
        SimpleWeights { q }
    }

    pub fn marginal(n: usize) -> Self {
        let mut q = vec![Rational::zero(); n];
        q[n - 1] = Rational::one();
        SimpleWeights { q }
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[Rational] {
        &self.q
    }

    /// `q_{|S|}`.
    pub fn weight(&self, size: usize) -> &Rational {
        &self.q[size]
    }

    /// `Σ_k q_k c_k`.
    pub fn apply(&self, coefficients: &[Rational]) -> Rational {
        self.q.iter().zip(coefficients).map(|(q, c)| q * c).sum()
    }

    /// True for the weight vector concentrated on the full coalition `{a}^c`.
    pub fn is_marginal(&self) -> bool {
        let n = self.n();
        self.q[n - 1].is_one() && self.q[..n - 1].iter().all(Rational::is_zero)
    }
}

fn coalition_mass(q: &[Rational]) -> Rational {
    let n = q.len();
    q.iter().enumerate().map(|(k, qk)| binomial(n - 1, k) * qk).sum()
}

fn check_open_unit(theta: &Rational) -> Result<()> {
    if theta.is_positive() && theta < &Rational::one() {
        Ok(())
    } else {
        Err(Error::InvalidWeights(format!(
            "binomial θ = {theta} must lie in (0, 1)"
        )))
    }
}

/// Independent inclusion probabilities `θ_i ∈ [0, 1]`, one per feature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliWeights {
    theta: Vec<Rational>,
}

impl BernoulliWeights {
    pub fn new(theta: Vec<Rational>) -> Result<Self> {
        if let Some(feature) = theta.iter().position(|t| !t.is_unit_interval()) {
            return Err(Error::ThetaOutOfRange {
                feature,
                value: theta[feature].clone(),
            });
        }
        Ok(BernoulliWeights { theta })
    }

    pub fn uniform(n: usize, theta: Rational) -> Result<Self> {
        BernoulliWeights::new(vec![theta; n])
    }

    pub fn theta(&self) -> &[Rational] {
        &self.theta
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexPreset {
    Shapley,
    Banzhaf,
    Binomial(Rational),
    Dictatorial,
    Marginal,
}

impl IndexPreset {
    pub fn weights(&self, n: usize) -> Result<SimpleWeights> {
        if n == 0 {
            return Err(Error::InvalidWeights("at least one feature is required".into()));
        }
        Ok(match self {
            IndexPreset::Shapley => SimpleWeights::shapley(n),
            IndexPreset::Banzhaf => SimpleWeights::banzhaf(n),
            IndexPreset::Binomial(theta) => SimpleWeights::binomial(n, theta)?,
            IndexPreset::Dictatorial => SimpleWeights::dictatorial(n),
            IndexPreset::Marginal => SimpleWeights::marginal(n),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            IndexPreset::Shapley => "shapley",
            IndexPreset::Banzhaf => "banzhaf",
            IndexPreset::Binomial(_) => "binomial",
            IndexPreset::Dictatorial => "dictatorial",
            IndexPreset::Marginal => "marginal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scheme {
    Preset(IndexPreset),
    Simple(SimpleWeights),
    Bernoulli(BernoulliWeights),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComputationPath {
    Interpolation,
    BernoulliDirect,
    ClosedForm,
}

impl ComputationPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            ComputationPath::Interpolation => "interpolation",
            ComputationPath::BernoulliDirect => "bernoulli-direct",
            ComputationPath::ClosedForm => "closed-form",
        }
    }
}

impl fmt::Display for ComputationPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Index values for every feature plus how they were obtained.
#[derive(Debug, Clone)]
pub struct AttributionReport {
    pub values: Vec<Rational>,
    pub scheme: Scheme,
    pub path: ComputationPath,
    pub engine_calls: usize,
    pub calls_per_feature: Vec<usize>,
    /// `m_k(a)` per feature, when the interpolation path was used.
    pub coefficients: Option<Vec<Vec<Rational>>>,
}

fn check_inputs(model: &dyn Model, dist: &ProductDistribution, e: &Instance, a: usize) -> Result<()> {
    same_space(model.space(), dist.space())?;
    same_space(model.space(), e.space())?;
    model.space().check_feature(a)
}

/// `m(a;S) = E[F|S∪{a}] − E[F|S]`.
pub fn marginal_contribution(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    a: usize,
    set: &Coalition,
) -> Result<Rational> {
    check_inputs(model, dist, e, a)?;
    if set.contains(a) {
        return Err(Error::FeatureInCoalition(a));
    }
    let with = conditional_expectation(model, dist, e, &set.with(a))?;
    let without = conditional_expectation(model, dist, e, set)?;
    Ok(with - without)
}

/// The coalition-size sums `c_k = m_k(a)` for `k = 0..n−1`, from `2n`
/// expectation calls at the nodes `z = 0..n−1`.
pub fn interpolate_coefficients(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    a: usize,
) -> Result<Vec<Rational>> {
    check_inputs(model, dist, e, a)?;
    let n = dist.space().n();
    let nodes: Vec<Rational> = (0..n).map(Rational::from).collect();
    let samples = try_map(nodes.clone(), |z| {
        let mut pinned = mixture_distribution(dist, e, &z)?;
        let mut free = pinned.clone();
        pinned.set_point_mass(a, e.value(a));
        free.set_marginal_unchecked(a, dist.marginal(a).to_vec());
        let diff = model.expected_value(&pinned)? - model.expected_value(&free)?;
        Ok((Rational::one() + z).pow(n as u32 - 1) * diff)
    })?;
    solve_vandermonde(&nodes, &samples)
}

/// Any simple index through interpolation, never short-circuited.
pub fn interpolated_index(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    a: usize,
    weights: &SimpleWeights,
) -> Result<Rational> {
    check_weights_dim(model, weights)?;
    Ok(weights.apply(&interpolate_coefficients(model, dist, e, a)?))
}

fn check_weights_dim(model: &dyn Model, weights: &SimpleWeights) -> Result<()> {
    let n = model.space().n();
    if weights.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: weights.n(),
        });
    }
    Ok(())
}

/// `F(e) − Σ_{ω_a} F(ω_a, e_{−a}) P(Y_a = ω_a)`, using model evaluations only.
pub fn marginal_index(model: &dyn Model, dist: &ProductDistribution, e: &Instance, a: usize) -> Result<Rational> {
    check_inputs(model, dist, e, a)?;
    let mut acc = model.evaluate(e)?;
    for (v, p) in dist.marginal(a).iter().enumerate() {
        acc -= p * model.evaluate(&e.with_value(a, v)?)?;
    }
    Ok(acc)
}

/// `I(a;F) = Σ_k q_k m_k(a)`. The marginal weight vector takes the
/// closed-form path; everything else interpolates.
pub fn compute_simple_index(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    a: usize,
    weights: &SimpleWeights,
) -> Result<Rational> {
    check_weights_dim(model, weights)?;
    if weights.is_marginal() {
        marginal_index(model, dist, e, a)
    } else {
        interpolated_index(model, dist, e, a, weights)
    }
}

/// `I(a;F) = E[F(Y^{θ,1})] − E[F(Y^{θ,0})]`; the entry `θ_a` is ignored.
pub fn compute_bernoulli_index(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    a: usize,
    weights: &BernoulliWeights,
) -> Result<Rational> {
    check_inputs(model, dist, e, a)?;
    let n = dist.space().n();
    if weights.theta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: weights.theta.len(),
        });
    }
    let mut theta = weights.theta.clone();
    theta[a] = Rational::one();
    let included = bernoulli_mixture(dist, e, &theta)?;
    theta[a] = Rational::zero();
    let excluded = bernoulli_mixture(dist, e, &theta)?;
    Ok(model.expected_value(&included)? - model.expected_value(&excluded)?)
}

enum Plan {
    Interpolate(SimpleWeights),
    Bernoulli(BernoulliWeights),
    Closed,
}

fn plan(scheme: &Scheme, n: usize) -> Result<Plan> {
    Ok(match scheme {
        Scheme::Preset(IndexPreset::Banzhaf) => Plan::Bernoulli(BernoulliWeights::uniform(n, Rational::new(1, 2))?),
        Scheme::Preset(IndexPreset::Binomial(theta)) => {
            check_open_unit(theta)?;
            Plan::Bernoulli(BernoulliWeights::uniform(n, theta.clone())?)
        }
        Scheme::Preset(IndexPreset::Marginal) => Plan::Closed,
        Scheme::Preset(p) => Plan::Interpolate(p.weights(n)?),
        Scheme::Simple(w) if w.n() != n => {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: w.n(),
            })
        }
        Scheme::Simple(w) if w.is_marginal() => Plan::Closed,
        Scheme::Simple(w) => Plan::Interpolate(w.clone()),
        Scheme::Bernoulli(w) => Plan::Bernoulli(w.clone()),
    })
}

/// Indices for every feature under `scheme`, choosing the cheapest path:
/// Banzhaf, binomial and explicit Bernoulli schemes use two expectations
/// per feature, the marginal index uses model evaluations only, and every
/// other simple scheme interpolates.
pub fn attribute_all(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    scheme: &Scheme,
) -> Result<AttributionReport> {
    same_space(model.space(), dist.space())?;
    same_space(model.space(), e.space())?;
    let n = model.space().n();
    let plan = plan(scheme, n)?;

    let per_feature = try_map((0..n).collect(), |a| {
        let counted = CountingModel::new(model);
        let (value, coefficients) = match &plan {
            Plan::Interpolate(w) => {
                let c = interpolate_coefficients(&counted, dist, e, a)?;
                (w.apply(&c), Some(c))
            }
            Plan::Bernoulli(w) => (compute_bernoulli_index(&counted, dist, e, a, w)?, None),
            Plan::Closed => (marginal_index(&counted, dist, e, a)?, None),
        };
        Ok((value, coefficients, counted.expectation_calls()))
    })?;

    let path = match plan {
        Plan::Interpolate(_) => ComputationPath::Interpolation,
        Plan::Bernoulli(_) => ComputationPath::BernoulliDirect,
        Plan::Closed => ComputationPath::ClosedForm,
    };
    let calls_per_feature: Vec<usize> = per_feature.iter().map(|(_, _, c)| *c).collect();
    let coefficients = (path == ComputationPath::Interpolation).then(|| {
        per_feature
            .iter()
            .map(|(_, c, _)| c.clone().unwrap_or_default())
            .collect()
    });
    Ok(AttributionReport {
        values: per_feature.into_iter().map(|(v, _, _)| v).collect(),
        scheme: scheme.clone(),
        path,
        engine_calls: calls_per_feature.iter().sum(),
        calls_per_feature,
        coefficients,
    })
}
