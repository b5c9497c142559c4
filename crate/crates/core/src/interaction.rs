//! Interaction indices for a feature set `A`.
//!
//! `I(A;F) = Σ_{S⊆A^c} Q_A(S) m(A;S)` with the alternating-sum marginal
//! `m(A;S) = Σ_{B⊆A} (−1)^{|A∖B|} E[F|S∪B]`. Simple weights `q(|S|,|A|)` are
//! computed from a bivariate polynomial sampled on a `(n−m+1) × (m+1)` grid;
//! Bernoulli weights need one expectation per subset of `A`.

use crate::distribution::{bernoulli_mixture, ProductDistribution};
use crate::error::{Error, Result};
use crate::exec::try_map;
use crate::indices::{IndexPreset, SimpleWeights};
use crate::linalg::solve_bivariate;
use crate::models::{conditional_expectation, CountingModel, Model};
use crate::rational::{binomial, factorial, Rational};
use crate::space::{same_space, Coalition, Instance};

/// Largest `|A|` accepted by the `2^|A|` enumerations.
pub const MAX_SET_SIZE: usize = 20;

/// Weights `q(k, m)` per target-set size `m`, each row normalized so that
/// `Σ_k C(n−m,k) q(k,m) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionWeights {
    n: usize,
    rows: Vec<Option<Vec<Rational>>>,
}

impl InteractionWeights {
    /// No rows yet; add them with [`InteractionWeights::with_row`].
    pub fn empty(n: usize) -> Self {
        InteractionWeights {
            n,
            rows: vec![None; n + 1],
        }
    }

    pub fn with_row(mut self, m: usize, q: Vec<Rational>) -> Result<Self> {
        if m == 0 || m > self.n {
            return Err(Error::InvalidWeights(format!("set size {m} is outside 1..={}", self.n)));
        }
        let len = self.n - m + 1;
        if q.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                actual: q.len(),
            });
        }
        if let Some(k) = q.iter().position(Rational::is_negative) {
            return Err(Error::InvalidWeights(format!("q({k},{m}) = {} is negative", q[k])));
        }
        let total: Rational = q.iter().enumerate().map(|(k, qk)| binomial(self.n - m, k) * qk).sum();
        if !total.is_one() {
            return Err(Error::InvalidWeights(format!(
                "Σ C(n-m,k) q(k,{m}) = {total}, expected 1"
            )));
        }
        self.rows[m] = Some(q);
        Ok(self)
    }

    /// The preset's interaction analogue, with a row for every `m`.
    pub fn preset(preset: &IndexPreset, n: usize) -> Result<Self> {
        preset.weights(n.max(1))?;
        let mut rows = vec![None];
        for m in 1..=n {
            let r = n - m;
            let row: Vec<Rational> = match preset {
                IndexPreset::Shapley => {
                    let total = factorial(r + 1);
                    (0..=r).map(|k| factorial(k) * factorial(r - k) / &total).collect()
                }
                IndexPreset::Banzhaf => vec![Rational::new(1, 2).pow(r as u32); r + 1],
                IndexPreset::Binomial(theta) => {
                    let rest = Rational::one() - theta;
                    (0..=r)
                        .map(|k| theta.pow(k as u32) * rest.pow((r - k) as u32))
                        .collect()
                }
                IndexPreset::Dictatorial => unit_row(r, 0),
                IndexPreset::Marginal => unit_row(r, r),
            };
            rows.push(Some(row));
        }
        Ok(InteractionWeights { n, rows })
    }

    /// Single-feature weights as the `m = 1` row.
    pub fn from_simple(w: &SimpleWeights) -> Self {
        let mut rows = vec![None; w.n() + 1];
        rows[1] = Some(w.q().to_vec());
        InteractionWeights { n: w.n(), rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, m: usize) -> Result<&[Rational]> {
        self.rows
            .get(m)
            .and_then(Option::as_deref)
            .ok_or_else(|| Error::InvalidWeights(format!("no weights given for |A| = {m}")))
    }
}

fn unit_row(r: usize, at: usize) -> Vec<Rational> {
    let mut row = vec![Rational::zero(); r + 1];
    row[at] = Rational::one();
    row
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliInteractionWeights {
    theta: Vec<Rational>,
}

impl BernoulliInteractionWeights {
    pub fn new(theta: Vec<Rational>) -> Result<Self> {
        if let Some(feature) = theta.iter().position(|t| !t.is_unit_interval()) {
            return Err(Error::ThetaOutOfRange {
                feature,
                value: theta[feature].clone(),
            });
        }
        Ok(BernoulliInteractionWeights { theta })
    }

    pub fn uniform(n: usize, theta: Rational) -> Result<Self> {
        BernoulliInteractionWeights::new(vec![theta; n])
    }

    pub fn theta(&self) -> &[Rational] {
        &self.theta
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InteractionScheme {
    Simple(InteractionWeights),
    Bernoulli(BernoulliInteractionWeights),
}

/// Interpolation nodes: `n−m+1` in `z` (for `A^c`) and `m+1` in `y` (for `A`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariateGrid {
    z: Vec<Rational>,
    y: Vec<Rational>,
}

impl BivariateGrid {
    pub fn new(z: Vec<Rational>, y: Vec<Rational>) -> Result<Self> {
        for nodes in [&z, &y] {
            if let Some(bad) = nodes.iter().find(|x| x.is_negative()) {
                return Err(Error::InvalidNodes(format!("node {bad} is negative")));
            }
            for (i, a) in nodes.iter().enumerate() {
                if nodes[i + 1..].contains(a) {
                    return Err(Error::DuplicateNodes);
                }
            }
        }
        Ok(BivariateGrid { z, y })
    }

    /// `z ∈ {0..n−m}`, `y ∈ {0..m}`.
    pub fn standard(n: usize, m: usize) -> Self {
        BivariateGrid {
            z: (0..=n - m).map(Rational::from).collect(),
            y: (0..=m).map(Rational::from).collect(),
        }
    }

    pub fn z(&self) -> &[Rational] {
        &self.z
    }

    pub fn y(&self) -> &[Rational] {
        &self.y
    }

    pub fn point_count(&self) -> usize {
        self.z.len() * self.y.len()
    }
}

/// Scaling applied to each sampled expectation before interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prefactor {
    /// `(1+z)^{n−m} (1+y)^m`, which makes the samples a polynomial.
    Factored,
    /// `(1+z)^n`, kept only to show that it does not.
    Literal,
}

fn check_set(n: usize, set: &Coalition) -> Result<usize> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(max) = set.max_member() {
        if max >= n {
            return Err(Error::FeatureOutOfRange { index: max, n });
        }
    }
    let m = set.len();
    if m > MAX_SET_SIZE {
        return Err(Error::SetTooLarge {
            size: m,
            max: MAX_SET_SIZE,
        });
    }
    Ok(m)
}

fn check_inputs(model: &dyn Model, dist: &ProductDistribution, e: &Instance, set: &Coalition) -> Result<usize> {
    same_space(model.space(), dist.space())?;
    same_space(model.space(), e.space())?;
    check_set(model.space().n(), set)
}

/// `m(A;S) = Σ_{B⊆A} (−1)^{|A∖B|} E[F|S∪B]`.
pub fn interaction_marginal(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    set: &Coalition,
    coalition: &Coalition,
) -> Result<Rational> {
    let m = check_inputs(model, dist, e, set)?;
    if !set.is_disjoint(coalition) {
        return Err(Error::OverlappingSets);
    }
    model.space().check_coalition(coalition)?;
    let mut acc = Rational::zero();
    for b in set.subsets() {
        let term = conditional_expectation(model, dist, e, &coalition.union(&b))?;
        if (m - b.len()) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// `c[k][j] = Σ_{|S|=k, S⊆A^c} Σ_{|B|=j, B⊆A} E[F|S∪B]`, read off the grid
/// samples of `P(z,y) = prefactor · E[F(Z)]` where `Z` takes the `y`-mixture
/// on `A` and the `z`-mixture elsewhere. One expectation per grid point.
pub fn interaction_coefficients(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    set: &Coalition,
    grid: &BivariateGrid,
    prefactor: Prefactor,
) -> Result<Vec<Vec<Rational>>> {
    let m = check_inputs(model, dist, e, set)?;
    let n = model.space().n();
    if grid.z.len() != n - m + 1 {
        return Err(Error::DimensionMismatch {
            expected: n - m + 1,
            actual: grid.z.len(),
        });
    }
    if grid.y.len() != m + 1 {
        return Err(Error::DimensionMismatch {
            expected: m + 1,
            actual: grid.y.len(),
        });
    }
    let points: Vec<(usize, usize)> = (0..grid.z.len())
        .flat_map(|a| (0..grid.y.len()).map(move |b| (a, b)))
        .collect();
    let flat = try_map(points, |(a, b)| {
        let (z, y) = (&grid.z[a], &grid.y[b]);
        let theta: Vec<Rational> = (0..n)
            .map(|i| {
                let t = if set.contains(i) { y } else { z };
                t / (Rational::one() + t)
            })
            .collect();
        let mixed = bernoulli_mixture(dist, e, &theta)?;
        let scale = match prefactor {
            Prefactor::Factored => (Rational::one() + z).pow((n - m) as u32) * (Rational::one() + y).pow(m as u32),
            Prefactor::Literal => (Rational::one() + z).pow(n as u32),
        };
        Ok(scale * model.expected_value(&mixed)?)
    })?;
    let values: Vec<Vec<Rational>> = flat.chunks(grid.y.len()).map(<[Rational]>::to_vec).collect();
    solve_bivariate(&grid.z, &grid.y, &values)
}

/// `Σ_{k,j} q(k,m) (−1)^{m−j} c[k][j]` on the standard grid.
pub fn compute_interaction_simple(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    set: &Coalition,
    weights: &InteractionWeights,
) -> Result<Rational> {
    let m = check_set(model.space().n(), set)?;
    let grid = BivariateGrid::standard(model.space().n(), m);
    compute_interaction_simple_with(model, dist, e, set, weights, &grid, Prefactor::Factored)
}

pub fn compute_interaction_simple_with(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    set: &Coalition,
    weights: &InteractionWeights,
    grid: &BivariateGrid,
    prefactor: Prefactor,
) -> Result<Rational> {
    let n = model.space().n();
    let m = check_set(n, set)?;
    if weights.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: weights.n,
        });
    }
    let q = weights.row(m)?;
    let c = interaction_coefficients(model, dist, e, set, grid, prefactor)?;
    Ok(combine(q, &c, m))
}

fn combine(q: &[Rational], c: &[Vec<Rational>], m: usize) -> Rational {
    let mut acc = Rational::zero();
    for (qk, row) in q.iter().zip(c) {
        if qk.is_zero() {
            continue;
        }
        for (j, ckj) in row.iter().enumerate() {
            let term = qk * ckj;
            if (m - j) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    acc
}

/// `Σ_{B⊆A} (−1)^{|A∖B|} E[F(Z_B)]` where `Z_B` pins `B` to `e`, keeps the
/// original marginals on `A∖B` and takes the `θ`-mixture on `A^c`. Entries
/// of `θ` inside `A` are ignored.
pub fn compute_interaction_bernoulli(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    set: &Coalition,
    weights: &BernoulliInteractionWeights,
) -> Result<Rational> {
    let m = check_inputs(model, dist, e, set)?;
    let n = model.space().n();
    if weights.theta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: weights.theta.len(),
        });
    }
    let subsets: Vec<Coalition> = set.subsets().collect();
    let terms = try_map(subsets, |b| {
        let theta: Vec<Rational> = (0..n)
            .map(|i| {
                if b.contains(i) {
                    Rational::one()
                } else if set.contains(i) {
                    Rational::zero()
                } else {
                    weights.theta[i].clone()
                }
            })
            .collect();
        let value = model.expected_value(&bernoulli_mixture(dist, e, &theta)?)?;
        Ok(if (m - b.len()) % 2 == 0 { value } else { -value })
    })?;
    Ok(terms.into_iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteractionPath {
    BivariateInterpolation,
    BernoulliDirect,
}

impl InteractionPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            InteractionPath::BivariateInterpolation => "bivariate-interpolation",
            InteractionPath::BernoulliDirect => "bernoulli-direct",
        }
    }
}

#[derive(Debug, Clone)]
pub struct InteractionReport {
    pub value: Rational,
    pub path: InteractionPath,
    pub engine_calls: usize,
    /// `c[k][j]` on the simple path.
    pub coefficients: Option<Vec<Vec<Rational>>>,
}

/// Runs whichever path matches `scheme` and counts engine calls.
pub fn interact(
    model: &dyn Model,
    dist: &ProductDistribution,
    e: &Instance,
    set: &Coalition,
    scheme: &InteractionScheme,
) -> Result<InteractionReport> {
    let counted = CountingModel::new(model);
    let (value, path, coefficients) = match scheme {
        InteractionScheme::Simple(w) => {
            let n = model.space().n();
            let m = check_set(n, set)?;
            if w.n != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: w.n,
                });
            }
            let q = w.row(m)?;
            let grid = BivariateGrid::standard(n, m);
            let c = interaction_coefficients(&counted, dist, e, set, &grid, Prefactor::Factored)?;
            (combine(q, &c, m), InteractionPath::BivariateInterpolation, Some(c))
        }
        InteractionScheme::Bernoulli(w) => (
            compute_interaction_bernoulli(&counted, dist, e, set, w)?,
            InteractionPath::BernoulliDirect,
            None,
        ),
    };
    Ok(InteractionReport {
        value,
        path,
        engine_calls: counted.expectation_calls(),
        coefficients,
    })
}
