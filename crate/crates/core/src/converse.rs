//! Recovering `E[F]` from an index oracle.
//!
//! Write `c_ℓ = Σ_{|S|=ℓ} E[F|S]` and `Θ(z)` for the sum of all `n` indices
//! computed under the mixture `Y^z`. Then
//! `(1+z)^n Θ(z) = Σ_{ℓ≤n} c_ℓ P_ℓ(z)` with
//! `P_ℓ(z) = Σ_{k≤ℓ} C(ℓ,k) β_k (1+z)^k z^{ℓ−k}` and
//! `β_k = k q_{k−1} − (n−k) q_k`. Since `c_n = F(e)` is known, sampling `Θ`
//! at `n` nodes gives an `n × n` system for `c_0..c_{n−1}`, and `c_0 = E[F]`.
//! The system is nonsingular whenever `q_0 > 0`.

use crate::distribution::{mixture_distribution, ProductDistribution};
use crate::error::{Error, Result};
use crate::exec::try_map;
use crate::indices::{compute_simple_index, SimpleWeights};
use crate::linalg::solve_linear;
use crate::models::Model;
use crate::rational::{binomial, Rational};
use crate::space::{same_space, Instance};

/// Anything that returns all `n` single-feature indices for a reference
/// distribution.
pub trait IndexOracle: Sync {
    fn indices(&self, dist: &ProductDistribution) -> Result<Vec<Rational>>;
}

/// The oracle backed by this crate's own index engine.
pub struct EngineOracle<'a> {
    model: &'a dyn Model,
    instance: &'a Instance,
    weights: SimpleWeights,
}

impl<'a> EngineOracle<'a> {
    pub fn new(model: &'a dyn Model, instance: &'a Instance, weights: SimpleWeights) -> Self {
        EngineOracle {
            model,
            instance,
            weights,
        }
    }
}

impl IndexOracle for EngineOracle<'_> {
    fn indices(&self, dist: &ProductDistribution) -> Result<Vec<Rational>> {
        (0..self.model.space().n())
            .map(|a| compute_simple_index(self.model, dist, self.instance, a, &self.weights))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConverseSystem {
    weights: SimpleWeights,
    beta: Vec<Rational>,
    nodes: Vec<Rational>,
}

/// Everything the reduction computed on the way to `E[F]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConverseDiagnostics {
    pub expectation: Rational,
    /// `c_0..c_{n−1}` as solved.
    pub coefficients: Vec<Rational>,
    /// `c_n = F(e)`.
    pub top: Rational,
    pub nodes: Vec<Rational>,
    /// `Θ(z_i)`.
    pub theta: Vec<Rational>,
}

impl ConverseSystem {
    /// The system for `weights` on the default nodes `z_i = i + 1`.
    pub fn new(weights: SimpleWeights) -> Self {
        let n = weights.n();
        let q = |k: isize| -> Rational {
            if k < 0 || k as usize >= n {
                Rational::zero()
            } else {
                weights.weight(k as usize).clone()
            }
        };
        let beta = (0..=n)
            .map(|k| Rational::from(k) * q(k as isize - 1) - Rational::from(n - k) * q(k as isize))
            .collect();
        let nodes = (1..=n).map(Rational::from).collect();
        ConverseSystem { weights, beta, nodes }
    }

    /// Replaces the nodes; they must be `n` distinct positive rationals.
    pub fn with_nodes(mut self, nodes: Vec<Rational>) -> Result<Self> {
        if nodes.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: nodes.len(),
            });
        }
        if let Some(bad) = nodes.iter().find(|z| !z.is_positive()) {
            return Err(Error::InvalidNodes(format!("node {bad} is not positive")));
        }
        for (i, z) in nodes.iter().enumerate() {
            if nodes[i + 1..].contains(z) {
                return Err(Error::DuplicateNodes);
            }
        }
        self.nodes = nodes;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn weights(&self) -> &SimpleWeights {
        &self.weights
    }

    /// `β_0..β_n`.
    pub fn beta(&self) -> &[Rational] {
        &self.beta
    }

    pub fn nodes(&self) -> &[Rational] {
        &self.nodes
    }

    /// `P_ℓ(z)`. Panics unless `ℓ ≤ n`.
    pub fn eval_p(&self, l: usize, z: &Rational) -> Rational {
        assert!(l <= self.n(), "P_{l} is defined for l <= {}", self.n());
        let one_plus = Rational::one() + z;
        (0..=l)
            .filter(|&k| !self.beta[k].is_zero())
            .map(|k| binomial(l, k) * &self.beta[k] * one_plus.pow(k as u32) * z.pow((l - k) as u32))
            .sum()
    }

    /// Monomial coefficients of `P_ℓ`, from `z^0` up to `z^ℓ`.
    pub fn p_coefficients(&self, l: usize) -> Vec<Rational> {
        assert!(l <= self.n(), "P_{l} is defined for l <= {}", self.n());
        let mut coeffs = vec![Rational::zero(); l + 1];
        for k in 0..=l {
            let outer = binomial(l, k) * &self.beta[k];
            if outer.is_zero() {
                continue;
            }
            // (1+z)^k z^{l−k} = Σ_j C(k,j) z^{j+l−k}
            for j in 0..=k {
                coeffs[j + l - k] += &outer * binomial(k, j);
            }
        }
        coeffs
    }

    /// `(ℓ−n) Σ_{k≤ℓ} C(ℓ,k) q_k`, the predicted coefficient of `z^ℓ` in `P_ℓ`.
    pub fn leading_coefficient_closed_form(&self, l: usize) -> Rational {
        let n = self.n();
        let sum: Rational = (0..=l.min(n - 1))
            .map(|k| binomial(l, k) * self.weights.weight(k))
            .sum();
        Rational::from(l as i64 - n as i64) * sum
    }

    /// `M[i][ℓ] = P_ℓ(z_i)` for `ℓ < n`.
    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        self.nodes
            .iter()
            .map(|z| (0..self.n()).map(|l| self.eval_p(l, z)).collect())
            .collect()
    }

    /// Queries `oracle` under `Y^{z_i}` for every node, solves for
    /// `c_0..c_{n−1}` and returns `c_0 = E[F]` with the intermediate values.
    pub fn recover_expectation(
        &self,
        oracle: &dyn IndexOracle,
        dist: &ProductDistribution,
        e: &Instance,
        model_at_e: &Rational,
    ) -> Result<ConverseDiagnostics> {
        if self.weights.weight(0).is_zero() {
            return Err(Error::ConverseInapplicable);
        }
        same_space(dist.space(), e.space())?;
        let n = self.n();
        if dist.space().n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: dist.space().n(),
            });
        }
        let theta = try_map(self.nodes.clone(), |z| {
            let values = oracle.indices(&mixture_distribution(dist, e, &z)?)?;
            if values.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: values.len(),
                });
            }
            Ok(values.into_iter().sum::<Rational>())
        })?;
        let rhs: Vec<Rational> = self
            .nodes
            .iter()
            .zip(&theta)
            .map(|(z, t)| (Rational::one() + z).pow(n as u32) * t - model_at_e * self.eval_p(n, z))
            .collect();
        let coefficients = solve_linear(&self.matrix(), &rhs)?;
        Ok(ConverseDiagnostics {
            expectation: coefficients[0].clone(),
            coefficients,
            top: model_at_e.clone(),
            nodes: self.nodes.clone(),
            theta,
        })
    }
}
