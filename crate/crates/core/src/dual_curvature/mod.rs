/*
Copyright 2026 The dualcurv Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

//! Euclidean and spherical dual curvature measures of log-concave functions
//! and the harness comparing the variational formula's three routes.

pub mod dictionary;
pub mod variational;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dictionary::{TestFunction, TestFunctionDictionary};
pub use variational::{
    first_moment_identity, hypothesis_flags, layer_cake_delta, variational_lhs, variational_rhs,
    variational_rhs_with, HypothesisFlags, VariationalLhs, VariationalRhs,
};

use crate::bodies::SphericalMeasure;
use crate::convex::{LogConcaveFunction, Support};
use crate::error::{invalid, Error, Result};
use crate::numerics::{norm, pairwise_sum};
use crate::variation::{boundary_measure, growth_check, rule_for, QuadratureSpec, Weight};

/// A finite atomic measure on ℝⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EuclideanMeasure {
    pub dim: usize,
    /// Flat coordinates, `dim` per atom.
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Where the atoms came from, e.g. "pushforward:polar" or "grid:64".
    pub source: String,
}

impl EuclideanMeasure {
    pub fn new(
        dim: usize,
        points: Vec<f64>,
        weights: Vec<f64>,
        source: impl Into<String>,
    ) -> Result<EuclideanMeasure> {
        if points.len() != dim * weights.len() {
            return invalid("atom coordinates do not match the weight count");
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return invalid("atom weights must be finite and nonnegative");
        }
        if points.iter().any(|v| !v.is_finite()) {
            return invalid("atom coordinates must be finite");
        }
        Ok(EuclideanMeasure {
            dim,
            points,
            weights,
            source: source.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k * self.dim..(k + 1) * self.dim]
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Largest atom norm.
    pub fn radius(&self) -> f64 {
        (0..self.len())
            .map(|k| norm(self.point(k)))
            .fold(0.0, f64::max)
    }

    /// Σ w_k ζ(y_k).
    pub fn integrate<F: Fn(&[f64]) -> f64 + Sync>(&self, zeta: F) -> f64 {
        let terms: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|k| {
                if self.weights[k] == 0.0 {
                    0.0
                } else {
                    self.weights[k] * zeta(self.point(k))
                }
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// Atoms with zero weight removed.
    pub fn compact(&self) -> EuclideanMeasure {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for k in 0..self.len() {
            if self.weights[k] > 0.0 {
                points.extend_from_slice(self.point(k));
                weights.push(self.weights[k]);
            }
        }
        EuclideanMeasure {
            dim: self.dim,
            points,
            weights,
            source: self.source.clone(),
        }
    }
}

fn moment_guard(f: &LogConcaveFunction) -> Result<()> {
    if matches!(f.support(), Support::Unbounded) && !growth_check(f.phi()) {
        return Err(Error::MomentMayBeInfinite(
            "φ does not grow at least linearly at the boundary".into(),
        ));
    }
    Ok(())
}

/// C̃^e_q(f;·): the pushforward of ω·f dx under ∇φ, one atom per
/// quadrature node.
pub fn euclidean_dcm(
    f: &LogConcaveFunction,
    w: &Weight,
    spec: &QuadratureSpec,
) -> Result<EuclideanMeasure> {
    moment_guard(f)?;
    let rule = rule_for(f, w, spec, false)?;
    let dim = f.dim();
    let atoms: Result<Vec<(Vec<f64>, f64)>> = (0..rule.len())
        .into_par_iter()
        .map(|k| {
            let x = rule.point(k);
            let v = f.eval(x);
            if v == 0.0 || rule.weights[k] == 0.0 {
                return Ok((vec![0.0; dim], 0.0));
            }
            Ok((f.grad_phi(x)?, rule.weights[k] * v))
        })
        .collect();
    let mut points = Vec::with_capacity(rule.len() * dim);
    let mut weights = Vec::with_capacity(rule.len());
    for (y, m) in atoms? {
        if m > 0.0 {
            points.extend(y);
            weights.push(m);
        }
    }
    let tag = if rule.tensor.is_some() {
        "pushforward:hybrid"
    } else {
        "pushforward:polar"
    };
    EuclideanMeasure::new(dim, points, weights, tag)
}

/// C̃^s_q(f;·): the Gauss-map image of ω·f dH^{n−1} on ∂K_f; empty when
/// the support is unbounded.
pub fn spherical_dcm(
    f: &LogConcaveFunction,
    w: &Weight,
    spec: &QuadratureSpec,
) -> Result<SphericalMeasure> {
    match f.support() {
        Support::Unbounded => Ok(SphericalMeasure::empty(f.dim())),
        Support::Body(k) => {
            if !k.origin_interior() {
                return Err(Error::OriginNotInterior);
            }
            boundary_measure(f, k, w, None, spec.angular)
        }
    }
}

pub fn integrate(mu: &EuclideanMeasure, zeta: &TestFunction) -> f64 {
    mu.integrate(|y| zeta.eval(y))
}

/// max_ζ |∫ζ dμ − ∫ζ dν| / (1 + Lip(ζ)·diam), with Lip taken on the ball
/// containing both supports and diam its diameter.
pub fn discrepancy(
    mu: &EuclideanMeasure,
    nu: &EuclideanMeasure,
    dict: &TestFunctionDictionary,
) -> Result<f64> {
    if mu.dim != nu.dim || mu.dim != dict.dim {
        return invalid("measures and dictionary must share a dimension");
    }
    let r = mu.radius().max(nu.radius());
    let diam = 2.0 * r;
    let vals: Vec<f64> = dict
        .functions
        .iter()
        .map(|z| (integrate(mu, z) - integrate(nu, z)).abs() / (1.0 + z.lipschitz(r) * diam))
        .collect();
    Ok(vals.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests;
