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

use serde::{Deserialize, Serialize};

use super::{ConvexFunction, ConvexKind};
use crate::bodies::ConvexBody;
use crate::error::{invalid, Error, Result};
use crate::extreal::ExtReal;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Support {
    Body(ConvexBody),
    Unbounded,
}

/// f = e^{−φ}, together with its support and a maximizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogConcaveFunction {
    phi: ConvexFunction,
    support: Support,
    max_at: Vec<f64>,
}

impl LogConcaveFunction {
    /// Infers the support from φ: the indicator's body, a radial profile's
    /// finite ball, the hull of a grid function's finite nodes (when some
    /// nodes are +∞), otherwise unbounded.
    pub fn new(phi: ConvexFunction) -> Result<LogConcaveFunction> {
        let support = match (phi.domain_body(), phi.kind()) {
            (Some(k), _) => Support::Body(k),
            (None, ConvexKind::Grid(g)) if g.values.iter().any(|v| v.is_infinite()) => {
                let pts: Vec<Vec<f64>> = (0..g.values.len())
                    .filter(|&i| g.values[i].is_finite())
                    .map(|i| g.spec.point(i))
                    .collect();
                if pts.is_empty() {
                    return Err(Error::EmptyDomain);
                }
                Support::Body(ConvexBody::from_vertices(phi.dim(), &pts)?)
            }
            _ => Support::Unbounded,
        };
        LogConcaveFunction::with_support(phi, support)
    }

    pub fn with_support(phi: ConvexFunction, support: Support) -> Result<LogConcaveFunction> {
        if let Support::Body(k) = &support {
            if k.dim() != phi.dim() {
                return invalid("support dimension does not match the function");
            }
        }
        let max_at = phi.argmin()?;
        if phi.eval(&max_at)?.is_infinite() {
            return Err(Error::EmptyDomain);
        }
        Ok(LogConcaveFunction {
            phi,
            support,
            max_at,
        })
    }

    pub fn gaussian(dim: usize) -> Result<LogConcaveFunction> {
        LogConcaveFunction::new(ConvexFunction::quadratic(dim, 1.0)?)
    }

    /// e^{−|x|}.
    pub fn exp_norm(dim: usize) -> Result<LogConcaveFunction> {
        LogConcaveFunction::new(ConvexFunction::scaled_norm(dim, 0.0, 1.0)?)
    }

    pub fn indicator(k: ConvexBody) -> Result<LogConcaveFunction> {
        LogConcaveFunction::new(ConvexFunction::indicator(k))
    }

    /// c·1_K, i.e. φ = −ln c + 1^∞_K.
    pub fn scaled_indicator(k: ConvexBody, c: f64) -> Result<LogConcaveFunction> {
        if !(c.is_finite() && c > 0.0) {
            return invalid(format!("indicator scale must be positive (got {c})"));
        }
        LogConcaveFunction::new(ConvexFunction::indicator(k).shifted(-c.ln()))
    }

    pub fn phi(&self) -> &ConvexFunction {
        &self.phi
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn support_body(&self) -> Option<&ConvexBody> {
        match &self.support {
            Support::Body(k) => Some(k),
            Support::Unbounded => None,
        }
    }

    pub fn max_at(&self) -> &[f64] {
        &self.max_at
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn is_even(&self) -> bool {
        self.phi.is_even()
    }

    pub fn max_value(&self) -> f64 {
        self.phi
            .eval(&self.max_at)
            .map(|v| v.exp_neg())
            .unwrap_or(0.0)
    }

    fn outside_support(&self, x: &[f64]) -> bool {
        match &self.support {
            Support::Body(k) => !k.contains(x, 1e-12 * (1.0 + k.bounding_radius())),
            Support::Unbounded => false,
        }
    }

    /// φ(x), +∞ off the support and outside a grid's box.
    pub fn phi_at(&self, x: &[f64]) -> ExtReal {
        if self.outside_support(x) {
            return ExtReal::INFINITY;
        }
        match self.phi.eval(x) {
            Ok(v) => v,
            Err(_) => ExtReal::INFINITY,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.phi_at(x).exp_neg()
    }

    /// ∇φ(x) on the support.
    pub fn grad_phi(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.phi.gradient(x)
    }
}
