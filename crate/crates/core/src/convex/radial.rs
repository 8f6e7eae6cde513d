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

//! Radial profiles: φ(x) = p(|x|) with p convex and nondecreasing on
//! [0, r_max], +∞ beyond.

use serde::{Deserialize, Serialize};

use super::llt::conj_1d;
use crate::error::{invalid, Result};
use crate::extreal::ExtReal;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub r_max: f64,
    /// Values at r_i = i·r_max/(M−1).
    pub values: Vec<ExtReal>,
}

impl RadialProfile {
    pub fn new(r_max: f64, values: Vec<ExtReal>) -> Result<RadialProfile> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return invalid("radial profile needs a positive radius");
        }
        if values.len() < 2 {
            return invalid("radial profile needs at least two nodes");
        }
        if !values[0].is_finite() {
            return invalid("radial profile must be finite at the origin");
        }
        Ok(RadialProfile { r_max, values })
    }

    pub fn sample<F: Fn(f64) -> ExtReal>(r_max: f64, nodes: usize, p: F) -> Result<RadialProfile> {
        let h = r_max / (nodes - 1) as f64;
        RadialProfile::new(r_max, (0..nodes).map(|i| p(i as f64 * h)).collect())
    }

    pub fn h(&self) -> f64 {
        self.r_max / (self.values.len() - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.h();
        (0..self.values.len()).map(|i| i as f64 * h).collect()
    }

    /// Largest node radius with a finite value.
    pub fn finite_radius(&self) -> f64 {
        let last = self.values.iter().rposition(|v| v.is_finite()).unwrap_or(0);
        last as f64 * self.h()
    }

    fn cell(&self, r: f64) -> Option<(usize, f64)> {
        let n = self.values.len();
        if r > self.r_max * (1.0 + 1e-12) {
            return None;
        }
        let s = (r / self.h()).max(0.0);
        let i = (s.floor() as usize).min(n - 2);
        Some((i, (s - i as f64).clamp(0.0, 1.0)))
    }

    pub fn eval(&self, r: f64) -> ExtReal {
        let Some((i, t)) = self.cell(r) else {
            return ExtReal::INFINITY;
        };
        let (a, b) = (self.values[i], self.values[i + 1]);
        if t == 0.0 {
            return a;
        }
        if t == 1.0 {
            return b;
        }
        if a.is_infinite() || b.is_infinite() {
            return ExtReal::INFINITY;
        }
        ExtReal::finite(a.get() + t * (b.get() - a.get()))
    }

    /// Right slope p′(r⁺) from the piecewise-linear interpolant (the left
    /// slope at the last finite node). Zero at r = 0 by evenness.
    pub fn slope(&self, r: f64) -> Option<f64> {
        if r <= 0.0 {
            return Some(0.0);
        }
        let (i, t) = self.cell(r)?;
        let h = self.h();
        let seg = |j: usize| -> Option<f64> {
            let (a, b) = (self.values[j], self.values[j + 1]);
            (a.is_finite() && b.is_finite()).then(|| (b.get() - a.get()) / h)
        };
        if t > 0.0 && t < 1.0 {
            return seg(i);
        }
        // At a node: minimal-norm element between left and right slopes.
        let node = if t == 1.0 { i + 1 } else { i };
        let left = if node > 0 { seg(node - 1) } else { None };
        let right = if node + 1 < self.values.len() {
            seg(node)
        } else {
            None
        };
        match (left, right) {
            (Some(l), Some(r)) => Some(if l * r <= 0.0 {
                0.0
            } else if l.abs() < r.abs() {
                l
            } else {
                r
            }),
            (Some(l), None) => Some(l),
            (None, Some(r)) => Some(r),
            (None, None) => None,
        }
    }

    /// Largest finite adjacent slope.
    pub fn max_slope(&self) -> f64 {
        let h = self.h();
        self.values
            .windows(2)
            .filter(|w| w[0].is_finite() && w[1].is_finite())
            .map(|w| ((w[1].get() - w[0].get()) / h).abs())
            .fold(0.0, f64::max)
    }

    /// Profile of the conjugate of x ↦ p(|x|), namely s ↦ max_r (rs − p(r)),
    /// on `s_nodes` nodes over [0, s_max].
    pub fn conjugate(&self, s_max: f64, s_nodes: usize) -> Result<RadialProfile> {
        let s: Vec<f64> = (0..s_nodes)
            .map(|i| s_max * i as f64 / (s_nodes - 1) as f64)
            .collect();
        RadialProfile::new(
            s_max,
            conj_profile(&self.nodes(), &self.raw(), &s)
                .into_iter()
                .map(ExtReal::finite)
                .collect(),
        )
    }

    pub(crate) fn raw(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.get()).collect()
    }
}

/// max_i (s·r_i − v_i) for each s ≥ 0 (r sorted, v may be +∞).
pub(crate) fn conj_profile(r: &[f64], v: &[f64], s: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; s.len()];
    conj_1d(r, v, s, &mut out, None);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_slope_of_quadratic_profile() {
        let p = RadialProfile::sample(4.0, 4001, |r| ExtReal::finite(0.5 * r * r)).unwrap();
        assert!((p.eval(1.2345).get() - 0.5 * 1.2345f64.powi(2)).abs() < 1e-6);
        assert!((p.slope(2.0005).unwrap() - 2.0005).abs() < 1e-3);
        assert_eq!(p.slope(0.0), Some(0.0));
        assert!(p.eval(4.5).is_infinite());
    }

    #[test]
    fn conjugate_of_norm_is_indicator_like() {
        // p(r) = r on [0, 5]: conjugate is 0 for s ≤ 1 and grows like 5(s − 1).
        let p = RadialProfile::sample(5.0, 501, ExtReal::finite).unwrap();
        let c = p.conjugate(2.0, 201).unwrap();
        assert!(c.eval(0.5).get().abs() < 1e-12);
        assert!((c.eval(1.5).get() - 2.5).abs() < 1e-9);
    }
}
