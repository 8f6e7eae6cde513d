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

//! Weighted moments Ṽ_q(f), the anisotropic weighted total variation and
//! its coarea form, integrability guards and two classical inequalities.

pub mod quadrature;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use quadrature::{hybrid_rule, polar_rule, rule_for, QuadratureRule, QuadratureSpec, RuleKind};

use crate::bodies::measure::MeasureKind;
use crate::bodies::{dual_mixed, facet_integral, AngularRule, ConvexBody, Shape, SphericalMeasure};
use crate::convex::{
    level_set, sup_combine, CombineOptions, ConvexFunction, ConvexKind, LogConcaveFunction, Support,
};
use crate::error::{invalid, Error, Result};
use crate::numerics::{norm, pairwise_sum};

/// ω_q(x) = |x|^{q−n}, or the Gaussian weight e^{−|x|²/2}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Weight {
    Power { q: f64 },
    Gaussian,
}

impl Weight {
    pub fn power(q: f64) -> Result<Weight> {
        if !(q.is_finite() && q > 0.0) {
            return invalid(format!("q must be positive (got {q})"));
        }
        Ok(Weight::Power { q })
    }

    /// Lebesgue measure in dimension `dim` (q = n).
    pub fn lebesgue(dim: usize) -> Weight {
        Weight::Power { q: dim as f64 }
    }

    pub fn q(&self) -> Option<f64> {
        match self {
            Weight::Power { q } => Some(*q),
            Weight::Gaussian => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Weight::Power { q } => {
                let n = x.len() as f64;
                if *q == n {
                    1.0
                } else {
                    norm(x).powf(q - n)
                }
            }
            Weight::Gaussian => (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp(),
        }
    }

    pub fn is_radial(&self) -> bool {
        true
    }

    /// β with ω(ru)r^{n−1} = r^β·(radial factor).
    pub(crate) fn radial_power(&self, dim: usize) -> f64 {
        match self {
            Weight::Power { q } => q - 1.0,
            Weight::Gaussian => dim as f64 - 1.0,
        }
    }

    pub(crate) fn radial_factor(&self, r: f64) -> f64 {
        match self {
            Weight::Power { .. } => 1.0,
            Weight::Gaussian => (-0.5 * r * r).exp(),
        }
    }
}

/// Σ_k w_k·F(x_k) in a fixed reduction order.
pub(crate) fn integrate_rule<F>(rule: &QuadratureRule, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let terms: Result<Vec<f64>> = (0..rule.len())
        .into_par_iter()
        .map(|k| {
            let w = rule.weights[k];
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w * f(rule.point(k))?)
        })
        .collect();
    Ok(pairwise_sum(&terms?))
}

/// liminf φ(x)/|x| > 0, checked on the grid's boundary ring for grid
/// functions (relative to min φ) and exactly for closed forms.
pub fn growth_check(phi: &ConvexFunction) -> bool {
    const THRESHOLD: f64 = 1e-6;
    match phi.kind() {
        ConvexKind::Quadratic { .. } | ConvexKind::ScaledNorm { .. } | ConvexKind::Indicator(_) => {
            true
        }
        ConvexKind::Support(k) => k.origin_interior(),
        ConvexKind::MaxAffine(pieces) => {
            let slopes: Vec<Vec<f64>> = pieces.iter().map(|(s, _)| s.clone()).collect();
            ConvexBody::from_vertices(phi.dim(), &slopes)
                .map(|h| h.origin_interior())
                .unwrap_or(false)
        }
        ConvexKind::Radial(p) => {
            p.finite_radius() < p.r_max || {
                let (a, b) = (p.values[0].get(), p.values[p.values.len() - 1].get());
                (b - a) / p.r_max > THRESHOLD
            }
        }
        ConvexKind::Grid(g) => {
            let s = &g.spec;
            let min = g
                .values
                .iter()
                .map(|v| v.get())
                .fold(f64::INFINITY, f64::min);
            (0..g.values.len()).all(|i| {
                let idx = s.unflatten(i);
                if !(0..s.dim).any(|d| idx[d] == 0 || idx[d] == s.nodes - 1) {
                    return true;
                }
                let v = g.values[i];
                v.is_infinite() || (v.get() - min) / norm(&s.point(i)) > THRESHOLD
            })
        }
    }
}

fn guard(f: &LogConcaveFunction) -> Result<()> {
    if matches!(f.support(), Support::Unbounded) && !growth_check(f.phi()) {
        return Err(Error::MomentMayBeInfinite(
            "φ does not grow at least linearly at the boundary".into(),
        ));
    }
    Ok(())
}

/// Ṽ_q(f) = ∫ ω(x) f(x) dx.
pub fn moment(f: &LogConcaveFunction, w: &Weight, spec: &QuadratureSpec) -> Result<f64> {
    guard(f)?;
    let rule = rule_for(f, w, spec, true)?;
    integrate_rule(&rule, |x| Ok(f.eval(x)))
}

/// Ṽ_q(e^{−φ*}).
pub fn moment_of_conjugate(phi: &ConvexFunction, w: &Weight, spec: &QuadratureSpec) -> Result<f64> {
    let star = match phi.kind() {
        ConvexKind::Grid(_) => {
            let dual = phi.default_dual().expect("grid function");
            phi.conjugate(dual)?
        }
        _ => phi.conjugate(crate::grid::GridSpec::new(phi.dim(), 1.0, 3)?)?,
    };
    moment(&LogConcaveFunction::new(star)?, w, spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvParts {
    pub bulk: f64,
    pub boundary: f64,
    pub total: f64,
}

/// TV_{L,ω}(f) = ∫ h_L(∇φ) f ω dx + ∫_{∂K_f} h_L(ν) f ω dH^{n−1}.
pub fn weighted_tv(
    f: &LogConcaveFunction,
    l: &ConvexBody,
    w: &Weight,
    spec: &QuadratureSpec,
) -> Result<TvParts> {
    if l.dim() != f.dim() {
        return invalid("L has the wrong dimension");
    }
    guard(f)?;
    let radial = l.ball_radius().is_some();
    let rule = rule_for(f, w, spec, radial)?;
    let bulk = if matches!(f.phi().kind(), ConvexKind::Indicator(_)) {
        0.0
    } else {
        integrate_rule(&rule, |x| {
            let v = f.eval(x);
            if v == 0.0 {
                return Ok(0.0);
            }
            Ok(v * l.support(&f.grad_phi(x)?))
        })?
    };
    let boundary = match f.support() {
        Support::Unbounded => 0.0,
        Support::Body(k) => boundary_term(f, k, l, w, spec)?,
    };
    Ok(TvParts {
        bulk,
        boundary,
        total: bulk + boundary,
    })
}

/// ∫_{∂K} h_L(ν) f ω dH^{n−1}.
fn boundary_term(
    f: &LogConcaveFunction,
    k: &ConvexBody,
    l: &ConvexBody,
    w: &Weight,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let m = boundary_measure(f, k, w, Some(l), spec.angular)?;
    Ok(m.integrate(|u| l.support(u)))
}

/// The pushforward of f·ω·H^{n−1}|∂K under the Gauss map: facet atoms for
/// polytopes, density samples for balls. For 2-D balls the angular rule
/// breaks at the facet normals of `test` so that h_test is smooth per arc.
pub(crate) fn boundary_measure(
    f: &LogConcaveFunction,
    k: &ConvexBody,
    w: &Weight,
    test: Option<&ConvexBody>,
    angular: usize,
) -> Result<SphericalMeasure> {
    let dim = k.dim();
    let phi = f.phi();
    let fval = |x: &[f64]| phi.eval(x).map(|v| v.exp_neg()).unwrap_or(0.0);
    match k.shape() {
        Shape::Ball { r } => {
            let rule = match (dim, test.map(|t| t.shape())) {
                (2, Some(Shape::Polytope(p))) => {
                    let breaks: Vec<f64> = p
                        .facets
                        .iter()
                        .map(|fc| fc.normal[1].atan2(fc.normal[0]))
                        .collect();
                    AngularRule::arcs_2d(&breaks, angular.max(1024))
                }
                (2, _) => AngularRule::uniform_2d(angular.max(1024)),
                _ => AngularRule::default_for(dim),
            };
            let rn = r.powi(dim as i32 - 1);
            let weights: Vec<f64> = rule
                .dirs
                .iter()
                .zip(&rule.weights)
                .map(|(u, wu)| {
                    let x: Vec<f64> = u.iter().map(|c| r * c).collect();
                    wu * rn * fval(&x) * w.eval(&x)
                })
                .collect();
            let kind = if dim == 1 {
                MeasureKind::Atomic
            } else {
                MeasureKind::Density
            };
            Ok(SphericalMeasure {
                dim,
                dirs: rule.dirs,
                weights,
                kind,
            })
        }
        Shape::Polytope(p) => {
            let mut weights = Vec::with_capacity(p.facets.len());
            for fc in &p.facets {
                let g = |x: &[f64]| -> f64 {
                    match w {
                        Weight::Power { .. } => fval(x),
                        Weight::Gaussian => fval(x) * w.eval(x),
                    }
                };
                weights.push(facet_integral(dim, &p.vertices, fc, w.q(), &g)?);
            }
            let dirs = p.facets.iter().map(|fc| fc.normal.clone()).collect();
            Ok(SphericalMeasure {
                dim,
                dirs,
                weights,
                kind: MeasureKind::Atomic,
            })
        }
    }
}

/// Levels of the layer-cake integral: a geometric grid in s toward 0 and in
/// M − s toward the maximum, integrated by Simpson's rule in the
/// logarithmic variable, plus power-law tails at both ends.
pub fn level_integral<G>(max: f64, levels: usize, g: G) -> Result<f64>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    if !(max.is_finite() && max > 0.0) {
        return invalid("layer-cake integral needs a positive finite maximum");
    }
    // Odd node count per half for Simpson.
    let m = (levels / 2).max(3) | 1;
    let half = 0.5 * max;
    let gap = max * 1e-6;
    // ∫_gap^{M/2} G(u) du in t = ln u, with G(u) = g(u) or g(M − u); the
    // piece below `gap` assumes G(u) ≈ C u^p.
    let piece = |flip: bool| -> Result<f64> {
        let (t0, t1) = (gap.ln(), half.ln());
        let dt = (t1 - t0) / (m - 1) as f64;
        let vals: Result<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|i| {
                let u = (t0 + dt * i as f64).exp();
                let s = if flip { max - u } else { u };
                Ok(g(s)? * u)
            })
            .collect();
        let vals = vals?;
        let mut acc = Vec::with_capacity(m + 1);
        for (i, v) in vals.iter().enumerate() {
            let c = if i == 0 || i == m - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc.push(c * v * dt / 3.0);
        }
        // G(u)·u ≈ C u^{p+1}, so its log-slope is p + 1.
        if vals[0] > 0.0 && vals[1] > 0.0 {
            let p1 = ((vals[1] / vals[0]).ln() / dt).max(0.01);
            acc.push(vals[0] / p1);
        }
        Ok(pairwise_sum(&acc))
    };
    Ok(piece(false)? + piece(true)?)
}

/// Ṽ_{1,q}([f ≥ s], L) integrated over s ∈ (0, max f).
pub fn layer_cake(f: &LogConcaveFunction, l: &ConvexBody, q: f64, levels: usize) -> Result<f64> {
    let m = f.max_value();
    if let ConvexKind::Indicator(k) = f.phi().kind() {
        // Single level set: f is the constant m on K.
        return Ok(m * dual_mixed(k, l, q)?);
    }
    level_integral(m, levels, |s| match level_set(f, s) {
        Ok(k) => dual_mixed(&k, l, q),
        Err(Error::EmptyLevelSet(_)) => Ok(0.0),
        Err(e) => Err(e),
    })
}

/// ∫₀^∞ Per_{L,ω_q}([f ≥ s]) ds with Per = Ṽ_{1,q}(·, L).
pub fn coarea_tv(f: &LogConcaveFunction, l: &ConvexBody, w: &Weight, levels: usize) -> Result<f64> {
    let Some(q) = w.q() else {
        return invalid("the coarea route is defined for power weights only");
    };
    layer_cake(f, l, q, levels)
}

/// (∫ (1−λ)·f ⊕ λ·g, (∫f)^{1−λ}(∫g)^λ).
pub fn prekopa_leindler_check(
    f: &LogConcaveFunction,
    g: &LogConcaveFunction,
    lambda: f64,
    spec: &QuadratureSpec,
    opts: &CombineOptions,
) -> Result<(f64, f64)> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return invalid(format!("lambda must lie in (0, 1) (got {lambda})"));
    }
    let w = Weight::lebesgue(f.dim());
    let h = sup_combine(f, 1.0 - lambda, g, lambda, opts)?;
    let lhs = moment(&h, &w, spec)?;
    let rhs = moment(f, &w, spec)?.powf(1.0 - lambda) * moment(g, &w, spec)?.powf(lambda);
    Ok((lhs, rhs))
}

/// (∫_{|t|≥t₀} |f′| dt, 4·sup_{|t|≥t₀} f) for 1-D f, the integral taken as
/// the variation of f sampled on a fine grid (jumps at the support ends
/// included).
pub fn derivative_control_check(
    f: &LogConcaveFunction,
    t0: f64,
    nodes: usize,
) -> Result<(f64, f64)> {
    if f.dim() != 1 {
        return invalid("derivative control is a 1-D check");
    }
    if !(t0.is_finite() && t0 >= 0.0) {
        return invalid("t0 must be nonnegative");
    }
    let (a, b) = match f.support() {
        Support::Body(k) => (-k.support(&[-1.0]), k.support(&[1.0])),
        Support::Unbounded => {
            guard(f)?;
            let r = quadrature::cutoff_radius(f, &QuadratureSpec::for_dim(1))?;
            let c = f.max_at()[0];
            (c - r - 1.0, c + r + 1.0)
        }
    };
    let mut total = Vec::new();
    let mut sup: f64 = 0.0;
    for side in [1.0, -1.0] {
        // Half-line {side·t ≥ t0} intersected with [a, b].
        let (lo, hi) = if side > 0.0 {
            (t0.max(a), b)
        } else {
            (a, (-t0).min(b))
        };
        if lo > hi {
            continue;
        }
        let mut ts: Vec<f64> = (0..nodes)
            .map(|i| lo + (hi - lo) * i as f64 / (nodes - 1) as f64)
            .collect();
        let m = f.max_at()[0];
        if m > lo && m < hi {
            ts.push(m);
        }
        ts.sort_by(f64::total_cmp);
        let vals: Vec<f64> = ts.iter().map(|t| f.eval(&[*t])).collect();
        for v in &vals {
            sup = sup.max(*v);
        }
        for w in vals.windows(2) {
            total.push((w[1] - w[0]).abs());
        }
        // Jumps to zero past the ends of the sampled range.
        let (first, last) = (vals[0], vals[vals.len() - 1]);
        if side > 0.0 {
            total.push(last);
            if lo > t0 {
                total.push(first);
            }
        } else {
            total.push(first);
            if hi < -t0 {
                total.push(last);
            }
        }
    }
    Ok((pairwise_sum(&total), 4.0 * sup))
}

#[cfg(test)]
mod tests;
