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

//! Sup-convolution a·f ⊕ b·g = e^{−(aφ* + bψ*)*}, always through conjugates.

use rayon::prelude::*;

use super::radial::conj_profile;
use super::{
    conjugate_tensor, ConvexFunction, ConvexKind, GridFunction, LogConcaveFunction, RadialProfile,
    Support,
};
use crate::bodies::ConvexBody;
use crate::error::{invalid, Error, Result};
use crate::extreal::ExtReal;
use crate::grid::GridSpec;

/// Discretization choices for the combination.
#[derive(Clone, Debug)]
pub struct CombineOptions {
    /// Output grid; derived from the inputs' extents when absent.
    pub primal: Option<GridSpec>,
    /// Dual grid; derived from slope bounds when absent.
    pub dual: Option<GridSpec>,
    /// Nodes per axis for derived grids (0 selects a per-dimension default).
    pub grid_nodes: usize,
    /// Nodes of the 1-D profiles used when both inputs are radial.
    pub radial_nodes: usize,
    /// φ level above its minimum used to truncate unbounded inputs.
    pub cutoff_level: f64,
}

impl Default for CombineOptions {
    fn default() -> CombineOptions {
        CombineOptions {
            primal: None,
            dual: None,
            grid_nodes: 0,
            radial_nodes: 32769,
            cutoff_level: 40.0,
        }
    }
}

impl CombineOptions {
    fn nodes(&self, dim: usize) -> usize {
        if self.grid_nodes > 0 {
            return self.grid_nodes;
        }
        match dim {
            1 => 2049,
            2 => 257,
            _ => 65,
        }
    }
}

/// f ⊕ t·g.
pub fn sup_convolve(
    f: &LogConcaveFunction,
    g: &LogConcaveFunction,
    t: f64,
    opts: &CombineOptions,
) -> Result<LogConcaveFunction> {
    sup_combine(f, 1.0, g, t, opts)
}

/// a·f ⊕ b·g for a, b ≥ 0, not both zero.
pub fn sup_combine(
    f: &LogConcaveFunction,
    a: f64,
    g: &LogConcaveFunction,
    b: f64,
    opts: &CombineOptions,
) -> Result<LogConcaveFunction> {
    if f.dim() != g.dim() {
        return invalid("sup-convolution of functions of different dimension");
    }
    for c in [a, b] {
        if !(c.is_finite() && c >= 0.0) {
            return invalid(format!(
                "sup-convolution coefficients must be nonnegative (got {c})"
            ));
        }
    }
    if a == 0.0 && b == 0.0 {
        return invalid("sup-convolution needs a positive coefficient");
    }
    if b == 0.0 {
        return scale(f, a);
    }
    if a == 0.0 {
        return scale(g, b);
    }
    let (p, q) = (f.phi(), g.phi());
    let offset = a * p.offset() + b * q.offset();
    let even = p.is_even() && q.is_even();
    let dim = f.dim();

    match (p.kind(), q.kind()) {
        (ConvexKind::Indicator(k), ConvexKind::Indicator(l)) => {
            let body = k.scaled(a)?.minkowski_sum(b, l)?;
            return LogConcaveFunction::new(ConvexFunction::indicator(body).shifted(offset));
        }
        (ConvexKind::Quadratic { a: a1 }, ConvexKind::Quadratic { a: a2 }) => {
            let c = 1.0 / (a / a1 + b / a2);
            return LogConcaveFunction::new(ConvexFunction::quadratic(dim, c)?.shifted(offset));
        }
        _ => {}
    }
    if radial_capable(p) && radial_capable(q) {
        return radial_route(f, a, g, b, opts);
    }
    grid_route(f, a, g, b, even, opts)
}

/// a·f = e^{−aφ(·/a)}, exact for every representation.
fn scale(f: &LogConcaveFunction, a: f64) -> Result<LogConcaveFunction> {
    if a == 1.0 {
        return Ok(f.clone());
    }
    let p = f.phi();
    let dim = p.dim();
    let o = a * p.offset();
    let phi = match p.kind() {
        ConvexKind::Quadratic { a: q } => ConvexFunction::quadratic(dim, q / a)?.shifted(o),
        ConvexKind::ScaledNorm { c } => ConvexFunction::scaled_norm(dim, o, *c)?,
        ConvexKind::Indicator(k) => ConvexFunction::indicator(k.scaled(a)?).shifted(o),
        ConvexKind::Support(k) => ConvexFunction::support(k.clone()).shifted(o),
        ConvexKind::MaxAffine(pc) => {
            ConvexFunction::max_affine(dim, pc.iter().map(|(s, v)| (s.clone(), a * v)).collect())?
                .shifted(o)
        }
        ConvexKind::Radial(r) => ConvexFunction::radial(
            dim,
            RadialProfile::new(r.r_max * a, r.values.iter().map(|v| v.scale(a)).collect())?,
        )?
        .shifted(o),
        ConvexKind::Grid(gf) => {
            let spec = GridSpec::new(dim, gf.spec.radius * a, gf.spec.nodes)?;
            ConvexFunction::grid(
                spec,
                gf.values.iter().map(|v| v.scale(a).add_f64(o)).collect(),
                p.is_even(),
            )?
        }
    };
    let support = match f.support() {
        Support::Body(k) => Support::Body(k.scaled(a)?),
        Support::Unbounded => Support::Unbounded,
    };
    LogConcaveFunction::with_support(phi, support)
}

fn radial_capable(p: &ConvexFunction) -> bool {
    match p.kind() {
        ConvexKind::Quadratic { .. } | ConvexKind::ScaledNorm { .. } | ConvexKind::Radial(_) => {
            true
        }
        ConvexKind::Indicator(k) | ConvexKind::Support(k) => k.ball_radius().is_some(),
        _ => false,
    }
}

/// Profile of φ* at the radii `s` (without the offset).
fn conj_radial(p: &ConvexFunction, s: &[f64]) -> Vec<f64> {
    let tol = 1.0 + 1e-12;
    match p.kind() {
        ConvexKind::Quadratic { a } => s.iter().map(|v| v * v / (2.0 * a)).collect(),
        ConvexKind::ScaledNorm { c } => s
            .iter()
            .map(|v| if *v <= c * tol { 0.0 } else { f64::INFINITY })
            .collect(),
        ConvexKind::Indicator(k) => {
            let r = k.ball_radius().unwrap();
            s.iter().map(|v| r * v).collect()
        }
        ConvexKind::Support(k) => {
            let r = k.ball_radius().unwrap();
            s.iter()
                .map(|v| if *v <= r * tol { 0.0 } else { f64::INFINITY })
                .collect()
        }
        ConvexKind::Radial(pr) => conj_profile(&pr.nodes(), &pr.raw(), s),
        _ => unreachable!("not radial"),
    }
}

/// Kinks of the radial conjugate profile (domain ends).
fn conj_breaks(p: &ConvexFunction) -> Vec<f64> {
    match p.kind() {
        ConvexKind::ScaledNorm { c } => vec![*c],
        ConvexKind::Support(k) => vec![k.ball_radius().unwrap()],
        _ => Vec::new(),
    }
}

fn bounded_radius(f: &LogConcaveFunction) -> Option<f64> {
    match f.support() {
        Support::Body(k) => Some(k.bounding_radius()),
        Support::Unbounded => None,
    }
}

fn extent(f: &LogConcaveFunction, opts: &CombineOptions) -> Result<f64> {
    if let Some(r) = bounded_radius(f) {
        return Ok(r);
    }
    let p = f.phi();
    let base = p.eval(f.max_at())?.get();
    p.extent(base + opts.cutoff_level)
        .filter(|r| r.is_finite() && *r > 0.0)
        .ok_or_else(|| {
            Error::Numerical("function does not grow in every direction; cannot truncate".into())
        })
}

fn radial_route(
    f: &LogConcaveFunction,
    a: f64,
    g: &LogConcaveFunction,
    b: f64,
    opts: &CombineOptions,
) -> Result<LogConcaveFunction> {
    let (p, q) = (f.phi(), g.phi());
    let (ef, eg) = (extent(f, opts)?, extent(g, opts)?);
    let r_out = a * ef + b * eg;
    let mut s_max = p.slope_bound(ef).max(q.slope_bound(eg));
    if s_max <= 0.0 {
        s_max = 1.0;
    }
    let m = opts.radial_nodes.max(3);
    let mut s: Vec<f64> = (0..m).map(|i| s_max * i as f64 / (m - 1) as f64).collect();
    for k in conj_breaks(p).into_iter().chain(conj_breaks(q)) {
        if k < s_max {
            s.push(k);
        }
    }
    s.sort_by(f64::total_cmp);
    s.dedup();
    let cp = conj_radial(p, &s);
    let cq = conj_radial(q, &s);
    let c: Vec<f64> = cp
        .iter()
        .zip(&cq)
        .map(|(u, v)| a * (u - p.offset()) + b * (v - q.offset()))
        .collect();
    if c.iter().all(|v| !v.is_finite()) {
        return Err(Error::EmptyDomain);
    }
    let r: Vec<f64> = (0..m).map(|i| r_out * i as f64 / (m - 1) as f64).collect();
    let prof = conj_profile(&s, &c, &r);
    let profile = RadialProfile::new(r_out, prof.into_iter().map(ExtReal::finite).collect())?;
    let phi = ConvexFunction::radial(f.dim(), profile)?;
    let support = match (bounded_radius(f), bounded_radius(g)) {
        (Some(_), Some(_)) => Support::Body(ConvexBody::ball(f.dim(), r_out)?),
        _ => Support::Unbounded,
    };
    LogConcaveFunction::with_support(phi, support)
}

fn grid_route(
    f: &LogConcaveFunction,
    a: f64,
    g: &LogConcaveFunction,
    b: f64,
    even: bool,
    opts: &CombineOptions,
) -> Result<LogConcaveFunction> {
    let (p, q) = (f.phi(), g.phi());
    let dim = f.dim();
    let n = opts.nodes(dim);
    let box_extent = |h: &LogConcaveFunction| -> Result<f64> {
        match h.phi().kind() {
            ConvexKind::Grid(gf) => Ok(gf.spec.radius),
            _ => extent(h, opts),
        }
    };
    let (ef, eg) = (box_extent(f)?, box_extent(g)?);
    let primal = match opts.primal {
        Some(s) => s,
        None => GridSpec::new(dim, a * ef + b * eg, n)?,
    };
    let dual = match opts.dual {
        Some(s) => s,
        None => {
            let s = p.slope_bound(ef).max(q.slope_bound(eg));
            GridSpec::new(dim, if s > 0.0 { s } else { 1.0 }, n)?
        }
    };
    let cp = p.conjugate_values(dual)?;
    let cq = q.conjugate_values(dual)?;
    let c: Vec<f64> = cp
        .iter()
        .zip(&cq)
        .map(|(u, v)| u.scale(a).add(v.scale(b)).get())
        .collect();
    if c.iter().all(|v| !v.is_finite()) {
        return Err(Error::EmptyDomain);
    }
    let axes = vec![dual.axis(); dim];
    let out_axes = vec![primal.axis(); dim];
    let res = conjugate_tensor(&axes, &c, &out_axes, false);
    let mut values: Vec<ExtReal> = res.values.iter().map(|v| ExtReal::finite(*v)).collect();

    let support = match (f.support(), g.support()) {
        (Support::Body(k), Support::Body(l)) => {
            let body = k.scaled(a)?.minkowski_sum(b, l)?;
            let pad = primal.h() * (dim as f64).sqrt();
            values.par_iter_mut().enumerate().for_each(|(i, v)| {
                if body.excess(&primal.point(i)) > pad {
                    *v = ExtReal::INFINITY;
                }
            });
            Support::Body(body)
        }
        _ => Support::Unbounded,
    };
    let mut gf = GridFunction::new(primal, values)?;
    if even {
        gf.symmetrize_max();
    }
    let phi = ConvexFunction::grid(primal, gf.values, even)?;
    LogConcaveFunction::with_support(phi, support)
}
