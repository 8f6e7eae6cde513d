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

//! Volume quadrature with the weight ω folded into the node weights.
//!
//! Two rule families: polar rules over a star body (radial nodes exact for
//! the r^{q−1} singularity), and a hybrid rule for unbounded non-radial
//! integrands, with cell midpoints away from the origin and a polar patch on
//! the central block.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Weight;
use crate::bodies::{AngularRule, ConvexBody, Shape};
use crate::convex::{ConvexKind, LogConcaveFunction, Support};
use crate::error::{invalid, Error, Result};
use crate::numerics::{gl01, radial_rule, sphere_area};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleKind {
    Auto,
    Polar,
    Hybrid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Cells per axis of the hybrid rule.
    pub resolution: usize,
    /// Radius of the central polar patch; defaults to 2h, rounded up to a
    /// whole number of cells.
    pub rho0: Option<f64>,
    /// Directions of polar rules (2-D count; 3-D uses a product rule of
    /// comparable density).
    pub angular: usize,
    /// Widest uniform radial panel of polar rules.
    pub radial_panel: f64,
    pub kind: RuleKind,
    /// Truncation box of unbounded integrands; derived from φ when absent.
    pub box_radius: Option<f64>,
    /// φ level above its minimum beyond which f is treated as zero.
    pub cutoff_level: f64,
    /// When set, the ball part of the hybrid patch uses this many
    /// Gauss–Legendre nodes in v = (r/ρ₀)^{β+1} instead of the graded rule.
    #[serde(default)]
    pub patch_nodes: Option<usize>,
}

impl QuadratureSpec {
    pub fn for_dim(dim: usize) -> QuadratureSpec {
        QuadratureSpec {
            resolution: match dim {
                1 => 4096,
                2 => 512,
                _ => 96,
            },
            rho0: None,
            angular: match dim {
                1 => 2,
                2 => 1024,
                _ => 96,
            },
            radial_panel: 0.25,
            kind: RuleKind::Auto,
            box_radius: None,
            cutoff_level: 40.0,
            patch_nodes: None,
        }
    }
}

/// Points `[0, index.len())` of a rule are cell midpoints lying on the
/// tensor product of `axis`; `index` gives their flat position there.
#[derive(Clone, Debug)]
pub struct TensorBlock {
    pub axis: Vec<f64>,
    pub index: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub dim: usize,
    /// Flat coordinates, `dim` per point.
    pub coords: Vec<f64>,
    /// Node weights including ω.
    pub weights: Vec<f64>,
    pub tensor: Option<TensorBlock>,
    /// Sum of the weights on the central ball patch B(ρ₀) (hybrid rules).
    pub patch_weight: f64,
    pub rho0: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    fn push(&mut self, x: &[f64], w: f64) {
        self.coords.extend_from_slice(x);
        self.weights.push(w);
    }
}

fn angular_for(dim: usize, count: usize, breaks: &[f64]) -> AngularRule {
    match dim {
        1 => AngularRule::two_point(),
        2 if breaks.is_empty() => AngularRule::uniform_2d(count),
        2 => AngularRule::arcs_2d(breaks, count),
        _ => {
            let nz = (count / 2).max(8);
            AngularRule::product_3d(nz, 2 * nz)
        }
    }
}

/// Radial nodes on [0, r_max] exact for r^β, with the weight's extra factor.
fn radial_nodes(w: &Weight, dim: usize, r_max: f64, spec: &QuadratureSpec) -> Vec<(f64, f64)> {
    let beta = w.radial_power(dim);
    let scale = r_max.min(1.0);
    let mut nodes = radial_rule(beta, r_max, scale, spec.radial_panel);
    for (r, wt) in &mut nodes {
        *wt *= w.radial_factor(*r);
    }
    nodes
}

/// ∫₀^a r^β g(r) dr = a^{β+1}/(β+1)·∫₀¹ g(a v^{1/(β+1)}) dv with m
/// Gauss–Legendre nodes in v.
fn substitution_nodes(w: &Weight, dim: usize, a: f64, m: usize) -> Vec<(f64, f64)> {
    let b1 = w.radial_power(dim) + 1.0;
    let (vx, vw) = gl01(m);
    let scale = a.powf(b1) / b1;
    vx.iter()
        .zip(vw)
        .map(|(v, wv)| {
            let r = a * v.powf(1.0 / b1);
            (r, scale * wv * w.radial_factor(r))
        })
        .collect()
}

/// Polar rule over the star body `k` (origin interior), or over B(r_cut)
/// when `k` is `None`. With `radial_only` the angular rule collapses to one
/// direction carrying the full sphere area, exact for radial integrands.
pub fn polar_rule(
    dim: usize,
    w: &Weight,
    k: Option<&ConvexBody>,
    r_cut: f64,
    spec: &QuadratureSpec,
    radial_only: bool,
) -> Result<QuadratureRule> {
    if let Some(k) = k {
        if !k.origin_interior() {
            return Err(Error::OriginNotInterior);
        }
    }
    let ball_r = match k {
        None => Some(r_cut),
        Some(k) => k.ball_radius(),
    };
    let rule = if radial_only && ball_r.is_some() {
        let mut u = vec![0.0; dim];
        u[0] = 1.0;
        AngularRule {
            dim,
            dirs: vec![u],
            weights: vec![sphere_area(dim)],
        }
    } else {
        let breaks = k.map(|k| k.vertex_angles()).unwrap_or_default();
        angular_for(dim, spec.angular, &breaks)
    };
    let mut out = QuadratureRule {
        dim,
        coords: Vec::new(),
        weights: Vec::new(),
        tensor: None,
        patch_weight: 0.0,
        rho0: 0.0,
    };
    let shared = ball_r.map(|r| radial_nodes(w, dim, r, spec));
    for (u, wu) in rule.dirs.iter().zip(&rule.weights) {
        let own;
        let nodes = match &shared {
            Some(n) => n,
            None => {
                own = radial_nodes(w, dim, k.unwrap().radial_unchecked(u), spec);
                &own
            }
        };
        for (r, wr) in nodes {
            let x: Vec<f64> = u.iter().map(|c| r * c).collect();
            out.push(&x, wu * wr);
        }
    }
    Ok(out)
}

/// Hybrid rule on [−B, B]ⁿ: midpoints of an even number of cells per axis
/// outside the central block [−a, a]ⁿ, and on the block a polar rule (ball
/// patch B(a) plus the annulus out to the cube's boundary).
pub fn hybrid_rule(
    dim: usize,
    w: &Weight,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureRule> {
    if !(b.is_finite() && b > 0.0) {
        return invalid("hybrid quadrature needs a positive box radius");
    }
    let cells = 2 * spec.resolution.div_ceil(2).max(2);
    let h = 2.0 * b / cells as f64;
    let rho0 = spec.rho0.unwrap_or(2.0 * h).max(h);
    let k = ((rho0 / h).ceil() as usize).min(cells / 2);
    let a = k as f64 * h;
    let axis: Vec<f64> = (0..cells).map(|i| -b + (i as f64 + 0.5) * h).collect();
    let cell_vol = h.powi(dim as i32);
    let lo = cells / 2 - k;
    let hi = cells / 2 + k;

    let mut out = QuadratureRule {
        dim,
        coords: Vec::new(),
        weights: Vec::new(),
        tensor: None,
        patch_weight: 0.0,
        rho0: a,
    };
    let mut index = Vec::new();
    let total = cells.pow(dim as u32);
    let mut x = vec![0.0; dim];
    for f in 0..total {
        let mut rem = f;
        let mut central = true;
        for d in (0..dim).rev() {
            let i = rem % cells;
            rem /= cells;
            x[d] = axis[i];
            central &= i >= lo && i < hi;
        }
        if central {
            continue;
        }
        out.push(&x, cell_vol * w.eval(&x));
        index.push(f);
    }

    // Central block in polar coordinates.
    let breaks: Vec<f64> = if dim == 2 {
        (0..4).map(|j| PI / 4.0 + j as f64 * PI / 2.0).collect()
    } else {
        Vec::new()
    };
    let rule = angular_for(dim, spec.angular, &breaks);
    let ball = match spec.patch_nodes {
        Some(m) => substitution_nodes(w, dim, a, m),
        None => radial_nodes(w, dim, a, spec),
    };
    let beta = w.radial_power(dim);
    let (gx, gw) = gl01(8);
    let mut patch = Vec::with_capacity(rule.len() * ball.len());
    for (u, wu) in rule.dirs.iter().zip(&rule.weights) {
        for (r, wr) in &ball {
            let p: Vec<f64> = u.iter().map(|c| r * c).collect();
            out.push(&p, wu * wr);
            patch.push(wu * wr);
        }
        let edge = a / u.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if edge > a * (1.0 + 1e-14) {
            let panels = 2;
            let len = (edge - a) / panels as f64;
            for j in 0..panels {
                for (t, wt) in gx.iter().zip(gw) {
                    let r = a + len * (j as f64 + t);
                    let p: Vec<f64> = u.iter().map(|c| r * c).collect();
                    out.push(&p, wu * wt * len * r.powf(beta) * w.radial_factor(r));
                }
            }
        }
    }
    out.patch_weight = crate::numerics::pairwise_sum(&patch);
    out.tensor = Some(TensorBlock { axis, index });
    Ok(out)
}

fn radial_phi(f: &LogConcaveFunction) -> bool {
    match f.phi().kind() {
        ConvexKind::Quadratic { .. } | ConvexKind::ScaledNorm { .. } | ConvexKind::Radial(_) => {
            true
        }
        ConvexKind::Indicator(k) | ConvexKind::Support(k) => k.ball_radius().is_some(),
        _ => false,
    }
}

/// Truncation radius for an unbounded f: beyond it φ exceeds its minimum
/// by `spec.cutoff_level`.
pub fn cutoff_radius(f: &LogConcaveFunction, spec: &QuadratureSpec) -> Result<f64> {
    if let Some(b) = spec.box_radius {
        return Ok(b);
    }
    let p = f.phi();
    if let ConvexKind::Grid(g) = p.kind() {
        return Ok(g.spec.radius);
    }
    let base = p.eval(f.max_at())?.get();
    p.extent(base + spec.cutoff_level)
        .filter(|r| r.is_finite() && *r > 0.0)
        .ok_or_else(|| Error::MomentMayBeInfinite("φ does not grow in every direction".into()))
}

/// The rule used to integrate against f: polar over the support when it is
/// a body containing the origin, polar over a ball for radial unbounded f,
/// hybrid otherwise. `radial_integrand` allows the one-direction rule when
/// the whole integrand is radial.
pub fn rule_for(
    f: &LogConcaveFunction,
    w: &Weight,
    spec: &QuadratureSpec,
    radial_integrand: bool,
) -> Result<QuadratureRule> {
    let dim = f.dim();
    let radial = radial_integrand && radial_phi(f) && w.is_radial();
    match (f.support(), spec.kind) {
        (Support::Body(k), RuleKind::Auto | RuleKind::Polar) if k.origin_interior() => {
            let ball_ok = matches!(k.shape(), Shape::Ball { .. });
            polar_rule(dim, w, Some(k), 0.0, spec, radial && ball_ok)
        }
        (Support::Body(k), _) => {
            let mut rule =
                hybrid_rule(dim, w, spec.box_radius.unwrap_or(k.bounding_radius()), spec)?;
            clip(&mut rule, k);
            Ok(rule)
        }
        (Support::Unbounded, RuleKind::Polar) => {
            polar_rule(dim, w, None, cutoff_radius(f, spec)?, spec, radial)
        }
        (Support::Unbounded, RuleKind::Auto) if radial_phi(f) => {
            polar_rule(dim, w, None, cutoff_radius(f, spec)?, spec, radial)
        }
        (Support::Unbounded, _) => hybrid_rule(dim, w, cutoff_radius(f, spec)?, spec),
    }
}

/// Drop nodes outside `k` (the tensor block is dropped with them).
fn clip(rule: &mut QuadratureRule, k: &ConvexBody) {
    let dim = rule.dim;
    let tol = 1e-12 * (1.0 + k.bounding_radius());
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for i in 0..rule.len() {
        let x = &rule.coords[i * dim..(i + 1) * dim];
        if k.contains(x, tol) {
            coords.extend_from_slice(x);
            weights.push(rule.weights[i]);
        }
    }
    rule.coords = coords;
    rule.weights = weights;
    rule.tensor = None;
}

/// |S^{n−1}|·ρ^q/q, the weight of B(ρ) under |x|^{q−n}.
pub fn ball_weight(dim: usize, q: f64, rho: f64) -> f64 {
    sphere_area(dim) * rho.powf(q) / q
}
