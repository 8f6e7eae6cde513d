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

//! δ_q(f, g) = lim_{t→0⁺} (Ṽ_q(f ⊕ t·g) − Ṽ_q(f))/t by three routes:
//! difference quotients, the two-term measure formula, and the layer-cake
//! integral over level sets (g = 1_L only).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{euclidean_dcm, EuclideanMeasure};
use crate::bodies::ConvexBody;
use crate::convex::{
    level_set, sup_convolve, CombineOptions, ConvexKind, LogConcaveFunction, Support,
};
use crate::error::{invalid, Error, Result};
use crate::grid::GridSpec;
use crate::numerics::{norm, pairwise_sum};
use crate::variation::{
    boundary_measure, integrate_rule, layer_cake, moment, rule_for, QuadratureSpec, RuleKind,
    Weight,
};

/// Advisory checks of the hypotheses under which the formula is proved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    pub max_at_origin: bool,
    /// sup over the shell 2^{−k−1} ≤ |x| ≤ 2^{−k} of |f(x) − f(o)|/|x|^{3/2}.
    pub holder_shells: Vec<f64>,
    pub holder_ok: bool,
    /// max over sampled levels of R/r of [f ≥ s].
    pub shape_ratio: Option<f64>,
    pub shape_ok: bool,
}

impl HypothesisFlags {
    pub fn satisfied(&self) -> bool {
        self.max_at_origin && (self.holder_ok || self.shape_ok)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalLhs {
    pub value: f64,
    pub ts: Vec<f64>,
    pub quotients: Vec<f64>,
    pub flags: HypothesisFlags,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalRhs {
    pub euclidean: f64,
    pub spherical: f64,
    pub total: f64,
}

const SHELLS: usize = 9;
const HOLDER_ALPHA: f64 = 0.5;
const SHAPE_BOUND: f64 = 1e3;

fn sample_dirs(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..16)
            .map(|j| {
                let a = std::f64::consts::PI * j as f64 / 8.0;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let mut out = Vec::new();
            for i in 0..4 {
                let z = -0.75 + 0.5 * i as f64;
                let s = (1.0 - z * z).sqrt();
                for j in 0..8 {
                    let a = std::f64::consts::PI * j as f64 / 4.0;
                    out.push(vec![s * a.cos(), s * a.sin(), z]);
                }
            }
            out
        }
    }
}

pub fn hypothesis_flags(f: &LogConcaveFunction) -> HypothesisFlags {
    let dim = f.dim();
    let origin = vec![0.0; dim];
    let f0 = f.eval(&origin);
    let max = f.max_value();
    let max_at_origin = f0 > 0.0 && f0 >= max * (1.0 - 1e-12);
    let dirs = sample_dirs(dim);
    let holder_shells: Vec<f64> = (0..SHELLS)
        .map(|k| {
            let hi = 0.5f64.powi(k as i32);
            let mut sup: f64 = 0.0;
            for i in 0..4 {
                let r = hi * (0.5 + 0.5 * i as f64 / 3.0);
                for u in &dirs {
                    let x: Vec<f64> = u.iter().map(|c| r * c).collect();
                    sup = sup.max((f.eval(&x) - f0).abs() / r.powf(1.0 + HOLDER_ALPHA));
                }
            }
            sup
        })
        .collect();
    let holder_ok = holder_shells.iter().all(|v| v.is_finite())
        && holder_shells[SHELLS - 1] <= 2.0 * holder_shells[SHELLS / 2] + 1e-12;
    let mut ratio: Option<f64> = None;
    if max > 0.0 {
        for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
            if let Ok(k) = level_set(f, frac * max) {
                if let Ok((r, big)) = k.inradius_circumradius() {
                    let q = if r > 0.0 { big / r } else { f64::INFINITY };
                    ratio = Some(ratio.map_or(q, |m: f64| m.max(q)));
                }
            }
        }
    }
    HypothesisFlags {
        max_at_origin,
        holder_shells,
        holder_ok,
        shape_ratio: ratio,
        shape_ok: ratio.is_some_and(|q| q < SHAPE_BOUND),
    }
}

/// P(0) for the polynomial through (ts[i], vals[i]) (Neville).
fn extrapolate_to_zero(ts: &[f64], vals: &[f64]) -> f64 {
    let mut p = vals.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (ts[i + m] * p[i] - ts[i] * p[i + 1]) / (ts[i + m] - ts[i]);
        }
    }
    p[0]
}

/// One-sided difference quotients of t ↦ Ṽ_q(f ⊕ t·g) at `ts`, extrapolated
/// to t = 0. Failed hypothesis checks are recorded, not enforced.
pub fn variational_lhs(
    f: &LogConcaveFunction,
    g: &LogConcaveFunction,
    w: &Weight,
    ts: &[f64],
    spec: &QuadratureSpec,
    opts: &CombineOptions,
) -> Result<VariationalLhs> {
    if ts.is_empty() || ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return invalid("step list must be nonempty and positive");
    }
    if g.support_body().is_none() {
        return invalid("g must be compactly supported");
    }
    let flags = hypothesis_flags(f);
    let v0 = moment(f, w, spec)?;
    let mut quotients = Vec::with_capacity(ts.len());
    for &t in ts {
        let ft = sup_convolve(f, g, t, opts)?;
        quotients.push((moment(&ft, w, spec)? - v0) / t);
    }
    if quotients.iter().any(|q| !q.is_finite()) {
        return Err(Error::Numerical("non-finite difference quotient".into()));
    }
    let value = extrapolate_to_zero(ts, &quotients);
    Ok(VariationalLhs {
        value,
        ts: ts.to_vec(),
        quotients,
        flags,
    })
}

/// ψ* on the atoms of C̃^e_q(f;·) plus h_{K_g} against C̃^s_q(f;·).
pub fn variational_rhs(
    f: &LogConcaveFunction,
    g: &LogConcaveFunction,
    w: &Weight,
    spec: &QuadratureSpec,
) -> Result<VariationalRhs> {
    let mu = euclidean_dcm(f, w, spec)?;
    variational_rhs_with(f, g, w, spec, &mu)
}

/// [`variational_rhs`] with a precomputed Euclidean measure.
pub fn variational_rhs_with(
    f: &LogConcaveFunction,
    g: &LogConcaveFunction,
    w: &Weight,
    spec: &QuadratureSpec,
    mu: &EuclideanMeasure,
) -> Result<VariationalRhs> {
    let Some(kg) = g.support_body() else {
        return invalid("g must be compactly supported");
    };
    let psi = g.phi();
    // ψ* grows linearly; the dual grid must cover the atoms.
    let nodes = match psi.kind() {
        ConvexKind::Grid(gf) => gf.spec.nodes,
        _ => match f.dim() {
            1 => 2049,
            2 => 257,
            _ => 65,
        },
    };
    let target = GridSpec::new(f.dim(), (1.05 * mu.radius()).max(1.0), nodes | 1)?;
    let psi_star = psi.conjugate(target)?;
    let vals: Result<Vec<f64>> = (0..mu.len())
        .into_par_iter()
        .map(|k| {
            let v = psi_star.eval(mu.point(k))?;
            if v.is_infinite() {
                return Err(Error::Numerical("ψ* is infinite at an atom".into()));
            }
            Ok(mu.weights[k] * v.get())
        })
        .collect();
    let euclidean = pairwise_sum(&vals?);
    let spherical = match f.support() {
        Support::Unbounded => 0.0,
        Support::Body(k) => {
            if !k.origin_interior() {
                return Err(Error::OriginNotInterior);
            }
            boundary_measure(f, k, w, Some(kg), spec.angular)?.integrate(|u| kg.support(u))
        }
    };
    Ok(VariationalRhs {
        euclidean,
        spherical,
        total: euclidean + spherical,
    })
}

/// ∫₀^{max f} Ṽ_{1,q}([f ≥ s], L) ds.
pub fn layer_cake_delta(
    f: &LogConcaveFunction,
    l: &ConvexBody,
    w: &Weight,
    levels: usize,
) -> Result<f64> {
    let Some(q) = w.q() else {
        return invalid("the layer-cake route is defined for power weights only");
    };
    if !l.origin_interior() {
        return Err(Error::OriginNotInterior);
    }
    layer_cake(f, l, q, levels)
}

/// Central difference of f along axis d, falling back to the one-sided
/// difference when the stencil leaves the support.
fn fd_partial(f: &LogConcaveFunction, x: &[f64], fx: f64, d: usize) -> f64 {
    let h = 1e-6 * (1.0 + norm(x));
    let mut y = x.to_vec();
    y[d] = x[d] + h;
    let fp = f.eval(&y);
    y[d] = x[d] - h;
    let fm = f.eval(&y);
    match (fp > 0.0, fm > 0.0) {
        (true, true) => (fp - fm) / (2.0 * h),
        (false, true) => (fx - fm) / h,
        (true, false) => (fp - fx) / h,
        (false, false) => 0.0,
    }
}

/// (∫|y| dC̃^e_q(f;y), ∫|∇f|·ω dx). The left side integrates the pushforward
/// atoms; the right side uses a finite-difference gradient of f itself on
/// the Cartesian (hybrid) rule.
pub fn first_moment_identity(
    f: &LogConcaveFunction,
    w: &Weight,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let mu = euclidean_dcm(f, w, spec)?;
    let lhs = mu.integrate(norm);
    let mut cart = spec.clone();
    cart.kind = RuleKind::Hybrid;
    let rule = rule_for(f, w, &cart, false)?;
    let rhs = integrate_rule(&rule, |x| {
        let fx = f.eval(x);
        if fx == 0.0 {
            return Ok(0.0);
        }
        let g: Vec<f64> = (0..x.len()).map(|d| fd_partial(f, x, fx, d)).collect();
        Ok(norm(&g))
    })?;
    Ok((lhs, rhs))
}
