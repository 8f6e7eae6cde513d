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

//! Extended-real convex functions and the transforms used throughout:
//! conjugation, convex envelopes, evaluation and subgradients.

mod combine;
mod level;
mod llt;
mod logconcave;
mod radial;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use combine::{sup_combine, sup_convolve, CombineOptions};
pub use level::level_set;
pub use llt::{conjugate_tensor, TensorConj};
pub use logconcave::{LogConcaveFunction, Support};
pub use radial::RadialProfile;

use crate::bodies::{ConvexBody, Shape};
use crate::error::{invalid, Error, Result};
use crate::extreal::ExtReal;
use crate::grid::{locate, GridSpec};
use crate::numerics::{dot, norm, solve_small};

/// Nodal samples on a [`GridSpec`]; +∞ outside the effective domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub values: Vec<ExtReal>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<ExtReal>) -> Result<GridFunction> {
        if values.len() != spec.len() {
            return invalid(format!(
                "grid payload has {} values, expected {}",
                values.len(),
                spec.len()
            ));
        }
        Ok(GridFunction { spec, values })
    }

    pub fn raw(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.get()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.values.len()).all(|i| self.values[i] == self.values[self.spec.mirror(i)])
    }

    /// Replace each value by the larger of it and its mirror image.
    pub fn symmetrize_max(&mut self) {
        let v = self.values.clone();
        for (i, out) in self.values.iter_mut().enumerate() {
            *out = v[i].max(v[self.spec.mirror(i)]);
        }
    }

    /// Largest |Δv|/h over pairs of adjacent finite nodes.
    pub fn max_slope(&self) -> f64 {
        let s = &self.spec;
        let h = s.h();
        let n = s.nodes;
        let mut m: f64 = 0.0;
        for f in 0..self.values.len() {
            let idx = s.unflatten(f);
            let a = self.values[f];
            if a.is_infinite() {
                continue;
            }
            let mut stride = 1;
            for d in (0..s.dim).rev() {
                if idx[d] + 1 < n {
                    let b = self.values[f + stride];
                    if b.is_finite() {
                        m = m.max((b.get() - a.get()).abs() / h);
                    }
                }
                stride *= n;
            }
        }
        m
    }

    /// Discrete convexity on the finite region: every finite node is at most
    /// the average of each opposite pair of finite neighbours along axis and
    /// diagonal directions, within 1e−9·(1+|value|).
    pub fn is_discretely_convex(&self) -> bool {
        let s = &self.spec;
        let dirs = stencil_dirs(s.dim);
        let n = s.nodes as isize;
        (0..self.values.len()).into_par_iter().all(|f| {
            let v = self.values[f];
            if v.is_infinite() {
                return true;
            }
            let idx = s.unflatten(f);
            dirs.iter().all(|dir| {
                let mut plus = [0usize; 3];
                let mut minus = [0usize; 3];
                for d in 0..s.dim {
                    let p = idx[d] as isize + dir[d];
                    let m = idx[d] as isize - dir[d];
                    if p < 0 || p >= n || m < 0 || m >= n {
                        return true;
                    }
                    plus[d] = p as usize;
                    minus[d] = m as usize;
                }
                let a = self.values[s.flatten(&plus)];
                let b = self.values[s.flatten(&minus)];
                if a.is_infinite() || b.is_infinite() {
                    return true;
                }
                v.get() <= 0.5 * (a.get() + b.get()) + 1e-9 * (1.0 + v.get().abs())
            })
        })
    }

    /// Multilinear interpolation; +∞ if any positively weighted corner is +∞.
    pub fn eval(&self, x: &[f64]) -> Result<ExtReal> {
        let s = &self.spec;
        if x.len() != s.dim {
            return invalid("point dimension does not match the grid");
        }
        if !s.contains(x) {
            return Err(Error::OutOfDomain(format!(
                "{x:?} is outside [-{r}, {r}]^{}",
                s.dim,
                r = s.radius
            )));
        }
        let (cells, ts) = self.locate(x);
        let mut acc = 0.0;
        for corner in 0..1usize << s.dim {
            let mut w = 1.0;
            let mut idx = [0usize; 3];
            for d in 0..s.dim {
                let hi = corner >> d & 1 == 1;
                w *= if hi { ts[d] } else { 1.0 - ts[d] };
                idx[d] = cells[d] + hi as usize;
            }
            if w == 0.0 {
                continue;
            }
            let v = self.values[s.flatten(&idx)];
            if v.is_infinite() {
                return Ok(ExtReal::INFINITY);
            }
            acc += w * v.get();
        }
        Ok(ExtReal::finite(acc))
    }

    fn locate(&self, x: &[f64]) -> ([usize; 3], [f64; 3]) {
        let s = &self.spec;
        let mut cells = [0usize; 3];
        let mut ts = [0.0; 3];
        for d in 0..s.dim {
            let (c, t) = locate(x[d], -s.radius, s.h(), s.nodes);
            cells[d] = c;
            ts[d] = t;
        }
        (cells, ts)
    }

    /// Derivative along axis `d` of the multilinear interpolant in the cell
    /// with lower corner index `cell_d` on that axis, other axes fixed.
    fn axis_slope(
        &self,
        cells: &[usize; 3],
        ts: &[f64; 3],
        d: usize,
        cell_d: usize,
    ) -> Option<f64> {
        let s = &self.spec;
        let mut acc = 0.0;
        for corner in 0..1usize << s.dim {
            if corner >> d & 1 == 1 {
                continue;
            }
            let mut w = 1.0;
            let mut idx = [0usize; 3];
            for e in 0..s.dim {
                if e == d {
                    idx[e] = cell_d;
                    continue;
                }
                let hi = corner >> e & 1 == 1;
                w *= if hi { ts[e] } else { 1.0 - ts[e] };
                idx[e] = cells[e] + hi as usize;
            }
            if w == 0.0 {
                continue;
            }
            let lo = self.values[s.flatten(&idx)];
            idx[d] += 1;
            let hi = self.values[s.flatten(&idx)];
            if lo.is_infinite() || hi.is_infinite() {
                return None;
            }
            acc += w * (hi.get() - lo.get());
        }
        Some(acc / s.h())
    }

    /// Cell-wise finite-difference gradient. At a node along some axis the
    /// two one-sided slopes are combined: zero if they differ in sign (0 is
    /// then the minimal-norm subgradient), their mean otherwise.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.eval(x)?.is_infinite() {
            return Err(Error::OutOfDomain(
                "gradient requested outside the effective domain".into(),
            ));
        }
        let s = &self.spec;
        let (cells, ts) = self.locate(x);
        let mut g = vec![0.0; s.dim];
        for d in 0..s.dim {
            let node = if ts[d] == 0.0 {
                Some(cells[d])
            } else if ts[d] == 1.0 {
                Some(cells[d] + 1)
            } else {
                None
            };
            g[d] = match node {
                None => self
                    .axis_slope(&cells, &ts, d, cells[d])
                    .ok_or_else(undefined_gradient)?,
                Some(k) => {
                    let left = if k > 0 {
                        self.axis_slope(&cells, &ts, d, k - 1)
                    } else {
                        None
                    };
                    let right = if k + 1 < s.nodes {
                        self.axis_slope(&cells, &ts, d, k)
                    } else {
                        None
                    };
                    match (left, right) {
                        (Some(l), Some(r)) => {
                            if l * r <= 0.0 {
                                0.0
                            } else {
                                0.5 * (l + r)
                            }
                        }
                        (Some(l), None) => l,
                        (None, Some(r)) => r,
                        (None, None) => return Err(undefined_gradient()),
                    }
                }
            };
        }
        Ok(g)
    }
}

fn undefined_gradient() -> Error {
    Error::Numerical("gradient undefined: neighbouring nodes are infinite".into())
}

/// Axis and face-diagonal stencil directions, one per opposite pair.
fn stencil_dirs(dim: usize) -> Vec<[isize; 3]> {
    let mut out = Vec::new();
    for d in 0..dim {
        let mut e = [0isize; 3];
        e[d] = 1;
        out.push(e);
    }
    for d in 0..dim {
        for e in d + 1..dim {
            let mut a = [0isize; 3];
            a[d] = 1;
            a[e] = 1;
            out.push(a);
            a[e] = -1;
            out.push(a);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConvexKind {
    Grid(GridFunction),
    /// a|x|²/2
    Quadratic {
        a: f64,
    },
    /// c|x|
    ScaledNorm {
        c: f64,
    },
    /// 0 on K, +∞ off K
    Indicator(ConvexBody),
    /// h_K
    Support(ConvexBody),
    /// max_i ⟨s_i, x⟩ + o_i
    MaxAffine(Vec<(Vec<f64>, f64)>),
    /// p(|x|)
    Radial(RadialProfile),
}

/// A convex function ℝⁿ → (−∞, +∞]: `kind` plus a constant `offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexFunction {
    dim: usize,
    kind: ConvexKind,
    offset: f64,
    even: bool,
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=3).contains(&dim) {
        Ok(())
    } else {
        invalid(format!("dimension must be 1, 2 or 3 (got {dim})"))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        invalid(format!("{name} must be positive (got {v})"))
    }
}

/// Minimal-norm point of the convex hull of `pts`.
pub(crate) fn min_norm_hull(pts: &[Vec<f64>]) -> Vec<f64> {
    let dim = pts[0].len();
    if pts.len() == 1 {
        return pts[0].clone();
    }
    if pts.len() <= 12 {
        let mut best: Option<(f64, Vec<f64>)> = None;
        let k = pts.len();
        for mask in 1usize..1 << k {
            let m = mask.count_ones() as usize;
            if m > dim + 1 {
                continue;
            }
            let sel: Vec<&Vec<f64>> = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| &pts[i])
                .collect();
            // KKT system for min |Σλp|² subject to Σλ = 1.
            let mut a = vec![vec![0.0; m + 1]; m + 1];
            let mut b = vec![0.0; m + 1];
            for i in 0..m {
                for j in 0..m {
                    a[i][j] = dot(sel[i], sel[j]);
                }
                a[i][m] = 1.0;
                a[m][i] = 1.0;
            }
            b[m] = 1.0;
            let Some(sol) = solve_small(&mut a, &mut b) else {
                continue;
            };
            if sol[..m].iter().any(|l| *l < -1e-12) {
                continue;
            }
            let p: Vec<f64> = (0..dim)
                .map(|d| (0..m).map(|i| sol[i] * sel[i][d]).sum())
                .collect();
            let nn = norm(&p);
            if best.as_ref().is_none_or(|(b, _)| nn < *b - 1e-15) {
                best = Some((nn, p));
            }
        }
        if let Some((_, p)) = best {
            return p;
        }
    }
    // Frank–Wolfe with exact line search; used only for large tie sets.
    let mut x = pts[0].clone();
    for _ in 0..20000 {
        let s = pts
            .iter()
            .min_by(|a, b| dot(a, &x).total_cmp(&dot(b, &x)))
            .unwrap();
        let d: Vec<f64> = s.iter().zip(&x).map(|(a, b)| a - b).collect();
        let dd = dot(&d, &d);
        if dd == 0.0 {
            break;
        }
        let gamma = (-dot(&x, &d) / dd).clamp(0.0, 1.0);
        if gamma <= 1e-15 {
            break;
        }
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += gamma * di;
        }
    }
    x
}

impl ConvexFunction {
    pub fn quadratic(dim: usize, a: f64) -> Result<ConvexFunction> {
        check_dim(dim)?;
        positive("quadratic coefficient", a)?;
        Ok(ConvexFunction {
            dim,
            kind: ConvexKind::Quadratic { a },
            offset: 0.0,
            even: true,
        })
    }

    /// b + c|x|.
    pub fn scaled_norm(dim: usize, b: f64, c: f64) -> Result<ConvexFunction> {
        check_dim(dim)?;
        positive("norm coefficient", c)?;
        if !b.is_finite() {
            return invalid("norm offset must be finite");
        }
        Ok(ConvexFunction {
            dim,
            kind: ConvexKind::ScaledNorm { c },
            offset: b,
            even: true,
        })
    }

    pub fn indicator(k: ConvexBody) -> ConvexFunction {
        ConvexFunction {
            dim: k.dim(),
            even: k.symmetric(),
            kind: ConvexKind::Indicator(k),
            offset: 0.0,
        }
    }

    pub fn support(k: ConvexBody) -> ConvexFunction {
        ConvexFunction {
            dim: k.dim(),
            even: k.symmetric(),
            kind: ConvexKind::Support(k),
            offset: 0.0,
        }
    }

    pub fn max_affine(dim: usize, pieces: Vec<(Vec<f64>, f64)>) -> Result<ConvexFunction> {
        check_dim(dim)?;
        if pieces.is_empty() {
            return invalid("max-affine function needs at least one piece");
        }
        for (s, o) in &pieces {
            if s.len() != dim || !o.is_finite() || s.iter().any(|v| !v.is_finite()) {
                return invalid("max-affine piece has the wrong dimension or a non-finite entry");
            }
        }
        let even = pieces.iter().all(|(s, o)| {
            pieces
                .iter()
                .any(|(t, p)| p == o && s.iter().zip(t).all(|(a, b)| *a == -*b))
        });
        Ok(ConvexFunction {
            dim,
            kind: ConvexKind::MaxAffine(pieces),
            offset: 0.0,
            even,
        })
    }

    pub fn radial(dim: usize, profile: RadialProfile) -> Result<ConvexFunction> {
        check_dim(dim)?;
        Ok(ConvexFunction {
            dim,
            kind: ConvexKind::Radial(profile),
            offset: 0.0,
            even: true,
        })
    }

    /// Grid samples. With `even` set the values must be exactly symmetric.
    pub fn grid(spec: GridSpec, values: Vec<ExtReal>, even: bool) -> Result<ConvexFunction> {
        let g = GridFunction::new(spec, values)?;
        if g.values.iter().all(|v| v.is_infinite()) {
            return Err(Error::EmptyDomain);
        }
        if even && !g.is_symmetric() {
            return invalid("grid values flagged even are not symmetric under x -> -x");
        }
        Ok(ConvexFunction {
            dim: spec.dim,
            kind: ConvexKind::Grid(g),
            offset: 0.0,
            even,
        })
    }

    /// Samples `self` on `spec` and wraps the result as a grid function.
    pub fn sampled(&self, spec: GridSpec) -> Result<ConvexFunction> {
        let g = self.to_grid(spec)?;
        let mut f = ConvexFunction::grid(spec, g.values, false)?;
        if self.even && f.grid_fn().unwrap().is_symmetric() {
            f.even = true;
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ConvexKind {
        &self.kind
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn grid_fn(&self) -> Option<&GridFunction> {
        match &self.kind {
            ConvexKind::Grid(g) => Some(g),
            _ => None,
        }
    }

    /// φ + c.
    pub fn shifted(&self, c: f64) -> ConvexFunction {
        assert!(c.is_finite());
        ConvexFunction {
            offset: self.offset + c,
            ..self.clone()
        }
    }

    /// Body-valued domain for closed forms with bounded domain.
    pub fn domain_body(&self) -> Option<ConvexBody> {
        match &self.kind {
            ConvexKind::Indicator(k) => Some(k.clone()),
            ConvexKind::Radial(p) => {
                let r = p.finite_radius();
                if r < p.r_max && r > 0.0 {
                    ConvexBody::ball(self.dim, r).ok()
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<ExtReal> {
        if x.len() != self.dim {
            return invalid("point dimension does not match the function");
        }
        let v = match &self.kind {
            ConvexKind::Grid(g) => g.eval(x)?,
            ConvexKind::Quadratic { a } => ExtReal::finite(0.5 * a * dot(x, x)),
            ConvexKind::ScaledNorm { c } => ExtReal::finite(c * norm(x)),
            ConvexKind::Indicator(k) => {
                if k.contains(x, 1e-12 * (1.0 + k.bounding_radius())) {
                    ExtReal::ZERO
                } else {
                    ExtReal::INFINITY
                }
            }
            ConvexKind::Support(k) => ExtReal::finite(k.support(x)),
            ConvexKind::MaxAffine(p) => ExtReal::finite(
                p.iter()
                    .map(|(s, o)| dot(s, x) + o)
                    .fold(f64::NEG_INFINITY, f64::max),
            ),
            ConvexKind::Radial(p) => p.eval(norm(x)),
        };
        Ok(v.add_f64(self.offset))
    }

    /// Gradient, exact for closed forms; the minimal-norm subgradient at
    /// kinks (closed forms) or the cell rule of [`GridFunction::gradient`].
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return invalid("point dimension does not match the function");
        }
        match &self.kind {
            ConvexKind::Grid(g) => g.gradient(x),
            ConvexKind::Quadratic { a } => Ok(x.iter().map(|v| a * v).collect()),
            ConvexKind::ScaledNorm { c } => {
                let r = norm(x);
                Ok(if r == 0.0 {
                    vec![0.0; self.dim]
                } else {
                    x.iter().map(|v| c * v / r).collect()
                })
            }
            ConvexKind::Indicator(_) => {
                if self.eval(x)?.is_infinite() {
                    return Err(Error::OutOfDomain(
                        "gradient requested outside the indicator's body".into(),
                    ));
                }
                Ok(vec![0.0; self.dim])
            }
            ConvexKind::Support(k) => Ok(match k.shape() {
                Shape::Ball { r } => {
                    let n = norm(x);
                    if n == 0.0 {
                        vec![0.0; self.dim]
                    } else {
                        x.iter().map(|v| r * v / n).collect()
                    }
                }
                Shape::Polytope(p) => {
                    if x.iter().all(|v| *v == 0.0) && k.contains(&vec![0.0; self.dim], 0.0) {
                        return Ok(vec![0.0; self.dim]);
                    }
                    let vals: Vec<f64> = p.vertices.iter().map(|v| dot(v, x)).collect();
                    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let tol = 1e-12 * (1.0 + k.bounding_radius() * norm(x));
                    let act: Vec<Vec<f64>> = p
                        .vertices
                        .iter()
                        .zip(&vals)
                        .filter(|(_, v)| **v >= m - tol)
                        .map(|(v, _)| v.clone())
                        .collect();
                    min_norm_hull(&act)
                }
            }),
            ConvexKind::MaxAffine(p) => {
                let vals: Vec<f64> = p.iter().map(|(s, o)| dot(s, x) + o).collect();
                let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let tol = 1e-12 * (1.0 + m.abs());
                let act: Vec<Vec<f64>> = p
                    .iter()
                    .zip(&vals)
                    .filter(|(_, v)| **v >= m - tol)
                    .map(|((s, _), _)| s.clone())
                    .collect();
                Ok(min_norm_hull(&act))
            }
            ConvexKind::Radial(p) => {
                let r = norm(x);
                if p.eval(r).is_infinite() {
                    return Err(Error::OutOfDomain(
                        "gradient requested outside the effective domain".into(),
                    ));
                }
                if r == 0.0 {
                    return Ok(vec![0.0; self.dim]);
                }
                let s = p.slope(r).ok_or_else(undefined_gradient)?;
                Ok(x.iter().map(|v| s * v / r).collect())
            }
        }
    }

    /// Nodal samples on `spec`.
    pub fn to_grid(&self, spec: GridSpec) -> Result<GridFunction> {
        if spec.dim != self.dim {
            return invalid("grid dimension does not match the function");
        }
        if let ConvexKind::Grid(g) = &self.kind {
            if g.spec == spec {
                return Ok(GridFunction {
                    spec,
                    values: g.values.iter().map(|v| v.add_f64(self.offset)).collect(),
                });
            }
        }
        let values: Result<Vec<ExtReal>> = (0..spec.len())
            .into_par_iter()
            .map(|f| self.eval(&spec.point(f)))
            .collect();
        GridFunction::new(spec, values?)
    }

    /// Exact conjugate of a max-affine function at y:
    /// min{−Σλ_i o_i : λ ≥ 0, Σλ_i = 1, Σλ_i s_i = y}, by enumerating bases.
    fn max_affine_conj(pieces: &[(Vec<f64>, f64)], y: &[f64]) -> ExtReal {
        let dim = y.len();
        let k = pieces.len();
        let mut best = f64::INFINITY;
        let mut subset = Vec::with_capacity(dim + 1);
        fn rec(
            start: usize,
            k: usize,
            max: usize,
            subset: &mut Vec<usize>,
            f: &mut dyn FnMut(&[usize]),
        ) {
            if !subset.is_empty() {
                f(subset);
            }
            if subset.len() == max {
                return;
            }
            for i in start..k {
                subset.push(i);
                rec(i + 1, k, max, subset, f);
                subset.pop();
            }
        }
        let scale = pieces.iter().map(|(s, _)| norm(s)).fold(1.0, f64::max);
        rec(0, k, dim + 1, &mut subset, &mut |sel: &[usize]| {
            let m = sel.len();
            // Normal equations of [s; 1]λ = [y; 1].
            let col = |i: usize, r: usize| if r < dim { pieces[sel[i]].0[r] } else { 1.0 };
            let mut a = vec![vec![0.0; m]; m];
            let mut b = vec![0.0; m];
            for i in 0..m {
                for j in 0..m {
                    a[i][j] = (0..=dim).map(|r| col(i, r) * col(j, r)).sum();
                }
                b[i] = (0..=dim)
                    .map(|r| col(i, r) * if r < dim { y[r] } else { 1.0 })
                    .sum();
            }
            let Some(l) = solve_small(&mut a, &mut b) else {
                return;
            };
            if l.iter().any(|v| *v < -1e-10) {
                return;
            }
            for r in 0..=dim {
                let target = if r < dim { y[r] } else { 1.0 };
                let got: f64 = (0..m).map(|i| l[i] * col(i, r)).sum();
                if (got - target).abs() > 1e-9 * scale {
                    return;
                }
            }
            let v: f64 = (0..m).map(|i| -l[i].max(0.0) * pieces[sel[i]].1).sum();
            best = best.min(v);
        });
        if best.is_finite() {
            ExtReal::finite(best)
        } else {
            ExtReal::INFINITY
        }
    }

    /// φ* at the nodes of `target`: exact for closed forms, the discrete
    /// transform of the nodal values for grid functions.
    pub fn conjugate_values(&self, target: GridSpec) -> Result<Vec<ExtReal>> {
        if target.dim != self.dim {
            return invalid("target grid dimension does not match the function");
        }
        let o = self.offset;
        let nodes = target.len();
        let each = |f: &(dyn Fn(&[f64]) -> ExtReal + Sync)| -> Vec<ExtReal> {
            (0..nodes)
                .into_par_iter()
                .map(|i| f(&target.point(i)).add_f64(-o))
                .collect()
        };
        Ok(match &self.kind {
            ConvexKind::Grid(g) => {
                let axes = vec![g.spec.axis(); self.dim];
                let out_axes = vec![target.axis(); self.dim];
                let r = conjugate_tensor(&axes, &g.raw(), &out_axes, false);
                if r.values.contains(&f64::NEG_INFINITY) {
                    return Err(Error::EmptyDomain);
                }
                let mut vals: Vec<ExtReal> =
                    r.values.iter().map(|v| ExtReal::finite(v - o)).collect();
                if self.even {
                    let c = vals.clone();
                    for (i, v) in vals.iter_mut().enumerate() {
                        *v = v.max(c[target.mirror(i)]);
                    }
                }
                vals
            }
            ConvexKind::Quadratic { a } => each(&|y| ExtReal::finite(0.5 * dot(y, y) / a)),
            ConvexKind::ScaledNorm { c } => {
                let c = *c;
                each(&move |y| {
                    if norm(y) <= c * (1.0 + 1e-12) {
                        ExtReal::ZERO
                    } else {
                        ExtReal::INFINITY
                    }
                })
            }
            ConvexKind::Indicator(k) => each(&|y| ExtReal::finite(k.support(y))),
            ConvexKind::Support(k) => each(&|y| {
                if k.contains(y, 1e-12 * (1.0 + k.bounding_radius())) {
                    ExtReal::ZERO
                } else {
                    ExtReal::INFINITY
                }
            }),
            ConvexKind::MaxAffine(p) => each(&|y| ConvexFunction::max_affine_conj(p, y)),
            ConvexKind::Radial(p) => {
                let radii: Vec<f64> = (0..nodes).map(|i| norm(&target.point(i))).collect();
                let mut order: Vec<usize> = (0..nodes).collect();
                order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
                let sorted: Vec<f64> = order.iter().map(|&i| radii[i]).collect();
                let c = radial::conj_profile(&p.nodes(), &p.raw(), &sorted);
                let mut out = vec![ExtReal::ZERO; nodes];
                for (k, &i) in order.iter().enumerate() {
                    out[i] = ExtReal::finite(c[k] - o);
                }
                out
            }
        })
    }

    /// φ*(y) = sup_x ⟨x, y⟩ − φ(x). Closed forms map to closed forms; grid and
    /// max-affine inputs produce samples on `target`. A grid function is +∞
    /// outside its box, so its conjugate is finite everywhere.
    pub fn conjugate(&self, target: GridSpec) -> Result<ConvexFunction> {
        let o = self.offset;
        let dim = self.dim;
        let closed = |kind: ConvexKind| ConvexFunction {
            dim,
            kind,
            offset: -o,
            even: self.even,
        };
        Ok(match &self.kind {
            ConvexKind::Quadratic { a } => closed(ConvexKind::Quadratic { a: 1.0 / a }),
            ConvexKind::ScaledNorm { c } => {
                closed(ConvexKind::Indicator(ConvexBody::ball(dim, *c)?))
            }
            ConvexKind::Indicator(k) => closed(ConvexKind::Support(k.clone())),
            ConvexKind::Support(k) => closed(ConvexKind::Indicator(k.clone())),
            ConvexKind::Radial(p) => {
                let s_max = target.radius * (dim as f64).sqrt();
                let c = p.conjugate(s_max, p.values.len())?;
                ConvexFunction {
                    dim,
                    kind: ConvexKind::Radial(c),
                    offset: -o,
                    even: true,
                }
            }
            ConvexKind::Grid(_) | ConvexKind::MaxAffine(_) => {
                let vals = self.conjugate_values(target)?;
                if vals.iter().all(|v| v.is_infinite()) {
                    return Err(Error::EmptyDomain);
                }
                ConvexFunction {
                    dim,
                    kind: ConvexKind::Grid(GridFunction {
                        spec: target,
                        values: vals,
                    }),
                    offset: 0.0,
                    even: self.even,
                }
            }
        })
    }

    /// Default dual box for a grid function: the largest adjacent nodal slope.
    pub fn default_dual(&self) -> Option<GridSpec> {
        let g = self.grid_fn()?;
        let s = g.max_slope();
        GridSpec::new(self.dim, if s > 0.0 { s } else { 1.0 }, g.spec.nodes).ok()
    }

    /// Closed convex envelope φ** via two discrete conjugations. Closed forms
    /// are returned unchanged. Nodes outside the convex hull of the finite
    /// region stay +∞.
    pub fn convexify(&self) -> Result<ConvexFunction> {
        let Some(g) = self.grid_fn() else {
            return Ok(self.clone());
        };
        let dual = self.default_dual().expect("grid function");
        let star = self.conjugate(dual)?;
        let mut back = star.conjugate(g.spec)?;
        let ConvexKind::Grid(out) = &mut back.kind else {
            unreachable!()
        };
        let spec = g.spec;
        let finite: Vec<usize> = (0..g.values.len())
            .filter(|&i| g.values[i].is_finite())
            .collect();
        if finite.len() < g.values.len() {
            let pts: Vec<Vec<f64>> = finite.iter().map(|&i| spec.point(i)).collect();
            let tol = 1e-9 * spec.h();
            match ConvexBody::from_vertices(self.dim, &pts) {
                Ok(hull) => {
                    for (i, v) in out.values.iter_mut().enumerate() {
                        if g.values[i].is_infinite() && !hull.contains(&spec.point(i), tol) {
                            *v = ExtReal::INFINITY;
                        }
                    }
                }
                Err(_) => {
                    for (i, v) in out.values.iter_mut().enumerate() {
                        if g.values[i].is_infinite() {
                            *v = ExtReal::INFINITY;
                        }
                    }
                }
            }
        }
        back.offset = 0.0;
        back.even = self.even;
        Ok(back)
    }

    /// Radius beyond which φ ≥ `level` (or φ = +∞); `None` if φ does not
    /// grow to `level` in every direction.
    pub fn extent(&self, level: f64) -> Option<f64> {
        let l = level - self.offset;
        match &self.kind {
            ConvexKind::Grid(g) => Some(g.spec.radius * (self.dim as f64).sqrt()),
            ConvexKind::Quadratic { a } => Some((2.0 * l.max(0.0) / a).sqrt()),
            ConvexKind::ScaledNorm { c } => Some(l.max(0.0) / c),
            ConvexKind::Indicator(k) => Some(k.bounding_radius()),
            ConvexKind::Support(k) => {
                let (r, _) = k.inradius_circumradius().ok()?;
                Some(l.max(0.0) / r)
            }
            ConvexKind::MaxAffine(p) => {
                let slopes: Vec<Vec<f64>> = p.iter().map(|(s, _)| s.clone()).collect();
                let hull = ConvexBody::from_vertices(self.dim, &slopes).ok()?;
                let (r, _) = hull.inradius_circumradius().ok()?;
                let omin = p.iter().map(|(_, o)| *o).fold(f64::INFINITY, f64::min);
                Some((l - omin).max(0.0) / r)
            }
            ConvexKind::Radial(p) => {
                let h = p.h();
                for (i, v) in p.values.iter().enumerate() {
                    if v.is_infinite() || v.get() >= l {
                        return Some(i as f64 * h);
                    }
                }
                // φ = +∞ beyond the last node.
                Some(p.r_max)
            }
        }
    }

    /// Upper bound on |∂φ/∂x_d| over the effective domain inside B(r).
    pub fn slope_bound(&self, r: f64) -> f64 {
        match &self.kind {
            ConvexKind::Grid(g) => g.max_slope(),
            ConvexKind::Quadratic { a } => a * r,
            ConvexKind::ScaledNorm { c } => *c,
            ConvexKind::Indicator(_) => 0.0,
            ConvexKind::Support(k) => k.bounding_radius(),
            ConvexKind::MaxAffine(p) => p.iter().map(|(s, _)| norm(s)).fold(0.0, f64::max),
            ConvexKind::Radial(p) => p.max_slope(),
        }
    }

    /// A point where φ attains its minimum.
    pub fn argmin(&self) -> Result<Vec<f64>> {
        let zero = vec![0.0; self.dim];
        if self.even {
            return Ok(zero);
        }
        Ok(match &self.kind {
            ConvexKind::Quadratic { .. }
            | ConvexKind::ScaledNorm { .. }
            | ConvexKind::Radial(_) => zero,
            ConvexKind::Indicator(k) => {
                if k.contains(&zero, 0.0) {
                    zero
                } else {
                    match k.shape() {
                        Shape::Ball { .. } => zero,
                        Shape::Polytope(p) => {
                            let n = p.vertices.len() as f64;
                            (0..self.dim)
                                .map(|d| p.vertices.iter().map(|v| v[d]).sum::<f64>() / n)
                                .collect()
                        }
                    }
                }
            }
            ConvexKind::Support(k) => {
                if k.contains(&zero, 0.0) {
                    zero
                } else {
                    return Err(Error::Numerical(
                        "support function of a body without the origin is unbounded below".into(),
                    ));
                }
            }
            ConvexKind::MaxAffine(_) => return self.argmin_by_grid(),
            ConvexKind::Grid(g) => {
                let i = (0..g.values.len())
                    .min_by(|&a, &b| g.values[a].get().total_cmp(&g.values[b].get()))
                    .unwrap();
                g.spec.point(i)
            }
        })
    }

    fn argmin_by_grid(&self) -> Result<Vec<f64>> {
        let r = self
            .extent(self.eval(&vec![0.0; self.dim])?.get() + 1.0)
            .unwrap_or(10.0)
            .max(1e-3);
        let spec = GridSpec::new(self.dim, r, if self.dim == 3 { 41 } else { 201 })?;
        let g = self.to_grid(spec)?;
        let i = (0..g.values.len())
            .min_by(|&a, &b| g.values[a].get().total_cmp(&g.values[b].get()))
            .unwrap();
        Ok(spec.point(i))
    }
}

#[cfg(test)]
mod tests;
