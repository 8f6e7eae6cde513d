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

//! Discrete model of the functional Minkowski problem.
//!
//! χ lives on the nodes of an odd y-grid and f = e^{−χ*} is integrated on a
//! hybrid x-rule. χ* is exact for the nodal χ: the LLT evaluates it on the
//! rule's tensor block, brute force on the polar patch. Each x point sends
//! its mass to its maximizing node, so C̃^e_q(f;·) is atomic on the nodes.

use rayon::prelude::*;

use super::{PrescribedMeasure, SolverConfig};
use crate::convex::conjugate_tensor;
use crate::dual_curvature::{discrepancy, EuclideanMeasure, TestFunctionDictionary};
use crate::error::{invalid, Error, Result};
use crate::grid::{locate, GridSpec};
use crate::numerics::{dot, pairwise_sum};
use crate::variation::{hybrid_rule, QuadratureRule, QuadratureSpec, RuleKind, Weight};

pub(crate) struct Problem<'a> {
    pub dim: usize,
    pub q: f64,
    pub ygrid: GridSpec,
    y_axes: Vec<Vec<f64>>,
    /// Node coordinates, flat.
    y_nodes: Vec<f64>,
    pub mu: &'a PrescribedMeasure,
    /// μ pulled back onto the nodes by the multilinear hat functions.
    pub mu_hat: Vec<f64>,
    rule: QuadratureRule,
    x_axes: Vec<Vec<f64>>,
    tensor_index: Vec<usize>,
    dict: TestFunctionDictionary,
}

/// One evaluation of the discrete model.
#[derive(Clone)]
pub(crate) struct Eval {
    pub objective: f64,
    /// Ṽ_q(e^{−χ*}).
    pub vt: f64,
    /// Mass of the x-rule sent to each node.
    pub nu: Vec<f64>,
}

impl<'a> Problem<'a> {
    pub fn new(
        mu: &'a PrescribedMeasure,
        w: &Weight,
        config: &SolverConfig,
    ) -> Result<Problem<'a>> {
        let dim = mu.dim();
        let Some(q) = w.q() else {
            return invalid("the Minkowski solver needs a power weight");
        };
        let ygrid = config.grid;
        if ygrid.dim != dim {
            return invalid("χ grid dimension does not match the measure");
        }
        let m = mu.measure();
        let h = ygrid.h();
        let n = ygrid.nodes;
        let lo = -ygrid.radius;
        let mut mu_hat = vec![0.0; ygrid.len()];
        for k in 0..m.len() {
            let y = m.point(k);
            if !ygrid.contains(y) {
                return invalid("the measure has atoms outside the χ grid");
            }
            let cells: Vec<(usize, f64)> = y.iter().map(|v| locate(*v, lo, h, n)).collect();
            for corner in 0..(1usize << dim) {
                let mut wt = m.weights[k];
                let mut idx = [0usize; 3];
                for d in 0..dim {
                    let (c, t) = cells[d];
                    let hi = corner >> d & 1 == 1;
                    wt *= if hi { t } else { 1.0 - t };
                    idx[d] = c + hi as usize;
                }
                if wt != 0.0 {
                    mu_hat[ygrid.flatten(&idx[..dim])] += wt;
                }
            }
        }
        let x_radius = config.x_radius.unwrap_or(1.25 * ygrid.radius);
        let mut spec = QuadratureSpec::for_dim(dim);
        spec.resolution = config.x_cells;
        spec.kind = RuleKind::Hybrid;
        spec.box_radius = Some(x_radius);
        spec.angular = match dim {
            2 => 64,
            _ => 12,
        };
        spec.patch_nodes = Some(8);
        let rule = hybrid_rule(dim, w, x_radius, &spec)?;
        let tb = rule
            .tensor
            .clone()
            .expect("hybrid rules carry a tensor block");
        let y_axis = ygrid.axis();
        let y_nodes: Vec<f64> = (0..ygrid.len()).flat_map(|j| ygrid.point(j)).collect();
        Ok(Problem {
            dim,
            q,
            ygrid,
            y_axes: vec![y_axis; dim],
            y_nodes,
            mu,
            mu_hat,
            x_axes: vec![tb.axis; dim],
            tensor_index: tb.index,
            rule,
            dict: TestFunctionDictionary::standard(dim, config.bumps, config.seed),
        })
    }

    fn node(&self, j: usize) -> &[f64] {
        &self.y_nodes[j * self.dim..(j + 1) * self.dim]
    }

    fn patch_range(&self) -> std::ops::Range<usize> {
        self.tensor_index.len()..self.rule.len()
    }

    /// χ* on the full x tensor and on the patch points, with maximizers.
    fn conj(&self, chi: &[f64], track: bool) -> (Vec<f64>, Option<Vec<u32>>, Vec<(f64, u32)>) {
        let t = conjugate_tensor(&self.y_axes, chi, &self.x_axes, track);
        let patch: Vec<(f64, u32)> = self
            .patch_range()
            .into_par_iter()
            .map(|k| {
                let x = self.rule.point(k);
                let mut best = (f64::NEG_INFINITY, u32::MAX);
                for (j, c) in chi.iter().enumerate() {
                    let v = dot(x, self.node(j)) - c;
                    if v > best.0 {
                        best = (v, j as u32);
                    }
                }
                best
            })
            .collect();
        (t.values, t.argmax, patch)
    }

    /// Σ_j μ̂_j χ_j = Σ_i μ_i χ(y_i) for the multilinear interpolant.
    pub fn linear_term(&self, chi: &[f64]) -> f64 {
        let terms: Vec<f64> = self.mu_hat.iter().zip(chi).map(|(m, c)| m * c).collect();
        pairwise_sum(&terms)
    }

    pub fn eval(&self, chi: &[f64]) -> Result<Eval> {
        let (tv, ta, patch) = self.conj(chi, true);
        let ta = ta.expect("tracked");
        let nt = self.tensor_index.len();
        let mut masses = Vec::with_capacity(self.rule.len());
        let mut nu = vec![0.0; chi.len()];
        for k in 0..self.rule.len() {
            let (s, a) = if k < nt {
                let f = self.tensor_index[k];
                (tv[f], ta[f])
            } else {
                patch[k - nt]
            };
            if a == u32::MAX {
                return Err(Error::DegenerateIterate("χ is identically +∞".into()));
            }
            let m = self.rule.weights[k] * (-s).exp();
            masses.push(m);
            nu[a as usize] += m;
        }
        let vt = pairwise_sum(&masses);
        if !(vt.is_finite() && vt > 0.0) {
            return Err(Error::DegenerateIterate(format!("Ṽ_q(e^(-χ*)) = {vt}")));
        }
        let objective = self.linear_term(chi) - self.mu.total() * vt.ln();
        Ok(Eval { objective, vt, nu })
    }

    /// Double conjugation through the x points (an idempotent convex
    /// projection), then max-symmetrization, the clip at 0 and the shift
    /// making Ṽ_q(e^{−χ*}) = a.
    pub fn project(&self, chi: &[f64], a: f64, clip: bool) -> Result<(Vec<f64>, Eval, f64)> {
        let (tv, _, patch) = self.conj(chi, false);
        let back = conjugate_tensor(&self.x_axes, &tv, &self.y_axes, false).values;
        let nt = self.tensor_index.len();
        let mut psi: Vec<f64> = (0..chi.len())
            .into_par_iter()
            .map(|j| {
                let y = self.node(j);
                let mut v = back[j];
                for (i, (s, _)) in patch.iter().enumerate() {
                    v = v.max(dot(self.rule.point(nt + i), y) - s);
                }
                v.min(chi[j])
            })
            .collect();
        for j in 0..psi.len() {
            let m = self.ygrid.mirror(j);
            let v = psi[j].max(psi[m]);
            psi[j] = v;
            psi[m] = v;
        }
        if clip {
            for v in &mut psi {
                *v = v.max(0.0);
            }
        }
        let ev = self.eval(&psi)?;
        let c = (a / ev.vt).ln();
        for v in &mut psi {
            *v += c;
        }
        let scale = a / ev.vt;
        let nu = ev.nu.iter().map(|m| m * scale).collect();
        let objective = self.linear_term(&psi) - self.mu.total() * a.ln();
        Ok((
            psi,
            Eval {
                objective,
                vt: a,
                nu,
            },
            c,
        ))
    }

    /// ∂J/∂χ_j = μ̂_j − (|μ|/Ṽ)·ν_j, symmetrized.
    pub fn gradient(&self, ev: &Eval) -> Vec<f64> {
        let s = self.mu.total() / ev.vt;
        let g: Vec<f64> = self
            .mu_hat
            .iter()
            .zip(&ev.nu)
            .map(|(m, n)| m - s * n)
            .collect();
        (0..g.len())
            .map(|j| 0.5 * (g[j] + g[self.ygrid.mirror(j)]))
            .collect()
    }

    /// Solves H d = g with H the graph Laplacian weighted by the node masses
    /// (the Hessian of J when ∇χ* is close to a translation), by Jacobi-PCG.
    pub fn direction(&self, g: &[f64], ev: &Eval) -> Vec<f64> {
        let n = g.len();
        let s = self.mu.total() / ev.vt;
        let floor = 1e-9 * self.mu.total() / n as f64;
        let a: Vec<f64> = (0..n)
            .map(|j| self.mu_hat[j].max(s * ev.nu[j]) + floor)
            .collect();
        let h2 = self.ygrid.h() * self.ygrid.h();
        let nodes = self.ygrid.nodes;
        let dim = self.dim;
        let mut strides = [1usize; 3];
        for d in (0..dim.saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * nodes;
        }
        let eps = 1e-6;
        let apply = |v: &[f64], out: &mut [f64]| {
            for j in 0..n {
                let idx = self.ygrid.unflatten(j);
                let mut acc = eps * a[j] * v[j];
                for d in 0..dim {
                    for (ok, k) in [
                        (idx[d] + 1 < nodes, j + strides[d]),
                        (idx[d] > 0, j.wrapping_sub(strides[d])),
                    ] {
                        if ok {
                            acc += 0.5 * (a[j] + a[k]) / h2 * (v[j] - v[k]);
                        }
                    }
                }
                out[j] = acc;
            }
        };
        let mut diag = vec![0.0; n];
        for (j, dj) in diag.iter_mut().enumerate() {
            let idx = self.ygrid.unflatten(j);
            let mut acc = eps * a[j];
            for d in 0..dim {
                for (ok, k) in [
                    (idx[d] + 1 < nodes, j + strides[d]),
                    (idx[d] > 0, j.wrapping_sub(strides[d])),
                ] {
                    if ok {
                        acc += 0.5 * (a[j] + a[k]) / h2;
                    }
                }
            }
            *dj = acc;
        }
        let dotv = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let mut x = vec![0.0; n];
        let mut r = g.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(a, b)| a / b).collect();
        let mut p = z.clone();
        let mut rz = dotv(&r, &z);
        let g0 = dotv(g, g).sqrt();
        let mut ap = vec![0.0; n];
        for _ in 0..2000 {
            if dotv(&r, &r).sqrt() <= 1e-10 * g0 {
                break;
            }
            apply(&p, &mut ap);
            let alpha = rz / dotv(&p, &ap);
            for j in 0..n {
                x[j] += alpha * p[j];
                r[j] -= alpha * ap[j];
            }
            for j in 0..n {
                z[j] = r[j] / diag[j];
            }
            let rz_new = dotv(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for j in 0..n {
                p[j] = z[j] + beta * p[j];
            }
        }
        (0..n)
            .map(|j| 0.5 * (x[j] + x[self.ygrid.mirror(j)]))
            .collect()
    }

    /// (|μ|/Ṽ)·C̃^e_q(e^{−χ*};·) as atoms on the nodes.
    pub fn model_measure(&self, ev: &Eval) -> EuclideanMeasure {
        let s = self.mu.total() / ev.vt;
        EuclideanMeasure {
            dim: self.dim,
            points: self.y_nodes.clone(),
            weights: ev.nu.iter().map(|m| s * m).collect(),
            source: format!("solver:{}", self.ygrid.nodes),
        }
        .compact()
    }

    pub fn residual(&self, ev: &Eval) -> Result<f64> {
        discrepancy(self.mu.measure(), &self.model_measure(ev), &self.dict)
    }
}
