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

//! The even functional dual Minkowski problem: given an even measure μ,
//! find f₀ = (|μ|/A)·e^{−χ₀*} with C̃^e_q(f₀;·) = μ, by minimizing
//! J(χ) = ∫χ dμ − |μ|·ln Ṽ_q(e^{−χ*}) over even convex grid functions χ ≥ 0
//! normalized by Ṽ_q(e^{−χ*}) = A.

mod engine;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::convex::{ConvexFunction, LogConcaveFunction};
use crate::dual_curvature::EuclideanMeasure;
use crate::error::{invalid, Error, Result};
use crate::extreal::ExtReal;
use crate::grid::GridSpec;
use crate::numerics::{min_eigenvalue_sym, norm, sphere_area};
use crate::variation::Weight;

use engine::{Eval, Problem};

/// A nonzero finite atomic measure with cached totals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrescribedMeasure {
    measure: EuclideanMeasure,
    total: f64,
    first_moment: f64,
}

impl PrescribedMeasure {
    pub fn new(measure: EuclideanMeasure) -> Result<PrescribedMeasure> {
        let total = measure.total();
        if !(total > 0.0) {
            return invalid("the prescribed measure is zero");
        }
        let first_moment = measure.integrate(norm);
        Ok(PrescribedMeasure {
            measure,
            total,
            first_moment,
        })
    }

    /// Atoms at the midpoints of `cells`ⁿ cells of [−radius, radius]ⁿ with
    /// mass density(midpoint)·hⁿ.
    pub fn from_density<F: Fn(&[f64]) -> f64>(
        dim: usize,
        radius: f64,
        cells: usize,
        density: F,
    ) -> Result<PrescribedMeasure> {
        if !(1..=3).contains(&dim) || cells == 0 || !(radius > 0.0) {
            return invalid(
                "density discretization needs dim in 1..=3, cells > 0 and a positive radius",
            );
        }
        let h = 2.0 * radius / cells as f64;
        let total = cells.pow(dim as u32);
        let mut points = Vec::with_capacity(total * dim);
        let mut weights = Vec::with_capacity(total);
        for f in 0..total {
            let mut rem = f;
            let mut y = vec![0.0; dim];
            for d in (0..dim).rev() {
                y[d] = -radius + (rem % cells) as f64 * h + 0.5 * h;
                rem /= cells;
            }
            weights.push(density(&y) * h.powi(dim as i32));
            points.extend(y);
        }
        PrescribedMeasure::new(EuclideanMeasure::new(
            dim,
            points,
            weights,
            format!("grid:{cells}"),
        )?)
    }

    pub fn measure(&self) -> &EuclideanMeasure {
        &self.measure
    }

    pub fn dim(&self) -> usize {
        self.measure.dim
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn first_moment(&self) -> f64 {
        self.first_moment
    }

    /// Largest atom coordinate in absolute value.
    pub fn max_coordinate(&self) -> f64 {
        self.measure.points.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Result<PrescribedMeasure> {
        let mut m = self.measure.clone();
        for w in &mut m.weights {
            *w *= c;
        }
        PrescribedMeasure::new(EuclideanMeasure::new(m.dim, m.points, m.weights, m.source)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub even: bool,
    /// Smallest eigenvalue of Σ μ_i y_i y_iᵀ and the threshold it must exceed.
    pub min_eigenvalue: f64,
    pub eigen_threshold: f64,
    pub total: f64,
    pub first_moment: f64,
    pub reasons: Vec<String>,
}

fn key(y: &[f64]) -> Vec<i64> {
    y.iter().map(|v| (v * 1e9).round() as i64).collect()
}

/// Evenness (atoms matched with their reflections, masses equal to 1e−12
/// relative) and non-concentration on a proper subspace.
pub fn check_admissible(mu: &PrescribedMeasure) -> Admissibility {
    let m = &mu.measure;
    let dim = m.dim;
    let mut masses: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    for k in 0..m.len() {
        *masses.entry(key(m.point(k))).or_insert(0.0) += m.weights[k];
    }
    let wmax = masses.values().fold(0.0f64, |a, b| a.max(*b));
    let mut even = true;
    for (k, w) in &masses {
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        match masses.get(&neg) {
            Some(v) if (v - w).abs() <= 1e-12 * wmax => {}
            _ => {
                even = false;
                break;
            }
        }
    }
    let mut cov = vec![vec![0.0; dim]; dim];
    for k in 0..m.len() {
        let y = m.point(k);
        for a in 0..dim {
            for b in 0..dim {
                cov[a][b] += m.weights[k] * y[a] * y[b];
            }
        }
    }
    let min_eigenvalue = min_eigenvalue_sym(&cov);
    let diam = 2.0 * m.radius();
    let eigen_threshold = 1e-10 * mu.total * diam * diam;
    let mut reasons = Vec::new();
    if !even {
        reasons.push("measure is not even".to_string());
    }
    if !(min_eigenvalue > eigen_threshold) {
        reasons.push(format!(
            "measure is concentrated on a proper subspace (smallest eigenvalue {min_eigenvalue:.3e} <= {eigen_threshold:.3e})"
        ));
    }
    Admissibility {
        admissible: reasons.is_empty(),
        even,
        min_eigenvalue,
        eigen_threshold,
        total: mu.total,
        first_moment: mu.first_moment,
        reasons,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Grid of the unknown χ (odd node count, origin-symmetric).
    pub grid: GridSpec,
    /// Half-width of the x box; 1.25× the χ grid radius when absent.
    pub x_radius: Option<f64>,
    /// Cells per axis of the x-rule.
    pub x_cells: usize,
    /// Constraint level; chosen by [`choose_a`] when absent.
    pub a: Option<f64>,
    pub max_iter: usize,
    pub initial_step: f64,
    pub backtrack: f64,
    pub armijo: f64,
    /// Stop when the residual discrepancy is at most tol·|μ|.
    pub tol: f64,
    pub seed: u64,
    /// Random bumps in the test-function dictionary.
    pub bumps: usize,
    /// Iterations of each trial run in the search for A.
    pub trial_iters: usize,
}

impl SolverConfig {
    /// A χ grid with `nodes` per axis covering the atoms of μ.
    pub fn for_measure(mu: &PrescribedMeasure, nodes: usize) -> Result<SolverConfig> {
        let dim = mu.dim();
        let nodes = nodes | 1;
        if nodes < 3 {
            return invalid("the χ grid needs at least 3 nodes per axis");
        }
        let m = mu.max_coordinate();
        let radius = if m > 0.0 {
            m * (1.0 + 1.0 / (nodes - 1) as f64)
        } else {
            1.0
        };
        Ok(SolverConfig {
            grid: GridSpec::new(dim, radius, nodes)?,
            x_radius: None,
            x_cells: match dim {
                1 => 4096,
                2 => 512,
                _ => 64,
            },
            a: None,
            max_iter: 500,
            initial_step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            tol: 0.05,
            seed: 0,
            bumps: 16,
            trial_iters: 25,
        })
    }

    /// Nodes of the χ grid, flat.
    pub fn grid_points(&self) -> Vec<f64> {
        (0..self.grid.len())
            .flat_map(|j| self.grid.point(j))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub objective: f64,
    /// Ṽ_q(e^{−χ*}) before the normalizing shift.
    pub constraint: f64,
    pub residual: f64,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub converged: bool,
    pub iterations: usize,
    pub a: f64,
    /// Trial values (A, χ(o)) of the search for A, empty when A was given.
    pub a_search: Vec<(f64, f64)>,
    /// |μ|/A, the factor in f₀ = (|μ|/A)·e^{−χ₀*}.
    pub scale: f64,
    pub residual: f64,
    pub chi_origin: f64,
    pub trace: Vec<TraceEntry>,
    pub admissibility: Admissibility,
    pub chi: ConvexFunction,
}

impl SolverReport {
    /// f₀ = (|μ|/A)·e^{−χ₀*} with χ₀* sampled on `dual`.
    pub fn f0(&self, dual: GridSpec) -> Result<LogConcaveFunction> {
        let star = self.chi.conjugate(dual)?;
        LogConcaveFunction::new(star.shifted(-self.scale.ln()))
    }
}

fn power_q(w: &Weight) -> Result<f64> {
    w.q()
        .ok_or_else(|| Error::Invalid("the Minkowski solver needs a power weight".into()))
}

/// J(χ) and ∂J/∂χ at the nodes of a grid χ; J(χ + c) = J(χ).
pub fn objective(
    chi: &ConvexFunction,
    mu: &PrescribedMeasure,
    w: &Weight,
    config: &SolverConfig,
) -> Result<(f64, Vec<f64>)> {
    power_q(w)?;
    let g = chi
        .grid_fn()
        .ok_or_else(|| Error::Invalid("objective needs a grid function".into()))?;
    if g.spec != config.grid {
        return invalid("χ must live on the configured grid");
    }
    let values: Vec<f64> = g.values.iter().map(|v| v.get() + chi.offset()).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return invalid("χ must be finite on the grid");
    }
    let p = Problem::new(mu, w, config)?;
    let ev = p.eval(&values)?;
    let grad = p.gradient(&ev);
    Ok((ev.objective, grad))
}

/// Γ(y) = ln A + c_n|y| with ∫_{B(c_n)}|x|^{q−n}dx = 1, so Ṽ_q(e^{−Γ*}) = A.
fn gamma_witness(grid: &GridSpec, q: f64, a: f64) -> Vec<f64> {
    let c = (q / sphere_area(grid.dim)).powf(1.0 / q);
    (0..grid.len())
        .map(|j| a.ln() + c * norm(&grid.point(j)))
        .collect()
}

struct RunOutcome {
    chi: Vec<f64>,
    converged: bool,
    iterations: usize,
    residual: f64,
    trace: Vec<TraceEntry>,
}

fn run(
    p: &Problem,
    a: f64,
    config: &SolverConfig,
    max_iter: usize,
    tol: f64,
) -> Result<RunOutcome> {
    let chi0 = gamma_witness(&p.ygrid, p.q, a);
    let (mut chi, mut ev, _) = p.project(&chi0, a, true)?;
    let mut raw = a;
    let mut residual = p.residual(&ev)?;
    let mut trace = vec![TraceEntry {
        iter: 0,
        objective: ev.objective,
        constraint: raw,
        residual,
        step: 0.0,
    }];
    let target = tol * p.mu.total();
    let mut converged = residual <= target;
    let mut tau = config.initial_step;
    let mut it = 0;
    while !converged && it < max_iter {
        it += 1;
        let g = p.gradient(&ev);
        let d = p.direction(&g, &ev);
        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        let mut accepted: Option<(Vec<f64>, Eval, f64)> = None;
        let mut best: Option<(Vec<f64>, Eval, f64, f64)> = None;
        let mut t = tau;
        while t >= 1e-10 {
            let trial: Vec<f64> = chi.iter().zip(&d).map(|(c, dv)| c - t * dv).collect();
            let (cand, evc, shift) = p.project(&trial, a, true)?;
            if evc.objective <= ev.objective - config.armijo * t * slope.max(0.0) {
                accepted = Some((cand, evc, t));
                raw = a * (-shift).exp();
                break;
            }
            if evc.objective <= ev.objective
                && best.as_ref().is_none_or(|b| evc.objective < b.1.objective)
            {
                best = Some((cand, evc, t, shift));
            }
            t *= config.backtrack;
        }
        let (cand, evc, t) = match (accepted, best) {
            (Some(x), _) => x,
            (None, Some((c, e, t, shift))) => {
                raw = a * (-shift).exp();
                (c, e, t)
            }
            (None, None) => break,
        };
        chi = cand;
        ev = evc;
        tau = (2.0 * t).min(config.initial_step);
        residual = p.residual(&ev)?;
        trace.push(TraceEntry {
            iter: it,
            objective: ev.objective,
            constraint: raw,
            residual,
            step: t,
        });
        converged = residual <= target;
    }
    Ok(RunOutcome {
        chi,
        converged,
        iterations: it,
        residual,
        trace,
    })
}

/// Smallest A = 2^k, k ≥ 0, whose trial run leaves χ(o) ≥ 0.1.
pub fn choose_a(
    mu: &PrescribedMeasure,
    w: &Weight,
    config: &SolverConfig,
) -> Result<(f64, Vec<(f64, f64)>)> {
    power_q(w)?;
    let p = Problem::new(mu, w, config)?;
    let o = config.grid.origin_index();
    let mut tried = Vec::new();
    for k in 0..=40 {
        let a = 2f64.powi(k);
        let out = run(&p, a, config, config.trial_iters, 0.0)?;
        tried.push((a, out.chi[o]));
        if out.chi[o] >= 0.1 {
            return Ok((a, tried));
        }
    }
    let a = tried.last().map(|t| t.0).unwrap_or(1.0);
    Ok((a, tried))
}

/// Projected descent from the Γ-witness. Rejects non-admissible μ.
pub fn solve(mu: &PrescribedMeasure, w: &Weight, config: &SolverConfig) -> Result<SolverReport> {
    power_q(w)?;
    let admissibility = check_admissible(mu);
    if !admissibility.admissible {
        return Err(Error::NotAdmissible(admissibility.reasons.join("; ")));
    }
    if config.grid.dim != mu.dim() {
        return invalid("χ grid dimension does not match the measure");
    }
    let (a, a_search) = match config.a {
        Some(a) if a.is_finite() && a > 0.0 => (a, Vec::new()),
        Some(a) => return invalid(format!("A must be positive (got {a})")),
        None => choose_a(mu, w, config)?,
    };
    let p = Problem::new(mu, w, config)?;
    let out = run(&p, a, config, config.max_iter, config.tol)?;
    let chi_origin = out.chi[config.grid.origin_index()];
    let chi = ConvexFunction::grid(
        config.grid,
        out.chi.iter().map(|v| ExtReal::finite(*v)).collect(),
        true,
    )?;
    Ok(SolverReport {
        converged: out.converged,
        iterations: out.iterations,
        a,
        a_search,
        scale: mu.total() / a,
        residual: out.residual,
        chi_origin,
        trace: out.trace,
        admissibility,
        chi,
    })
}

#[cfg(test)]
mod tests;
