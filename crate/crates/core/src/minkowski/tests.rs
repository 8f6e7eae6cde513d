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

use super::*;
use crate::dual_curvature::{discrepancy, euclidean_dcm, TestFunctionDictionary};
use crate::variation::QuadratureSpec;

fn atoms(dim: usize, pts: &[Vec<f64>], w: &[f64]) -> PrescribedMeasure {
    let flat: Vec<f64> = pts.iter().flatten().copied().collect();
    PrescribedMeasure::new(EuclideanMeasure::new(dim, flat, w.to_vec(), "test").unwrap()).unwrap()
}

fn gaussian_mu(q: f64) -> PrescribedMeasure {
    PrescribedMeasure::from_density(2, 5.0, 64, |y| {
        let r2 = y[0] * y[0] + y[1] * y[1];
        r2.sqrt().powf(q - 2.0) * (-0.5 * r2).exp()
    })
    .unwrap()
}

#[test]
fn admissibility_examples() {
    let line = atoms(2, &[vec![1.0, 0.0], vec![-1.0, 0.0]], &[0.5, 0.5]);
    let a = check_admissible(&line);
    assert!(!a.admissible && a.even);
    let cross = atoms(
        2,
        &[
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ],
        &[0.25; 4],
    );
    assert!(check_admissible(&cross).admissible);
    let skew = atoms(
        2,
        &[
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ],
        &[0.25 + 1e-6, 0.25, 0.25, 0.25],
    );
    let s = check_admissible(&skew);
    assert!(!s.admissible && !s.even);
    let w = Weight::power(1.0).unwrap();
    let cfg = SolverConfig::for_measure(&line, 17).unwrap();
    assert!(matches!(
        solve(&line, &w, &cfg),
        Err(Error::NotAdmissible(_))
    ));
    let cfg = SolverConfig::for_measure(&skew, 17).unwrap();
    assert!(matches!(
        solve(&skew, &w, &cfg),
        Err(Error::NotAdmissible(_))
    ));
}

fn quadratic_chi(grid: GridSpec) -> ConvexFunction {
    let vals = (0..grid.len())
        .map(|j| {
            let y = grid.point(j);
            ExtReal::finite(0.5 * y.iter().map(|v| v * v).sum::<f64>())
        })
        .collect();
    ConvexFunction::grid(grid, vals, true).unwrap()
}

#[test]
fn objective_is_shift_invariant() {
    let mu = gaussian_mu(2.0);
    let w = Weight::power(2.0).unwrap();
    let cfg = SolverConfig::for_measure(&mu, 33).unwrap();
    let chi = quadratic_chi(cfg.grid);
    let (j0, g0) = objective(&chi, &mu, &w, &cfg).unwrap();
    let (j1, g1) = objective(&chi.shifted(1.0), &mu, &w, &cfg).unwrap();
    assert!((j0 - j1).abs() <= 1e-9 * j0.abs().max(1.0), "{j0} vs {j1}");
    for (a, b) in g0.iter().zip(&g1) {
        assert!((a - b).abs() <= 1e-9 * mu.total());
    }
}

#[test]
fn gaussian_is_nearly_stationary() {
    // χ = ½|y|² gives e^{−χ*} Gaussian, whose pushforward is μ itself.
    let mu = gaussian_mu(2.0);
    let w = Weight::power(2.0).unwrap();
    let cfg = SolverConfig::for_measure(&mu, 65).unwrap();
    let chi = quadratic_chi(cfg.grid);
    let (_, g) = objective(&chi, &mu, &w, &cfg).unwrap();
    let dict = TestFunctionDictionary::standard(2, cfg.bumps, cfg.seed);
    let gm = EuclideanMeasure::new(
        2,
        cfg.grid_points(),
        g.iter().map(|v| v.max(0.0)).collect(),
        "g+",
    )
    .unwrap();
    let gn = EuclideanMeasure::new(
        2,
        cfg.grid_points(),
        g.iter().map(|v| (-v).max(0.0)).collect(),
        "g-",
    )
    .unwrap();
    let d = discrepancy(&gm, &gn, &dict).unwrap();
    assert!(d <= 0.05 * mu.total(), "{d} vs {}", mu.total());
    // Independent forward oracle: the closed-form Gaussian pushforward.
    let f = LogConcaveFunction::gaussian(2).unwrap();
    let exact = euclidean_dcm(&f, &w, &QuadratureSpec::for_dim(2)).unwrap();
    assert!(discrepancy(mu.measure(), &exact, &dict).unwrap() <= 0.01 * mu.total());
}

fn check_run(q: f64) -> SolverReport {
    let mu = gaussian_mu(q);
    let w = Weight::power(q).unwrap();
    let cfg = SolverConfig::for_measure(&mu, 65).unwrap();
    let r = solve(&mu, &w, &cfg).unwrap();
    assert!(
        r.converged,
        "q={q}: residual {} after {}",
        r.residual, r.iterations
    );
    assert!(r.residual <= 0.05 * mu.total());
    for p in r.trace.windows(2) {
        assert!(p[1].objective <= p[0].objective + 1e-12 * p[0].objective.abs().max(1.0));
    }
    assert!(r.chi_origin >= 0.0);
    r
}

#[test]
fn solver_converges_q1() {
    check_run(1.0);
}

#[test]
fn solver_converges_q2() {
    check_run(2.0);
}

#[test]
fn doubling_mu_keeps_chi() {
    let mu = gaussian_mu(2.0);
    let w = Weight::power(2.0).unwrap();
    let mut cfg = SolverConfig::for_measure(&mu, 33).unwrap();
    cfg.a = Some(4.0);
    cfg.max_iter = 30;
    let r1 = solve(&mu, &w, &cfg).unwrap();
    let r2 = solve(&mu.scaled(2.0).unwrap(), &w, &cfg).unwrap();
    assert!((r2.scale - 2.0 * r1.scale).abs() <= 1e-12 * r1.scale);
    let (a, b) = (r1.chi.grid_fn().unwrap(), r2.chi.grid_fn().unwrap());
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x.get() - y.get()).abs() <= 1e-9 * (1.0 + x.get().abs()));
    }
    for (x, y) in r1.trace.iter().zip(&r2.trace) {
        assert!((2.0 * x.residual - y.residual).abs() <= 1e-9 * y.residual.max(1e-300));
    }
}

#[test]
fn user_a_is_honored() {
    let mu = gaussian_mu(2.0);
    let w = Weight::power(2.0).unwrap();
    let mut cfg = SolverConfig::for_measure(&mu, 17).unwrap();
    cfg.a = Some(3.0);
    cfg.max_iter = 2;
    let r = solve(&mu, &w, &cfg).unwrap();
    assert_eq!(r.a, 3.0);
    assert!(r.a_search.is_empty());
}
