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

use std::f64::consts::PI;

use super::*;
use crate::bodies::{dual_mixed, pq_dual_curvature, ConvexBody};
use crate::convex::{CombineOptions, LogConcaveFunction};
use crate::numerics::{gamma, sphere_area};
use crate::variation::{moment, RuleKind};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn gauss_moment(n: usize, q: f64) -> f64 {
    sphere_area(n) * 2f64.powf(q / 2.0 - 1.0) * gamma(q / 2.0)
}

fn ball(r: f64) -> ConvexBody {
    ConvexBody::ball(2, r).unwrap()
}

#[test]
fn euclidean_mass_equals_moment() {
    let spec = QuadratureSpec::for_dim(2);
    let fs = [
        LogConcaveFunction::gaussian(2).unwrap(),
        LogConcaveFunction::exp_norm(2).unwrap(),
        LogConcaveFunction::indicator(ball(2.0)).unwrap(),
        LogConcaveFunction::indicator(ConvexBody::cube(2, 1.0).unwrap()).unwrap(),
    ];
    for f in &fs {
        for q in [0.5, 1.0, 2.0, 3.0] {
            let w = Weight::power(q).unwrap();
            let mu = euclidean_dcm(f, &w, &spec).unwrap();
            let m = moment(f, &w, &spec).unwrap();
            assert!(rel(mu.total(), m) < 1e-2, "q={q}: {} vs {m}", mu.total());
        }
    }
}

#[test]
fn gaussian_pushforward_is_the_identity() {
    // ∫ζ dC̃^e_q = ∫ζ(y)|y|^{q−n}e^{−|y|²/2}dy; for ζ = |y|² this is Ṽ_{q+2}.
    let spec = QuadratureSpec::for_dim(2);
    let f = LogConcaveFunction::gaussian(2).unwrap();
    for q in [1.0, 2.0] {
        let mu = euclidean_dcm(&f, &Weight::power(q).unwrap(), &spec).unwrap();
        let v = mu.integrate(|y| y[0] * y[0] + y[1] * y[1]);
        assert!(rel(v, gauss_moment(2, q + 2.0)) < 1e-6, "q={q}: {v}");
        let n = mu.integrate(norm);
        assert!(rel(n, gauss_moment(2, q + 1.0)) < 1e-6);
    }
}

#[test]
fn indicator_pushforward_is_a_point_mass() {
    let spec = QuadratureSpec::for_dim(2);
    let f = LogConcaveFunction::indicator(ball(2.0)).unwrap();
    let mu = euclidean_dcm(&f, &Weight::power(1.0).unwrap(), &spec).unwrap();
    assert!(mu.points.iter().all(|v| *v == 0.0));
    assert!(rel(mu.total(), 4.0 * PI) < 1e-10);
    assert_eq!(integrate(&mu, &TestFunction::Norm), 0.0);
}

#[test]
fn spherical_measure_examples() {
    let spec = QuadratureSpec::for_dim(2);
    let f = LogConcaveFunction::indicator(ball(2.0)).unwrap();
    let s = spherical_dcm(&f, &Weight::power(1.0).unwrap(), &spec).unwrap();
    assert!(rel(s.total(), 2.0 * PI) < 1e-12);
    let g = LogConcaveFunction::gaussian(2).unwrap();
    assert!(spherical_dcm(&g, &Weight::power(1.0).unwrap(), &spec)
        .unwrap()
        .is_empty());
    // For an indicator the spherical measure is C̃_{1,q}(K,·) atom for atom.
    let k = ConvexBody::from_vertices(
        2,
        &[
            vec![1.0, 0.2],
            vec![-0.3, 1.1],
            vec![-1.2, -0.4],
            vec![0.5, -1.0],
        ],
    )
    .unwrap();
    let fk = LogConcaveFunction::indicator(k.clone()).unwrap();
    for q in [0.5, 1.0, 2.0, 3.0] {
        let a = spherical_dcm(&fk, &Weight::power(q).unwrap(), &spec).unwrap();
        let b = pq_dual_curvature(&k, 1.0, q).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.weights.iter().zip(&b.weights) {
            assert!(rel(*x, *y) < 1e-10, "q={q}: {x} vs {y}");
        }
    }
}

#[test]
fn discrepancy_basics() {
    let spec = QuadratureSpec::for_dim(2);
    let dict = TestFunctionDictionary::standard(2, 8, 3);
    assert_eq!(dict, TestFunctionDictionary::standard(2, 8, 3));
    let f = LogConcaveFunction::gaussian(2).unwrap();
    let mu = euclidean_dcm(&f, &Weight::power(2.0).unwrap(), &spec).unwrap();
    assert_eq!(discrepancy(&mu, &mu, &dict).unwrap(), 0.0);
    // Evenness: odd test functions integrate to ~0.
    for z in dict.functions.iter().filter(|z| z.is_odd()) {
        assert!(integrate(&mu, z).abs() <= 1e-9 * mu.total());
    }
}

#[test]
fn pushforward_discrepancy_shrinks_under_refinement() {
    // Grid-sampled Gaussian on the hybrid rule at two resolutions, compared
    // with the exact pushforward.
    let f = LogConcaveFunction::gaussian(2).unwrap();
    let w = Weight::power(2.0).unwrap();
    let dict = TestFunctionDictionary::standard(2, 8, 11);
    let exact = euclidean_dcm(&f, &w, &QuadratureSpec::for_dim(2)).unwrap();
    let mut errs = Vec::new();
    for res in [32usize, 64] {
        let mut spec = QuadratureSpec::for_dim(2);
        spec.kind = RuleKind::Hybrid;
        spec.resolution = res;
        let mu = euclidean_dcm(&f, &w, &spec).unwrap();
        errs.push(discrepancy(&mu, &exact, &dict).unwrap());
    }
    assert!(errs[1] <= 0.5 * errs[0], "{errs:?}");
}

fn catalog() -> Vec<(LogConcaveFunction, ConvexBody, Box<dyn Fn(f64) -> f64>)> {
    vec![
        (
            LogConcaveFunction::indicator(ball(2.0)).unwrap(),
            ball(1.0),
            Box::new(|q: f64| 2.0 * PI * 2f64.powf(q - 1.0)),
        ),
        (
            LogConcaveFunction::gaussian(2).unwrap(),
            ball(1.0),
            Box::new(|q: f64| gauss_moment(2, q + 1.0)),
        ),
        (
            LogConcaveFunction::exp_norm(2).unwrap(),
            ball(1.0),
            Box::new(|q: f64| 2.0 * PI * gamma(q)),
        ),
    ]
}

#[test]
fn three_routes_agree() {
    let spec = QuadratureSpec::for_dim(2);
    let opts = CombineOptions::default();
    for (f, l, exact) in catalog() {
        let g = LogConcaveFunction::indicator(l.clone()).unwrap();
        for q in [1.0, 2.0, 3.0] {
            let w = Weight::power(q).unwrap();
            let want = exact(q);
            let lhs = variational_lhs(&f, &g, &w, &[0.1, 0.05, 0.025], &spec, &opts).unwrap();
            let rhs = variational_rhs(&f, &g, &w, &spec).unwrap();
            let lc = layer_cake_delta(&f, &l, &w, 200).unwrap();
            for v in [lhs.value, rhs.total, lc] {
                assert!(
                    rel(v, want) < 1e-2,
                    "q={q}: lhs {} rhs {} lc {lc} want {want}",
                    lhs.value,
                    rhs.total
                );
            }
        }
    }
}

#[test]
fn hypothesis_flags_are_advisory() {
    let g = hypothesis_flags(&LogConcaveFunction::gaussian(2).unwrap());
    assert!(g.max_at_origin && g.holder_ok && g.satisfied());
    let e = hypothesis_flags(&LogConcaveFunction::exp_norm(2).unwrap());
    assert!(!e.holder_ok && e.shape_ok && e.satisfied());
}

#[test]
fn indicator_reduction_and_log_shift() {
    let spec = QuadratureSpec::for_dim(2);
    let k = ConvexBody::cube(2, 1.0).unwrap();
    let l = ball(0.7);
    let fk = LogConcaveFunction::indicator(k.clone()).unwrap();
    let gl = LogConcaveFunction::indicator(l.clone()).unwrap();
    for q in [0.5, 1.0, 2.0, 3.0] {
        let w = Weight::power(q).unwrap();
        let r = variational_rhs(&fk, &gl, &w, &spec).unwrap();
        let d = dual_mixed(&k, &l, q).unwrap();
        assert!(rel(r.total, d) < 1e-2, "q={q}: {} vs {d}", r.total);
        // c·g shifts the right side by ln c·Ṽ_q(f).
        let c: f64 = 2.0;
        let gc = LogConcaveFunction::scaled_indicator(l.clone(), c).unwrap();
        let rc = variational_rhs(&fk, &gc, &w, &spec).unwrap();
        let v = moment(&fk, &w, &spec).unwrap();
        assert!((rc.total - r.total - c.ln() * v).abs() < 1e-9 * v, "q={q}");
    }
    // Against the difference quotient for c = 2 on balls.
    let f = LogConcaveFunction::indicator(ball(2.0)).unwrap();
    let g2 = LogConcaveFunction::scaled_indicator(ball(1.0), 2.0).unwrap();
    let w = Weight::power(1.0).unwrap();
    let lhs = variational_lhs(
        &f,
        &g2,
        &w,
        &[0.1, 0.05, 0.025],
        &spec,
        &CombineOptions::default(),
    )
    .unwrap();
    let rhs = variational_rhs(&f, &g2, &w, &spec).unwrap();
    assert!(
        rel(lhs.value, rhs.total) < 1e-3,
        "{} vs {}",
        lhs.value,
        rhs.total
    );
}

#[test]
fn first_moment_identity_catalog() {
    let spec = QuadratureSpec::for_dim(2);
    for f in [
        LogConcaveFunction::gaussian(2).unwrap(),
        LogConcaveFunction::exp_norm(2).unwrap(),
    ] {
        for q in [1.0, 2.0, 3.0] {
            let (l, r) = first_moment_identity(&f, &Weight::power(q).unwrap(), &spec).unwrap();
            assert!(rel(l, r) < 1e-2, "q={q}: {l} vs {r}");
        }
    }
    let (l, r) = first_moment_identity(
        &LogConcaveFunction::indicator(ball(2.0)).unwrap(),
        &Weight::power(1.0).unwrap(),
        &spec,
    )
    .unwrap();
    assert_eq!((l, r), (0.0, 0.0));
    // n = 2, q = 2, e^{−|x|}: both sides equal 2π.
    let (l, _) = first_moment_identity(
        &LogConcaveFunction::exp_norm(2).unwrap(),
        &Weight::power(2.0).unwrap(),
        &spec,
    )
    .unwrap();
    assert!(rel(l, 2.0 * PI) < 1e-6);
}
