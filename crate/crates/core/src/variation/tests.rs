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

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::convex::RadialProfile;
use crate::extreal::ExtReal;
use crate::grid::GridSpec;
use crate::numerics::{gamma, sphere_area};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn square() -> ConvexBody {
    ConvexBody::cube(2, 1.0).unwrap()
}

#[test]
fn gaussian_moments() {
    let f = LogConcaveFunction::gaussian(2).unwrap();
    let spec = QuadratureSpec::for_dim(2);
    let m2 = moment(&f, &Weight::power(2.0).unwrap(), &spec).unwrap();
    assert!(rel(m2, 2.0 * PI) < 1e-8, "{m2}");
    let m1 = moment(&f, &Weight::power(1.0).unwrap(), &spec).unwrap();
    assert!(rel(m1, 2.0 * PI * (PI / 2.0).sqrt()) < 1e-8, "{m1}");
    for n in [1usize, 2] {
        let f = LogConcaveFunction::gaussian(n).unwrap();
        let spec = QuadratureSpec::for_dim(n);
        for q in [0.5, 1.0, 2.0, 3.0] {
            let want = sphere_area(n) * 2f64.powf(q / 2.0 - 1.0) * gamma(q / 2.0);
            let got = moment(&f, &Weight::power(q).unwrap(), &spec).unwrap();
            assert!(rel(got, want) < 1e-6, "n={n} q={q}: {got} vs {want}");
        }
    }
}

#[test]
fn indicator_moment_matches_dual_quermass() {
    let spec = QuadratureSpec::for_dim(2);
    let b = ConvexBody::ball(2, 2.0).unwrap();
    let f = LogConcaveFunction::indicator(b.clone()).unwrap();
    let m = moment(&f, &Weight::power(1.0).unwrap(), &spec).unwrap();
    assert!(rel(m, 4.0 * PI) < 1e-10);
    for k in [b, square()] {
        let f = LogConcaveFunction::indicator(k.clone()).unwrap();
        for q in [0.5, 1.0, 2.0, 3.0] {
            let m = moment(&f, &Weight::power(q).unwrap(), &spec).unwrap();
            let v = k.dual_quermass(q).unwrap();
            assert!(rel(m, v) < 1e-2, "q={q}: {m} vs {v}");
        }
    }
}

#[test]
fn hybrid_rule_for_grid_gaussian() {
    // Grid-sampled Gaussian goes through the hybrid rule.
    let spec = QuadratureSpec::for_dim(2);
    let g = GridSpec::new(2, 8.0, 257).unwrap();
    let phi = ConvexFunction::quadratic(2, 1.0)
        .unwrap()
        .sampled(g)
        .unwrap();
    let f = LogConcaveFunction::new(phi).unwrap();
    for q in [1.0, 2.0] {
        let want = 2.0 * PI * 2f64.powf(q / 2.0 - 1.0) * gamma(q / 2.0);
        let got = moment(&f, &Weight::power(q).unwrap(), &spec).unwrap();
        assert!(rel(got, want) < 1e-2, "q={q}: {got} vs {want}");
    }
}

#[test]
fn patch_weights_match_ball_weight() {
    for (dim, q) in [(1usize, 0.5), (2, 0.5), (2, 1.0), (2, 3.0), (3, 1.0)] {
        let mut spec = QuadratureSpec::for_dim(dim);
        spec.resolution = 32;
        let rule = hybrid_rule(dim, &Weight::power(q).unwrap(), 4.0, &spec).unwrap();
        let want = quadrature::ball_weight(dim, q, rule.rho0);
        assert!(rel(rule.patch_weight, want) < 1e-12, "dim={dim} q={q}");
        assert!(rule.weights.iter().all(|w| *w >= 0.0));
    }
}

#[test]
fn moment_of_conjugate_examples() {
    let spec = QuadratureSpec::for_dim(2);
    for q in [1.0, 2.0, 3.0] {
        let w = Weight::power(q).unwrap();
        let m = moment_of_conjugate(
            &ConvexFunction::indicator(ConvexBody::ball(2, 1.0).unwrap()),
            &w,
            &spec,
        )
        .unwrap();
        assert!(rel(m, 2.0 * PI * gamma(q)) < 1e-6, "q={q}: {m}");
        let g =
            moment_of_conjugate(&ConvexFunction::quadratic(2, 1.0).unwrap(), &w, &spec).unwrap();
        let want = 2.0 * PI * 2f64.powf(q / 2.0 - 1.0) * gamma(q / 2.0);
        assert!(rel(g, want) < 1e-6);
    }
    // Γ = ln A + c|x| with |B(c)|_q = 1 gives A.
    let q = 1.0;
    let c = (q / (2.0 * PI)).powf(1.0 / q);
    let a: f64 = 3.5;
    let gam = ConvexFunction::scaled_norm(2, a.ln(), c).unwrap();
    let m = moment_of_conjugate(&gam, &Weight::power(q).unwrap(), &spec).unwrap();
    assert!(rel(m, a) < 1e-8, "{m}");
}

#[test]
fn growth_guard() {
    let g = GridSpec::new(2, 6.0, 33).unwrap();
    assert!(growth_check(
        &ConvexFunction::quadratic(2, 1.0)
            .unwrap()
            .sampled(g)
            .unwrap()
    ));
    let flat = ConvexFunction::grid(g, vec![ExtReal::finite(0.0); g.len()], true).unwrap();
    assert!(!growth_check(&flat));
    let f = LogConcaveFunction::new(flat).unwrap();
    let err = moment(
        &f,
        &Weight::power(2.0).unwrap(),
        &QuadratureSpec::for_dim(2),
    )
    .unwrap_err();
    assert!(matches!(err, Error::MomentMayBeInfinite(_)));
    assert!(growth_check(
        &ConvexFunction::scaled_norm(2, 0.0, 0.1).unwrap()
    ));
    let ramp = ConvexFunction::max_affine(1, vec![(vec![1.0], 0.0), (vec![0.0], 0.0)]).unwrap();
    assert!(!growth_check(&ramp));
}

#[test]
fn tv_examples() {
    let spec2 = QuadratureSpec::for_dim(2);
    let ball = ConvexBody::ball(2, 1.0).unwrap();
    let f = LogConcaveFunction::indicator(ball.clone()).unwrap();
    let tv = weighted_tv(&f, &ball, &Weight::power(2.0).unwrap(), &spec2).unwrap();
    assert_eq!(tv.bulk, 0.0);
    assert!(rel(tv.boundary, 2.0 * PI) < 1e-10);

    let g = LogConcaveFunction::gaussian(1).unwrap();
    let tv = weighted_tv(
        &g,
        &ConvexBody::interval(-1.0, 1.0).unwrap(),
        &Weight::power(1.0).unwrap(),
        &QuadratureSpec::for_dim(1),
    )
    .unwrap();
    assert!((tv.bulk - 2.0).abs() < 1e-6 && tv.boundary == 0.0, "{tv:?}");

    let e = LogConcaveFunction::exp_norm(2).unwrap();
    for q in [0.5, 1.0, 2.0, 3.0] {
        let tv = weighted_tv(&e, &ball, &Weight::power(q).unwrap(), &spec2).unwrap();
        assert!(rel(tv.total, 2.0 * PI * gamma(q)) < 1e-6, "q={q}: {tv:?}");
    }
}

#[test]
fn coarea_matches_tv() {
    let spec = QuadratureSpec::for_dim(2);
    let fs = [
        LogConcaveFunction::indicator(ConvexBody::ball(2, 2.0).unwrap()).unwrap(),
        LogConcaveFunction::gaussian(2).unwrap(),
        LogConcaveFunction::exp_norm(2).unwrap(),
    ];
    for f in &fs {
        for l in [ConvexBody::ball(2, 1.0).unwrap(), square()] {
            for q in [0.5, 1.0, 2.0, 3.0] {
                let w = Weight::power(q).unwrap();
                let tv = weighted_tv(f, &l, &w, &spec).unwrap().total;
                let co = coarea_tv(f, &l, &w, 200).unwrap();
                assert!(rel(co, tv) < 2e-2, "q={q}: tv {tv} coarea {co}");
            }
        }
    }
    let f = &fs[0];
    let co = coarea_tv(
        f,
        &ConvexBody::ball(2, 1.0).unwrap(),
        &Weight::power(1.0).unwrap(),
        200,
    )
    .unwrap();
    assert!(rel(co, 2.0 * PI) < 1e-9);
}

#[test]
fn level_integral_handles_endpoint_singularities() {
    // ∫₀¹ s^{-1/2} ds = 2 and ∫₀¹ (1 − s)^{-1/2} ds = 2.
    let a = level_integral(1.0, 200, |s| Ok(s.powf(-0.5))).unwrap();
    assert!(rel(a, 2.0) < 1e-4, "{a}");
    let b = level_integral(1.0, 200, |s| Ok((1.0 - s).powf(-0.5))).unwrap();
    assert!(rel(b, 2.0) < 1e-4, "{b}");
    let c = level_integral(2.0, 200, |s| Ok(s * s)).unwrap();
    assert!(rel(c, 8.0 / 3.0) < 1e-4, "{c}");
}

#[test]
fn prekopa_leindler_closed_cases() {
    let spec = QuadratureSpec::for_dim(2);
    let opts = CombineOptions::default();
    let g = LogConcaveFunction::gaussian(2).unwrap();
    let (l, r) = prekopa_leindler_check(&g, &g, 0.5, &spec, &opts).unwrap();
    assert!(
        rel(l, 2.0 * PI) < 1e-3 && rel(r, 2.0 * PI) < 1e-8,
        "{l} {r}"
    );
    let b1 = LogConcaveFunction::indicator(ConvexBody::ball(2, 1.0).unwrap()).unwrap();
    let b3 = LogConcaveFunction::indicator(ConvexBody::ball(2, 3.0).unwrap()).unwrap();
    let (l, r) = prekopa_leindler_check(&b1, &b3, 0.5, &spec, &opts).unwrap();
    assert!(
        rel(l, 4.0 * PI) < 1e-9 && rel(r, 3.0 * PI) < 1e-9,
        "{l} {r}"
    );
}

#[test]
fn prekopa_leindler_random_max_affine() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut spec = QuadratureSpec::for_dim(2);
    spec.resolution = 256;
    let opts = CombineOptions::default();
    for _ in 0..4 {
        let mut pair = Vec::new();
        for _ in 0..2 {
            let k = 5;
            let pieces: Vec<(Vec<f64>, f64)> = (0..k)
                .map(|j| {
                    let th = 2.0 * PI * (j as f64 + rng.gen::<f64>() * 0.5) / k as f64;
                    let r = rng.gen_range(0.5..2.0);
                    (vec![r * th.cos(), r * th.sin()], rng.gen_range(0.0..1.0))
                })
                .collect();
            pair.push(
                LogConcaveFunction::new(ConvexFunction::max_affine(2, pieces).unwrap()).unwrap(),
            );
        }
        let lam = rng.gen_range(0.2..0.8);
        let (l, r) = prekopa_leindler_check(&pair[0], &pair[1], lam, &spec, &opts).unwrap();
        assert!(l >= r - 1e-3 * r, "{l} < {r}");
    }
}

#[test]
fn derivative_control_examples() {
    let g = LogConcaveFunction::new(ConvexFunction::quadratic(1, 2.0).unwrap()).unwrap();
    let (l, r) = derivative_control_check(&g, 0.0, 20001).unwrap();
    assert!((l - 2.0).abs() < 1e-6 && (r - 4.0).abs() < 1e-12, "{l} {r}");
    let e = LogConcaveFunction::exp_norm(1).unwrap();
    let (l, r) = derivative_control_check(&e, 1.0, 20001).unwrap();
    let em1 = (-1.0f64).exp();
    assert!(
        (l - 2.0 * em1).abs() < 1e-6 && (r - 4.0 * em1).abs() < 1e-12,
        "{l} {r}"
    );
    let i = LogConcaveFunction::indicator(ConvexBody::interval(-1.0, 1.0).unwrap()).unwrap();
    assert_eq!(derivative_control_check(&i, 2.0, 1001).unwrap(), (0.0, 0.0));
    // Jumps count toward the variation.
    let (l, r) = derivative_control_check(&i, 0.5, 1001).unwrap();
    assert!((l - 2.0).abs() < 1e-12 && r == 4.0);
}

#[test]
fn radial_profile_moment() {
    // Sampled profile of |x| behaves like e^{−|x|}.
    let prof = RadialProfile::sample(30.0, 30001, ExtReal::finite).unwrap();
    let f = LogConcaveFunction::new(ConvexFunction::radial(2, prof).unwrap()).unwrap();
    let m = moment(
        &f,
        &Weight::power(2.0).unwrap(),
        &QuadratureSpec::for_dim(2),
    )
    .unwrap();
    assert!(rel(m, 2.0 * PI) < 1e-5, "{m}");
}
