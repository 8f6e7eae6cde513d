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
use crate::bodies::ConvexBody;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(dim: usize, r: f64, n: usize) -> GridSpec {
    GridSpec::new(dim, r, n).unwrap()
}

fn max_err(a: &[ExtReal], b: &[ExtReal]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.get() - y.get()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn closed_form_conjugates() {
    let q = ConvexFunction::quadratic(2, 1.0).unwrap();
    let spec = grid(2, 4.0, 9);
    let qs = q.conjugate(spec).unwrap();
    assert_eq!(qs.kind(), &ConvexKind::Quadratic { a: 1.0 });

    let a: f64 = 3.0;
    let gamma = ConvexFunction::scaled_norm(2, a.ln(), 0.7).unwrap();
    let gs = gamma.conjugate(spec).unwrap();
    assert_eq!(gs.eval(&[0.5, 0.0]).unwrap().get(), -a.ln());
    assert!(gs.eval(&[0.8, 0.0]).unwrap().is_infinite());

    let ind = ConvexFunction::indicator(ConvexBody::interval(-1.0, 1.0).unwrap());
    let s = ind.conjugate(grid(1, 4.0, 9)).unwrap();
    for y in [-3.0, -0.5, 0.0, 2.5] {
        assert!((s.eval(&[y]).unwrap().get() - f64::abs(y)).abs() < 1e-15);
    }
    // Closed-form node samples agree with the symbolic conjugate.
    let vals = gamma.conjugate_values(spec).unwrap();
    let direct = gs.to_grid(spec).unwrap().values;
    assert_eq!(vals, direct);
}

#[test]
fn grid_conjugate_of_quadratic_matches_closed_form() {
    let spec = grid(2, 4.0, 65);
    let phi = ConvexFunction::quadratic(2, 1.0)
        .unwrap()
        .sampled(spec)
        .unwrap();
    let star = phi.conjugate(spec).unwrap();
    let want = ConvexFunction::quadratic(2, 1.0)
        .unwrap()
        .to_grid(spec)
        .unwrap()
        .values;
    let err = max_err(&star.grid_fn().unwrap().values, &want);
    assert!(err <= 2.0 * spec.h() * 4.0, "{err}");
    assert!(
        err < 1e-12,
        "nodes coincide so the discrete transform is exact here: {err}"
    );
}

#[test]
fn grid_conjugate_of_gamma_is_shifted_ball_indicator() {
    let spec = grid(2, 4.0, 65);
    let a: f64 = 2.0;
    let gamma = ConvexFunction::scaled_norm(2, a.ln(), 1.0).unwrap();
    let star = gamma
        .sampled(spec)
        .unwrap()
        .conjugate(grid(2, 2.0, 65))
        .unwrap();
    let g = star.grid_fn().unwrap();
    for i in 0..g.values.len() {
        let y = g.spec.point(i);
        let r = crate::numerics::norm(&y);
        let v = g.values[i].get();
        if r <= 1.0 {
            assert!((v + a.ln()).abs() <= 2.0 * spec.h(), "{y:?} {v}");
        } else {
            // Box truncation: finite, growing at least like R·(|y|−1)·const.
            assert!(v >= -a.ln() + (r - 1.0) * 0.5 * 4.0 - 2.0 * spec.h());
        }
    }
}

#[test]
fn order_reversal_and_even_symmetry() {
    let spec = grid(2, 2.0, 33);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let base: Vec<ExtReal> = (0..spec.len())
        .map(|_| ExtReal::finite(rng.gen_range(0.0..1.0)))
        .collect();
    let bigger: Vec<ExtReal> = base
        .iter()
        .map(|v| v.add_f64(rng.gen_range(0.0..0.3)))
        .collect();
    let dual = grid(2, 3.0, 33);
    let a = ConvexFunction::grid(spec, base, false)
        .unwrap()
        .conjugate_values(dual)
        .unwrap();
    let b = ConvexFunction::grid(spec, bigger, false)
        .unwrap()
        .conjugate_values(dual)
        .unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| x.get() >= y.get()));

    let even: Vec<ExtReal> = (0..spec.len())
        .map(|i| {
            let x = spec.point(i);
            ExtReal::finite(x[0].abs() + 0.3 * x[1] * x[1] + (x[0] * x[1]).abs())
        })
        .collect();
    let f = ConvexFunction::grid(spec, even, true).unwrap();
    let star = f.conjugate(dual).unwrap();
    assert!(star.grid_fn().unwrap().is_symmetric());
    assert!(star.is_even());
}

#[test]
fn even_flag_requires_exact_symmetry() {
    let spec = grid(1, 1.0, 5);
    let vals = vec![1.0, 0.5, 0.0, 0.5, 1.1]
        .into_iter()
        .map(ExtReal::finite)
        .collect();
    assert!(ConvexFunction::grid(spec, vals, true).is_err());
    assert!(matches!(
        ConvexFunction::grid(spec, vec![ExtReal::INFINITY; 5], false),
        Err(Error::EmptyDomain)
    ));
}

/// Lower convex envelope of 1-D samples by brute force over node pairs.
fn brute_envelope(xs: &[f64], vs: &[f64]) -> Vec<f64> {
    (0..xs.len())
        .map(|k| {
            let mut best = vs[k];
            for i in 0..xs.len() {
                for j in i + 1..xs.len() {
                    if xs[i] <= xs[k] && xs[k] <= xs[j] {
                        let t = (xs[k] - xs[i]) / (xs[j] - xs[i]);
                        best = best.min((1.0 - t) * vs[i] + t * vs[j]);
                    }
                }
            }
            best
        })
        .collect()
}

#[test]
fn convexify_matches_brute_force_envelope() {
    let spec = grid(1, 3.0, 121);
    let xs = spec.axis();
    let vs: Vec<f64> = xs.iter().map(|x| (x * x - 1.0f64).abs()).collect();
    let f = ConvexFunction::grid(
        spec,
        vs.iter().cloned().map(ExtReal::finite).collect(),
        true,
    )
    .unwrap();
    let env = f.convexify().unwrap();
    let got = env.grid_fn().unwrap().raw();
    let want = brute_envelope(&xs, &vs);
    for k in 0..xs.len() {
        assert!(
            (got[k] - want[k]).abs() <= 2.0 * spec.h(),
            "{} {} {}",
            xs[k],
            got[k],
            want[k]
        );
        // And the closed form of the envelope.
        let exact = if xs[k].abs() <= 1.0 {
            0.0
        } else {
            xs[k] * xs[k] - 1.0
        };
        assert!((got[k] - exact).abs() <= 2.0 * spec.h());
    }
    assert!(env.grid_fn().unwrap().is_discretely_convex());
    assert!(env.grid_fn().unwrap().is_symmetric());
}

#[test]
fn convexify_is_nearly_identity_on_convex_input_and_keeps_sign() {
    let spec = grid(2, 2.0, 41);
    let f = ConvexFunction::quadratic(2, 1.0)
        .unwrap()
        .sampled(spec)
        .unwrap();
    let env = f.convexify().unwrap();
    let lip = f.grid_fn().unwrap().max_slope();
    assert!(
        max_err(&env.grid_fn().unwrap().values, &f.grid_fn().unwrap().values)
            <= 2.0 * spec.h() * lip
    );

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let vals = (0..spec.len())
        .map(|_| ExtReal::finite(rng.gen_range(0.0..2.0)))
        .collect();
    let env = ConvexFunction::grid(spec, vals, false)
        .unwrap()
        .convexify()
        .unwrap();
    assert!(env
        .grid_fn()
        .unwrap()
        .values
        .iter()
        .all(|v| v.get() >= -1e-9));
}

#[test]
fn convexify_keeps_infinity_outside_the_hull() {
    let spec = grid(1, 2.0, 41);
    let vals = spec
        .axis()
        .iter()
        .map(|x| {
            if x.abs() <= 1.0 {
                ExtReal::finite(x * x)
            } else {
                ExtReal::INFINITY
            }
        })
        .collect();
    let env = ConvexFunction::grid(spec, vals, true)
        .unwrap()
        .convexify()
        .unwrap();
    let g = env.grid_fn().unwrap();
    for (i, x) in spec.axis().iter().enumerate() {
        assert_eq!(g.values[i].is_infinite(), x.abs() > 1.0 + 1e-12, "{x}");
    }
}

#[test]
fn gradients() {
    let q = ConvexFunction::quadratic(2, 1.0).unwrap();
    assert_eq!(q.gradient(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
    let n = ConvexFunction::scaled_norm(2, 0.0, 1.0).unwrap();
    let g = n.gradient(&[3.0, 4.0]).unwrap();
    assert!((g[0] - 0.6).abs() < 1e-15 && (g[1] - 0.8).abs() < 1e-15);
    assert_eq!(n.gradient(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);

    let spec = grid(2, 4.0, 129);
    let s = q.sampled(spec).unwrap();
    let g = s.gradient(&[0.5, 0.5]).unwrap();
    assert!(
        (g[0] - 0.5).abs() < 1e-2 && (g[1] - 0.5).abs() < 1e-2,
        "{g:?}"
    );
    // Inside a cell the slope is a one-cell difference: error at most h/2.
    let g = s.gradient(&[0.51, -0.73]).unwrap();
    let tol = 0.5 * spec.h() + 1e-12;
    assert!(
        (g[0] - 0.51).abs() <= tol && (g[1] + 0.73).abs() <= tol,
        "{g:?}"
    );
    assert!(matches!(
        s.gradient(&[5.0, 0.0]),
        Err(Error::OutOfDomain(_))
    ));

    // Support function of the square: subgradient at an edge normal is the
    // edge; its minimal-norm point is the edge midpoint.
    let h = ConvexFunction::support(ConvexBody::cube(2, 1.0).unwrap());
    assert_eq!(h.gradient(&[1.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    assert_eq!(h.gradient(&[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
    let m = ConvexFunction::max_affine(1, vec![(vec![1.0], 0.0), (vec![-2.0], 0.0)]).unwrap();
    assert_eq!(m.gradient(&[0.0]).unwrap(), vec![0.0]);
    assert_eq!(m.gradient(&[1.0]).unwrap(), vec![1.0]);
}

#[test]
fn evaluation_at_the_edge_of_the_finite_region() {
    let spec = grid(1, 2.0, 5);
    let vals = vec![
        ExtReal::INFINITY,
        ExtReal::finite(1.0),
        ExtReal::finite(0.0),
        ExtReal::finite(1.0),
        ExtReal::INFINITY,
    ];
    let f = ConvexFunction::grid(spec, vals, true).unwrap();
    assert_eq!(f.eval(&[1.0]).unwrap().get(), 1.0);
    assert!(f.eval(&[1.5]).unwrap().is_infinite());
    assert_eq!(f.eval(&[0.5]).unwrap().get(), 0.5);
    assert!(matches!(f.eval(&[2.5]), Err(Error::OutOfDomain(_))));
}

#[test]
fn max_affine_conjugate_is_exact() {
    // max(x, −x, y, −y) = ‖x‖_∞, conjugate = indicator of the ℓ¹ ball.
    let p = ConvexFunction::max_affine(
        2,
        vec![
            (vec![1.0, 0.0], 0.0),
            (vec![-1.0, 0.0], 0.0),
            (vec![0.0, 1.0], 0.0),
            (vec![0.0, -1.0], 0.0),
        ],
    )
    .unwrap();
    assert!(p.is_even());
    let spec = grid(2, 1.5, 13);
    let v = p.conjugate_values(spec).unwrap();
    for (i, val) in v.iter().enumerate() {
        let y = spec.point(i);
        let l1 = y[0].abs() + y[1].abs();
        if l1 <= 1.0 + 1e-12 {
            assert!(val.get().abs() < 1e-12, "{y:?} {val}");
        } else {
            assert!(val.is_infinite(), "{y:?}");
        }
    }
}

#[test]
fn sup_convolution_examples() {
    let opts = CombineOptions::default();
    let b1 = LogConcaveFunction::indicator(ConvexBody::ball(2, 1.0).unwrap()).unwrap();
    let r = sup_convolve(&b1, &b1, 0.5, &opts).unwrap();
    assert_eq!(r.support_body().unwrap().ball_radius(), Some(1.5));
    assert_eq!(r.eval(&[1.4, 0.0]), 1.0);

    let g = LogConcaveFunction::gaussian(1).unwrap();
    let r = sup_convolve(&g, &g, 0.5, &opts).unwrap();
    assert_eq!(r.phi().kind(), &ConvexKind::Quadratic { a: 1.0 / 1.5 });

    let r = sup_convolve(&g, &b1_like(1), 0.0, &opts).unwrap();
    assert_eq!(r, g);
}

fn b1_like(dim: usize) -> LogConcaveFunction {
    LogConcaveFunction::indicator(ConvexBody::ball(dim, 1.0).unwrap()).unwrap()
}

#[test]
fn radial_route_gaussian_plus_ball() {
    // φ* + t|y| conjugates to (|x| − t)₊²/2.
    let g = LogConcaveFunction::gaussian(2).unwrap();
    let t = 0.3;
    let r = sup_convolve(&g, &b1_like(2), t, &CombineOptions::default()).unwrap();
    assert!(matches!(r.phi().kind(), ConvexKind::Radial(_)));
    for x in [0.0, 0.2, 0.5, 1.0, 3.0] {
        let want = 0.5 * (x - t).max(0.0f64).powi(2);
        let got = r.phi().eval(&[x, 0.0]).unwrap().get();
        assert!((got - want).abs() < 1e-6, "{x}: {got} vs {want}");
    }
    // e^{−|x|} ⊕ t·1_B = e^{−(|x|−t)₊}.
    let e = LogConcaveFunction::exp_norm(2).unwrap();
    let r = sup_convolve(&e, &b1_like(2), t, &CombineOptions::default()).unwrap();
    let ConvexKind::Radial(p) = r.phi().kind() else {
        panic!()
    };
    for x in [0.1, 0.3, 1.0, 4.0] {
        let want = (x - t).max(0.0);
        let got = r.phi().eval(&[0.0, x]).unwrap().get();
        // Exact except in the cell holding the kink.
        let tol = if (x - t).abs() < p.h() { p.h() } else { 1e-9 };
        assert!((got - want).abs() < tol, "{x}: {got} vs {want}");
    }
}

#[test]
fn grid_route_matches_closed_form_and_support_contains_sum() {
    // Square indicator ⊕ t·Gaussian: φ(x) = dist(x, K)²/(2t).
    let k = ConvexBody::cube(2, 1.0).unwrap();
    let f = LogConcaveFunction::indicator(k.clone()).unwrap();
    let g = LogConcaveFunction::gaussian(2).unwrap();
    let t = 0.5;
    let r = sup_convolve(&f, &g, t, &CombineOptions::default()).unwrap();
    assert_eq!(r.support(), &Support::Unbounded);
    let gf = r.phi().grid_fn().unwrap();
    let h = gf.spec.h();
    for x in [[0.3, 0.2], [1.5, 0.0], [1.5, 1.5], [-2.0, 0.5]] {
        let d2: f64 = x
            .iter()
            .map(|v: &f64| (v.abs() - 1.0).max(0.0).powi(2))
            .sum();
        let want = d2 / (2.0 * t);
        let got = r.phi().eval(&x).unwrap().get();
        assert!((got - want).abs() < 4.0 * h, "{x:?}: {got} vs {want}");
    }

    // Compact supports: square ⊕ t·ball of a max-affine-free pair.
    let sq = LogConcaveFunction::indicator(k.clone()).unwrap();
    let q = ConvexFunction::quadratic(2, 1.0).unwrap().shifted(0.0);
    let tri =
        ConvexBody::from_vertices(2, &[vec![1.0, 0.0], vec![-0.5, 0.8], vec![-0.5, -0.8]]).unwrap();
    let bump = LogConcaveFunction::with_support(
        ConvexFunction::quadratic(2, 1.0)
            .unwrap()
            .sampled(GridSpec::new(2, 1.0, 65).unwrap())
            .unwrap(),
        Support::Body(tri.clone()),
    )
    .unwrap();
    let _ = q;
    let r = sup_convolve(&sq, &bump, 0.7, &CombineOptions::default()).unwrap();
    let sum = k.minkowski_sum(0.7, &tri).unwrap();
    let body = r.support_body().unwrap();
    for v in &sum.polytope().unwrap().vertices {
        assert!(body.contains(v, 2.0 * r.phi().grid_fn().unwrap().spec.h()));
    }
}

#[test]
fn generalized_cauchy_schwarz() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let hex: Vec<Vec<f64>> = (0..3)
        .flat_map(|i| {
            let t = i as f64 * 1.1 + 0.2;
            let r = 1.0 + 0.3 * i as f64;
            vec![
                vec![r * t.cos(), r * t.sin()],
                vec![-r * t.cos(), -r * t.sin()],
            ]
        })
        .collect();
    for k in [
        ConvexBody::cube(2, 1.0).unwrap(),
        ConvexBody::from_vertices(2, &hex).unwrap(),
        ConvexBody::ball(2, 2.0).unwrap(),
    ] {
        let kp = k.polar().unwrap();
        for _ in 0..100 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let y = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let lhs = x[0] * y[0] + x[1] * y[1];
            assert!(lhs <= k.gauge(&x).unwrap() * kp.gauge(&y).unwrap() + 1e-12);
        }
    }
}

#[test]
fn discrete_convexity_test() {
    let spec = grid(2, 1.0, 11);
    let f = ConvexFunction::quadratic(2, 1.0)
        .unwrap()
        .sampled(spec)
        .unwrap();
    assert!(f.grid_fn().unwrap().is_discretely_convex());
    let g = ConvexFunction::grid(
        spec,
        (0..spec.len())
            .map(|i| ExtReal::finite(-crate::numerics::norm(&spec.point(i))))
            .collect(),
        true,
    )
    .unwrap();
    assert!(!g.grid_fn().unwrap().is_discretely_convex());
}
