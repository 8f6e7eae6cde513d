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

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use dualcurv::acceptance::gaussian_measure;
use dualcurv::convex::{conjugate_tensor, ConvexFunction, LogConcaveFunction};
use dualcurv::minkowski::{objective, SolverConfig};
use dualcurv::variation::{moment, QuadratureSpec, Weight};
use dualcurv::GridSpec;

fn axis(r: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| -r + 2.0 * r * i as f64 / (n - 1) as f64)
        .collect()
}

fn conjugate(c: &mut Criterion) {
    let xs = axis(4.0, 257);
    let v: Vec<f64> = xs
        .iter()
        .flat_map(|a| xs.iter().map(move |b| 0.5 * (a * a + b * b)))
        .collect();
    let axes = [xs.clone(), xs.clone()];
    c.bench_function("llt 2d 257²", |b| {
        b.iter(|| conjugate_tensor(black_box(&axes), black_box(&v), &axes, false))
    });
    let phi = ConvexFunction::quadratic(2, 1.0).unwrap();
    let grid = phi.sampled(GridSpec::new(2, 4.0, 129).unwrap()).unwrap();
    c.bench_function("grid conjugate 2d 129²", |b| {
        b.iter(|| grid.conjugate(GridSpec::new(2, 4.0, 129).unwrap()).unwrap())
    });
}

fn moments(c: &mut Criterion) {
    let f = LogConcaveFunction::gaussian(2).unwrap();
    let spec = QuadratureSpec::for_dim(2);
    for q in [0.5, 2.0] {
        let w = Weight::power(q).unwrap();
        c.bench_function(&format!("gaussian moment 2d q={q}"), |b| {
            b.iter(|| moment(black_box(&f), &w, &spec).unwrap())
        });
    }
}

fn solver_objective(c: &mut Criterion) {
    let mu = gaussian_measure(2.0).unwrap();
    let cfg = SolverConfig::for_measure(&mu, 65).unwrap();
    let w = Weight::power(2.0).unwrap();
    let chi = ConvexFunction::quadratic(2, 1.0)
        .unwrap()
        .sampled(cfg.grid)
        .unwrap();
    c.bench_function("minkowski objective q=2 65²", |b| {
        b.iter(|| objective(black_box(&chi), &mu, &w, &cfg).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = conjugate, moments, solver_objective
}
criterion_main!(benches);
