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

//! Small numerical kernels shared by the modules: summation, Gauss rules,
//! adaptive 1-D integration and tiny dense solves.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Pairwise (tree) summation. The reduction order depends only on the slice
/// length, which keeps results identical for any thread count.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        let mut s = 0.0;
        for &x in v {
            s += x;
        }
        return s;
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Surface area of the unit sphere S^{n−1} (n = 1 counts the two points ±1).
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0),
    }
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Cached Gauss–Legendre rule mapped to [0, 1].
pub fn gl01(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        (0..=64)
            .map(|k| {
                if k == 0 {
                    return (vec![], vec![]);
                }
                let (x, w) = gauss_legendre(k);
                (
                    x.iter().map(|v| 0.5 * (v + 1.0)).collect(),
                    w.iter().map(|v| 0.5 * v).collect(),
                )
            })
            .collect()
    });
    assert!((1..=64).contains(&n), "Gauss-Legendre order {n} not cached");
    &cache[n]
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for j in 0..7 {
        let dx = h * GK_X[j];
        let s = f(c - dx) + f(c + dx);
        k += GK_WK[j] * s;
        if j % 2 == 1 {
            g += GK_WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over [a, b].
///
/// Bisects until each piece meets `tol·(|piece| + 1e−300)` relative or
/// `abs_tol` absolute (scaled by the piece length); deterministic.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (whole, _) = gk15(&mut f, a, b);
    let abs_floor = 1e-15 * whole.abs().max(1e-300);
    adapt(&mut f, a, b, rel_tol, abs_floor, 0)
}

fn adapt<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: f64,
    floor: f64,
    depth: usize,
) -> f64 {
    let (v, err) = gk15(f, a, b);
    if depth >= 48 || err <= tol * v.abs() || err <= floor {
        return v;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, tol, floor * 0.5, depth + 1) + adapt(f, m, b, tol, floor * 0.5, depth + 1)
}

/// Quadrature nodes on [0, r_max] for ∫ r^β g(r) dr with β > −1.
///
/// The innermost piece [0, ε] uses the substitution v = r^{β+1}, exact for
/// r^β times a constant; a geometric cascade of panels reaches the scale
/// `scale`, and uniform panels of width ≤ `panel` cover the rest. Weights
/// include the r^β factor.
pub fn radial_rule(beta: f64, r_max: f64, scale: f64, panel: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if r_max <= 0.0 {
        return out;
    }
    let levels = 24;
    let s0 = scale.min(r_max);
    let eps = s0 * 0.5f64.powi(levels);
    let p = beta + 1.0;
    let (vx, vw) = gl01(12);
    let ve = eps.powf(p);
    for (x, w) in vx.iter().zip(vw) {
        let v = x * ve;
        out.push((v.powf(1.0 / p), w * ve / p));
    }
    let push_panel = |a: f64, b: f64, out: &mut Vec<(f64, f64)>| {
        let (gx, gw) = gl01(12);
        for (x, w) in gx.iter().zip(gw) {
            let r = a + (b - a) * x;
            out.push((r, w * (b - a) * r.powf(beta)));
        }
    };
    let mut a = eps;
    for _ in 0..levels {
        let b = 2.0 * a;
        push_panel(a, b, &mut out);
        a = b;
    }
    if r_max > s0 {
        let k = ((r_max - s0) / panel).ceil().max(1.0) as usize;
        for j in 0..k {
            let lo = s0 + (r_max - s0) * j as f64 / k as f64;
            let hi = s0 + (r_max - s0) * (j + 1) as f64 / k as f64;
            push_panel(lo, hi, &mut out);
        }
    }
    out
}

/// Solve a small dense system by Gaussian elimination with partial pivoting.
/// Returns `None` when the matrix is numerically singular.
pub fn solve_small(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

/// Smallest eigenvalue of a symmetric matrix of order ≤ 3 (Jacobi sweeps).
pub fn min_eigenvalue_sym(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[i][j] * a[i][j];
                }
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
}
