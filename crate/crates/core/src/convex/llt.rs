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

//! Linear-time discrete Legendre transform on tensor grids.
//!
//! The 1-D kernel builds the lower convex hull of the finite samples and
//! walks it against sorted dual coordinates. The n-D transform applies it
//! along one axis at a time, using
//! φ*(y) = max_{x₀}[x₀y₀ + max_{x'}(⟨x',y'⟩ − φ(x₀, x'))].

use rayon::prelude::*;

/// Lower hull (indices into `xs`) of the points (xs[i], vs[i]) with finite
/// `vs`. `xs` must be strictly increasing.
fn lower_hull(xs: &[f64], vs: &[f64], out: &mut Vec<usize>) {
    out.clear();
    for i in 0..xs.len() {
        if !vs[i].is_finite() {
            continue;
        }
        while out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            // Drop b if it lies on or above the segment a–i.
            let lhs = (vs[b] - vs[a]) * (xs[i] - xs[a]);
            let rhs = (vs[i] - vs[a]) * (xs[b] - xs[a]);
            if lhs >= rhs {
                out.pop();
            } else {
                break;
            }
        }
        out.push(i);
    }
}

/// out[k] = max_i ys[k]·xs[i] − vs[i] over finite vs, or −∞ if none.
/// `ys` must be nondecreasing. When `arg` is given it receives the maximizing
/// index (the smallest one on ties).
pub(crate) fn conj_1d(
    xs: &[f64],
    vs: &[f64],
    ys: &[f64],
    out: &mut [f64],
    mut arg: Option<&mut [u32]>,
) {
    let mut hull = Vec::with_capacity(xs.len());
    lower_hull(xs, vs, &mut hull);
    if hull.is_empty() {
        out.fill(f64::NEG_INFINITY);
        if let Some(a) = arg.as_deref_mut() {
            a.fill(u32::MAX);
        }
        return;
    }
    let mut j = 0;
    for (k, &y) in ys.iter().enumerate() {
        // Advance while the next hull vertex is at least as good.
        while j + 1 < hull.len() {
            let a = hull[j];
            let b = hull[j + 1];
            if y * xs[b] - vs[b] > y * xs[a] - vs[a] {
                j += 1;
            } else {
                break;
            }
        }
        let i = hull[j];
        out[k] = y * xs[i] - vs[i];
        if let Some(a) = arg.as_deref_mut() {
            a[k] = i as u32;
        }
    }
}

/// Result of an n-D transform. `argmax` holds, per output node, the flat
/// input index of a maximizer (present when requested).
pub struct TensorConj {
    pub values: Vec<f64>,
    pub argmax: Option<Vec<u32>>,
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for d in (0..shape.len().saturating_sub(1)).rev() {
        s[d] = s[d + 1] * shape[d + 1];
    }
    s
}

/// Discrete conjugate of `values` sampled on the tensor product of
/// `in_axes`, evaluated on the tensor product of `out_axes` (row-major,
/// last axis fastest). +∞ entries are ignored; output entries are −∞ only
/// when the input is identically +∞.
pub fn conjugate_tensor(
    in_axes: &[Vec<f64>],
    values: &[f64],
    out_axes: &[Vec<f64>],
    track: bool,
) -> TensorConj {
    let dim = in_axes.len();
    assert_eq!(dim, out_axes.len());
    let mut shape: Vec<usize> = in_axes.iter().map(Vec::len).collect();
    assert_eq!(values.len(), shape.iter().product::<usize>());
    let mut cur = values.to_vec();
    let mut args: Vec<Vec<u32>> = vec![Vec::new(); dim];

    for d in (0..dim).rev() {
        let n_in = shape[d];
        let n_out = out_axes[d].len();
        let st = strides(&shape);
        let mut new_shape = shape.clone();
        new_shape[d] = n_out;
        let new_st = strides(&new_shape);
        let n_lines = cur.len() / n_in;
        let last = d == 0;

        // Lines are enumerated by (outer index over axes < d, inner over axes > d).
        let inner = st[d];
        let lines: Vec<(Vec<f64>, Vec<u32>)> = (0..n_lines)
            .into_par_iter()
            .map(|l| {
                let outer = l / inner;
                let inn = l % inner;
                let base = outer * n_in * inner + inn;
                let line: Vec<f64> = (0..n_in).map(|i| cur[base + i * inner]).collect();
                let mut o = vec![0.0; n_out];
                let mut a = if track { vec![0u32; n_out] } else { Vec::new() };
                conj_1d(
                    &in_axes[d],
                    &line,
                    &out_axes[d],
                    &mut o,
                    if track { Some(&mut a) } else { None },
                );
                if !last {
                    for v in &mut o {
                        *v = -*v;
                    }
                }
                (o, a)
            })
            .collect();

        let mut next = vec![0.0; cur.len() / n_in * n_out];
        let mut arg_d = if track {
            vec![0u32; next.len()]
        } else {
            Vec::new()
        };
        let new_inner = new_st[d];
        debug_assert_eq!(new_inner, inner);
        for (l, (o, a)) in lines.into_iter().enumerate() {
            let outer = l / inner;
            let inn = l % inner;
            let base = outer * n_out * inner + inn;
            for k in 0..n_out {
                next[base + k * inner] = o[k];
                if track {
                    arg_d[base + k * inner] = a[k];
                }
            }
        }
        cur = next;
        shape = new_shape;
        args[d] = arg_d;
    }

    let argmax = if track {
        let in_shape: Vec<usize> = in_axes.iter().map(Vec::len).collect();
        let out_shape: Vec<usize> = out_axes.iter().map(Vec::len).collect();
        let total = cur.len();
        let flat: Vec<u32> = (0..total)
            .into_par_iter()
            .map(|f| reconstruct(f, &in_shape, &out_shape, &args))
            .collect();
        Some(flat)
    } else {
        None
    };
    TensorConj {
        values: cur,
        argmax,
    }
}

/// Recover the input multi-index of the maximizer for output node `flat`.
/// Pass d's argmax array is indexed by (x₀..x_{d−1}, y_d..y_{n−1}).
fn reconstruct(flat: usize, in_shape: &[usize], out_shape: &[usize], args: &[Vec<u32>]) -> u32 {
    let dim = in_shape.len();
    let mut y = [0usize; 3];
    let mut rem = flat;
    for d in (0..dim).rev() {
        y[d] = rem % out_shape[d];
        rem /= out_shape[d];
    }
    let mut x = [0usize; 3];
    for d in 0..dim {
        // Mixed index: axes < d from x, axes ≥ d from y.
        let mut idx = 0usize;
        for e in 0..dim {
            let (v, n) = if e < d {
                (x[e], in_shape[e])
            } else {
                (y[e], out_shape[e])
            };
            idx = idx * n + v;
        }
        let a = args[d][idx];
        if a == u32::MAX {
            return u32::MAX;
        }
        x[d] = a as usize;
    }
    let mut out = 0usize;
    for d in 0..dim {
        out = out * in_shape[d] + x[d];
    }
    out as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(in_axes: &[Vec<f64>], values: &[f64], y: &[f64]) -> (f64, usize) {
        let dim = in_axes.len();
        let shape: Vec<usize> = in_axes.iter().map(Vec::len).collect();
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for (f, v) in values.iter().enumerate() {
            if !v.is_finite() {
                continue;
            }
            let mut rem = f;
            let mut s = 0.0;
            for d in (0..dim).rev() {
                s += in_axes[d][rem % shape[d]] * y[d];
                rem /= shape[d];
            }
            if s - v > best.0 {
                best = (s - v, f);
            }
        }
        best
    }

    #[test]
    fn one_dimensional_matches_brute_force() {
        let xs: Vec<f64> = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
        let vs: Vec<f64> = xs
            .iter()
            .map(|x| (x * x - 1.0f64).abs() + 0.3 * x)
            .collect();
        let ys: Vec<f64> = (0..31).map(|i| -3.0 + 0.2 * i as f64).collect();
        let mut out = vec![0.0; ys.len()];
        let mut arg = vec![0u32; ys.len()];
        conj_1d(&xs, &vs, &ys, &mut out, Some(&mut arg));
        for (k, y) in ys.iter().enumerate() {
            let b = xs
                .iter()
                .zip(&vs)
                .map(|(x, v)| x * y - v)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((out[k] - b).abs() < 1e-12);
            let i = arg[k] as usize;
            assert!((xs[i] * y - vs[i] - b).abs() < 1e-12);
        }
    }

    #[test]
    fn infinite_entries_are_skipped() {
        let xs = vec![-1.0, 0.0, 1.0];
        let vs = vec![f64::INFINITY, 0.0, f64::INFINITY];
        let mut out = vec![0.0; 2];
        conj_1d(&xs, &vs, &[-5.0, 5.0], &mut out, None);
        assert_eq!(out, vec![0.0, 0.0]);
        let vs = vec![f64::INFINITY; 3];
        conj_1d(&xs, &vs, &[-5.0, 5.0], &mut out, None);
        assert!(out.iter().all(|v| *v == f64::NEG_INFINITY));
    }

    #[test]
    fn tensor_transform_matches_brute_force_in_2d_and_3d() {
        for dim in [2usize, 3] {
            let n: usize = if dim == 2 { 9 } else { 5 };
            let ax: Vec<f64> = (0..n)
                .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
                .collect();
            let m = 7;
            let ay: Vec<f64> = (0..m)
                .map(|i| -2.0 + 4.0 * i as f64 / (m - 1) as f64)
                .collect();
            let in_axes = vec![ax.clone(); dim];
            let out_axes = vec![ay.clone(); dim];
            let total = n.pow(dim as u32);
            let values: Vec<f64> = (0..total)
                .map(|f| {
                    let mut rem = f;
                    let mut s = 0.0;
                    for d in (0..dim).rev() {
                        let x = ax[rem % n];
                        rem /= n;
                        s += (d as f64 + 1.0) * x * x + 0.2 * x;
                    }
                    if f % 11 == 3 {
                        f64::INFINITY
                    } else {
                        s
                    }
                })
                .collect();
            let r = conjugate_tensor(&in_axes, &values, &out_axes, true);
            let args = r.argmax.unwrap();
            for (g, v) in r.values.iter().enumerate() {
                let mut rem = g;
                let mut y = vec![0.0; dim];
                for d in (0..dim).rev() {
                    y[d] = ay[rem % m];
                    rem /= m;
                }
                let (b, _) = brute(&in_axes, &values, &y);
                assert!((v - b).abs() < 1e-12, "{v} vs {b}");
                // The recorded maximizer attains the value.
                let a = args[g] as usize;
                let mut rem = a;
                let mut s = 0.0;
                for d in (0..dim).rev() {
                    s += ax[rem % n] * y[d];
                    rem /= n;
                }
                assert!((s - values[a] - b).abs() < 1e-12);
            }
        }
    }
}
