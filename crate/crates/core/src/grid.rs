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

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Regular tensor grid on the box [−R, R]ⁿ with N nodes per axis.
///
/// N is odd so that the origin is node `(N−1)/2` on every axis. Node
/// coordinates are computed as `(i − m)·h`, which makes the node set exactly
/// symmetric under x ↦ −x in floating point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub radius: f64,
    pub nodes: usize,
}

impl GridSpec {
    pub fn new(dim: usize, radius: f64, nodes: usize) -> Result<GridSpec> {
        if !(1..=3).contains(&dim) {
            return invalid(format!("grid dimension must be 1, 2 or 3 (got {dim})"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return invalid(format!("grid radius must be positive (got {radius})"));
        }
        if nodes < 3 || nodes.is_multiple_of(2) {
            return invalid(format!("nodes per axis must be odd and >= 3 (got {nodes})"));
        }
        Ok(GridSpec { dim, radius, nodes })
    }

    pub fn h(&self) -> f64 {
        2.0 * self.radius / (self.nodes - 1) as f64
    }

    /// Index of the origin along each axis.
    pub fn mid(&self) -> usize {
        (self.nodes - 1) / 2
    }

    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - self.mid() as f64) * self.h()
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.coord(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.nodes.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.nodes; self.dim]
    }

    /// Row-major multi-index (last axis fastest).
    pub fn unflatten(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for d in (0..self.dim).rev() {
            idx[d] = flat % self.nodes;
            flat /= self.nodes;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx[..self.dim]
            .iter()
            .fold(0, |acc, &i| acc * self.nodes + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let idx = self.unflatten(flat);
        (0..self.dim).map(|d| self.coord(idx[d])).collect()
    }

    /// Flat index of the node −x.
    pub fn mirror(&self, flat: usize) -> usize {
        let idx = self.unflatten(flat);
        let mut m = [0usize; 3];
        for d in 0..self.dim {
            m[d] = self.nodes - 1 - idx[d];
        }
        self.flatten(&m)
    }

    pub fn origin_index(&self) -> usize {
        self.flatten(&[self.mid(); 3])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = 1e-12 * self.radius;
        x.iter().all(|&v| v.abs() <= self.radius + tol)
    }

    /// Same box with `factor`-times finer spacing.
    pub fn refined(&self, factor: usize) -> GridSpec {
        GridSpec {
            nodes: (self.nodes - 1) * factor + 1,
            ..*self
        }
    }
}

/// Locate `x` in a sorted, uniformly spaced axis: returns the cell index
/// `i` (so x ∈ [a_i, a_{i+1}]) and the local coordinate in [0, 1].
pub(crate) fn locate(x: f64, lo: f64, h: f64, n_nodes: usize) -> (usize, f64) {
    let s = (x - lo) / h;
    let max_cell = n_nodes - 2;
    let i = if s <= 0.0 {
        0
    } else {
        (s.floor() as usize).min(max_cell)
    };
    let t = (s - i as f64).clamp(0.0, 1.0);
    (i, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_a_node_and_axis_is_symmetric() {
        let g = GridSpec::new(2, 4.0, 257).unwrap();
        assert_eq!(g.coord(g.mid()), 0.0);
        let a = g.axis();
        for i in 0..a.len() {
            assert_eq!(a[i], -a[a.len() - 1 - i]);
        }
        assert_eq!(g.point(g.origin_index()), vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_even_node_counts() {
        assert!(GridSpec::new(1, 1.0, 4).is_err());
        assert!(GridSpec::new(4, 1.0, 5).is_err());
        assert!(GridSpec::new(1, 0.0, 5).is_err());
    }

    #[test]
    fn flatten_roundtrip_and_mirror() {
        let g = GridSpec::new(3, 1.0, 5).unwrap();
        for f in 0..g.len() {
            assert_eq!(g.flatten(&g.unflatten(f)), f);
            let p = g.point(f);
            let q = g.point(g.mirror(f));
            for d in 0..3 {
                assert_eq!(p[d], -q[d]);
            }
        }
    }
}
