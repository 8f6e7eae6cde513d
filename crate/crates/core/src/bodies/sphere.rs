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

//! Quadrature rules on the unit sphere S^{n−1}.

use std::f64::consts::PI;

use crate::numerics::gl01;

/// Directions with weights; weights sum to |S^{n−1}|.
#[derive(Clone, Debug)]
pub struct AngularRule {
    pub dim: usize,
    pub dirs: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl AngularRule {
    pub fn two_point() -> AngularRule {
        AngularRule {
            dim: 1,
            dirs: vec![vec![1.0], vec![-1.0]],
            weights: vec![1.0, 1.0],
        }
    }

    /// Midpoint rule with `m` equal arcs. Even `m` keeps the node set closed
    /// under u ↦ −u.
    pub fn uniform_2d(m: usize) -> AngularRule {
        let w = 2.0 * PI / m as f64;
        let dirs = (0..m)
            .map(|k| {
                let t = w * (k as f64 + 0.5);
                vec![t.cos(), t.sin()]
            })
            .collect();
        AngularRule {
            dim: 2,
            dirs,
            weights: vec![w; m],
        }
    }

    /// Gauss–Legendre on each arc between consecutive breakpoints, with node
    /// counts proportional to arc length (about `total` nodes overall).
    pub fn arcs_2d(breaks: &[f64], total: usize) -> AngularRule {
        let mut b: Vec<f64> = breaks.iter().map(|t| t.rem_euclid(2.0 * PI)).collect();
        b.sort_by(f64::total_cmp);
        b.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        if b.is_empty() {
            return AngularRule::uniform_2d(total);
        }
        let mut dirs = Vec::new();
        let mut weights = Vec::new();
        for i in 0..b.len() {
            let lo = b[i];
            let hi = if i + 1 < b.len() {
                b[i + 1]
            } else {
                b[0] + 2.0 * PI
            };
            let len = hi - lo;
            if len <= 0.0 {
                continue;
            }
            let panels = ((len / (2.0 * PI) * total as f64) / 8.0).ceil().max(1.0) as usize;
            let (gx, gw) = gl01(8);
            for p in 0..panels {
                let a = lo + len * p as f64 / panels as f64;
                let h = len / panels as f64;
                for (x, w) in gx.iter().zip(gw) {
                    let t = a + h * x;
                    dirs.push(vec![t.cos(), t.sin()]);
                    weights.push(w * h);
                }
            }
        }
        AngularRule {
            dim: 2,
            dirs,
            weights,
        }
    }

    /// Product rule: Gauss–Legendre in z = cos θ times uniform azimuth.
    pub fn product_3d(nz: usize, nphi: usize) -> AngularRule {
        let (gx, gw) = crate::numerics::gauss_legendre(nz);
        let mut dirs = Vec::with_capacity(nz * nphi);
        let mut weights = Vec::with_capacity(nz * nphi);
        let dphi = 2.0 * PI / nphi as f64;
        for (z, wz) in gx.iter().zip(&gw) {
            let s = (1.0 - z * z).max(0.0).sqrt();
            for k in 0..nphi {
                let phi = dphi * (k as f64 + 0.5);
                dirs.push(vec![s * phi.cos(), s * phi.sin(), *z]);
                weights.push(wz * dphi);
            }
        }
        AngularRule {
            dim: 3,
            dirs,
            weights,
        }
    }

    /// Default rule used for balls and smooth integrands.
    pub fn default_for(dim: usize) -> AngularRule {
        match dim {
            1 => AngularRule::two_point(),
            2 => AngularRule::uniform_2d(4096),
            _ => AngularRule::product_3d(128, 256),
        }
    }

    /// Coarser default for volume (polar) quadrature.
    pub fn volume_default(dim: usize, resolution: usize) -> AngularRule {
        match dim {
            1 => AngularRule::two_point(),
            2 => AngularRule::uniform_2d(resolution.max(16)),
            _ => {
                let nz = (resolution / 8).max(8);
                AngularRule::product_3d(nz, 2 * nz)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sphere_area;

    #[test]
    fn weights_sum_to_sphere_area() {
        for rule in [
            AngularRule::two_point(),
            AngularRule::uniform_2d(64),
            AngularRule::arcs_2d(&[0.3, 2.0, 4.0], 100),
            AngularRule::product_3d(16, 32),
        ] {
            let s: f64 = rule.weights.iter().sum();
            assert!((s - sphere_area(rule.dim)).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn product_rule_integrates_z_squared() {
        let r = AngularRule::product_3d(8, 16);
        let s: f64 = r
            .dirs
            .iter()
            .zip(&r.weights)
            .map(|(u, w)| w * u[2] * u[2])
            .sum();
        assert!((s - 4.0 * PI / 3.0).abs() < 1e-12);
    }
}
