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

//! Spherical measures and the facet quadrature behind C̃_q and C̃_{p,q}.

use serde::{Deserialize, Serialize};

use super::{AngularRule, ConvexBody, Facet, Shape};
use crate::error::{invalid, Error, Result};
use crate::numerics::{dot, integrate_adaptive, norm, pairwise_sum};

const FACET_TOL: f64 = 1e-12;

/// Whether the atoms are genuine point masses (polytope facets) or samples
/// of a density on an angular quadrature grid (balls).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureKind {
    Atomic,
    Density,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalMeasure {
    pub dim: usize,
    pub dirs: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub kind: MeasureKind,
}

impl SphericalMeasure {
    pub fn empty(dim: usize) -> SphericalMeasure {
        SphericalMeasure {
            dim,
            dirs: Vec::new(),
            weights: Vec::new(),
            kind: MeasureKind::Atomic,
        }
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, zeta: F) -> f64 {
        let terms: Vec<f64> = self
            .dirs
            .iter()
            .zip(&self.weights)
            .map(|(u, w)| w * zeta(u))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// ∫_F |x|^{q−n} g(x) dH^{n−1} over one facet of a polytope when `q` is
/// given, or ∫_F g(x) dH^{n−1} when it is `None`.
///
/// The integrand peaks at the foot point of the origin on the facet's plane,
/// so the facet is decomposed around the nearest facet point to it: split
/// segments in 2-D, a triangle fan with polar coordinates in 3-D. A facet
/// through the origin is integrable only for q > 1, where the substitution
/// v = r^{q−1} removes the singularity.
pub fn facet_integral(
    dim: usize,
    vertices: &[Vec<f64>],
    facet: &Facet,
    q: Option<f64>,
    g: &dyn Fn(&[f64]) -> f64,
) -> Result<f64> {
    let scale = facet
        .verts
        .iter()
        .map(|&i| norm(&vertices[i]))
        .fold(0.0, f64::max)
        .max(1e-300);
    let d = facet.offset;
    let through_origin = d.abs() <= FACET_TOL * scale;
    if let Some(q) = q {
        if through_origin && q <= 1.0 {
            return Err(Error::NonIntegrable(q));
        }
    }
    let n = dim as f64;
    let weight = |x: &[f64]| match q {
        Some(q) => norm(x).powf(q - n),
        None => 1.0,
    };
    match dim {
        1 => {
            let x = &vertices[facet.verts[0]];
            if through_origin {
                // |x|^{q−1} at x = 0 vanishes for q > 1.
                return Ok(if q.is_some() { 0.0 } else { g(x) });
            }
            Ok(weight(x) * g(x))
        }
        2 => {
            let a = &vertices[facet.verts[0]];
            let b = &vertices[facet.verts[1]];
            let len = norm(&[b[0] - a[0], b[1] - a[1]]);
            let e = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
            let sa = dot(a, &e);
            let sb = dot(b, &e);
            let foot = [a[0] - sa * e[0], a[1] - sa * e[1]];
            let at = |s: f64| [foot[0] + s * e[0], foot[1] + s * e[1]];
            let mut pieces = Vec::new();
            if sa < 0.0 && sb > 0.0 {
                pieces.push((0.0, -sa, -1.0));
                pieces.push((0.0, sb, 1.0));
            } else if sb <= 0.0 {
                pieces.push((-sb, -sa, -1.0));
            } else {
                pieces.push((sa, sb, 1.0));
            }
            let mut total = 0.0;
            for (lo, hi, sign) in pieces {
                if hi <= lo {
                    continue;
                }
                total += match q {
                    Some(q) if through_origin && lo == 0.0 => {
                        // ∫_0^S s^{q−2} g ds = (1/(q−1)) ∫_0^{S^{q−1}} g(v^{1/(q−1)}) dv
                        let p = q - 1.0;
                        integrate_adaptive(
                            |v| g(&at(sign * v.powf(1.0 / p))),
                            0.0,
                            hi.powf(p),
                            1e-12,
                        ) / p
                    }
                    _ => integrate_adaptive(
                        |s| {
                            let x = at(sign * s);
                            weight(&x) * g(&x)
                        },
                        lo,
                        hi,
                        1e-12,
                    ),
                };
            }
            Ok(total)
        }
        3 => facet_integral_3d(vertices, facet, q, g, through_origin, scale),
        _ => invalid("facet integral dimension"),
    }
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn facet_integral_3d(
    vertices: &[Vec<f64>],
    facet: &Facet,
    q: Option<f64>,
    g: &dyn Fn(&[f64]) -> f64,
    through_origin: bool,
    scale: f64,
) -> Result<f64> {
    let nrm = &facet.normal;
    let helper = if nrm[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1 = cross(nrm, &helper);
    let l1 = norm(&e1);
    let e1 = [e1[0] / l1, e1[1] / l1, e1[2] / l1];
    let e2 = cross(nrm, &e1);
    let to2 = |x: &[f64]| [dot(&e1, x), dot(&e2, x)];
    let poly: Vec<[f64; 2]> = facet.verts.iter().map(|&i| to2(&vertices[i])).collect();
    let m = poly.len();
    // Foot of the origin in plane coordinates is (0, 0) up to the normal offset.
    let foot = [0.0, 0.0];
    let inside = (0..m).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        (b[0] - a[0]) * (foot[1] - a[1]) - (b[1] - a[1]) * (foot[0] - a[0])
            >= -1e-14 * scale * scale
    });
    let centre = if inside {
        foot
    } else {
        let mut best = (f64::INFINITY, foot);
        for i in 0..m {
            let a = poly[i];
            let b = poly[(i + 1) % m];
            let ab = [b[0] - a[0], b[1] - a[1]];
            let t = ((foot[0] - a[0]) * ab[0] + (foot[1] - a[1]) * ab[1])
                / (ab[0] * ab[0] + ab[1] * ab[1]);
            let t = t.clamp(0.0, 1.0);
            let p = [a[0] + t * ab[0], a[1] + t * ab[1]];
            let dd = (p[0] - foot[0]).hypot(p[1] - foot[1]);
            if dd < best.0 {
                best = (dd, p);
            }
        }
        best.1
    };
    let d = facet.offset;
    let to3 = |p: [f64; 2]| -> [f64; 3] {
        [
            d * nrm[0] + p[0] * e1[0] + p[1] * e2[0],
            d * nrm[1] + p[0] * e1[1] + p[1] * e2[1],
            d * nrm[2] + p[0] * e1[2] + p[1] * e2[2],
        ]
    };
    let singular = through_origin && inside && q.is_some();
    let n = 3.0;
    let mut total = 0.0;
    for i in 0..m {
        let a = [poly[i][0] - centre[0], poly[i][1] - centre[1]];
        let b = [
            poly[(i + 1) % m][0] - centre[0],
            poly[(i + 1) % m][1] - centre[1],
        ];
        let area2 = a[0] * b[1] - a[1] * b[0];
        let edge = (b[0] - a[0]).hypot(b[1] - a[1]);
        if area2 <= 1e-14 * scale * scale || edge <= 0.0 {
            continue;
        }
        let height = area2 / edge;
        // Direction of the perpendicular from the centre to the edge line.
        let theta_e = (-(b[0] - a[0])).atan2(b[1] - a[1]);
        let ta = a[1].atan2(a[0]);
        let mut tb = b[1].atan2(b[0]);
        while tb < ta {
            tb += 2.0 * std::f64::consts::PI;
        }
        let radial = |theta: f64| -> f64 {
            let rmax = height / (theta - theta_e).cos();
            let (c, s) = (theta.cos(), theta.sin());
            let point = |r: f64| to3([centre[0] + r * c, centre[1] + r * s]);
            if singular {
                let p = q.unwrap() - 1.0;
                integrate_adaptive(|v| g(&point(v.powf(1.0 / p))), 0.0, rmax.powf(p), 1e-12) / p
            } else {
                integrate_adaptive(
                    |r| {
                        let x = point(r);
                        let w = match q {
                            Some(q) => norm(&x).powf(q - n),
                            None => 1.0,
                        };
                        w * g(&x) * r
                    },
                    0.0,
                    rmax,
                    1e-12,
                )
            }
        };
        total += integrate_adaptive(radial, ta, tb, 1e-10);
    }
    Ok(total)
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        invalid(format!("q must be positive (got {q})"))
    }
}

fn check_origin_in(k: &ConvexBody) -> Result<()> {
    if let Shape::Polytope(p) = k.shape() {
        let scale = k.bounding_radius();
        if p.facets.iter().any(|f| f.offset < -FACET_TOL * scale) {
            return Err(Error::OriginNotInterior);
        }
    }
    Ok(())
}

/// C̃_q(K, ·): atoms (ν_i, d_i ∫_{F_i} |x|^{q−n}) for polytopes, the density
/// r^q du sampled on the default angular rule for balls.
pub fn dual_curvature_measure(k: &ConvexBody, q: f64) -> Result<SphericalMeasure> {
    check_q(q)?;
    check_origin_in(k)?;
    let dim = k.dim();
    match k.shape() {
        Shape::Ball { r } => {
            let rule = AngularRule::default_for(dim);
            let c = r.powf(q);
            Ok(SphericalMeasure {
                dim,
                weights: rule.weights.iter().map(|w| w * c).collect(),
                dirs: rule.dirs,
                kind: MeasureKind::Density,
            })
        }
        Shape::Polytope(p) => {
            let scale = k.bounding_radius();
            let mut weights = Vec::with_capacity(p.facets.len());
            for f in &p.facets {
                let i = facet_integral(dim, &p.vertices, f, Some(q), &|_| 1.0)?;
                let d = if f.offset.abs() <= FACET_TOL * scale {
                    0.0
                } else {
                    f.offset
                };
                weights.push(d * i);
            }
            Ok(SphericalMeasure {
                dim,
                dirs: p.facets.iter().map(|f| f.normal.clone()).collect(),
                weights,
                kind: MeasureKind::Atomic,
            })
        }
    }
}

/// C̃_{p,q}(K, ·) = h_K^{−p} dC̃_q(K, ·).
pub fn pq_dual_curvature(k: &ConvexBody, p: f64, q: f64) -> Result<SphericalMeasure> {
    if !p.is_finite() {
        return invalid("p must be finite");
    }
    let mut m = dual_curvature_measure(k, q)?;
    if p == 0.0 {
        return Ok(m);
    }
    if !k.origin_interior() {
        return Err(Error::OriginNotInterior);
    }
    match k.shape() {
        Shape::Ball { r } => {
            let c = r.powf(-p);
            m.weights.iter_mut().for_each(|w| *w *= c);
        }
        Shape::Polytope(poly) => {
            for (w, f) in m.weights.iter_mut().zip(&poly.facets) {
                *w *= f.offset.powf(-p);
            }
        }
    }
    Ok(m)
}

/// Ṽ_{1,q}(K, L) = ∫ h_L dC̃_{1,q}(K, ·).
pub fn dual_mixed(k: &ConvexBody, l: &ConvexBody, q: f64) -> Result<f64> {
    if k.dim() != l.dim() {
        return invalid("bodies of different dimension");
    }
    let m = pq_dual_curvature(k, 1.0, q)?;
    Ok(m.integrate(|u| l.support(u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn square_facet_atoms() {
        let k = ConvexBody::cube(2, 1.0).unwrap();
        let m2 = dual_curvature_measure(&k, 2.0).unwrap();
        assert_eq!(m2.len(), 4);
        for w in &m2.weights {
            assert!((w - 2.0).abs() < 1e-12);
        }
        let m1 = dual_curvature_measure(&k, 1.0).unwrap();
        for w in &m1.weights {
            assert!((w - 2.0 * 1f64.asinh()).abs() < 1e-12, "{w}");
        }
    }

    #[test]
    fn ball_pq_total() {
        let b = ConvexBody::ball(2, 2.0).unwrap();
        let m = pq_dual_curvature(&b, 1.0, 1.0).unwrap();
        assert!((m.total() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn cube_mass_identity_3d() {
        let k = ConvexBody::cube(3, 1.0).unwrap();
        for &q in &[1.0, 2.0, 3.0] {
            let total = dual_curvature_measure(&k, q).unwrap().total();
            // q·Ṽ_q(cube) for q = 3 is 3·8.
            if q == 3.0 {
                assert!((total - 24.0).abs() < 1e-8, "{total}");
            }
            assert!(total > 0.0);
        }
    }

    #[test]
    fn facet_through_origin() {
        let k = ConvexBody::from_vertices(2, &[vec![0.0, -1.0], vec![0.0, 1.0], vec![1.0, 0.0]])
            .unwrap();
        assert_eq!(
            dual_curvature_measure(&k, 0.5),
            Err(Error::NonIntegrable(0.5))
        );
        // For q > 1 the facet on the y-axis carries no C̃_q mass.
        let m = dual_curvature_measure(&k, 2.0).unwrap();
        let on_axis = m
            .dirs
            .iter()
            .position(|u| (u[0] + 1.0).abs() < 1e-12)
            .unwrap();
        assert_eq!(m.weights[on_axis], 0.0);
        let p = k.polytope().unwrap();
        let f = &p
            .facets
            .iter()
            .find(|f| (f.normal[0] + 1.0).abs() < 1e-12)
            .unwrap();
        let v = facet_integral(2, &p.vertices, f, Some(1.5), &|_| 1.0).unwrap();
        // ∫_{−1}^{1} |s|^{−1/2} ds = 4
        assert!((v - 4.0).abs() < 1e-10, "{v}");
    }
}
