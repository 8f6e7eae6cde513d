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

//! Convex bodies: balls centred at the origin and polytopes carrying both
//! vertex and halfspace representations.

pub mod hull;
pub mod measure;
pub mod sphere;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{dot, integrate_adaptive, norm, sphere_area};

pub use measure::{
    dual_curvature_measure, dual_mixed, facet_integral, pq_dual_curvature, SphericalMeasure,
};
pub use sphere::AngularRule;

/// A facet ⟨normal, x⟩ ≤ offset with unit outward normal; `verts` index the
/// polytope's vertex list (ordered counter-clockwise from outside in 3-D).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub verts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Facet>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Ball { r: f64 },
    Polytope(Polytope),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexBody {
    dim: usize,
    shape: Shape,
    origin_interior: bool,
    symmetric: bool,
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=3).contains(&dim) {
        Ok(())
    } else {
        invalid(format!("dimension must be 1, 2 or 3 (got {dim})"))
    }
}

impl ConvexBody {
    pub fn ball(dim: usize, r: f64) -> Result<ConvexBody> {
        check_dim(dim)?;
        if !(r.is_finite() && r > 0.0) {
            return invalid(format!("ball radius must be positive (got {r})"));
        }
        Ok(ConvexBody {
            dim,
            shape: Shape::Ball { r },
            origin_interior: true,
            symmetric: true,
        })
    }

    /// Convex hull of a point set.
    pub fn from_vertices(dim: usize, points: &[Vec<f64>]) -> Result<ConvexBody> {
        check_dim(dim)?;
        if points
            .iter()
            .any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite()))
        {
            return invalid("vertex with wrong dimension or non-finite coordinate");
        }
        let h = hull::hull(dim, points)?;
        let poly = Polytope {
            vertices: h.vertices,
            facets: h
                .facets
                .into_iter()
                .map(|f| Facet {
                    normal: f.normal,
                    offset: f.offset,
                    verts: f.verts,
                })
                .collect(),
        };
        Ok(ConvexBody::from_polytope(dim, poly))
    }

    /// Bounded intersection of halfspaces ⟨a_i, x⟩ ≤ b_i.
    pub fn from_halfspaces(dim: usize, halfspaces: &[(Vec<f64>, f64)]) -> Result<ConvexBody> {
        check_dim(dim)?;
        let v = hull::enumerate_vertices(dim, halfspaces)?;
        ConvexBody::from_vertices(dim, &v)
    }

    fn from_polytope(dim: usize, poly: Polytope) -> ConvexBody {
        let scale = poly.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max);
        let origin_interior = poly.facets.iter().all(|f| f.offset > 1e-12 * scale);
        let symmetric = poly.vertices.iter().all(|v| {
            poly.vertices.iter().any(|w| {
                v.iter()
                    .zip(w)
                    .map(|(a, b)| (a + b) * (a + b))
                    .sum::<f64>()
                    .sqrt()
                    <= 1e-9 * scale.max(1.0)
            })
        });
        ConvexBody {
            dim,
            shape: Shape::Polytope(poly),
            origin_interior,
            symmetric,
        }
    }

    /// The cube [−a, a]ⁿ.
    pub fn cube(dim: usize, a: f64) -> Result<ConvexBody> {
        check_dim(dim)?;
        let pts: Vec<Vec<f64>> = (0..1usize << dim)
            .map(|m| {
                (0..dim)
                    .map(|d| if m >> d & 1 == 1 { a } else { -a })
                    .collect()
            })
            .collect();
        ConvexBody::from_vertices(dim, &pts)
    }

    pub fn interval(lo: f64, hi: f64) -> Result<ConvexBody> {
        ConvexBody::from_vertices(1, &[vec![lo], vec![hi]])
    }

    /// Polytope with vertices on the sphere of radius `r`, circumscribing
    /// B(r) in 2-D; used where a ball must be combined with a polytope.
    pub fn ball_polytope(dim: usize, r: f64, count: usize) -> Result<ConvexBody> {
        match dim {
            1 => ConvexBody::interval(-r, r),
            2 => {
                let rr = r / (PI / count as f64).cos();
                let pts: Vec<Vec<f64>> = (0..count)
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / count as f64;
                        vec![rr * t.cos(), rr * t.sin()]
                    })
                    .collect();
                ConvexBody::from_vertices(2, &pts)
            }
            _ => {
                let golden = PI * (3.0 - 5f64.sqrt());
                let mut pts = Vec::with_capacity(2 * count);
                for k in 0..count {
                    let z = 1.0 - (k as f64 + 0.5) * 2.0 / count as f64;
                    let s = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    let p = vec![r * s * t.cos(), r * s * t.sin(), r * z];
                    pts.push(p.iter().map(|v| -v).collect());
                    pts.push(p);
                }
                ConvexBody::from_vertices(3, &pts)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn origin_interior(&self) -> bool {
        self.origin_interior
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn ball_radius(&self) -> Option<f64> {
        match self.shape {
            Shape::Ball { r } => Some(r),
            _ => None,
        }
    }

    pub fn polytope(&self) -> Option<&Polytope> {
        match &self.shape {
            Shape::Polytope(p) => Some(p),
            _ => None,
        }
    }

    /// h_K(y) = max{⟨x, y⟩ : x ∈ K}.
    pub fn support(&self, y: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { r } => r * norm(y),
            Shape::Polytope(p) => p
                .vertices
                .iter()
                .map(|v| dot(v, y))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// ρ_K(u) = max{λ ≥ 0 : λu ∈ K} for u ≠ 0.
    pub fn radial(&self, u: &[f64]) -> Result<f64> {
        if !self.origin_interior {
            return Err(Error::OriginNotInterior);
        }
        Ok(self.radial_unchecked(u))
    }

    pub(crate) fn radial_unchecked(&self, u: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { r } => r / norm(u),
            Shape::Polytope(p) => {
                let mut best = f64::INFINITY;
                for f in &p.facets {
                    let a = dot(&f.normal, u);
                    if a > 0.0 {
                        best = best.min(f.offset / a);
                    }
                }
                best
            }
        }
    }

    /// Minkowski gauge ‖x‖_K = 1/ρ_K(x) (0 at the origin).
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        if !self.origin_interior {
            return Err(Error::OriginNotInterior);
        }
        Ok(match &self.shape {
            Shape::Ball { r } => norm(x) / r,
            Shape::Polytope(p) => p
                .facets
                .iter()
                .map(|f| dot(&f.normal, x) / f.offset)
                .fold(0.0, f64::max),
        })
    }

    /// Largest constraint violation: ≤ 0 exactly when x ∈ K. For polytopes it
    /// is a lower bound on the distance to K.
    pub fn excess(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { r } => norm(x) - r,
            Shape::Polytope(p) => p
                .facets
                .iter()
                .map(|f| dot(&f.normal, x) - f.offset)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.excess(x) <= tol
    }

    /// K* = {y : ⟨x, y⟩ ≤ 1 for all x ∈ K}.
    pub fn polar(&self) -> Result<ConvexBody> {
        if !self.origin_interior {
            return Err(Error::OriginNotInterior);
        }
        match &self.shape {
            Shape::Ball { r } => ConvexBody::ball(self.dim, 1.0 / r),
            Shape::Polytope(p) => {
                let pts: Vec<Vec<f64>> = p
                    .facets
                    .iter()
                    .map(|f| f.normal.iter().map(|a| a / f.offset).collect())
                    .collect();
                ConvexBody::from_vertices(self.dim, &pts)
            }
        }
    }

    pub fn scaled(&self, lambda: f64) -> Result<ConvexBody> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return invalid(format!("scale factor must be positive (got {lambda})"));
        }
        match &self.shape {
            Shape::Ball { r } => ConvexBody::ball(self.dim, r * lambda),
            Shape::Polytope(p) => {
                let poly = Polytope {
                    vertices: p
                        .vertices
                        .iter()
                        .map(|v| v.iter().map(|x| x * lambda).collect())
                        .collect(),
                    facets: p
                        .facets
                        .iter()
                        .map(|f| Facet {
                            normal: f.normal.clone(),
                            offset: f.offset * lambda,
                            verts: f.verts.clone(),
                        })
                        .collect(),
                };
                Ok(ConvexBody {
                    shape: Shape::Polytope(poly),
                    ..self.clone()
                })
            }
        }
    }

    /// K + t·L. A ball added to a polytope is replaced by a circumscribed
    /// polygon (2-D, 512 vertices) or a 1200-point spherical polytope (3-D).
    pub fn minkowski_sum(&self, t: f64, other: &ConvexBody) -> Result<ConvexBody> {
        if self.dim != other.dim {
            return invalid("Minkowski sum of bodies of different dimension");
        }
        if !(t.is_finite() && t >= 0.0) {
            return invalid(format!(
                "Minkowski coefficient must be nonnegative (got {t})"
            ));
        }
        if t == 0.0 {
            return Ok(self.clone());
        }
        match (&self.shape, &other.shape) {
            (Shape::Ball { r: a }, Shape::Ball { r: b }) => ConvexBody::ball(self.dim, a + t * b),
            (Shape::Polytope(p), Shape::Polytope(q)) => {
                let mut pts = Vec::with_capacity(p.vertices.len() * q.vertices.len());
                for v in &p.vertices {
                    for w in &q.vertices {
                        pts.push(v.iter().zip(w).map(|(a, b)| a + t * b).collect());
                    }
                }
                ConvexBody::from_vertices(self.dim, &pts)
            }
            (Shape::Ball { r }, Shape::Polytope(_)) => {
                ConvexBody::ball_polytope(self.dim, *r, 512)?.minkowski_sum(t, other)
            }
            (Shape::Polytope(_), Shape::Ball { r }) => {
                self.minkowski_sum(t, &ConvexBody::ball_polytope(self.dim, *r, 512)?)
            }
        }
    }

    /// (r_K, R_K): largest origin-centred ball inside, smallest containing.
    pub fn inradius_circumradius(&self) -> Result<(f64, f64)> {
        match &self.shape {
            Shape::Ball { r } => Ok((*r, *r)),
            Shape::Polytope(p) => {
                if !self.origin_interior {
                    return Err(Error::OriginNotInterior);
                }
                let rin = p
                    .facets
                    .iter()
                    .map(|f| f.offset)
                    .fold(f64::INFINITY, f64::min);
                let rout = p.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max);
                Ok((rin, rout))
            }
        }
    }

    /// Angles of the vertices (2-D polytopes only); breakpoints of ρ_K.
    pub fn vertex_angles(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Polytope(p) if self.dim == 2 => {
                p.vertices.iter().map(|v| v[1].atan2(v[0])).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Angular rule suited to integrating functions of ρ_K over the sphere.
    pub fn angular_rule(&self, total: usize) -> AngularRule {
        match (&self.shape, self.dim) {
            (_, 1) => AngularRule::two_point(),
            (Shape::Polytope(_), 2) => AngularRule::arcs_2d(&self.vertex_angles(), total),
            (Shape::Ball { .. }, 2) => AngularRule::uniform_2d(total),
            _ => AngularRule::volume_default(3, total),
        }
    }

    /// Ṽ_q(K) = (1/q)∫_{S^{n−1}} ρ_K^q du.
    pub fn dual_quermass(&self, q: f64) -> Result<f64> {
        if !(q.is_finite() && q > 0.0) {
            return invalid(format!("q must be positive (got {q})"));
        }
        if !self.origin_interior {
            return Err(Error::OriginNotInterior);
        }
        if let Shape::Ball { r } = self.shape {
            return Ok(sphere_area(self.dim) * r.powf(q) / q);
        }
        let v = match self.dim {
            1 => self.radial_unchecked(&[1.0]).powf(q) + self.radial_unchecked(&[-1.0]).powf(q),
            2 => {
                let mut b = self.vertex_angles();
                b.sort_by(f64::total_cmp);
                let mut s = 0.0;
                for i in 0..b.len() {
                    let lo = b[i];
                    let hi = if i + 1 < b.len() {
                        b[i + 1]
                    } else {
                        b[0] + 2.0 * PI
                    };
                    s += integrate_adaptive(
                        |t| self.radial_unchecked(&[t.cos(), t.sin()]).powf(q),
                        lo,
                        hi,
                        1e-13,
                    );
                }
                s
            }
            _ => {
                let rule = AngularRule::default_for(3);
                let terms: Vec<f64> = rule
                    .dirs
                    .iter()
                    .zip(&rule.weights)
                    .map(|(u, w)| w * self.radial_unchecked(u).powf(q))
                    .collect();
                crate::numerics::pairwise_sum(&terms)
            }
        };
        Ok(v / q)
    }

    /// V̄_q(K) = Ṽ_q(K)^{1/q}.
    pub fn normalized_dual_quermass(&self, q: f64) -> Result<f64> {
        Ok(self.dual_quermass(q)?.powf(1.0 / q))
    }

    /// Radius of a ball centred at the origin containing K.
    pub fn bounding_radius(&self) -> f64 {
        match &self.shape {
            Shape::Ball { r } => *r,
            Shape::Polytope(p) => p.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max),
        }
    }
}
