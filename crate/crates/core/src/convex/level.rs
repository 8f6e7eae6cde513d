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

//! Superlevel sets [f ≥ s] as convex bodies.

use super::{ConvexKind, GridFunction, LogConcaveFunction};
use crate::bodies::{ConvexBody, Shape};
use crate::error::{invalid, Error, Result};

/// [f ≥ s] for 0 < s < max f. Closed forms with ball level sets give exact
/// balls; grid functions give the hull of the edge crossings of φ = −ln s.
pub fn level_set(f: &LogConcaveFunction, s: f64) -> Result<ConvexBody> {
    let m = f.max_value();
    if !(s > 0.0 && s < m) {
        return invalid(format!("level must lie in (0, {m}) (got {s})"));
    }
    let dim = f.dim();
    let p = f.phi();
    let c = -s.ln() - p.offset();
    let body = match p.kind() {
        ConvexKind::Quadratic { a } => ConvexBody::ball(dim, (2.0 * c / a).sqrt())?,
        ConvexKind::ScaledNorm { c: k } => ConvexBody::ball(dim, c / k)?,
        ConvexKind::Indicator(k) => k.clone(),
        ConvexKind::Support(k) => {
            if !k.origin_interior() {
                return Err(Error::Numerical("level set of a support function of a body without interior origin is unbounded".into()));
            }
            k.polar()?.scaled(c)?
        }
        ConvexKind::MaxAffine(pieces) => {
            let hs: Vec<(Vec<f64>, f64)> =
                pieces.iter().map(|(sl, o)| (sl.clone(), c - o)).collect();
            ConvexBody::from_halfspaces(dim, &hs)?
        }
        ConvexKind::Radial(prof) => {
            let h = prof.h();
            let mut r = prof.finite_radius();
            for i in 1..prof.values.len() {
                let v = prof.values[i];
                if v.is_infinite() {
                    r = (i - 1) as f64 * h;
                    break;
                }
                if v.get() > c {
                    let u = prof.values[i - 1].get();
                    r = (i - 1) as f64 * h + h * (c - u) / (v.get() - u);
                    break;
                }
            }
            if r <= 0.0 {
                return Err(Error::EmptyLevelSet(s));
            }
            ConvexBody::ball(dim, r)?
        }
        ConvexKind::Grid(g) => return grid_level(g, c, f.support_body(), s),
    };
    // Intersect with a smaller ball support when both are balls.
    if let (Shape::Ball { r }, Some(k)) = (body.shape(), f.support_body()) {
        if let Some(rk) = k.ball_radius() {
            if rk < *r {
                return ConvexBody::ball(dim, rk);
            }
        }
    }
    Ok(body)
}

fn grid_level(
    g: &GridFunction,
    c: f64,
    support: Option<&ConvexBody>,
    s: f64,
) -> Result<ConvexBody> {
    let spec = &g.spec;
    let dim = spec.dim;
    let n = spec.nodes;
    let in_support =
        |x: &[f64]| support.is_none_or(|k| k.contains(x, 1e-12 * (1.0 + k.bounding_radius())));
    let inside: Vec<bool> = (0..g.values.len())
        .map(|i| {
            let v = g.values[i];
            v.is_finite() && v.get() <= c && in_support(&spec.point(i))
        })
        .collect();
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for i in 0..g.values.len() {
        if !inside[i] {
            continue;
        }
        let idx = spec.unflatten(i);
        let p = spec.point(i);
        if (0..dim).any(|d| idx[d] == 0 || idx[d] == n - 1) {
            pts.push(p.clone());
        }
        let mut stride = 1;
        for d in (0..dim).rev() {
            for (ok, j) in [
                (idx[d] + 1 < n, i + stride),
                (idx[d] > 0, i.wrapping_sub(stride)),
            ] {
                if !ok || inside[j] {
                    continue;
                }
                let q = spec.point(j);
                let vj = g.values[j];
                let t = if vj.is_finite() && in_support(&q) {
                    let vi = g.values[i].get();
                    ((c - vi) / (vj.get() - vi)).clamp(0.0, 1.0)
                } else if let Some(k) = support.filter(|_| !in_support(&q)) {
                    // Boundary of the support along the edge.
                    let (mut lo, mut hi) = (0.0, 1.0);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        let x: Vec<f64> =
                            p.iter().zip(&q).map(|(a, b)| a + mid * (b - a)).collect();
                        if k.excess(&x) <= 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    lo
                } else {
                    0.0
                };
                pts.push(p.iter().zip(&q).map(|(a, b)| a + t * (b - a)).collect());
            }
            stride *= n;
        }
    }
    if pts.len() < dim + 1 {
        return Err(Error::EmptyLevelSet(s));
    }
    ConvexBody::from_vertices(dim, &pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::ConvexFunction;
    use crate::grid::GridSpec;

    #[test]
    fn gaussian_level_is_unit_ball() {
        let f = LogConcaveFunction::gaussian(2).unwrap();
        let k = level_set(&f, (-0.5f64).exp()).unwrap();
        assert!((k.ball_radius().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn indicator_level_is_the_body() {
        let b = ConvexBody::ball(2, 2.0).unwrap();
        let f = LogConcaveFunction::indicator(b.clone()).unwrap();
        for s in [0.1, 0.5, 0.99] {
            assert_eq!(level_set(&f, s).unwrap(), b);
        }
        assert!(level_set(&f, 1.0).is_err());
    }

    #[test]
    fn sampled_norm_level_is_close_to_unit_ball() {
        let spec = GridSpec::new(2, 3.0, 121).unwrap();
        let phi = ConvexFunction::scaled_norm(2, 0.0, 1.0)
            .unwrap()
            .sampled(spec)
            .unwrap();
        let f = LogConcaveFunction::new(phi).unwrap();
        let k = level_set(&f, (-1.0f64).exp()).unwrap();
        let h = spec.h();
        for t in 0..64 {
            let th = t as f64 * 0.1;
            let u = [th.cos(), th.sin()];
            assert!((k.support(&u) - 1.0).abs() <= 2.0 * h);
            assert!((k.radial(&u).unwrap() - 1.0).abs() <= 2.0 * h);
        }
    }
}
