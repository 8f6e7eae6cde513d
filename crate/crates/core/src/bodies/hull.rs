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

//! Convex hulls and vertex enumeration for n ≤ 3.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::numerics::{dot, norm, solve_small};

/// A hull facet: outward unit normal, offset (⟨normal, x⟩ ≤ offset) and the
/// indices of its vertices into the returned vertex list. In 2-D the two
/// indices run counter-clockwise; in 3-D the polygon is counter-clockwise
/// seen from outside.
#[derive(Clone, Debug)]
pub struct HullFacet {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub verts: Vec<usize>,
}

pub struct Hull {
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<HullFacet>,
}

fn scale_of(points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .map(|p| norm(p))
        .fold(0.0, f64::max)
        .max(1e-300)
}

pub fn hull(dim: usize, points: &[Vec<f64>]) -> Result<Hull> {
    if points.is_empty() {
        return Err(Error::DegenerateBody("no points".into()));
    }
    match dim {
        1 => hull_1d(points),
        2 => hull_2d(points),
        3 => hull_3d(points),
        _ => Err(Error::Invalid(format!("hull in dimension {dim}"))),
    }
}

fn hull_1d(points: &[Vec<f64>]) -> Result<Hull> {
    let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let hi = points
        .iter()
        .map(|p| p[0])
        .fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-12 * scale_of(points) {
        return Err(Error::DegenerateBody("interval has empty interior".into()));
    }
    Ok(Hull {
        vertices: vec![vec![lo], vec![hi]],
        facets: vec![
            HullFacet {
                normal: vec![-1.0],
                offset: -lo,
                verts: vec![0],
            },
            HullFacet {
                normal: vec![1.0],
                offset: hi,
                verts: vec![1],
            },
        ],
    })
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise hull polygon of planar points (collinear points dropped).
pub(crate) fn monotone_chain(pts: &[[f64; 2]], tol: f64) -> Vec<[f64; 2]> {
    let mut p: Vec<[f64; 2]> = pts.to_vec();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup_by(|a, b| (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol);
    if p.len() < 3 {
        return p;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for q in &p {
        while lower.len() >= 2
            && cross2(&lower[lower.len() - 2], &lower[lower.len() - 1], q) <= tol * tol
        {
            lower.pop();
        }
        lower.push(*q);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for q in p.iter().rev() {
        while upper.len() >= 2
            && cross2(&upper[upper.len() - 2], &upper[upper.len() - 1], q) <= tol * tol
        {
            upper.pop();
        }
        upper.push(*q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn hull_2d(points: &[Vec<f64>]) -> Result<Hull> {
    let scale = scale_of(points);
    let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    let poly = monotone_chain(&pts, 1e-12 * scale);
    if poly.len() < 3 {
        return Err(Error::DegenerateBody(
            "planar point set is collinear".into(),
        ));
    }
    let area: f64 = (0..poly.len())
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        * 0.5;
    if area <= 1e-14 * scale * scale {
        return Err(Error::DegenerateBody("polygon has empty interior".into()));
    }
    let vertices: Vec<Vec<f64>> = poly.iter().map(|p| vec![p[0], p[1]]).collect();
    let m = vertices.len();
    let facets = (0..m)
        .map(|i| {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % m];
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let l = (dx * dx + dy * dy).sqrt();
            let normal = vec![dy / l, -dx / l];
            // Offset averaged over both endpoints to reduce rounding bias.
            let offset = 0.5 * (dot(&normal, a) + dot(&normal, b));
            HullFacet {
                normal,
                offset,
                verts: vec![i, (i + 1) % m],
            }
        })
        .collect();
    Ok(Hull { vertices, facets })
}

fn sub3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

struct Tri {
    v: [usize; 3],
    n: [f64; 3],
    off: f64,
    alive: bool,
}

fn make_tri(p: &[Vec<f64>], a: usize, b: usize, c: usize) -> Tri {
    let n = cross3(&sub3(&p[b], &p[a]), &sub3(&p[c], &p[a]));
    let l = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let n = [n[0] / l, n[1] / l, n[2] / l];
    let off = (dot(&n, &p[a]) + dot(&n, &p[b]) + dot(&n, &p[c])) / 3.0;
    Tri {
        v: [a, b, c],
        n,
        off,
        alive: true,
    }
}

fn hull_3d(points: &[Vec<f64>]) -> Result<Hull> {
    let scale = scale_of(points);
    let eps = 1e-10 * scale;
    let p = points;
    let degenerate = || Error::DegenerateBody("point set does not span 3 dimensions".into());
    let i0 = (0..p.len())
        .min_by(|&a, &b| p[a][0].total_cmp(&p[b][0]))
        .ok_or_else(degenerate)?;
    let i1 = (0..p.len())
        .max_by(|&a, &b| norm(&sub3(&p[a], &p[i0])).total_cmp(&norm(&sub3(&p[b], &p[i0]))))
        .ok_or_else(degenerate)?;
    let d01 = sub3(&p[i1], &p[i0]);
    if norm(&d01) <= eps {
        return Err(degenerate());
    }
    let line_dist = |k: usize| norm(&cross3(&d01, &sub3(&p[k], &p[i0]))) / norm(&d01);
    let i2 = (0..p.len())
        .max_by(|&a, &b| line_dist(a).total_cmp(&line_dist(b)))
        .unwrap();
    if line_dist(i2) <= eps {
        return Err(degenerate());
    }
    let nrm = cross3(&d01, &sub3(&p[i2], &p[i0]));
    let plane_dist = |k: usize| dot(&nrm, &sub3(&p[k], &p[i0])) / norm(&nrm);
    let i3 = (0..p.len())
        .max_by(|&a, &b| plane_dist(a).abs().total_cmp(&plane_dist(b).abs()))
        .unwrap();
    if plane_dist(i3).abs() <= eps {
        return Err(degenerate());
    }
    let centroid: Vec<f64> = (0..3)
        .map(|d| (p[i0][d] + p[i1][d] + p[i2][d] + p[i3][d]) / 4.0)
        .collect();
    let mut tris: Vec<Tri> = Vec::new();
    for &(a, b, c) in &[(i0, i1, i2), (i0, i1, i3), (i0, i2, i3), (i1, i2, i3)] {
        let mut t = make_tri(p, a, b, c);
        if dot(&t.n, &centroid) - t.off > 0.0 {
            t = make_tri(p, a, c, b);
        }
        tris.push(t);
    }
    let seed: HashSet<usize> = [i0, i1, i2, i3].into_iter().collect();
    for k in 0..p.len() {
        if seed.contains(&k) {
            continue;
        }
        let visible: Vec<usize> = (0..tris.len())
            .filter(|&f| tris[f].alive && dot(&tris[f].n, &p[k]) - tris[f].off > eps)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for &f in &visible {
            let v = tris[f].v;
            for e in 0..3 {
                edges.insert((v[e], v[(e + 1) % 3]));
            }
        }
        let mut horizon: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(a, b)| !edges.contains(&(b, a)))
            .collect();
        horizon.sort_unstable();
        for &f in &visible {
            tris[f].alive = false;
        }
        for (a, b) in horizon {
            tris.push(make_tri(p, a, b, k));
        }
    }
    merge_coplanar(p, tris.into_iter().filter(|t| t.alive).collect(), scale)
}

fn merge_coplanar(p: &[Vec<f64>], tris: Vec<Tri>, scale: f64) -> Result<Hull> {
    let mut groups: Vec<(Vec<f64>, f64, Vec<usize>)> = Vec::new();
    for t in &tris {
        let found = groups.iter_mut().find(|(n, off, _)| {
            (n[0] - t.n[0]).abs() < 1e-7
                && (n[1] - t.n[1]).abs() < 1e-7
                && (n[2] - t.n[2]).abs() < 1e-7
                && (off - t.off).abs() < 1e-7 * scale
        });
        match found {
            Some((_, _, vs)) => vs.extend_from_slice(&t.v),
            None => groups.push((t.n.to_vec(), t.off, t.v.to_vec())),
        }
    }
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut index_of = std::collections::HashMap::new();
    let mut facets = Vec::new();
    for (n, _, mut vs) in groups {
        vs.sort_unstable();
        vs.dedup();
        // In-plane basis.
        let helper = if n[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let n3 = [n[0], n[1], n[2]];
        let e1 = cross3(&n3, &helper);
        let l1 = norm(&e1);
        let e1 = [e1[0] / l1, e1[1] / l1, e1[2] / l1];
        let e2 = cross3(&n3, &e1);
        let planar: Vec<[f64; 2]> = vs
            .iter()
            .map(|&i| [dot(&e1, &p[i]), dot(&e2, &p[i])])
            .collect();
        let poly = monotone_chain(&planar, 1e-12 * scale);
        if poly.len() < 3 {
            continue;
        }
        let mut ids = Vec::with_capacity(poly.len());
        for q in &poly {
            let j = planar.iter().position(|r| r == q).expect("hull point");
            let src = vs[j];
            let id = *index_of.entry(src).or_insert_with(|| {
                vertices.push(p[src].clone());
                vertices.len() - 1
            });
            ids.push(id);
        }
        let offset = ids.iter().map(|&i| dot(&n, &vertices[i])).sum::<f64>() / ids.len() as f64;
        facets.push(HullFacet {
            normal: n,
            offset,
            verts: ids,
        });
    }
    if facets.len() < 4 {
        return Err(Error::DegenerateBody(
            "3-D hull has fewer than four facets".into(),
        ));
    }
    Ok(Hull { vertices, facets })
}

/// Vertices of {x : ⟨a_i, x⟩ ≤ b_i}, assumed bounded, by brute-force
/// intersection of n-subsets of the boundary hyperplanes.
pub fn enumerate_vertices(dim: usize, halfspaces: &[(Vec<f64>, f64)]) -> Result<Vec<Vec<f64>>> {
    let m = halfspaces.len();
    if m < dim + 1 {
        return Err(Error::DegenerateBody(
            "too few halfspaces for a bounded body".into(),
        ));
    }
    let scale = halfspaces
        .iter()
        .map(|(a, b)| b.abs() / norm(a).max(1e-300))
        .fold(1e-300, f64::max);
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut idx = vec![0usize; dim];
    fn rec(
        start: usize,
        depth: usize,
        dim: usize,
        idx: &mut Vec<usize>,
        hs: &[(Vec<f64>, f64)],
        scale: f64,
        out: &mut Vec<Vec<f64>>,
    ) {
        if depth == dim {
            let mut a: Vec<Vec<f64>> = idx.iter().map(|&i| hs[i].0.clone()).collect();
            let mut b: Vec<f64> = idx.iter().map(|&i| hs[i].1).collect();
            if let Some(x) = solve_small(&mut a, &mut b) {
                let feasible = hs
                    .iter()
                    .all(|(a, b)| dot(a, &x) <= b + 1e-9 * (scale + norm(a) * norm(&x)));
                if feasible
                    && !out.iter().any(|y| {
                        norm(&y.iter().zip(&x).map(|(u, v)| u - v).collect::<Vec<_>>())
                            <= 1e-10 * scale
                    })
                {
                    out.push(x);
                }
            }
            return;
        }
        for i in start..hs.len() {
            idx[depth] = i;
            rec(i + 1, depth + 1, dim, idx, hs, scale, out);
        }
    }
    rec(0, 0, dim, &mut idx, halfspaces, scale, &mut out);
    if out.len() < dim + 1 {
        return Err(Error::DegenerateBody(
            "halfspace system is empty or unbounded".into(),
        ));
    }
    Ok(out)
}
