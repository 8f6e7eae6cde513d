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

//! File formats: JSON descriptors for bodies, functions and measures, and
//! the byte-stable JSON and CSV writers used for every artifact.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bodies::{ConvexBody, Shape, SphericalMeasure};
use crate::convex::{ConvexFunction, ConvexKind, LogConcaveFunction};
use crate::dual_curvature::EuclideanMeasure;
use crate::error::{invalid, Error, Result};
use crate::extreal::ExtReal;
use crate::grid::GridSpec;

/// `{"kind":"ball","dim":2,"r":1}`, `{"kind":"cube","dim":2,"a":1}` or
/// `{"kind":"polytope","vertices":[[..],..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball { dim: usize, r: f64 },
    Cube { dim: usize, a: f64 },
    Polytope { vertices: Vec<Vec<f64>> },
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Ball { dim, r } => ConvexBody::ball(*dim, *r),
            BodySpec::Cube { dim, a } => ConvexBody::cube(*dim, *a),
            BodySpec::Polytope { vertices } => {
                let Some(first) = vertices.first() else {
                    return invalid("polytope needs vertices");
                };
                ConvexBody::from_vertices(first.len(), vertices)
            }
        }
    }

    pub fn from_body(k: &ConvexBody) -> BodySpec {
        match k.shape() {
            Shape::Ball { r } => BodySpec::Ball {
                dim: k.dim(),
                r: *r,
            },
            Shape::Polytope(p) => BodySpec::Polytope {
                vertices: p.vertices.clone(),
            },
        }
    }
}

/// One affine piece ⟨slope, x⟩ + offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffinePiece {
    pub slope: Vec<f64>,
    pub offset: f64,
}

/// Descriptor of a convex φ; as a log-concave function it stands for e^{−φ}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// |x|²/2
    Gaussian {
        dim: usize,
    },
    /// |x|
    ExpNorm {
        dim: usize,
    },
    Quadratic {
        dim: usize,
        a: f64,
    },
    /// b + c|x|
    ScaledNorm {
        dim: usize,
        b: f64,
        c: f64,
    },
    Indicator {
        body: BodySpec,
    },
    /// c·1_K, i.e. φ = −ln c on K
    ScaledIndicator {
        body: BodySpec,
        c: f64,
    },
    MaxAffine {
        dim: usize,
        pieces: Vec<AffinePiece>,
    },
    /// Nodal values on the grid [−radius, radius]^dim, "inf" off the domain.
    Grid {
        dim: usize,
        radius: f64,
        nodes: usize,
        values: Vec<ExtReal>,
        #[serde(default)]
        even: bool,
    },
}

impl FunctionSpec {
    pub fn convex(&self) -> Result<ConvexFunction> {
        match self {
            FunctionSpec::Gaussian { dim } => ConvexFunction::quadratic(*dim, 1.0),
            FunctionSpec::ExpNorm { dim } => ConvexFunction::scaled_norm(*dim, 0.0, 1.0),
            FunctionSpec::Quadratic { dim, a } => ConvexFunction::quadratic(*dim, *a),
            FunctionSpec::ScaledNorm { dim, b, c } => ConvexFunction::scaled_norm(*dim, *b, *c),
            FunctionSpec::Indicator { body } => Ok(ConvexFunction::indicator(body.build()?)),
            FunctionSpec::ScaledIndicator { body, c } => {
                if !(c.is_finite() && *c > 0.0) {
                    return invalid("indicator scale must be positive");
                }
                Ok(ConvexFunction::indicator(body.build()?).shifted(-c.ln()))
            }
            FunctionSpec::MaxAffine { dim, pieces } => ConvexFunction::max_affine(
                *dim,
                pieces.iter().map(|p| (p.slope.clone(), p.offset)).collect(),
            ),
            FunctionSpec::Grid {
                dim,
                radius,
                nodes,
                values,
                even,
            } => ConvexFunction::grid(GridSpec::new(*dim, *radius, *nodes)?, values.clone(), *even),
        }
    }

    pub fn log_concave(&self) -> Result<LogConcaveFunction> {
        match self {
            FunctionSpec::ScaledIndicator { body, c } => {
                LogConcaveFunction::scaled_indicator(body.build()?, *c)
            }
            _ => LogConcaveFunction::new(self.convex()?),
        }
    }

    /// Grid functions become `grid` descriptors with the offset folded in.
    pub fn from_grid(phi: &ConvexFunction) -> Result<FunctionSpec> {
        let ConvexKind::Grid(g) = phi.kind() else {
            return invalid("only grid functions have a grid descriptor");
        };
        let c = phi.offset();
        Ok(FunctionSpec::Grid {
            dim: g.spec.dim,
            radius: g.spec.radius,
            nodes: g.spec.nodes,
            values: g.values.iter().map(|v| v.add_f64(c)).collect(),
            even: phi.is_even(),
        })
    }
}

/// `{"dim":n,"points":[[..],..],"weights":[..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl MeasureFile {
    pub fn from_measure(m: &EuclideanMeasure) -> MeasureFile {
        MeasureFile {
            dim: m.dim,
            points: (0..m.len()).map(|k| m.point(k).to_vec()).collect(),
            weights: m.weights.clone(),
        }
    }

    pub fn build(&self) -> Result<EuclideanMeasure> {
        if self.points.len() != self.weights.len() {
            return invalid("measure file has different point and weight counts");
        }
        if self.points.iter().any(|p| p.len() != self.dim) {
            return invalid("measure point with the wrong dimension");
        }
        let flat = self.points.iter().flatten().copied().collect();
        EuclideanMeasure::new(self.dim, flat, self.weights.clone(), "file")
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed {what} JSON: {e}")))
}

/// `v` with 12 significant digits, trailing zeros dropped; plain notation
/// for exponents in [−5, 12), scientific otherwise.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return if v > 0.0 {
            "\"inf\"".into()
        } else {
            "null".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let s = format!("{:.*}", (11 - exp) as usize, v);
        trim_zeros(&s)
    } else {
        format!("{}e{exp}", trim_zeros(mant))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => write!(out, "{i}").unwrap(),
            (_, Some(u)) => write!(out, "{u}").unwrap(),
            _ => out.push_str(&format_number(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(a) => {
            if a.is_empty() {
                out.push_str("[]");
                return;
            }
            // Short numeric rows stay on one line.
            if a.len() <= 8 && a.iter().all(|x| x.is_number()) {
                out.push('[');
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, x, indent + 1);
                if i + 1 < a.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push_str(": ");
                write_value(out, &m[*k], indent + 1);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Deterministic JSON: sorted keys, 12 significant digits, two-space indent.
pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v)
        .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))?;
    let mut out = String::new();
    write_value(&mut out, &value, 0);
    out.push('\n');
    Ok(out)
}

/// Rows of (components..., weight).
pub fn euclidean_csv(m: &EuclideanMeasure) -> String {
    let mut out = String::new();
    let names = ["y1", "y2", "y3"];
    writeln!(out, "{},weight", names[..m.dim].join(",")).unwrap();
    for k in 0..m.len() {
        for v in m.point(k) {
            write!(out, "{},", format_number(*v)).unwrap();
        }
        writeln!(out, "{}", format_number(m.weights[k])).unwrap();
    }
    out
}

/// Rows of (unit vector components..., weight).
pub fn spherical_csv(m: &SphericalMeasure) -> String {
    let mut out = String::new();
    let names = ["v1", "v2", "v3"];
    writeln!(out, "{},weight", names[..m.dim].join(",")).unwrap();
    for (u, w) in m.dirs.iter().zip(&m.weights) {
        for v in u {
            write!(out, "{},", format_number(*v)).unwrap();
        }
        writeln!(out, "{}", format_number(*w)).unwrap();
    }
    out
}

/// One row of a refinement table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub q: f64,
    pub resolution: usize,
    pub value: f64,
    pub reference: f64,
    pub rel_error: f64,
}

pub fn refinement_csv(rows: &[RefinementRow]) -> String {
    let mut out = String::from("q,resolution,value,reference,rel_error\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_number(r.q),
            r.resolution,
            format_number(r.value),
            format_number(r.reference),
            format_number(r.rel_error)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_number(2.0), "2");
        assert_eq!(format_number(-0.5), "-0.5");
        assert_eq!(format_number(1.5e-7), "1.5e-7");
        assert_eq!(format_number(6.02214076e23), "6.02214076e23");
        assert_eq!(format_number(9.9999999999999), "10");
        assert_eq!(format_number(f64::INFINITY), "\"inf\"");
    }

    #[test]
    fn json_is_sorted_and_stable() {
        #[derive(Serialize)]
        struct S {
            zeta: f64,
            alpha: Vec<f64>,
            inf: ExtReal,
        }
        let s = S {
            zeta: 1.0 / 3.0,
            alpha: vec![1.0, 2.5],
            inf: ExtReal::INFINITY,
        };
        let j = to_json(&s).unwrap();
        assert_eq!(
            j,
            "{\n  \"alpha\": [1, 2.5],\n  \"inf\": \"inf\",\n  \"zeta\": 0.333333333333\n}\n"
        );
    }

    #[test]
    fn descriptors_round_trip() {
        let spec: FunctionSpec = parse_json(
            r#"{"kind":"indicator","body":{"kind":"ball","dim":2,"r":2}}"#,
            "function",
        )
        .unwrap();
        let f = spec.log_concave().unwrap();
        assert_eq!(f.eval(&[1.0, 1.0]), 1.0);
        let b = BodySpec::Cube { dim: 2, a: 1.0 }.build().unwrap();
        let again = BodySpec::from_body(&b).build().unwrap();
        assert_eq!(b, again);
        let g = ConvexFunction::quadratic(1, 1.0)
            .unwrap()
            .sampled(GridSpec::new(1, 2.0, 5).unwrap())
            .unwrap();
        let d = FunctionSpec::from_grid(&g).unwrap();
        let text = to_json(&d).unwrap();
        let back: FunctionSpec = parse_json(&text, "function").unwrap();
        assert_eq!(back.convex().unwrap().grid_fn(), g.grid_fn());
        assert!(parse_json::<FunctionSpec>(r#"{"kind":"nope"}"#, "function").is_err());
        let m = EuclideanMeasure::new(2, vec![1.0, 0.0, -1.0, 0.0], vec![0.5, 0.5], "t").unwrap();
        let mf: MeasureFile =
            parse_json(&to_json(&MeasureFile::from_measure(&m)).unwrap(), "measure").unwrap();
        assert_eq!(mf.build().unwrap().weights, m.weights);
    }
}
