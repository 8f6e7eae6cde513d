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

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use dualcurv::acceptance::{gaussian_measure, run_suite, TITLES};
use dualcurv::bodies::{dual_curvature_measure, pq_dual_curvature};
use dualcurv::convex::{sup_convolve, CombineOptions, ConvexFunction};
use dualcurv::dual_curvature::{
    euclidean_dcm, layer_cake_delta, spherical_dcm, variational_lhs, variational_rhs,
};
use dualcurv::io::{
    euclidean_csv, parse_json, refinement_csv, spherical_csv, to_json, BodySpec, FunctionSpec,
    MeasureFile,
};
use dualcurv::minkowski::{solve, PrescribedMeasure, SolverConfig};
use dualcurv::variation::{coarea_tv, moment, weighted_tv, QuadratureSpec, Weight};
use dualcurv::{ConvexBody, GridSpec};

use crate::{Command, Output};

pub enum CliError {
    Core(dualcurv::Error),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Core(e)
                if !e.is_validation() && !matches!(e, dualcurv::Error::MomentMayBeInfinite(_)) =>
            {
                3
            }
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(s) => write!(f, "{s}"),
        }
    }
}

impl From<dualcurv::Error> for CliError {
    fn from(e: dualcurv::Error) -> CliError {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn function(path: &Path) -> Result<FunctionSpec> {
    Ok(parse_json(&read(path)?, "function")?)
}

fn body(path: &Path) -> Result<ConvexBody> {
    Ok(parse_json::<BodySpec>(&read(path)?, "body")?.build()?)
}

fn weight(q: f64) -> Result<Weight> {
    Ok(Weight::power(q)?)
}

fn emit<T: Serialize>(output: &Output, report: &T, csv: Option<String>) -> Result<()> {
    let text = to_json(report)?;
    match &output.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = &output.csv {
        match csv {
            Some(c) => write(p, &c)?,
            None => return Err(CliError::Io("this command has no CSV output".into())),
        }
    }
    Ok(())
}

fn grid_descriptor(phi: &ConvexFunction, nodes: usize) -> Result<FunctionSpec> {
    if phi.grid_fn().is_some() {
        return Ok(FunctionSpec::from_grid(phi)?);
    }
    let r = phi.extent(40.0).unwrap_or(8.0).max(1.0);
    Ok(FunctionSpec::from_grid(&phi.sampled(GridSpec::new(
        phi.dim(),
        r,
        nodes | 1,
    )?)?)?)
}

pub fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Conjugate {
            function: path,
            grid_res,
            radius,
            output,
        } => {
            let phi = function(&path)?.convex()?;
            let target = match (radius, phi.default_dual()) {
                (Some(r), _) => GridSpec::new(phi.dim(), r, grid_res)?,
                (None, Some(d)) => GridSpec::new(phi.dim(), d.radius, grid_res)?,
                (None, None) => GridSpec::new(phi.dim(), 4.0, grid_res)?,
            };
            let star = phi.conjugate(target)?;
            let star = if star.grid_fn().is_some() {
                star
            } else {
                star.sampled(target)?
            };
            emit(&output, &FunctionSpec::from_grid(&star)?, None)?;
        }
        Command::Supconv {
            f,
            g,
            t,
            grid_res,
            output,
        } => {
            let (f, g) = (function(&f)?.log_concave()?, function(&g)?.log_concave()?);
            let opts = CombineOptions {
                grid_nodes: grid_res,
                ..CombineOptions::default()
            };
            let h = sup_convolve(&f, &g, t, &opts)?;
            let nodes = if grid_res > 0 {
                grid_res
            } else {
                [2049, 257, 65][h.dim() - 1]
            };
            emit(&output, &grid_descriptor(h.phi(), nodes)?, None)?;
        }
        Command::Moment {
            function: path,
            q,
            output,
        } => {
            let f = function(&path)?.log_concave()?;
            let v = moment(&f, &weight(q)?, &QuadratureSpec::for_dim(f.dim()))?;
            emit(&output, &json!({"q": q, "moment": v}), None)?;
        }
        Command::Tv {
            function: path,
            body: b,
            q,
            output,
        } => {
            let f = function(&path)?.log_concave()?;
            let parts = weighted_tv(
                &f,
                &body(&b)?,
                &weight(q)?,
                &QuadratureSpec::for_dim(f.dim()),
            )?;
            emit(&output, &json!({"q": q, "tv": parts}), None)?;
        }
        Command::Coarea {
            function: path,
            body: b,
            q,
            levels,
            output,
        } => {
            let f = function(&path)?.log_concave()?;
            let v = coarea_tv(&f, &body(&b)?, &weight(q)?, levels)?;
            emit(
                &output,
                &json!({"q": q, "levels": levels, "coarea_tv": v}),
                None,
            )?;
        }
        Command::Body {
            body: b,
            q,
            p,
            polar_out,
            output,
        } => {
            let k = body(&b)?;
            let (r, big_r) = k.inradius_circumradius()?;
            let measure = if p == 0.0 {
                dual_curvature_measure(&k, q)?
            } else {
                pq_dual_curvature(&k, p, q)?
            };
            let polar = k.polar()?;
            if let Some(path) = polar_out {
                write(&path, &to_json(&BodySpec::from_body(&polar))?)?;
            }
            let report = json!({
                "body": BodySpec::from_body(&k),
                "q": q,
                "p": p,
                "dual_quermass": k.dual_quermass(q)?,
                "normalized_dual_quermass": k.normalized_dual_quermass(q)?,
                "inradius": r,
                "circumradius": big_r,
                "origin_interior": k.origin_interior(),
                "symmetric": k.symmetric(),
                "measure_total": measure.total(),
                "measure": measure,
            });
            emit(&output, &report, Some(spherical_csv(&measure)))?;
        }
        Command::Dualcurv {
            function: path,
            q,
            measure_out,
            output,
        } => {
            let f = function(&path)?.log_concave()?;
            let w = weight(q)?;
            let spec = QuadratureSpec::for_dim(f.dim());
            let e = euclidean_dcm(&f, &w, &spec)?;
            let s = spherical_dcm(&f, &w, &spec)?;
            if let Some(p) = measure_out {
                write(&p, &to_json(&MeasureFile::from_measure(&e))?)?;
            }
            let report = json!({
                "q": q,
                "euclidean": {"atoms": e.len(), "total": e.total(), "source": e.source},
                "spherical": s,
                "spherical_total": s.total(),
            });
            emit(&output, &report, Some(euclidean_csv(&e)))?;
        }
        Command::Varcheck {
            f,
            g,
            q,
            ts,
            levels,
            output,
        } => {
            let gspec = function(&g)?;
            let (f, g) = (function(&f)?.log_concave()?, gspec.log_concave()?);
            let w = weight(q)?;
            let spec = QuadratureSpec::for_dim(f.dim());
            let lhs = variational_lhs(&f, &g, &w, &ts, &spec, &CombineOptions::default())?;
            let rhs = variational_rhs(&f, &g, &w, &spec)?;
            let layer = match &gspec {
                FunctionSpec::Indicator { body } => {
                    Some(layer_cake_delta(&f, &body.build()?, &w, levels)?)
                }
                _ => None,
            };
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
            let mut rel_errors = serde_json::Map::new();
            rel_errors.insert("lhs_rhs".into(), json!(rel(lhs.value, rhs.total)));
            if let Some(l) = layer {
                rel_errors.insert("lhs_layer_cake".into(), json!(rel(lhs.value, l)));
                rel_errors.insert("rhs_layer_cake".into(), json!(rel(rhs.total, l)));
            }
            let report = json!({
                "q": q,
                "lhs": lhs.value,
                "difference_quotients": {"ts": lhs.ts, "values": lhs.quotients},
                "rhs": rhs,
                "layer_cake": layer,
                "rel_errors": rel_errors,
                "hypothesis_flags": lhs.flags,
            });
            emit(&output, &report, None)?;
        }
        Command::Minkowski {
            mu,
            gaussian_grid,
            q,
            a,
            grid_res,
            max_iter,
            tol,
            seed,
            output,
        } => {
            let measure = match (mu, gaussian_grid) {
                (Some(p), None) => PrescribedMeasure::new(
                    parse_json::<MeasureFile>(&read(&p)?, "measure")?.build()?,
                )?,
                (None, Some(64)) => gaussian_measure(q)?,
                (None, Some(cells)) => PrescribedMeasure::from_density(2, 5.0, cells, |y| {
                    let r2 = y[0] * y[0] + y[1] * y[1];
                    r2.sqrt().powf(q - 2.0) * (-0.5 * r2).exp()
                })?,
                _ => {
                    return Err(CliError::Core(dualcurv::Error::Invalid(
                        "give exactly one of --mu and --gaussian-grid".into(),
                    )))
                }
            };
            let mut cfg = SolverConfig::for_measure(&measure, grid_res)?;
            cfg.a = a;
            cfg.max_iter = max_iter;
            cfg.tol = tol;
            cfg.seed = seed;
            let report = solve(&measure, &weight(q)?, &cfg)?;
            let dual_r = cfg.x_radius.unwrap_or(1.25 * cfg.grid.radius);
            let star = report.chi.conjugate(GridSpec::new(
                measure.dim(),
                dual_r,
                [2049, 257, 65][measure.dim() - 1],
            )?)?;
            let mut trace = String::from("iter,objective,constraint,residual,step\n");
            for t in &report.trace {
                use dualcurv::io::format_number as n;
                trace.push_str(&format!(
                    "{},{},{},{},{}\n",
                    t.iter,
                    n(t.objective),
                    n(t.constraint),
                    n(t.residual),
                    n(t.step)
                ));
            }
            let out = json!({
                "q": q,
                "config": cfg,
                "report": report,
                "phi0_star": FunctionSpec::from_grid(&star)?,
            });
            emit(&output, &out, Some(trace))?;
            if !report.converged {
                eprintln!(
                    "warning: not converged after {} iterations",
                    report.iterations
                );
            }
        }
        Command::Selftest { out, seed } => return selftest(&out, seed),
    }
    Ok(0)
}

fn selftest(dir: &PathBuf, seed: u64) -> Result<u8> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let suite = run_suite(seed);
    write(&dir.join("selftest.json"), &to_json(&suite)?)?;
    write(
        &dir.join("refinement.csv"),
        &refinement_csv(&suite.refinement),
    )?;
    println!("{:>3}  {:<6} {:<42} checks", "id", "result", "criterion");
    for c in &suite.criteria {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{:>3}  {:<6} {:<42} {}",
            c.id,
            status,
            c.title,
            c.checks.len()
        );
        if let Some(e) = &c.error {
            println!("       error: {e}");
        }
        for f in c.failures() {
            println!(
                "       failed: {} (value {}, reference {}, error {:.3e} > {:.1e})",
                f.label, f.value, f.reference, f.error, f.tolerance
            );
        }
    }
    println!("{:>3}  {:<6} {:<42} -", 12, "n/a", TITLES[11]);
    println!("artifacts in {}", dir.display());
    Ok(if suite.criteria.iter().all(|c| c.passed) {
        0
    } else {
        3
    })
}
