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

//! `dualcurv`: command-line front end.
//!
//! Exit codes: 0 success, 2 validation error (bad flags, malformed input,
//! guard failures), 3 numerical failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "dualcurv",
    version,
    about = "Dual curvature measures of log-concave functions"
)]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "DUALCURV_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a CSV table here, where the command has one.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Legendre-Fenchel conjugate of a convex function on a grid.
    Conjugate {
        #[arg(long = "fn")]
        function: PathBuf,
        /// Nodes per axis of the dual grid (odd).
        #[arg(long, default_value_t = 257)]
        grid_res: usize,
        /// Half-width of the dual grid; defaults to the largest nodal slope
        /// for grid input.
        #[arg(long)]
        radius: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Sup-convolution f ⊕ t·g.
    Supconv {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Nodes per axis of the output grid (0 picks a default).
        #[arg(long, default_value_t = 0)]
        grid_res: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Weighted moment Ṽ_q(f) = ∫|x|^{q−n} f dx.
    Moment {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Weighted total variation TV_{L,ω}(f) by the bulk/boundary decomposition.
    Tv {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Weighted total variation by the coarea (level-set) route.
    Coarea {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        q: f64,
        /// Level nodes in s.
        #[arg(long, default_value_t = 200)]
        levels: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Dual quermassintegrals, radii, polar and C̃_{p,q} of a convex body.
    Body {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        /// Write the polar body descriptor here.
        #[arg(long)]
        polar_out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Euclidean and spherical dual curvature measures of f.
    Dualcurv {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        q: f64,
        /// Write the Euclidean measure as a measure file (input of `minkowski`).
        #[arg(long)]
        measure_out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// The variational formula by difference quotients, the measure formula
    /// and (g an indicator) the layer-cake integral.
    Varcheck {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        q: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.05, 0.025])]
        ts: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        levels: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Solve the even functional dual Minkowski problem for a measure.
    Minkowski {
        /// Measure file; omit together with --gaussian-grid for the
        /// discretized |y|^{q−n}e^{−|y|²/2} on [−5,5]².
        #[arg(long)]
        mu: Option<PathBuf>,
        /// Cells per axis of the built-in Gaussian measure.
        #[arg(long)]
        gaussian_grid: Option<usize>,
        #[arg(long)]
        q: f64,
        /// Constraint level; searched over powers of two when absent.
        #[arg(long = "A")]
        a: Option<f64>,
        /// Nodes per axis of the χ grid.
        #[arg(long, default_value_t = 65)]
        grid_res: usize,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        /// Stop once the residual is at most tol·|μ|.
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Run acceptance criteria 1–11 and write the artifacts.
    Selftest {
        /// Directory for selftest.json and refinement.csv.
        #[arg(long, default_value = "selftest-out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: cannot start the thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
