use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use arnold_lab::ergodization::{alpha, check_lemma_bounds, dual_vectors, FlowSpec, Lattice};
use arnold_lab_cli::print_json;
use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(about = "Ergodization of linear flows on tori", allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Smallest |p·Ω| over nonzero dual vectors with |p| ≤ R.
    Alpha {
        /// TOML file with a `vectors` list.
        #[arg(long)]
        basis: PathBuf,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        omega: Vec<f64>,
        #[arg(long)]
        radius: f64,
    },
    /// Brute-force ergodization time and the lower/upper bound check.
    Time {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        omega: Vec<f64>,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        tmax: f64,
        /// Grid spacing, at most delta/4; defaults to delta/8.
        #[arg(long)]
        grid_res: Option<f64>,
    },
}

#[derive(Serialize)]
struct AlphaReport {
    omega: Vec<f64>,
    radius: f64,
    dual_vectors: usize,
    /// `None` when no dual vector lies in the ball.
    alpha: Option<f64>,
}

fn load(path: &Path) -> anyhow::Result<Lattice<f64>> {
    Lattice::load(path).with_context(|| format!("loading {}", path.display()))
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().cmd {
        Cmd::Alpha { basis, omega, radius } => {
            let lat = load(&basis)?;
            let a = alpha(&lat, &omega, radius)?;
            print_json(&AlphaReport {
                dual_vectors: dual_vectors(&lat, radius)?.len(),
                alpha: a.is_finite().then_some(a),
                omega,
                radius,
            })
        }
        Cmd::Time { basis, omega, delta, tmax, grid_res } => {
            let lat = load(&basis)?;
            if !(delta > 0.0) {
                bail!("delta must be positive");
            }
            let flow = FlowSpec::new(omega, delta)?;
            let report = check_lemma_bounds(&lat, &flow, tmax, grid_res.unwrap_or(delta / 8.0))?;
            print_json(&report)
        }
    }
}
