use std::path::PathBuf;

use anyhow::{bail, Context};
use arnold_lab::resonance::{certify_path, distance_to_web, enumerate_modes, PathReport, PathSpec};
use arnold_lab_cli::{print_json, NormArg};
use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(about = "Resonance web queries", allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Distance from a frequency to the nearest resonance hyperplane.
    Dist {
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        omega: Vec<f64>,
        #[arg(long)]
        order: i64,
        #[arg(long, value_enum, default_value = "l1")]
        norm: NormArg,
    },
    /// Check that a piecewise linear frequency path avoids the web.
    Certify {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        order: i64,
        #[arg(long, value_enum, default_value = "l1")]
        norm: NormArg,
    },
}

#[derive(Serialize)]
struct DistReport {
    omega: Vec<f64>,
    order: i64,
    modes: usize,
    distance: Option<f64>,
    mode: Option<Vec<i64>>,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().cmd {
        Cmd::Dist { omega, order, norm } => {
            if omega.is_empty() || order < 1 {
                bail!("need a nonempty frequency and order >= 1");
            }
            let rs = enumerate_modes(omega.len(), order, norm.into());
            let w = distance_to_web(&omega, &rs);
            print_json(&DistReport {
                modes: rs.modes.len(),
                distance: w.as_ref().map(|w| w.distance),
                mode: w.map(|w| w.mode),
                omega,
                order,
            })
        }
        Cmd::Certify { path, order, norm } => {
            if order < 1 {
                bail!("order must be >= 1");
            }
            let spec = PathSpec::<f64>::load(&path).with_context(|| format!("loading {}", path.display()))?;
            let rs = enumerate_modes(spec.dim(), order, norm.into());
            let verdict = certify_path(&spec, &rs);
            print_json(&PathReport::new(&verdict, &spec, &rs))
        }
    }
}
