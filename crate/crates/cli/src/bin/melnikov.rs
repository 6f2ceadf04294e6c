use anyhow::{bail, Context};
use arnold_lab::dynamics::resolve_perturbation;
use arnold_lab::melnikov::{scan_frequency_segment, MelnikovConfig};
use arnold_lab_cli::{print_json, segment_samples};
use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(about = "Melnikov potential minimization", allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify the minimum of Γ at evenly spaced frequencies on a segment.
    Scan {
        /// `arnold`, `arnold:<d>` or a perturbation TOML file.
        #[arg(long)]
        pert: String,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        omega_from: Vec<f64>,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        omega_to: Vec<f64>,
        #[arg(long)]
        samples: usize,
        /// Seed every sample from the coarse grid and run them in parallel.
        #[arg(long)]
        no_continuation: bool,
    },
}

#[derive(Serialize)]
struct Entry {
    omega: Vec<f64>,
    minimizer: Option<Vec<f64>>,
    grad_norm: Option<f64>,
    hess_eigs: Option<Vec<f64>>,
    nondegenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().cmd {
        Cmd::Scan { pert, omega_from, omega_to, samples, no_continuation } => {
            let pert = resolve_perturbation::<f64>(&pert, None).with_context(|| format!("loading {pert}"))?;
            if omega_from.len() != pert.dim() || omega_to.len() != pert.dim() {
                bail!("frequencies must have {} components", pert.dim());
            }
            let path = segment_samples(&omega_from, &omega_to, samples);
            let scan = scan_frequency_segment(&pert, &path, &MelnikovConfig::default(), !no_continuation);
            let out: Vec<Entry> = scan
                .into_iter()
                .map(|s| match s.result {
                    Ok(c) => {
                        let r = c.report();
                        Entry {
                            omega: r.omega,
                            minimizer: Some(r.minimizer),
                            grad_norm: Some(r.grad_norm),
                            hess_eigs: Some(r.hess_eigs),
                            nondegenerate: r.nondegenerate,
                            kind: Some(format!("{:?}", c.kind).to_lowercase()),
                            error: None,
                        }
                    }
                    Err(e) => Entry {
                        omega: s.omega,
                        minimizer: None,
                        grad_norm: None,
                        hess_eigs: None,
                        nondegenerate: false,
                        kind: None,
                        error: Some(e.to_string()),
                    },
                })
                .collect();
            print_json(&out)
        }
    }
}
