use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use arnold_lab::experiments::{
    config_hash, emit_diffusion_reports, emit_stability_reports, fit_time_law, free_drift, read_diffusion_csv,
    run_diffusion_sweep, run_stability, ExperimentConfig, DIFFUSION_CSV,
};
use arnold_lab_cli::print_json;
use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(about = "Diffusion and stability experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build pseudo-orbits for every μ and fit the drift time law.
    Diffuse {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Integrate without jumps and report the natural action drift instead.
        #[arg(long)]
        no_jumps: bool,
    },
    /// Sample initial conditions per energy band and record action drift.
    Stability {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Refit the time law from an existing diffusion.csv.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Serialize)]
struct FreeRun {
    mu: f64,
    duration: f64,
    max_drift: Option<f64>,
    final_action: Option<Vec<f64>>,
    error: Option<String>,
}

#[derive(Serialize)]
struct FreeSummary {
    experiment: &'static str,
    config_hash: String,
    seed: u64,
    runs: Vec<FreeRun>,
}

fn load(path: &Path) -> anyhow::Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))
}

fn no_jumps(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<()> {
    let pert = cfg.perturbation()?;
    let runs = cfg
        .mu_list
        .iter()
        .map(|&mu| {
            let duration = if mu > 0.0 && mu < 1.0 { (1.0 / mu) * (1.0 / mu).ln() } else { 100.0 };
            match free_drift(cfg, &pert, mu, duration) {
                Ok((d, a)) => FreeRun { mu, duration, max_drift: Some(d), final_action: Some(a), error: None },
                Err(e) => FreeRun { mu, duration, max_drift: None, final_action: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    fs::create_dir_all(out)?;
    let summary = FreeSummary { experiment: "free_drift", config_hash: config_hash(cfg), seed: cfg.seed, runs };
    let path = out.join("free_drift.json");
    fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")?;
    println!("{}", path.display());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().cmd {
        Cmd::Diffuse { config, out, no_jumps: true } => no_jumps(&load(&config)?, &out),
        Cmd::Diffuse { config, out, no_jumps: false } => {
            let cfg = load(&config)?;
            let entries = run_diffusion_sweep(&cfg)?;
            for e in &entries {
                match &e.result {
                    Ok(r) => eprintln!(
                        "mu = {:e}: k = {}, T_d = {:.3}, |I - omega_F| = {:.3e}, reached = {}",
                        e.mu,
                        r.k(),
                        r.t_total(),
                        r.final_distance,
                        r.reached
                    ),
                    Err(err) => eprintln!("mu = {:e}: {err}", e.mu),
                }
            }
            for p in emit_diffusion_reports(&cfg, &entries, &out)? {
                println!("{}", p.display());
            }
            if entries.iter().any(|e| e.result.is_err()) {
                bail!("some runs failed; see summary.json");
            }
            Ok(())
        }
        Cmd::Stability { config, out } => {
            let cfg = load(&config)?;
            let records = run_stability(&cfg)?;
            let violations = records.iter().filter(|r| r.violated).count();
            eprintln!("{} samples, {violations} violations", records.len());
            for p in emit_stability_reports(&cfg, &records, &out)? {
                println!("{}", p.display());
            }
            Ok(())
        }
        Cmd::Fit { input } => {
            let path = input.join(DIFFUSION_CSV);
            let records = read_diffusion_csv(&path)?;
            print_json(&fit_time_law(&records)?)
        }
    }
}
