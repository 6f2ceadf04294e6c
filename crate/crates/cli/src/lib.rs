//! Helpers shared by the command-line front ends.

use std::io::Write;

use arnold_lab::dynamics::NormKind;
use serde::Serialize;

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum NormArg {
    L1,
    L2,
    Linf,
}

impl From<NormArg> for NormKind {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::L1 => NormKind::L1,
            NormArg::L2 => NormKind::L2,
            NormArg::Linf => NormKind::Linf,
        }
    }
}

/// Pretty JSON on stdout, newline terminated.
pub fn print_json<S: Serialize>(value: &S) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// `samples` evenly spaced points on the segment `[a, b]`, endpoints included.
pub fn segment_samples(a: &[f64], b: &[f64], samples: usize) -> Vec<Vec<f64>> {
    (0..samples)
        .map(|i| {
            let s = if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 };
            a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
        })
        .collect()
}
