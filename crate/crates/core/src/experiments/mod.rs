//! Desk-scale experiments: pseudo-diffusion orbits glued at the section
//! `q ≡ π`, the diffusion-time law across μ, and bounded-drift stability runs.

mod fit;
mod pseudo_orbit;
mod reports;
mod stability;

pub use fit::{fit_time_law, fit_time_law_points, Law, LawFit, TimeLawFit};
pub use pseudo_orbit::{build_pseudo_orbit, free_drift, run_diffusion_sweep, OrbitSegment, PseudoOrbit, SweepEntry};
pub use reports::{
    config_hash, emit_diffusion_reports, emit_stability_reports, read_diffusion_csv, read_stability_csv, DIFFUSION_CSV,
    PLOT_DATA, STABILITY_CSV, SUMMARY_JSON,
};
pub use stability::{paired_sharpness, run_stability, sample_initial_state, SharpnessTally};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{resolve_perturbation, SpecFileError, TrigPerturbation};
use crate::integrator::{IntegrationError, Scheme, StepperConfig};
use crate::melnikov::MelnikovError;
use crate::resonance::PathError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read config {path}: {message}")]
    ConfigFile { path: String, message: String },
    #[error(transparent)]
    Perturbation(#[from] SpecFileError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("path meets the resonant web at {point:?} (segment {segment}, mode {mode:?})")]
    PathRejected { segment: usize, point: Vec<f64>, mode: Vec<i64> },
    #[error("Melnikov hypothesis fails at omega = {omega:?}: {reason}")]
    Melnikov { omega: Vec<f64>, reason: String },
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error("no section crossing within {window} time units after t = {time}")]
    NoCrossing { time: f64, window: f64 },
    #[error("step cap: {transitions} transitions without reaching the final frequency (distance {distance})")]
    StepCap { transitions: usize, distance: f64 },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: malformed report: {message}")]
    Report { path: String, message: String },
    #[error("time-law fit needs at least 3 records with finite positive T_d, got {0}")]
    TooFewRecords(usize),
    #[error("time-law fit is degenerate: all mu values are equal")]
    DegenerateDesign,
}

impl From<MelnikovError> for ExperimentError {
    fn from(e: MelnikovError) -> Self {
        let omega = match &e {
            MelnikovError::DegenerateModel { omega } | MelnikovError::IterationCap { omega, .. } => omega.clone(),
            _ => Vec::new(),
        };
        ExperimentError::Melnikov { omega, reason: e.to_string() }
    }
}

fn default_c_jump() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    0.01
}
fn default_kappa() -> f64 {
    0.1
}
fn default_samples() -> usize {
    50
}
fn default_bands() -> Vec<[f64; 2]> {
    vec![[0.0, 0.1], [0.1, 0.5], [0.5, f64::INFINITY]]
}
fn default_r_bar() -> f64 {
    1.0
}
fn default_r_tilde() -> f64 {
    3.0
}
fn default_e_cap() -> f64 {
    2.0
}
fn default_phase_radius() -> f64 {
    1.0
}
fn default_max_wait_turns() -> usize {
    10
}
fn default_shoot_candidates() -> usize {
    41
}
fn default_crossing_window() -> f64 {
    200.0
}

/// Experiment configuration, read from TOML.
///
/// Required keys: `pert`, `mu_list`. Diffusion runs also need `omega_i`
/// and `omega_f`; `path` lists intermediate waypoints between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `arnold`, `arnold:<d>`, or a perturbation file relative to the config.
    pub pert: String,
    pub mu_list: Vec<f64>,
    #[serde(default)]
    pub omega_i: Vec<f64>,
    #[serde(default)]
    pub omega_f: Vec<f64>,
    #[serde(default)]
    pub path: Vec<Vec<f64>>,
    /// Clearance η requested from the resonant web.
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "default_c_jump")]
    pub c_jump: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    /// Drift tolerance κ of the stability runs.
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Horizon factor: runs last `(κ₀/μ)·ln(1/μ)`.
    #[serde(default = "default_kappa")]
    pub kappa0: f64,
    #[serde(default)]
    pub seed: u64,
    /// Stability samples per band and μ.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// `|E(0)|` bands `[lo, hi)`; `hi` may be `inf`.
    #[serde(default = "default_bands")]
    pub bands: Vec<[f64; 2]>,
    #[serde(default = "default_r_bar")]
    pub r_bar: f64,
    #[serde(default = "default_r_tilde")]
    pub r_tilde: f64,
    /// Largest `|E(0)|` sampled in an unbounded band.
    #[serde(default = "default_e_cap")]
    pub e_cap: f64,
    /// Radius of the neighbourhood of the homoclinic phase counted as aligned.
    #[serde(default = "default_phase_radius")]
    pub phase_radius: f64,
    /// Consecutive unaligned turns tolerated before the wait is logged as a
    /// resonance stabilization delay.
    #[serde(default = "default_max_wait_turns")]
    pub max_wait_turns: usize,
    /// Momentum jumps tried per crossing when re-phasing.
    #[serde(default = "default_shoot_candidates")]
    pub shoot_candidates: usize,
    /// Longest time allowed between two crossings.
    #[serde(default = "default_crossing_window")]
    pub crossing_window: f64,
    /// Cap on gluing instants per orbit; derived from the path when absent.
    #[serde(default)]
    pub max_transitions: Option<usize>,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text)
            .map_err(|e| ExperimentError::ConfigFile { path: "<string>".into(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::ConfigFile { path: path.display().to_string(), message: e.to_string() })?;
        let mut cfg: Self = toml::from_str(&text)
            .map_err(|e| ExperimentError::ConfigFile { path: path.display().to_string(), message: e.to_string() })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Canonical TOML text, the input of [`config_hash`].
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn perturbation(&self) -> Result<TrigPerturbation<f64>, ExperimentError> {
        Ok(resolve_perturbation(&self.pert, self.base_dir.as_deref())?)
    }

    pub fn stepper(&self) -> StepperConfig<f64> {
        StepperConfig::new(self.dt, self.scheme)
    }

    /// Checks shared by every experiment.
    pub fn validate_common(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Config(m.to_string()));
        if self.mu_list.is_empty() {
            return bad("mu_list is empty");
        }
        if self.mu_list.iter().any(|&m| !(m.is_finite() && m >= 0.0)) {
            return bad("mu values must be finite and non-negative");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        Ok(())
    }

    pub fn validate_diffusion(&self, d: usize) -> Result<(), ExperimentError> {
        self.validate_common()?;
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.omega_i.len() != d || self.omega_f.len() != d {
            return bad(format!("omega_i and omega_f need {d} components"));
        }
        if self.omega_i == self.omega_f {
            return bad("omega_i and omega_f coincide".into());
        }
        if self.path.iter().any(|w| w.len() != d) {
            return bad(format!("path waypoints need {d} components"));
        }
        if !(self.c_jump > 0.0 && self.c_jump.is_finite()) {
            return bad("c_jump must be positive".into());
        }
        if !(self.phase_radius > 0.0) || self.shoot_candidates == 0 || !(self.crossing_window > 0.0) {
            return bad("phase_radius, shoot_candidates and crossing_window must be positive".into());
        }
        Ok(())
    }

    pub fn validate_stability(&self) -> Result<(), ExperimentError> {
        self.validate_common()?;
        let bad = |m: &str| Err(ExperimentError::Config(m.to_string()));
        if self.mu_list.iter().any(|&m| m >= 1.0) {
            return bad("stability runs need mu < 1 so that ln(1/mu) > 0");
        }
        if !(self.kappa > 0.0 && self.kappa0 > 0.0) {
            return bad("kappa and kappa0 must be positive");
        }
        if self.bands.is_empty() || self.bands.iter().any(|b| !(b[0] >= 0.0 && b[1] > b[0])) {
            return bad("bands must be nonempty intervals [lo, hi) with 0 <= lo < hi");
        }
        if self.bands.iter().any(|b| b[0] >= self.e_cap) {
            return bad("every band must start below e_cap");
        }
        if !(self.r_bar >= 0.0) {
            return bad("r_bar must be non-negative");
        }
        if (2.0 * (self.e_cap + 2.0)).sqrt() > self.r_tilde {
            return bad("r_tilde is too small for energies up to e_cap");
        }
        Ok(())
    }

    /// Waypoints `ω_I, path…, ω_F`.
    pub fn waypoints(&self) -> Vec<Vec<f64>> {
        std::iter::once(self.omega_i.clone())
            .chain(self.path.iter().cloned())
            .chain(std::iter::once(self.omega_f.clone()))
            .collect()
    }
}

/// Outcome of one pseudo-diffusion orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionRecord {
    pub mu: f64,
    /// Gluing instants `θ₁ < … < θ_k` (section crossings where a jump may act).
    pub thetas: Vec<f64>,
    /// `|(ΔI, Δp)|` at each gluing instant.
    pub jump_sizes: Vec<f64>,
    /// Action jump `ΔI` at each gluing instant.
    pub delta_i: Vec<Vec<f64>>,
    /// Momentum jump `Δp` at each gluing instant.
    pub delta_p: Vec<f64>,
    /// Whether the crossing phase was within the alignment radius.
    pub aligned: Vec<bool>,
    /// `|I(θ_{i+1}⁻) − I(θ_i⁺)|`, the action change of the flow between gluings.
    pub natural_drift: Vec<f64>,
    pub final_action: Vec<f64>,
    /// `|I(end) − ω_F|`.
    pub final_distance: f64,
    pub reached: bool,
    /// Unaligned crossings.
    pub waits: usize,
    /// Unaligned crossings beyond `max_wait_turns` in a row.
    pub stabilization_turns: usize,
}

impl DiffusionRecord {
    pub fn k(&self) -> usize {
        self.thetas.len()
    }

    /// `T_d = θ_k − θ₁`.
    pub fn t_total(&self) -> f64 {
        match (self.thetas.first(), self.thetas.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Single-transition durations `T_s = θ_{i+1} − θ_i`.
    pub fn transition_durations(&self) -> Vec<f64> {
        self.thetas.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Outcome of one stability run.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRecord {
    pub mu: f64,
    pub band: usize,
    pub sample: usize,
    pub horizon: f64,
    pub max_drift: f64,
    pub min_abs_e: f64,
    pub violated: bool,
    pub phi0: Vec<f64>,
    pub action0: Vec<f64>,
    pub q0: f64,
    pub p0: f64,
    /// Set when the run aborted early; drift fields then cover the completed part.
    pub error: Option<String>,
}
