//! Bounded-drift runs over the horizon `(κ₀/μ)·ln(1/μ)`, stratified by the
//! initial pendulum energy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::{ExperimentConfig, ExperimentError, StabilityRecord};
use crate::dynamics::{PhaseState, TrigPerturbation};
use crate::integrator::{integrate, ActionDriftObserver, EnergyObserver, Observer};

/// Draw the initial state of `sample` in `band`.
///
/// Each sample index owns an RNG stream derived from the seed, and the band
/// only enters through `|E(0)|`, so the same index gives paired states
/// (same `φ`, `I`, energy quantile and signs) across bands and μ values.
pub fn sample_initial_state(cfg: &ExperimentConfig, d: usize, band: usize, sample: usize) -> PhaseState<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(sample as u64 + 1);
    let phi: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    // uniform in the ball |I| ≤ r̄ by rejection
    let action = loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            break v.into_iter().map(|x| x * cfg.r_bar).collect::<Vec<_>>();
        }
    };
    let u_e: f64 = rng.gen();
    let u_q: f64 = rng.gen();
    let neg_energy: bool = rng.gen();
    let neg_p: bool = rng.gen();

    let [lo, hi] = cfg.bands[band];
    let abs_e = lo + u_e * (hi.min(cfg.e_cap) - lo);
    // libration needs E ≥ −2 (the bottom of the well)
    let e = if neg_energy && abs_e <= 2.0 { -abs_e } else { abs_e };
    // allowed q: cos q ≤ 1 + E
    let (q_lo, q_hi) = if e >= 0.0 {
        (0.0, 2.0 * PI)
    } else {
        let a = (1.0 + e).clamp(-1.0, 1.0).acos();
        (a, 2.0 * PI - a)
    };
    let q = q_lo + u_q * (q_hi - q_lo);
    let p_abs = (2.0 * (e - q.cos() + 1.0)).max(0.0).sqrt();
    let p = if neg_p { -p_abs } else { p_abs };
    PhaseState::new(phi, action, q, p, 0.0).expect("finite sample")
}

/// `(κ₀/μ)·ln(1/μ)`.
pub fn horizon(kappa0: f64, mu: f64) -> f64 {
    kappa0 / mu * (1.0 / mu).ln()
}

fn run_one(
    cfg: &ExperimentConfig,
    pert: &TrigPerturbation<f64>,
    mu: f64,
    band: usize,
    sample: usize,
) -> StabilityRecord {
    let start = sample_initial_state(cfg, pert.dim(), band, sample);
    let t = if mu == 0.0 { 0.0 } else { horizon(cfg.kappa0, mu) };
    let mut stepper = cfg.stepper();
    stepper.record_stride = usize::MAX;
    let mut drift = ActionDriftObserver::new(&start);
    let mut energy = EnergyObserver::new(&start);
    let result = integrate(
        &start,
        t,
        mu,
        pert,
        &stepper,
        &mut [&mut drift as &mut dyn Observer<f64>, &mut energy as &mut dyn Observer<f64>],
    );
    StabilityRecord {
        mu,
        band,
        sample,
        horizon: t,
        max_drift: drift.max_drift,
        min_abs_e: energy.min_abs,
        violated: drift.max_drift > cfg.kappa,
        phi0: start.phi,
        action0: start.action,
        q0: start.q,
        p0: start.p,
        error: result.err().map(|e| e.to_string()),
    }
}

/// Integrate every `(μ, band, sample)` of the config; records come back in
/// that nested order regardless of scheduling.
pub fn run_stability(cfg: &ExperimentConfig) -> Result<Vec<StabilityRecord>, ExperimentError> {
    cfg.validate_stability()?;
    let pert = cfg.perturbation()?;
    let jobs: Vec<(f64, usize, usize)> = cfg
        .mu_list
        .iter()
        .flat_map(|&mu| (0..cfg.bands.len()).flat_map(move |b| (0..cfg.samples).map(move |s| (mu, b, s))))
        .collect();
    Ok(jobs.par_iter().map(|&(mu, b, s)| run_one(cfg, &pert, mu, b, s)).collect())
}

/// Paired comparison of max drift between two bands at equal `(μ, sample)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharpnessTally {
    pub pairs: usize,
    /// Pairs where the `near` band drifted at least as much as the `far` band.
    pub near_at_least_far: usize,
}

impl SharpnessTally {
    pub fn fraction(&self) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            self.near_at_least_far as f64 / self.pairs as f64
        }
    }
}

pub fn paired_sharpness(records: &[StabilityRecord], near: usize, far: usize) -> SharpnessTally {
    let mut tally = SharpnessTally { pairs: 0, near_at_least_far: 0 };
    for n in records.iter().filter(|r| r.band == near && r.error.is_none()) {
        if let Some(f) =
            records.iter().find(|r| r.band == far && r.sample == n.sample && r.mu == n.mu && r.error.is_none())
        {
            tally.pairs += 1;
            if n.max_drift >= f.max_drift {
                tally.near_at_least_far += 1;
            }
        }
    }
    tally
}
