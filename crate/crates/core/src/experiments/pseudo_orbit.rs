//! Pseudo-diffusion orbits: true arcs of the flow glued at the section
//! `q ≡ π` with jumps of size at most `c_jump·μ` in `(I, p)`.

use rayon::prelude::*;

use super::{DiffusionRecord, ExperimentConfig, ExperimentError};
use crate::dynamics::{PhaseState, TrigPerturbation};
use crate::integrator::{integrate, ActionDriftObserver, Observer, Stepper, StepperConfig};
use crate::melnikov::{scan_frequency_segment, MelnikovConfig};
use crate::resonance::{certify_path, enumerate_modes, PathSpec, PathVerdict};
use crate::scalar::{norm2, torus_distance, wrap_angle};

/// Share of the jump budget given to `ΔI`; `0.8² + 0.6² = 1` leaves `0.6`
/// for the momentum.
const ACTION_SHARE: f64 = 0.8;
/// Largest Melnikov sample spacing along the path.
const ANCHOR_SPACING: f64 = 0.01;

/// A flow arc between two gluing instants.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSegment {
    /// State right after the jump at `θ_i`.
    pub start: PhaseState<f64>,
    /// State on arrival at `θ_{i+1}`, before its jump.
    pub end: PhaseState<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoOrbit {
    pub record: DiffusionRecord,
    pub segments: Vec<OrbitSegment>,
}

/// Homoclinic phase `(φ₀*, θ₀*)` certified at one frequency of the path.
struct Anchor {
    omega: Vec<f64>,
    phase: Vec<f64>,
}

fn melnikov_anchors(pert: &TrigPerturbation<f64>, waypoints: &[Vec<f64>]) -> Result<Vec<Anchor>, ExperimentError> {
    let mut samples: Vec<Vec<f64>> = vec![waypoints[0].clone()];
    for w in waypoints.windows(2) {
        let len = norm2(&w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect::<Vec<_>>());
        let n = ((len / ANCHOR_SPACING).ceil() as usize).clamp(1, 200);
        for j in 1..=n {
            let s = j as f64 / n as f64;
            samples.push(w[0].iter().zip(&w[1]).map(|(a, b)| a + s * (b - a)).collect());
        }
    }
    let scan = scan_frequency_segment(pert, &samples, &MelnikovConfig::default(), true);
    scan.into_iter()
        .map(|s| match s.result {
            Ok(c) if c.nondegenerate => Ok(Anchor { omega: s.omega, phase: c.minimizer }),
            Ok(c) => Err(ExperimentError::Melnikov {
                omega: s.omega,
                reason: format!("critical point is a {:?}, Hessian eigenvalues {:?}", c.kind, c.hess_eigs),
            }),
            Err(e) => Err(ExperimentError::Melnikov { omega: s.omega, reason: e.to_string() }),
        })
        .collect()
}

fn nearest_phase<'a>(anchors: &'a [Anchor], action: &[f64]) -> &'a [f64] {
    let dist = |a: &Anchor| a.omega.iter().zip(action).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let mut best = &anchors[0];
    for a in &anchors[1..] {
        if dist(a) < dist(best) {
            best = a;
        }
    }
    &best.phase
}

fn crossing_phase(s: &PhaseState<f64>) -> Vec<f64> {
    s.phi.iter().map(|&x| wrap_angle(x)).chain(std::iter::once(wrap_angle(s.time))).collect()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Clip `v` to the Euclidean ball of radius `r`.
fn clip(v: Vec<f64>, r: f64) -> Vec<f64> {
    let n = norm2(&v);
    if n <= r {
        v
    } else {
        v.into_iter().map(|x| x * r / n).collect()
    }
}

struct Trial {
    dp: f64,
    arrival: PhaseState<f64>,
    distance: f64,
}

/// Momentum jumps tried at one crossing: a uniform grid over the whole
/// budget plus a finer one around the jump that lands exactly on the
/// separatrix level, where the return time is most sensitive.
fn candidates(state: &PhaseState<f64>, budget: f64, n: usize) -> Vec<f64> {
    let sign = if state.p < 0.0 { -1.0 } else { 1.0 };
    // on the section E = p²/2 − 2, so p = ±2 is the separatrix level
    let center = (2.0 * sign - state.p).clamp(-budget, budget);
    let n = n.max(2);
    let mut out: Vec<f64> = (0..n).map(|j| -budget + 2.0 * budget * j as f64 / (n - 1) as f64).collect();
    let half = budget / 8.0;
    let m = n / 2;
    out.extend((0..m).map(|j| (center - half + 2.0 * half * j as f64 / (m - 1).max(1) as f64).clamp(-budget, budget)));
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup();
    out
}

/// Shoot over momentum jumps and rank the next crossings. Among arrivals
/// at an energy the next jump can re-center, keep the one that leaves `I`
/// closest to `goal` once the action jump it allows (only when aligned with
/// the homoclinic phase) is applied. Without such arrivals, keep the one with
/// the smallest energy.
#[allow(clippy::too_many_arguments)]
fn shoot(
    state: &PhaseState<f64>,
    mu: f64,
    pert: &TrigPerturbation<f64>,
    stepper: &StepperConfig<f64>,
    anchors: &[Anchor],
    goal: &[f64],
    p_budget: f64,
    budget: f64,
    cfg: &ExperimentConfig,
) -> Result<Trial, ExperimentError> {
    let trials: Vec<Result<Option<Trial>, ExperimentError>> = candidates(state, p_budget, cfg.shoot_candidates)
        .par_iter()
        .map(|&dp| {
            let mut s = state.clone();
            s.p += dp;
            let mut st = Stepper::new(mu, pert, stepper.scheme);
            Ok(st.next_crossing(&s, cfg.crossing_window, stepper, None)?.map(|ev| {
                let target = nearest_phase(anchors, &ev.state.action);
                let distance = torus_distance(&crossing_phase(&ev.state), target);
                Trial { dp, arrival: ev.state, distance }
            }))
        })
        .collect();
    // |ΔE| ≈ 2|Δp| on the section
    let e_fix = 2.0 * budget;
    let key = |x: &Trial| {
        let e = x.arrival.pendulum_energy().abs();
        if e > e_fix {
            return (1, e, x.arrival.time);
        }
        let mut gap = norm2(&diff(goal, &x.arrival.action));
        if x.distance <= cfg.phase_radius {
            gap = (gap - ACTION_SHARE * budget).max(0.0);
        }
        (0, gap, x.arrival.time)
    };
    let mut best: Option<Trial> = None;
    for t in trials {
        let Some(t) = t? else { continue };
        if best.as_ref().is_none_or(|b| key(&t) < key(b)) {
            best = Some(t);
        }
    }
    best.ok_or(ExperimentError::NoCrossing { time: state.time, window: cfg.crossing_window })
}

/// Build a pseudo-diffusion orbit from `ω_I` to `ω_F` at coupling `mu`.
///
/// Starts on the separatrix apex at the homoclinic phase of `ω_I`. At every
/// section crossing: if the crossing phase lies within `phase_radius` of
/// the homoclinic phase, `I` jumps toward the next waypoint; then `p` jumps
/// to re-center the pendulum energy and to re-phase the next crossing.
/// Stops once `|I − ω_F| ≤ c_jump·μ`. With `mu = 0` the budget vanishes and
/// the orbit stays on the initial torus (`k = 0`).
pub fn build_pseudo_orbit(
    cfg: &ExperimentConfig,
    pert: &TrigPerturbation<f64>,
    mu: f64,
) -> Result<PseudoOrbit, ExperimentError> {
    let d = pert.dim();
    cfg.validate_diffusion(d)?;
    let waypoints = cfg.waypoints();
    let path = PathSpec::new(waypoints.clone(), cfg.eta)?;
    let web = enumerate_modes(d, pert.order(), pert.norm_kind());
    if let PathVerdict::Rejected(x) = certify_path(&path, &web) {
        return Err(ExperimentError::PathRejected { segment: x.segment, point: x.point, mode: x.mode });
    }
    let omega_f = cfg.omega_f.clone();
    let stepper = cfg.stepper();

    if mu == 0.0 {
        return Ok(PseudoOrbit {
            record: DiffusionRecord {
                mu,
                thetas: Vec::new(),
                jump_sizes: Vec::new(),
                delta_i: Vec::new(),
                delta_p: Vec::new(),
                aligned: Vec::new(),
                natural_drift: Vec::new(),
                final_action: cfg.omega_i.clone(),
                final_distance: norm2(&diff(&cfg.omega_i, &omega_f)),
                reached: false,
                waits: 0,
                stabilization_turns: 0,
            },
            segments: Vec::new(),
        });
    }

    let anchors = melnikov_anchors(pert, &waypoints)?;
    let budget = cfg.c_jump * mu;
    let path_len: f64 = waypoints.windows(2).map(|w| norm2(&diff(&w[1], &w[0]))).sum();
    let cap = cfg.max_transitions.unwrap_or(50 + 40 * (path_len / (ACTION_SHARE * budget)).ceil() as usize);

    let phase0 = nearest_phase(&anchors, &cfg.omega_i);
    let mut state = PhaseState::new(phase0[..d].to_vec(), cfg.omega_i.clone(), std::f64::consts::PI, 2.0, phase0[d])
        .map_err(|e| ExperimentError::Config(e.to_string()))?;

    let mut rec = DiffusionRecord {
        mu,
        thetas: Vec::new(),
        jump_sizes: Vec::new(),
        delta_i: Vec::new(),
        delta_p: Vec::new(),
        aligned: Vec::new(),
        natural_drift: Vec::new(),
        final_action: Vec::new(),
        final_distance: f64::INFINITY,
        reached: false,
        waits: 0,
        stabilization_turns: 0,
    };
    let mut segments = Vec::new();
    let mut next_wp = 1;
    let mut unaligned_run = 0usize;
    loop {
        if rec.thetas.len() == cap {
            return Err(ExperimentError::StepCap { transitions: cap, distance: norm2(&diff(&state.action, &omega_f)) });
        }
        while next_wp + 1 < waypoints.len() && norm2(&diff(&state.action, &waypoints[next_wp])) <= budget {
            next_wp += 1;
        }
        let target = nearest_phase(&anchors, &state.action);
        let aligned = torus_distance(&crossing_phase(&state), target) <= cfg.phase_radius;
        if aligned {
            unaligned_run = 0;
        } else {
            rec.waits += 1;
            unaligned_run += 1;
            if unaligned_run > cfg.max_wait_turns {
                rec.stabilization_turns += 1;
            }
        }
        let di =
            if aligned { clip(diff(&waypoints[next_wp], &state.action), ACTION_SHARE * budget) } else { vec![0.0; d] };
        for (a, x) in state.action.iter_mut().zip(&di) {
            *a += x;
        }
        rec.thetas.push(state.time);
        rec.aligned.push(aligned);
        let remaining = norm2(&diff(&state.action, &omega_f));
        if remaining <= budget {
            rec.jump_sizes.push(norm2(&di));
            rec.delta_i.push(di);
            rec.delta_p.push(0.0);
            rec.final_distance = remaining;
            rec.final_action = state.action.clone();
            rec.reached = true;
            break;
        }
        let di_norm = norm2(&di);
        let p_budget = (budget * budget - di_norm * di_norm).max(0.0).sqrt();
        let trial = shoot(&state, mu, pert, &stepper, &anchors, &waypoints[next_wp], p_budget, budget, cfg)?;
        state.p += trial.dp;
        rec.jump_sizes.push((di_norm * di_norm + trial.dp * trial.dp).sqrt());
        rec.delta_i.push(di);
        rec.delta_p.push(trial.dp);
        rec.natural_drift.push(norm2(&diff(&trial.arrival.action, &state.action)));
        segments.push(OrbitSegment { start: state.clone(), end: trial.arrival.clone() });
        state = trial.arrival;
    }
    Ok(PseudoOrbit { record: rec, segments })
}

/// One entry of a μ sweep; failures are kept per μ.
#[derive(Debug)]
pub struct SweepEntry {
    pub mu: f64,
    pub result: Result<DiffusionRecord, ExperimentError>,
}

/// [`build_pseudo_orbit`] for every μ of the config, in parallel, in config order.
pub fn run_diffusion_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepEntry>, ExperimentError> {
    let pert = cfg.perturbation()?;
    cfg.validate_diffusion(pert.dim())?;
    Ok(cfg
        .mu_list
        .par_iter()
        .map(|&mu| SweepEntry { mu, result: build_pseudo_orbit(cfg, &pert, mu).map(|o| o.record) })
        .collect())
}

/// Jump-free run from the pseudo-orbit's initial state; returns
/// `max |I(t) − I(0)|` over `duration` and the final action.
pub fn free_drift(
    cfg: &ExperimentConfig,
    pert: &TrigPerturbation<f64>,
    mu: f64,
    duration: f64,
) -> Result<(f64, Vec<f64>), ExperimentError> {
    let d = pert.dim();
    cfg.validate_diffusion(d)?;
    let anchors = melnikov_anchors(pert, &cfg.waypoints()[..1])?;
    let phase0 = &anchors[0].phase;
    let start = PhaseState::new(phase0[..d].to_vec(), cfg.omega_i.clone(), std::f64::consts::PI, 2.0, phase0[d])
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let mut stepper = cfg.stepper();
    stepper.record_stride = usize::MAX;
    let mut drift = ActionDriftObserver::new(&start);
    let traj = integrate(&start, duration, mu, pert, &stepper, &mut [&mut drift as &mut dyn Observer<f64>])?;
    Ok((drift.max_drift, traj.final_state.action))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arnold_cfg() -> ExperimentConfig {
        ExperimentConfig::from_toml("pert = \"arnold\"\nmu_list = [0.05]\nomega_i = [0.4]\nomega_f = [0.6]\n").unwrap()
    }

    #[test]
    fn zero_coupling_stays_on_torus() {
        let cfg = arnold_cfg();
        let o = build_pseudo_orbit(&cfg, &TrigPerturbation::arnold(1), 0.0).unwrap();
        assert_eq!(o.record.k(), 0);
        assert_eq!(o.record.final_action, vec![0.4]);
        assert!(!o.record.reached);
    }

    #[test]
    fn reaches_target_within_budget() {
        let cfg = arnold_cfg();
        let mu = 0.05;
        let o = build_pseudo_orbit(&cfg, &TrigPerturbation::arnold(1), mu).unwrap();
        let r = &o.record;
        assert!(r.reached);
        assert!(r.final_distance <= cfg.c_jump * mu);
        assert!(r.thetas.windows(2).all(|w| w[1] > w[0]));
        assert!(r.jump_sizes.iter().all(|&j| j <= cfg.c_jump * mu * (1.0 + 1e-12)));
        assert_eq!(o.segments.len() + 1, r.k());
    }

    #[test]
    fn path_through_web_is_rejected() {
        let mut cfg = arnold_cfg();
        cfg.omega_i = vec![-0.2];
        cfg.omega_f = vec![0.2];
        assert!(matches!(
            build_pseudo_orbit(&cfg, &TrigPerturbation::arnold(1), 0.05),
            Err(ExperimentError::PathRejected { .. })
        ));
    }
}
