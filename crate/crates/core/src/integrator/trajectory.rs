use std::io::Write;

use super::section::{crossed_section, crossing_level, refine, start_level, SectionEvent};
use super::{IntegrationError, Stepper, StepperConfig};
use crate::dynamics::{hamiltonian, pendulum_energy, PhaseState, TrigPerturbation};
use crate::scalar::Real;

/// Per-step hook called with every new state.
pub trait Observer<T> {
    fn observe(&mut self, state: &PhaseState<T>);
}

/// Tracks `max |E(q,p) − E(q₀,p₀)|` and `min |E|`.
#[derive(Debug, Clone)]
pub struct EnergyObserver<T> {
    pub initial: T,
    pub max_deviation: T,
    pub min_abs: T,
}

impl<T: Real> EnergyObserver<T> {
    pub fn new(start: &PhaseState<T>) -> Self {
        let e = start.pendulum_energy();
        Self { initial: e, max_deviation: T::zero(), min_abs: e.abs() }
    }
}

impl<T: Real> Observer<T> for EnergyObserver<T> {
    fn observe(&mut self, s: &PhaseState<T>) {
        let e = pendulum_energy(s.q, s.p);
        self.max_deviation = self.max_deviation.max((e - self.initial).abs());
        self.min_abs = self.min_abs.min(e.abs());
    }
}

/// Tracks `max_t |I(t) − I(0)|` (Euclidean).
#[derive(Debug, Clone)]
pub struct ActionDriftObserver<T> {
    pub initial: Vec<T>,
    pub max_drift: T,
}

impl<T: Real> ActionDriftObserver<T> {
    pub fn new(start: &PhaseState<T>) -> Self {
        Self { initial: start.action.clone(), max_drift: T::zero() }
    }

    pub fn drift_of(&self, s: &PhaseState<T>) -> T {
        self.initial.iter().zip(&s.action).map(|(&a, &b)| (b - a) * (b - a)).sum::<T>().sqrt()
    }
}

impl<T: Real> Observer<T> for ActionDriftObserver<T> {
    fn observe(&mut self, s: &PhaseState<T>) {
        let d = self.drift_of(s);
        if d > self.max_drift {
            self.max_drift = d;
        }
    }
}

/// Strided samples of a run plus every refined section crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<PhaseState<T>>,
    pub events: Vec<SectionEvent<T>>,
    pub final_state: PhaseState<T>,
}

impl<T: Real> Trajectory<T> {
    /// Net pendulum turns between the first and final state.
    pub fn winding_change(&self) -> i64 {
        self.final_state.pendulum_winding() - self.states[0].pendulum_winding()
    }
}

/// Integrate for `duration` (the last step is shortened so the run ends
/// exactly at `start.time + duration`), recording strided states and all
/// section crossings.
pub fn integrate<T: Real>(
    start: &PhaseState<T>,
    duration: T,
    mu: T,
    pert: &TrigPerturbation<T>,
    cfg: &StepperConfig<T>,
    observers: &mut [&mut dyn Observer<T>],
) -> Result<Trajectory<T>, IntegrationError> {
    cfg.validate()?;
    if start.dim() != pert.dim() {
        return Err(IntegrationError::DimensionMismatch { state: start.dim(), pert: pert.dim() });
    }
    let steps = if duration <= T::zero() {
        0
    } else {
        (duration / cfg.dt - T::lit(1e-9)).ceil().to_usize().unwrap_or(usize::MAX).max(1)
    };
    if steps > cfg.max_steps {
        return Err(IntegrationError::StepCapExceeded { needed: steps, cap: cfg.max_steps });
    }
    let h = if steps == 0 { T::zero() } else { duration / T::from_usize(steps).unwrap() };
    let t0 = start.time;

    let mut stepper = Stepper::new(mu, pert, cfg.scheme);
    let mut traj = Trajectory {
        times: vec![start.time],
        states: vec![start.clone()],
        events: Vec::new(),
        final_state: start.clone(),
    };
    let mut cur = start.clone();
    let mut level = start_level(cur.q, cur.p, cfg.section_tol);
    for i in 1..=steps {
        let prev = cur.clone();
        stepper.checked_advance(&mut cur, h)?;
        // pin the clock to the grid to avoid accumulated rounding in t
        cur.time = t0 + h * T::from_usize(i).unwrap();
        for obs in observers.iter_mut() {
            obs.observe(&cur);
        }
        let new_level = crossing_level(cur.q);
        if new_level != level {
            let target = crossed_section(level, new_level);
            let ev = refine(&stepper, &prev, &cur, target, cfg.section_tol, traj.events.len())?;
            traj.events.push(ev);
            level = new_level;
        }
        if i % cfg.record_stride == 0 || i == steps {
            traj.times.push(cur.time);
            traj.states.push(cur.clone());
        }
    }
    traj.final_state = cur;
    Ok(traj)
}

fn fmt<T: Real>(x: T) -> String {
    format!("{:?}", x.as_f64())
}

/// CSV with header `t, phi_1..phi_d, I_1..I_d, q, p, E_pend, H`.
pub fn write_trajectory_csv<T: Real, W: Write>(
    traj: &Trajectory<T>,
    mu: T,
    pert: &TrigPerturbation<T>,
    mut out: W,
) -> std::io::Result<()> {
    let d = pert.dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|i| format!("phi_{i}")));
    header.extend((1..=d).map(|i| format!("I_{i}")));
    header.extend(["q", "p", "E_pend", "H"].map(String::from));
    writeln!(out, "{}", header.join(","))?;
    for s in &traj.states {
        let mut row = vec![fmt(s.time)];
        row.extend(s.phi.iter().map(|&x| fmt(x)));
        row.extend(s.action.iter().map(|&x| fmt(x)));
        row.push(fmt(s.q));
        row.push(fmt(s.p));
        row.push(fmt(s.pendulum_energy()));
        row.push(fmt(hamiltonian(s, mu, pert)));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// CSV with header `index, theta, phi_1..phi_d, I_1..I_d, q, p`.
pub fn write_events_csv<T: Real, W: Write>(events: &[SectionEvent<T>], d: usize, mut out: W) -> std::io::Result<()> {
    let mut header = vec!["index".to_string(), "theta".to_string()];
    header.extend((1..=d).map(|i| format!("phi_{i}")));
    header.extend((1..=d).map(|i| format!("I_{i}")));
    header.extend(["q", "p"].map(String::from));
    writeln!(out, "{}", header.join(","))?;
    for ev in events {
        let mut row = vec![ev.index.to_string(), fmt(ev.theta)];
        row.extend(ev.state.phi.iter().map(|&x| fmt(x)));
        row.extend(ev.state.action.iter().map(|&x| fmt(x)));
        row.push(fmt(ev.state.q));
        row.push(fmt(ev.state.p));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
