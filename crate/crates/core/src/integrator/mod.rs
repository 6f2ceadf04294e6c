//! Symmetric splitting integrators for the rotator–pendulum system.
//!
//! The Hamiltonian splits as kinetic `|I|²/2 + p²/2` (drift) plus the
//! time-dependent potential `(cos q − 1) + μ f(φ, q, t)` (kick). Time is
//! carried by the drift, so a drift–kick–drift step evaluates the kick at the
//! midpoint time and stays second order for non-autonomous `f`.

mod section;
mod trajectory;

pub use section::{crossing_level, SectionEvent};
pub use trajectory::{
    integrate, write_events_csv, write_trajectory_csv, ActionDriftObserver, EnergyObserver, Observer, Trajectory,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{vector_field, PhaseState, StateDerivative, TrigPerturbation};
use crate::scalar::Real;

/// States with any coordinate above this magnitude abort the run.
pub const BLOW_UP_THRESHOLD: f64 = 1e8;

#[derive(Debug, Error, PartialEq)]
pub enum IntegrationError {
    #[error("invalid stepper configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("state dimension {state} does not match perturbation dimension {pert}")]
    DimensionMismatch { state: usize, pert: usize },
    #[error("integration blew up at t = {time} (max |coordinate| = {magnitude})")]
    BlowUp { time: f64, magnitude: f64 },
    #[error("{needed} steps required but max_steps = {cap}")]
    StepCapExceeded { needed: usize, cap: usize },
    #[error("section crossing refinement did not converge near t = {time} (residual {residual})")]
    SectionRefinement { time: f64, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Drift–kick–drift, order 2.
    #[default]
    Strang2,
    /// Triple-jump composition of `Strang2`, order 4.
    Yoshida4,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::Strang2 => 2,
            Scheme::Yoshida4 => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig<T> {
    pub dt: T,
    pub scheme: Scheme,
    /// Tolerance on `|q − (π + 2πm)|` for refined section events.
    pub section_tol: T,
    pub max_steps: usize,
    /// Keep every `record_stride`-th state in a [`Trajectory`].
    pub record_stride: usize,
}

impl<T: Real> StepperConfig<T> {
    pub fn new(dt: T, scheme: Scheme) -> Self {
        Self { dt, scheme, section_tol: T::lit(1e-12), max_steps: 100_000_000, record_stride: 1 }
    }

    pub fn validate(&self) -> Result<(), IntegrationError> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(IntegrationError::InvalidConfig("dt must be positive"));
        }
        if !(self.section_tol > T::zero()) {
            return Err(IntegrationError::InvalidConfig("section_tol must be positive"));
        }
        if self.max_steps == 0 {
            return Err(IntegrationError::InvalidConfig("max_steps must be at least 1"));
        }
        if self.record_stride == 0 {
            return Err(IntegrationError::InvalidConfig("record_stride must be at least 1"));
        }
        Ok(())
    }
}

/// Reusable stepping context for one `(μ, f)` pair.
pub struct Stepper<'a, T> {
    pub mu: T,
    pub pert: &'a TrigPerturbation<T>,
    pub scheme: Scheme,
    grad_phi: Vec<T>,
}

impl<'a, T: Real> Stepper<'a, T> {
    pub fn new(mu: T, pert: &'a TrigPerturbation<T>, scheme: Scheme) -> Self {
        Self { mu, pert, scheme, grad_phi: vec![T::zero(); pert.dim()] }
    }

    #[inline]
    fn drift(s: &mut PhaseState<T>, h: T) {
        for (x, &v) in s.phi.iter_mut().zip(&s.action) {
            *x = *x + v * h;
        }
        s.q = s.q + s.p * h;
        s.time = s.time + h;
    }

    #[inline]
    fn kick(&mut self, s: &mut PhaseState<T>, h: T) {
        let dq_f = if self.mu == T::zero() {
            T::zero()
        } else {
            let dq = self.pert.grad_into(&s.phi, s.q, s.time, &mut self.grad_phi);
            for (a, &g) in s.action.iter_mut().zip(&self.grad_phi) {
                *a = *a - h * self.mu * g;
            }
            dq
        };
        s.p = s.p + h * (s.q.sin() - self.mu * dq_f);
    }

    #[inline]
    fn strang(&mut self, s: &mut PhaseState<T>, h: T) {
        let half = h / T::lit(2.0);
        Self::drift(s, half);
        self.kick(s, h);
        Self::drift(s, half);
    }

    /// One step of signed size `h`, without blow-up checks.
    pub fn advance(&mut self, s: &mut PhaseState<T>, h: T) {
        match self.scheme {
            Scheme::Strang2 => self.strang(s, h),
            Scheme::Yoshida4 => {
                let cbrt2 = T::lit(2.0).cbrt();
                let w1 = T::one() / (T::lit(2.0) - cbrt2);
                let w0 = -cbrt2 * w1;
                self.strang(s, w1 * h);
                self.strang(s, w0 * h);
                self.strang(s, w1 * h);
            }
        }
    }

    /// One step with the blow-up guard.
    pub fn checked_advance(&mut self, s: &mut PhaseState<T>, h: T) -> Result<(), IntegrationError> {
        self.advance(s, h);
        let magnitude = s.max_abs();
        if !s.is_finite() || magnitude > T::lit(BLOW_UP_THRESHOLD) {
            return Err(IntegrationError::BlowUp { time: s.time.as_f64(), magnitude: magnitude.as_f64() });
        }
        Ok(())
    }

    pub fn derivative(&self, s: &PhaseState<T>) -> StateDerivative<T> {
        vector_field(s, self.mu, self.pert)
    }

    /// Integrate from `start` until the first section crossing, or until
    /// `max_duration` elapses (`Ok(None)`).
    ///
    /// A start state lying on the section does not count as a crossing.
    pub fn next_crossing(
        &mut self,
        start: &PhaseState<T>,
        max_duration: T,
        cfg: &StepperConfig<T>,
        mut observer: Option<&mut dyn Observer<T>>,
    ) -> Result<Option<SectionEvent<T>>, IntegrationError> {
        let steps = (max_duration / cfg.dt).ceil().to_usize().unwrap_or(usize::MAX);
        if steps > cfg.max_steps {
            return Err(IntegrationError::StepCapExceeded { needed: steps, cap: cfg.max_steps });
        }
        let mut level = section::start_level(start.q, start.p, cfg.section_tol);
        let mut cur = start.clone();
        for _ in 0..steps {
            let prev = cur.clone();
            self.checked_advance(&mut cur, cfg.dt)?;
            if let Some(obs) = observer.as_deref_mut() {
                obs.observe(&cur);
            }
            let new_level = crossing_level(cur.q);
            if new_level != level {
                let target = section::crossed_section(level, new_level);
                let event = section::refine(self, &prev, &cur, target, cfg.section_tol, 0)?;
                return Ok(Some(event));
            }
            level = new_level;
        }
        Ok(None)
    }
}

/// One step of the configured scheme on a copy of `state`.
pub fn step<T: Real>(
    state: &PhaseState<T>,
    mu: T,
    pert: &TrigPerturbation<T>,
    cfg: &StepperConfig<T>,
) -> Result<PhaseState<T>, IntegrationError> {
    cfg.validate()?;
    if state.dim() != pert.dim() {
        return Err(IntegrationError::DimensionMismatch { state: state.dim(), pert: pert.dim() });
    }
    let mut s = state.clone();
    Stepper::new(mu, pert, cfg.scheme).checked_advance(&mut s, cfg.dt)?;
    Ok(s)
}
