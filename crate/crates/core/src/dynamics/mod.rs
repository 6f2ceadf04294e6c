//! Phase space, perturbation, vector field and Hamiltonian of the
//! rotator–pendulum system
//!
//! ```text
//! H_μ = I²/2 + p²/2 + (cos q − 1) + μ f(φ, q, t)
//! φ̇ = I,   İ = −μ ∂_φ f,   q̇ = p,   ṗ = sin q − μ ∂_q f
//! ```
//!
//! The pendulum's stable equilibrium sits at `q = π` and the hyperbolic one at
//! `q = 0 (mod 2π)`, so the separatrix passes through its apex `q = π` with
//! `p = ±2`.

mod perturbation;
pub mod spec_file;

pub use perturbation::{AngleFn, Mode, NormKind, PerturbationError, QPolynomial, TrigPerturbation};
pub use spec_file::{resolve_perturbation, SpecFileError};

use thiserror::Error;

use crate::scalar::{wrap_angle, Real};

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("phase state needs d ≥ 1 rotators")]
    ZeroDimension,
    #[error("angle vector has {phi} entries but action vector has {action}")]
    LengthMismatch { phi: usize, action: usize },
    #[error("phase state contains a non-finite entry")]
    NonFinite,
}

/// Full phase point `(φ, I, q, p, t)`.
///
/// Angles are stored unreduced so winding counts survive; use
/// [`PhaseState::reduced_phi`] / [`PhaseState::reduced_q`] to reduce.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState<T> {
    pub phi: Vec<T>,
    pub action: Vec<T>,
    pub q: T,
    pub p: T,
    pub time: T,
}

impl<T: Real> PhaseState<T> {
    pub fn new(phi: Vec<T>, action: Vec<T>, q: T, p: T, time: T) -> Result<Self, StateError> {
        let s = Self { phi, action, q, p, time };
        s.validate()?;
        Ok(s)
    }

    /// Point of the invariant torus `𝒯_ω = {I = ω, q = p = 0}`.
    pub fn on_torus(omega: &[T], phi: Vec<T>, time: T) -> Result<Self, StateError> {
        Self::new(phi, omega.to_vec(), T::zero(), T::zero(), time)
    }

    pub fn validate(&self) -> Result<(), StateError> {
        if self.phi.is_empty() {
            return Err(StateError::ZeroDimension);
        }
        if self.phi.len() != self.action.len() {
            return Err(StateError::LengthMismatch { phi: self.phi.len(), action: self.action.len() });
        }
        if !self.is_finite() {
            return Err(StateError::NonFinite);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite()
            && self.p.is_finite()
            && self.time.is_finite()
            && self.phi.iter().chain(&self.action).all(|x| x.is_finite())
    }

    /// Largest absolute phase-space coordinate (time excluded).
    pub fn max_abs(&self) -> T {
        self.phi.iter().chain(&self.action).chain([&self.q, &self.p]).fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn reduced_phi(&self) -> Vec<T> {
        self.phi.iter().map(|&x| wrap_angle(x)).collect()
    }

    pub fn reduced_q(&self) -> T {
        wrap_angle(self.q)
    }

    /// Number of full turns of the pendulum angle, `⌊q / 2π⌋`.
    pub fn pendulum_winding(&self) -> i64 {
        (self.q / T::two_pi()).floor().to_i64().unwrap_or(0)
    }

    pub fn pendulum_energy(&self) -> T {
        pendulum_energy(self.q, self.p)
    }
}

/// Time derivative of a [`PhaseState`] (time itself advances at unit rate).
#[derive(Debug, Clone, PartialEq)]
pub struct StateDerivative<T> {
    pub dphi: Vec<T>,
    pub daction: Vec<T>,
    pub dq: T,
    pub dp: T,
}

/// `E(q, p) = p²/2 + cos q − 1`; zero on the separatrix level set.
#[inline]
pub fn pendulum_energy<T: Real>(q: T, p: T) -> T {
    p * p / T::lit(2.0) + q.cos() - T::one()
}

/// Unperturbed separatrix `q₀(t) = 4 arctan(eᵗ)`, `p₀(t) = 2 / cosh t`,
/// with `q₀(0) = π`. Beyond `|t| > 700` the asymptotic limits are returned.
pub fn separatrix_state<T: Real>(t: T) -> (T, T) {
    let cutoff = T::lit(700.0);
    if t > cutoff {
        return (T::two_pi(), T::zero());
    }
    if t < -cutoff {
        return (T::zero(), T::zero());
    }
    let q = if t > T::zero() {
        // 2π − 4 arctan(e^{−t}) keeps precision near the upper equilibrium
        T::two_pi() - T::lit(4.0) * (-t).exp().atan()
    } else {
        T::lit(4.0) * t.exp().atan()
    };
    (q, T::lit(2.0) / t.cosh())
}

/// Distance of `q₀(t)` from the nearest hyperbolic equilibrium, `4 arctan(e^{−|t|})`.
pub fn separatrix_gap<T: Real>(t: T) -> T {
    T::lit(4.0) * (-t.abs()).exp().atan()
}

/// Right-hand side of the perturbed system.
pub fn vector_field<T: Real>(state: &PhaseState<T>, mu: T, pert: &TrigPerturbation<T>) -> StateDerivative<T> {
    let (dphi_f, dq_f) = pert.grad(&state.phi, state.q, state.time);
    StateDerivative {
        dphi: state.action.clone(),
        daction: dphi_f.into_iter().map(|g| -mu * g).collect(),
        dq: state.p,
        dp: state.q.sin() - mu * dq_f,
    }
}

/// `H_μ = |I|²/2 + E(q, p) + μ f(φ, q, t)`.
pub fn hamiltonian<T: Real>(state: &PhaseState<T>, mu: T, pert: &TrigPerturbation<T>) -> T {
    let kinetic: T = state.action.iter().map(|&x| x * x).sum::<T>() / T::lit(2.0);
    kinetic + pendulum_energy(state.q, state.p) + mu * pert.eval(&state.phi, state.q, state.time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn arnold() -> TrigPerturbation<f64> {
        TrigPerturbation::<f64>::arnold(1)
    }

    #[test]
    fn energy_examples() {
        assert_eq!(pendulum_energy(0.0, 0.0), 0.0);
        assert!(pendulum_energy(PI, 2.0).abs() < 1e-15);
        assert!((pendulum_energy(PI, 0.0) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn separatrix_examples() {
        let (q, p) = separatrix_state(0.0_f64);
        assert!((q - PI).abs() < 1e-15 && (p - 2.0).abs() < 1e-15);
        assert_eq!(separatrix_state(800.0_f64), (2.0 * PI, 0.0));
        assert_eq!(separatrix_state(-800.0_f64), (0.0, 0.0));
        let (q1, _) = separatrix_state(1.0_f64);
        let want = 1.0 - 2.0 / 1.0_f64.cosh().powi(2);
        assert!((q1.cos() - want).abs() < 1e-15);
    }

    #[test]
    fn separatrix_stays_on_zero_energy() {
        for i in -300..=300 {
            let t = i as f64 * 0.1;
            let (q, p) = separatrix_state(t);
            assert!(pendulum_energy(q, p).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn arnold_eval_examples() {
        let f = arnold();
        for &(phi, t) in &[(0.3, 1.2), (-2.0, 5.0)] {
            assert_eq!(f.eval(&[phi], 0.0, t), 0.0);
        }
        assert!((f.eval(&[0.0], PI, 0.0) - 4.0).abs() < 1e-15);
        assert!((f.eval(&[PI / 2.0], PI, 0.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn arnold_gradient_examples() {
        let f = arnold();
        let (dphi, dq) = f.grad(&[0.7], 0.0, 0.4);
        assert_eq!(dphi, vec![0.0]);
        assert_eq!(dq, 0.0);
        let (_, dq) = f.grad(&[0.0], PI, 0.0);
        assert!(dq.abs() < 1e-15);

        let only_q = TrigPerturbation::new(
            2,
            2,
            NormKind::L1,
            vec![Mode {
                n: vec![0, 0],
                l: 1,
                angle: AngleFn::Sin,
                profile: QPolynomial::new(0.5, vec![1.0], vec![0.3]),
            }],
        )
        .unwrap();
        let (dphi, _) = only_q.grad(&[0.2, -1.1], 1.3, 0.6);
        assert_eq!(dphi, vec![0.0, 0.0]);
    }

    #[test]
    fn field_examples() {
        let f = arnold();
        let torus = PhaseState::on_torus(&[0.37], vec![1.0], 0.0).unwrap();
        let v = vector_field(&torus, 0.0, &f);
        assert_eq!((v.dphi[0], v.daction[0], v.dq, v.dp), (0.37, 0.0, 0.0, 0.0));

        // μ = 0 on the separatrix: (q̇, ṗ) = d/dt separatrix_state
        let t = 0.8;
        let (q, p) = separatrix_state(t);
        let s = PhaseState::new(vec![0.0], vec![0.0], q, p, t).unwrap();
        let v = vector_field(&s, 0.0, &f);
        let h = 1e-6;
        let (qa, pa) = separatrix_state(t + h);
        let (qb, pb) = separatrix_state(t - h);
        assert!((v.dq - (qa - qb) / (2.0 * h)).abs() < 1e-8);
        assert!((v.dp - (pa - pb) / (2.0 * h)).abs() < 1e-8);

        let s = PhaseState::new(vec![1.1], vec![0.2], 0.0, 0.3, 2.0).unwrap();
        assert_eq!(vector_field(&s, 0.5, &f).daction[0], 0.0);
    }

    #[test]
    fn hamiltonian_examples() {
        let f = arnold();
        let s = PhaseState::on_torus(&[0.3_f64, 0.4], vec![0.0, 0.0], 0.0).unwrap();
        let f2 = TrigPerturbation::<f64>::arnold(2);
        assert!((hamiltonian(&s, 0.0, &f2) - 0.125).abs() < 1e-15);

        let (q, p) = separatrix_state(0.4);
        let s = PhaseState::new(vec![0.0], vec![0.0], q, p, 0.0).unwrap();
        assert!(hamiltonian(&s, 0.0, &f).abs() < 1e-15);

        let s = PhaseState::new(vec![0.0], vec![0.0], PI, 0.0, 0.0).unwrap();
        assert!((hamiltonian(&s, 0.1, &f) - (-2.0 + 0.4)).abs() < 1e-15);
    }

    #[test]
    fn state_validation() {
        assert_eq!(PhaseState::<f64>::new(vec![], vec![], 0.0, 0.0, 0.0), Err(StateError::ZeroDimension));
        assert!(matches!(
            PhaseState::new(vec![0.0], vec![0.0, 1.0], 0.0, 0.0, 0.0),
            Err(StateError::LengthMismatch { .. })
        ));
        assert_eq!(PhaseState::new(vec![f64::NAN], vec![0.0], 0.0, 0.0, 0.0), Err(StateError::NonFinite));
    }

    #[test]
    fn angles_reduce_only_on_request() {
        let s = PhaseState::new(vec![7.0], vec![0.0], -0.5, 0.0, 0.0).unwrap();
        assert_eq!(s.phi[0], 7.0);
        assert!((s.reduced_phi()[0] - (7.0 - 2.0 * PI)).abs() < 1e-15);
        assert_eq!(s.pendulum_winding(), -1);
        let s = PhaseState::new(vec![0.0], vec![0.0], 13.0, 0.0, 0.0).unwrap();
        assert_eq!(s.pendulum_winding(), 2);
    }

    #[test]
    fn order_violations_rejected() {
        let err = TrigPerturbation::<f64>::new(
            1,
            1,
            NormKind::L1,
            vec![Mode { n: vec![1], l: 1, angle: AngleFn::Cos, profile: QPolynomial::constant(1.0) }],
        )
        .unwrap_err();
        assert!(matches!(err, PerturbationError::OrderExceeded { .. }));
        // same mode fits in ℓ∞
        assert!(TrigPerturbation::<f64>::new(
            1,
            1,
            NormKind::Linf,
            vec![Mode { n: vec![1], l: 1, angle: AngleFn::Cos, profile: QPolynomial::constant(1.0) }],
        )
        .is_ok());
    }

    #[test]
    fn generic_over_f32() {
        let f = TrigPerturbation::<f32>::arnold(1);
        assert!((f.eval(&[0.0], std::f32::consts::PI, 0.0) - 4.0).abs() < 1e-5);
        let (q, p) = separatrix_state(0.0_f32);
        assert!(pendulum_energy(q, p).abs() < 1e-5);
    }
}
