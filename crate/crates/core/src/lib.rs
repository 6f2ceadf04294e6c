//! Numerical laboratory for a-priori unstable, nearly integrable Hamiltonian
//! systems: `d` rotators weakly coupled to a pendulum through a
//! trigonometric-polynomial perturbation,
//!
//! ```text
//! H_μ = |I|²/2 + p²/2 + (cos q − 1) + μ f(φ, q, t).
//! ```
//!
//! Modules:
//! - [`dynamics`]: phase space, perturbations, vector field, separatrix.
//! - [`integrator`]: symplectic splitting steppers and section events at `q = π`.
//! - [`melnikov`]: the Poincaré–Melnikov primitive and certified minima.
//! - [`resonance`]: the resonant web and clearance certification of frequency paths.
//! - [`ergodization`]: dual-lattice enumeration and ergodization-time bounds.
//! - [`experiments`]: pseudo-diffusion orbits, time-law fits, stability runs.
//!
//! The numerical core is generic over [`Real`] (`f32`/`f64`); the `*64`
//! aliases below fix it to `f64`, which all stated tolerances assume.

pub mod dynamics;
pub mod ergodization;
pub mod experiments;
pub mod integrator;
pub mod linalg;
pub mod melnikov;
pub mod quadrature;
pub mod resonance;
pub mod scalar;

pub use scalar::Real;

pub type PhaseState64 = dynamics::PhaseState<f64>;
pub type TrigPerturbation64 = dynamics::TrigPerturbation<f64>;
pub type QPolynomial64 = dynamics::QPolynomial<f64>;
pub type StepperConfig64 = integrator::StepperConfig<f64>;
pub type Trajectory64 = integrator::Trajectory<f64>;
pub type MelnikovModel64 = melnikov::MelnikovModel<f64>;
pub type MinimumCertificate64 = melnikov::MinimumCertificate<f64>;
pub type ResonanceSet64 = resonance::ResonanceSet;
pub type PathSpec64 = resonance::PathSpec<f64>;
pub type Lattice64 = ergodization::Lattice<f64>;

pub type PhaseState32 = dynamics::PhaseState<f32>;
pub type TrigPerturbation32 = dynamics::TrigPerturbation<f32>;
