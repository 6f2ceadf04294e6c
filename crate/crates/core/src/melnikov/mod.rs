//! The Poincaré–Melnikov primitive
//!
//! ```text
//! Γ(ω, φ₀, θ₀) = −∫_ℝ [ f(ωt + φ₀, q₀(t), t + θ₀) − f(ωt + φ₀, 0, t + θ₀) ] dt
//! ```
//!
//! evaluated semi-analytically. For each term `g(q)·trig(n·φ + l t)` of the
//! perturbation the transform `M(ν) = ∫ [g(q₀(t)) − g(0)] e^{iνt} dt`,
//! `ν = n·ω + l`, is computed once by quadrature; afterwards Γ and its
//! derivatives are finite trigonometric sums in `ψ = n·φ₀ + l θ₀`.

mod minimize;

pub use minimize::{
    find_minimum, scan_frequency_segment, CertificateReport, CriticalKind, MinimumCertificate, ScanSample,
};

use num_complex::Complex;
use thiserror::Error;

use crate::dynamics::{AngleFn, QPolynomial, TrigPerturbation};
use crate::linalg::Matrix;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::scalar::Real;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MelnikovError {
    #[error("frequency has {got} components, perturbation has d = {d}")]
    DimensionMismatch { got: usize, d: usize },
    #[error("mode (n={n:?}, l={l}): quadrature error estimate {achieved:e} above tolerance {tol:e}")]
    Quadrature { n: Vec<i64>, l: i64, achieved: f64, tol: f64 },
    #[error("Melnikov primitive vanishes identically at omega = {omega:?}; no non-degenerate critical point")]
    DegenerateModel { omega: Vec<f64> },
    #[error("minimization at omega = {omega:?} hit the iteration cap with |grad| = {grad_norm:e}")]
    IterationCap { omega: Vec<f64>, grad_norm: f64 },
    #[error("start point has {got} coordinates, expected d + 1 = {want}")]
    BadStart { got: usize, want: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MelnikovConfig<T> {
    /// Half-width of the quadrature window in separatrix time.
    pub t_cut: T,
    /// Absolute and relative tolerance on every mode transform.
    pub quad_tol: T,
    /// Convergence threshold on `|∇Γ|`.
    pub grad_tol: T,
    /// Non-degeneracy threshold relative to `max |M|`.
    pub eig_rel_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for MelnikovConfig<T> {
    fn default() -> Self {
        Self {
            t_cut: T::lit(40.0),
            quad_tol: T::lit(1e-12),
            grad_tol: T::lit(1e-9),
            eig_rel_tol: T::lit(1e-6),
            max_iter: 500,
        }
    }
}

/// A mode transform with its error estimate (quadrature plus analytic tail).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIntegral<T> {
    pub value: Complex<T>,
    pub error: T,
}

/// `M(ν) = ∫_ℝ [g(q₀(t)) − g(0)] e^{iνt} dt` for a q-profile `g`.
///
/// The cosine part of `g` gives an even integrand decaying like `e^{−2|t|}`,
/// the sine part an odd one decaying like `e^{−|t|}`; both are integrated
/// on `[0, t_cut]` and the tails beyond are bounded analytically.
pub fn profile_transform<T: Real>(
    nu: T,
    profile: &QPolynomial<T>,
    cfg: &MelnikovConfig<T>,
) -> Result<ModeIntegral<T>, (T, T)> {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let qcfg = QuadratureConfig { abs_tol: cfg.quad_tol / four, rel_tol: cfg.quad_tol / four, max_intervals: 4000 };
    // s(t) = 4 arctan(e^{−t}) is the gap between q₀(t) and 2π for t ≥ 0
    let gap = |t: T| four * (-t).exp().atan();

    let mut real = T::zero();
    let mut imag = T::zero();
    let mut error = T::zero();
    if profile.cos_coeffs.iter().any(|&a| a != T::zero()) {
        let even = |t: T| {
            let s = gap(t);
            let g: T = profile
                .cos_coeffs
                .iter()
                .enumerate()
                .map(|(k, &a)| {
                    let x = (T::from_usize(k + 1).unwrap() * s / two).sin();
                    -two * a * x * x
                })
                .sum();
            g * (nu * t).cos()
        };
        let r = integrate(even, T::zero(), cfg.t_cut, &qcfg);
        if !r.converged {
            return Err((two * r.error, r.value));
        }
        real = two * r.value;
        error = error + two * r.error;
    }
    if profile.sin_coeffs.iter().any(|&b| b != T::zero()) {
        let odd = |t: T| {
            let s = gap(t);
            let g: T = profile
                .sin_coeffs
                .iter()
                .enumerate()
                .map(|(k, &b)| -b * (T::from_usize(k + 1).unwrap() * s).sin())
                .sum();
            g * (nu * t).sin()
        };
        let r = integrate(odd, T::zero(), cfg.t_cut, &qcfg);
        if !r.converged {
            return Err((two * r.error, r.value));
        }
        imag = two * r.value;
        error = error + two * r.error;
    }
    // |sin²(ks/2)| ≤ 4k²e^{−2t}, |sin(ks)| ≤ 4k e^{−t}
    let eight = T::lit(8.0);
    let tail: T = profile
        .cos_coeffs
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let kf = T::from_usize(k + 1).unwrap();
            eight * kf * kf * a.abs() * (-two * cfg.t_cut).exp()
        })
        .chain(profile.sin_coeffs.iter().enumerate().map(|(k, &b)| {
            let kf = T::from_usize(k + 1).unwrap();
            eight * kf * b.abs() * (-cfg.t_cut).exp()
        }))
        .sum();
    Ok(ModeIntegral { value: Complex::new(real, imag), error: error + tail })
}

/// Transform of one complex Fourier mode `(n, l)` with q-profile `f_nl` along
/// the torus of frequency `omega`.
pub fn mode_integral<T: Real>(
    n: &[i64],
    l: i64,
    omega: &[T],
    f_nl: &QPolynomial<T>,
    cfg: &MelnikovConfig<T>,
) -> Result<ModeIntegral<T>, MelnikovError> {
    if n.len() != omega.len() {
        return Err(MelnikovError::DimensionMismatch { got: omega.len(), d: n.len() });
    }
    let nu = n.iter().zip(omega).fold(T::from_int(l), |acc, (&k, &w)| acc + T::from_int(k) * w);
    let tol = cfg.quad_tol;
    match profile_transform(nu, f_nl, cfg) {
        Ok(m) => {
            let scale = T::one().max(m.value.norm());
            if m.error > tol * scale {
                return Err(MelnikovError::Quadrature {
                    n: n.to_vec(),
                    l,
                    achieved: m.error.as_f64(),
                    tol: (tol * scale).as_f64(),
                });
            }
            Ok(m)
        }
        Err((achieved, _)) => {
            Err(MelnikovError::Quadrature { n: n.to_vec(), l, achieved: achieved.as_f64(), tol: tol.as_f64() })
        }
    }
}

/// Cached transform of one real perturbation term.
#[derive(Debug, Clone, PartialEq)]
pub struct MelnikovTerm<T> {
    pub n: Vec<i64>,
    pub l: i64,
    pub angle: AngleFn,
    pub integral: ModeIntegral<T>,
    /// `κ·M` with `κ = 1` for cosine terms and `κ = −i` for sine terms, so the
    /// term contributes `−Re[w e^{iψ}]` to Γ.
    pub weight: Complex<T>,
}

/// Γ at a fixed frequency, ready for repeated evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct MelnikovModel<T> {
    pub omega: Vec<T>,
    pub terms: Vec<MelnikovTerm<T>>,
    pub t_cut: T,
    pub quad_tol: T,
}

impl<T: Real> MelnikovModel<T> {
    pub fn build(pert: &TrigPerturbation<T>, omega: &[T], cfg: &MelnikovConfig<T>) -> Result<Self, MelnikovError> {
        if omega.len() != pert.dim() {
            return Err(MelnikovError::DimensionMismatch { got: omega.len(), d: pert.dim() });
        }
        let terms = pert
            .modes()
            .iter()
            .map(|m| {
                let integral = mode_integral(&m.n, m.l, omega, &m.profile, cfg)?;
                let weight = match m.angle {
                    AngleFn::Cos => integral.value,
                    AngleFn::Sin => integral.value * Complex::new(T::zero(), -T::one()),
                };
                Ok(MelnikovTerm { n: m.n.clone(), l: m.l, angle: m.angle, integral, weight })
            })
            .collect::<Result<Vec<_>, MelnikovError>>()?;
        Ok(Self { omega: omega.to_vec(), terms, t_cut: cfg.t_cut, quad_tol: cfg.quad_tol })
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    /// Largest `|M|` over the stored terms.
    pub fn max_abs_integral(&self) -> T {
        self.terms.iter().fold(T::zero(), |m, t| m.max(t.integral.value.norm()))
    }

    #[inline]
    fn phase(term: &MelnikovTerm<T>, phi0: &[T], theta0: T) -> T {
        term.n.iter().zip(phi0).fold(T::from_int(term.l) * theta0, |acc, (&n, &x)| acc + T::from_int(n) * x)
    }

    /// Wave vector `(n, l)` as a real vector.
    fn wave(term: &MelnikovTerm<T>) -> Vec<T> {
        term.n.iter().chain(std::iter::once(&term.l)).map(|&k| T::from_int(k)).collect()
    }

    /// `Re[w e^{iψ}]` and `Im[w e^{iψ}]`.
    #[inline]
    fn rotated(term: &MelnikovTerm<T>, psi: T) -> (T, T) {
        let (s, c) = psi.sin_cos();
        let w = term.weight;
        (w.re * c - w.im * s, w.re * s + w.im * c)
    }

    pub fn gamma(&self, phi0: &[T], theta0: T) -> T {
        -self.terms.iter().map(|t| Self::rotated(t, Self::phase(t, phi0, theta0)).0).sum::<T>()
    }

    /// `∇Γ` with respect to `(φ₀, θ₀)`.
    pub fn gamma_grad(&self, phi0: &[T], theta0: T) -> Vec<T> {
        let mut g = vec![T::zero(); self.dim() + 1];
        for t in &self.terms {
            // d/dψ of −Re[w e^{iψ}] is Im[w e^{iψ}]
            let (_, im) = Self::rotated(t, Self::phase(t, phi0, theta0));
            for (out, k) in g.iter_mut().zip(Self::wave(t)) {
                *out = *out + im * k;
            }
        }
        g
    }

    /// Hessian of Γ with respect to `(φ₀, θ₀)`.
    pub fn gamma_hess(&self, phi0: &[T], theta0: T) -> Matrix<T> {
        let m = self.dim() + 1;
        let mut h = vec![vec![T::zero(); m]; m];
        for t in &self.terms {
            let (re, _) = Self::rotated(t, Self::phase(t, phi0, theta0));
            let k = Self::wave(t);
            for i in 0..m {
                for j in 0..m {
                    h[i][j] = h[i][j] + re * k[i] * k[j];
                }
            }
        }
        h
    }

    /// Evaluate at a packed point `x = (φ₀, θ₀)`.
    pub fn gamma_at(&self, x: &[T]) -> T {
        let (phi, theta) = x.split_at(self.dim());
        self.gamma(phi, theta[0])
    }

    pub fn gamma_grad_at(&self, x: &[T]) -> Vec<T> {
        let (phi, theta) = x.split_at(self.dim());
        self.gamma_grad(phi, theta[0])
    }

    pub fn gamma_hess_at(&self, x: &[T]) -> Matrix<T> {
        let (phi, theta) = x.split_at(self.dim());
        self.gamma_hess(phi, theta[0])
    }
}
