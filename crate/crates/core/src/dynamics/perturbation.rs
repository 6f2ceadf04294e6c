use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum PerturbationError {
    #[error("rotator count d must be at least 1")]
    ZeroDimension,
    #[error("order N must be at least 1, got {0}")]
    BadOrder(i64),
    #[error("mode (n={n:?}, l={l}) has {got} angle entries, expected d={d}")]
    DimensionMismatch { n: Vec<i64>, l: i64, got: usize, d: usize },
    #[error("mode (n={n:?}, l={l}) exceeds order {order} in the {norm:?} norm")]
    OrderExceeded { n: Vec<i64>, l: i64, order: i64, norm: NormKind },
    #[error("mode (n={n:?}, l={l}, {angle:?}) listed twice")]
    Duplicate { n: Vec<i64>, l: i64, angle: AngleFn },
    #[error("non-finite coefficient in mode (n={n:?}, l={l})")]
    NonFinite { n: Vec<i64>, l: i64 },
}

/// Norm used for the mode order `|(n, l)|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    #[default]
    L1,
    L2,
    Linf,
}

impl NormKind {
    pub fn norm(self, v: &[i64]) -> f64 {
        match self {
            NormKind::L1 => v.iter().map(|x| x.unsigned_abs() as f64).sum(),
            NormKind::L2 => (v.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt(),
            NormKind::Linf => v.iter().map(|x| x.unsigned_abs() as f64).fold(0.0, f64::max),
        }
    }

    /// Exact integer test `|v| ≤ order`.
    pub fn within(self, v: &[i64], order: i64) -> bool {
        match self {
            NormKind::L1 => v.iter().map(|x| x.abs()).sum::<i64>() <= order,
            NormKind::L2 => v.iter().map(|x| x * x).sum::<i64>() <= order * order,
            NormKind::Linf => v.iter().all(|x| x.abs() <= order),
        }
    }
}

/// Which real angle function multiplies a mode's q-profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleFn {
    #[default]
    Cos,
    Sin,
}

impl AngleFn {
    #[inline]
    fn value<T: Real>(self, psi: T) -> T {
        match self {
            AngleFn::Cos => psi.cos(),
            AngleFn::Sin => psi.sin(),
        }
    }

    #[inline]
    fn derivative<T: Real>(self, psi: T) -> T {
        match self {
            AngleFn::Cos => -psi.sin(),
            AngleFn::Sin => psi.cos(),
        }
    }
}

/// Trigonometric polynomial in the pendulum angle:
/// `c + Σ_k a_k cos(k q) + Σ_k b_k sin(k q)`, `k = 1, 2, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct QPolynomial<T> {
    pub constant: T,
    pub cos_coeffs: Vec<T>,
    pub sin_coeffs: Vec<T>,
}

impl<T: Real> QPolynomial<T> {
    pub fn new(constant: T, cos_coeffs: Vec<T>, sin_coeffs: Vec<T>) -> Self {
        Self { constant, cos_coeffs, sin_coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::new(c, Vec::new(), Vec::new())
    }

    /// `1 − cos q`, the profile of Arnold's example.
    pub fn one_minus_cos() -> Self {
        Self::new(T::one(), vec![-T::one()], Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.cos_coeffs.len().max(self.sin_coeffs.len())
    }

    pub fn is_finite(&self) -> bool {
        self.constant.is_finite() && self.cos_coeffs.iter().chain(&self.sin_coeffs).all(|c| c.is_finite())
    }

    pub fn eval(&self, q: T) -> T {
        let mut acc = self.constant;
        for (k, &a) in self.cos_coeffs.iter().enumerate() {
            acc = acc + a * (T::from_usize(k + 1).unwrap() * q).cos();
        }
        for (k, &b) in self.sin_coeffs.iter().enumerate() {
            acc = acc + b * (T::from_usize(k + 1).unwrap() * q).sin();
        }
        acc
    }

    pub fn derivative(&self, q: T) -> T {
        let mut acc = T::zero();
        for (k, &a) in self.cos_coeffs.iter().enumerate() {
            let kf = T::from_usize(k + 1).unwrap();
            acc = acc - a * kf * (kf * q).sin();
        }
        for (k, &b) in self.sin_coeffs.iter().enumerate() {
            let kf = T::from_usize(k + 1).unwrap();
            acc = acc + b * kf * (kf * q).cos();
        }
        acc
    }

    /// Value and derivative in one pass.
    pub fn eval_with_derivative(&self, q: T) -> (T, T) {
        (self.eval(q), self.derivative(q))
    }

    /// `f(q) − f(0)` written without cancellation: `cos kq − 1 = −2 sin²(kq/2)`.
    pub fn deviation_from_zero(&self, q: T) -> T {
        let two = T::lit(2.0);
        let mut acc = T::zero();
        for (k, &a) in self.cos_coeffs.iter().enumerate() {
            let s = (T::from_usize(k + 1).unwrap() * q / two).sin();
            acc = acc - two * a * s * s;
        }
        for (k, &b) in self.sin_coeffs.iter().enumerate() {
            acc = acc + b * (T::from_usize(k + 1).unwrap() * q).sin();
        }
        acc
    }

    /// Upper bound on `sup_q |f(q)|`.
    pub fn sup_bound(&self) -> T {
        self.constant.abs() + self.cos_coeffs.iter().chain(&self.sin_coeffs).map(|c| c.abs()).sum::<T>()
    }

    /// Upper bound on `sup_q |f'(q)|`.
    pub fn derivative_sup_bound(&self) -> T {
        let weighted =
            |cs: &[T]| -> T { cs.iter().enumerate().map(|(k, c)| c.abs() * T::from_usize(k + 1).unwrap()).sum() };
        weighted(&self.cos_coeffs) + weighted(&self.sin_coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.constant == T::zero() && self.cos_coeffs.iter().chain(&self.sin_coeffs).all(|c| *c == T::zero())
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            constant: self.constant * c,
            cos_coeffs: self.cos_coeffs.iter().map(|&a| a * c).collect(),
            sin_coeffs: self.sin_coeffs.iter().map(|&b| b * c).collect(),
        }
    }
}

/// One real Fourier term `profile(q) · trig(n·φ + l t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode<T> {
    pub n: Vec<i64>,
    pub l: i64,
    pub angle: AngleFn,
    pub profile: QPolynomial<T>,
}

impl<T: Real> Mode<T> {
    #[inline]
    pub fn phase(&self, phi: &[T], t: T) -> T {
        self.n.iter().zip(phi).fold(T::from_int(self.l) * t, |acc, (&n, &x)| acc + T::from_int(n) * x)
    }

    /// Integer wave vector `(n, l)`.
    pub fn wave_vector(&self) -> Vec<i64> {
        let mut v = self.n.clone();
        v.push(self.l);
        v
    }

    /// `ν = n·ω + l`, the frequency this term oscillates at along a torus of frequency ω.
    pub fn detuning(&self, omega: &[T]) -> T {
        self.n.iter().zip(omega).fold(T::from_int(self.l), |acc, (&n, &w)| acc + T::from_int(n) * w)
    }
}

/// Purely spatial trigonometric-polynomial perturbation `f(φ, q, t)`.
///
/// Stored in real form, one entry per `(n, l, cos|sin)`, so the reality
/// symmetry `f_{−n,−l} = conj f_{n,l}` of the complex expansion holds by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPerturbation<T> {
    d: usize,
    order: i64,
    norm: NormKind,
    modes: Vec<Mode<T>>,
}

impl<T: Real> TrigPerturbation<T> {
    pub fn new(d: usize, order: i64, norm: NormKind, modes: Vec<Mode<T>>) -> Result<Self, PerturbationError> {
        if d == 0 {
            return Err(PerturbationError::ZeroDimension);
        }
        if order < 1 {
            return Err(PerturbationError::BadOrder(order));
        }
        let mut seen = HashSet::new();
        for m in &modes {
            if m.n.len() != d {
                return Err(PerturbationError::DimensionMismatch { n: m.n.clone(), l: m.l, got: m.n.len(), d });
            }
            if !norm.within(&m.wave_vector(), order) {
                return Err(PerturbationError::OrderExceeded { n: m.n.clone(), l: m.l, order, norm });
            }
            if !m.profile.is_finite() {
                return Err(PerturbationError::NonFinite { n: m.n.clone(), l: m.l });
            }
            if !seen.insert((m.n.clone(), m.l, m.angle)) {
                return Err(PerturbationError::Duplicate { n: m.n.clone(), l: m.l, angle: m.angle });
            }
        }
        Ok(Self { d, order, norm, modes })
    }

    /// Arnold's example `f = (1 − cos q)(cos φ₁ + cos t)`; order 1 in ℓ1.
    pub fn arnold(d: usize) -> Self {
        assert!(d >= 1, "Arnold preset needs at least one rotator");
        let mut e1 = vec![0; d];
        e1[0] = 1;
        let modes = vec![
            Mode { n: e1, l: 0, angle: AngleFn::Cos, profile: QPolynomial::one_minus_cos() },
            Mode { n: vec![0; d], l: 1, angle: AngleFn::Cos, profile: QPolynomial::one_minus_cos() },
        ];
        Self::new(d, 1, NormKind::L1, modes).expect("Arnold preset is valid")
    }

    /// The zero perturbation.
    pub fn zero(d: usize, order: i64, norm: NormKind) -> Self {
        Self::new(d, order, norm, Vec::new()).expect("empty mode table is valid")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    pub fn modes(&self) -> &[Mode<T>] {
        &self.modes
    }

    pub fn is_zero(&self) -> bool {
        self.modes
            .iter()
            .all(|m| m.profile.is_zero() || (m.angle == AngleFn::Sin && m.n.iter().all(|&x| x == 0) && m.l == 0))
    }

    /// Multiply every coefficient by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            d: self.d,
            order: self.order,
            norm: self.norm,
            modes: self.modes.iter().map(|m| Mode { profile: m.profile.scaled(c), ..m.clone() }).collect(),
        }
    }

    pub fn eval(&self, phi: &[T], q: T, t: T) -> T {
        self.modes.iter().map(|m| m.profile.eval(q) * m.angle.value(m.phase(phi, t))).sum()
    }

    /// Writes `∂_φ f` into `dphi` and returns `∂_q f`.
    pub fn grad_into(&self, phi: &[T], q: T, t: T, dphi: &mut [T]) -> T {
        dphi.iter_mut().for_each(|x| *x = T::zero());
        let mut dq = T::zero();
        for m in &self.modes {
            let psi = m.phase(phi, t);
            let (g, dg) = m.profile.eval_with_derivative(q);
            dq = dq + dg * m.angle.value(psi);
            let w = g * m.angle.derivative(psi);
            for (out, &n) in dphi.iter_mut().zip(&m.n) {
                if n != 0 {
                    *out = *out + w * T::from_int(n);
                }
            }
        }
        dq
    }

    /// `(∂_φ f, ∂_q f)`.
    pub fn grad(&self, phi: &[T], q: T, t: T) -> (Vec<T>, T) {
        let mut dphi = vec![T::zero(); self.d];
        let dq = self.grad_into(phi, q, t, &mut dphi);
        (dphi, dq)
    }

    /// Upper bound on `sup |∂_φ f|` (Euclidean norm over the d components).
    pub fn phi_gradient_bound(&self) -> T {
        self.modes
            .iter()
            .map(|m| {
                let n2: T = m.n.iter().map(|&x| T::from_int(x * x)).sum();
                n2.sqrt() * m.profile.sup_bound()
            })
            .sum()
    }

    /// Upper bound on `sup |∂_q f|`.
    pub fn q_gradient_bound(&self) -> T {
        self.modes.iter().map(|m| m.profile.derivative_sup_bound()).sum()
    }
}
