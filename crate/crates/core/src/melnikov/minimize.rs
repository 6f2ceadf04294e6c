//! Critical-point search for Γ on the torus 𝕋^{d+1} and its certificates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MelnikovConfig, MelnikovError, MelnikovModel};
use crate::dynamics::TrigPerturbation;
use crate::linalg::{inverse_and_det, mat_vec, symmetric_eigenvalues};
use crate::scalar::{dot, norm2, wrap_angle, Real};

/// Morse type of a critical point, read off the Hessian spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Minimum,
    Saddle,
    Maximum,
    /// Some eigenvalue lies inside `(−eig_tol, eig_tol)`.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimumCertificate<T> {
    pub omega: Vec<T>,
    /// `(φ₀*, θ₀*)` reduced to `[0, 2π)`.
    pub minimizer: Vec<T>,
    pub value: T,
    pub grad_norm: T,
    /// Ascending.
    pub hess_eigs: Vec<T>,
    pub eig_tol: T,
    pub nondegenerate: bool,
    pub kind: CriticalKind,
    pub iterations: usize,
}

/// Serialized form of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub omega: Vec<f64>,
    pub minimizer: Vec<f64>,
    pub grad_norm: f64,
    pub hess_eigs: Vec<f64>,
    pub nondegenerate: bool,
}

impl<T: Real> MinimumCertificate<T> {
    pub fn report(&self) -> CertificateReport {
        CertificateReport {
            omega: self.omega.iter().map(|x| x.as_f64()).collect(),
            minimizer: self.minimizer.iter().map(|x| x.as_f64()).collect(),
            grad_norm: self.grad_norm.as_f64(),
            hess_eigs: self.hess_eigs.iter().map(|x| x.as_f64()).collect(),
            nondegenerate: self.nondegenerate,
        }
    }
}

fn classify<T: Real>(eigs: &[T], eig_tol: T) -> CriticalKind {
    if eigs.iter().any(|e| e.abs() < eig_tol) {
        CriticalKind::Degenerate
    } else if eigs.iter().all(|&e| e > T::zero()) {
        CriticalKind::Minimum
    } else if eigs.iter().all(|&e| e < T::zero()) {
        CriticalKind::Maximum
    } else {
        CriticalKind::Saddle
    }
}

/// Damped Newton on the torus with a gradient-descent fallback.
///
/// Converges to whatever critical point the start leads to; a saddle or a
/// maximum comes back as a certificate with `nondegenerate = false`.
pub fn find_minimum<T: Real>(
    model: &MelnikovModel<T>,
    start: &[T],
    cfg: &MelnikovConfig<T>,
) -> Result<MinimumCertificate<T>, MelnikovError> {
    let m = model.dim() + 1;
    if start.len() != m {
        return Err(MelnikovError::BadStart { got: start.len(), want: m });
    }
    let scale = model.max_abs_integral();
    let omega64 = || model.omega.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
    if scale == T::zero() {
        return Err(MelnikovError::DegenerateModel { omega: omega64() });
    }
    let eig_tol = cfg.eig_rel_tol * scale;
    let cap = T::FRAC_PI_2();
    let armijo = T::lit(1e-4);

    let mut x: Vec<T> = start.iter().map(|&v| wrap_angle(v)).collect();
    let mut value = model.gamma_at(&x);
    let mut grad = model.gamma_grad_at(&x);
    let mut iterations = 0;
    while norm2(&grad) > cfg.grad_tol {
        if iterations == cfg.max_iter {
            return Err(MelnikovError::IterationCap { omega: omega64(), grad_norm: norm2(&grad).as_f64() });
        }
        iterations += 1;
        let hess = model.gamma_hess_at(&x);
        let eigs = symmetric_eigenvalues(&hess);
        let newton = if eigs[0] > T::zero() {
            inverse_and_det(&hess).map(|(inv, _)| mat_vec(&inv, &grad).iter().map(|&v| -v).collect::<Vec<_>>())
        } else {
            None
        };
        let is_newton = newton.is_some();
        let mut dir = newton.unwrap_or_else(|| {
            // steepest descent scaled by the largest curvature
            let lip = eigs.iter().fold(T::zero(), |a, e| a.max(e.abs())).max(eig_tol);
            grad.iter().map(|&g| -g / lip).collect()
        });
        let biggest = dir.iter().fold(T::zero(), |a, v| a.max(v.abs()));
        if biggest > cap {
            let s = cap / biggest;
            dir.iter_mut().for_each(|v| *v = *v * s);
        }
        let slope = dot(&grad, &dir);
        let mut alpha = T::one();
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<T> = x.iter().zip(&dir).map(|(&a, &b)| wrap_angle(a + alpha * b)).collect();
            let v = model.gamma_at(&trial);
            if v <= value + armijo * alpha * slope {
                accepted = Some((trial, v));
                break;
            }
            alpha = alpha * T::lit(0.5);
        }
        let (nx, nv) = match accepted {
            Some(a) => a,
            // Γ is flat to roundoff this close to a nondegenerate minimum
            None if is_newton => {
                let trial: Vec<T> = x.iter().zip(&dir).map(|(&a, &b)| wrap_angle(a + b)).collect();
                let v = model.gamma_at(&trial);
                (trial, v)
            }
            None => return Err(MelnikovError::IterationCap { omega: omega64(), grad_norm: norm2(&grad).as_f64() }),
        };
        x = nx;
        value = nv;
        grad = model.gamma_grad_at(&x);
    }
    let hess_eigs = symmetric_eigenvalues(&model.gamma_hess_at(&x));
    let kind = classify(&hess_eigs, eig_tol);
    Ok(MinimumCertificate {
        omega: model.omega.clone(),
        grad_norm: norm2(&grad),
        minimizer: x,
        value,
        hess_eigs,
        eig_tol,
        nondegenerate: kind == CriticalKind::Minimum,
        kind,
        iterations,
    })
}

/// Lowest point of Γ on a uniform grid, used to seed the first search.
pub fn coarse_start<T: Real>(model: &MelnikovModel<T>) -> Vec<T> {
    let m = model.dim() + 1;
    let per_dim = ((4096f64).powf(1.0 / m as f64).floor() as usize).clamp(3, 24);
    let total = per_dim.pow(m as u32);
    let step = T::two_pi() / T::from_usize(per_dim).unwrap();
    let mut best = (T::infinity(), vec![T::zero(); m]);
    let mut point = vec![T::zero(); m];
    for idx in 0..total {
        let mut r = idx;
        for p in point.iter_mut() {
            *p = T::from_usize(r % per_dim).unwrap() * step;
            r /= per_dim;
        }
        let v = model.gamma_at(&point);
        if v < best.0 {
            best = (v, point.clone());
        }
    }
    best.1
}

/// One frequency sample of a segment scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSample<T> {
    pub omega: Vec<T>,
    pub result: Result<MinimumCertificate<T>, MelnikovError>,
}

impl<T: Real> ScanSample<T> {
    /// A sample passes when it carries a nondegenerate minimum.
    pub fn is_certified(&self) -> bool {
        matches!(&self.result, Ok(c) if c.nondegenerate)
    }
}

fn scan_one<T: Real>(
    pert: &TrigPerturbation<T>,
    omega: &[T],
    seed: Option<&[T]>,
    cfg: &MelnikovConfig<T>,
) -> Result<MinimumCertificate<T>, MelnikovError> {
    let model = MelnikovModel::build(pert, omega, cfg)?;
    if model.max_abs_integral() == T::zero() {
        return Err(MelnikovError::DegenerateModel { omega: omega.iter().map(|x| x.as_f64()).collect() });
    }
    let start = match seed {
        Some(s) => s.to_vec(),
        None => coarse_start(&model),
    };
    let cert = find_minimum(&model, &start, cfg)?;
    if cert.nondegenerate || seed.is_none() {
        return Ok(cert);
    }
    // continuation slid off the minimum branch; restart from the grid
    let fresh = find_minimum(&model, &coarse_start(&model), cfg)?;
    Ok(if fresh.nondegenerate { fresh } else { cert })
}

/// Minimize Γ at every frequency sample along a path.
///
/// With `continuation` the minimizer of each sample seeds the next and the
/// scan runs sequentially; without it samples run in parallel, each seeded
/// from a coarse grid.
pub fn scan_frequency_segment<T: Real>(
    pert: &TrigPerturbation<T>,
    gamma_path: &[Vec<T>],
    cfg: &MelnikovConfig<T>,
    continuation: bool,
) -> Vec<ScanSample<T>> {
    if !continuation {
        return gamma_path
            .par_iter()
            .map(|w| ScanSample { omega: w.clone(), result: scan_one(pert, w, None, cfg) })
            .collect();
    }
    let mut seed: Option<Vec<T>> = None;
    gamma_path
        .iter()
        .map(|w| {
            let result = scan_one(pert, w, seed.as_deref(), cfg);
            seed = match &result {
                Ok(c) if c.nondegenerate => Some(c.minimizer.clone()),
                _ => None,
            };
            ScanSample { omega: w.clone(), result }
        })
        .collect()
}
