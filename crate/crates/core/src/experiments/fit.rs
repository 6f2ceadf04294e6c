//! Least-squares fits of diffusion time against `(1/μ)·ln(1/μ)` and the
//! competing `1/μ²` law.

use serde::{Deserialize, Serialize};

use super::{DiffusionRecord, ExperimentError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    /// `T_d = C·(1/μ)·ln(1/μ)`.
    InvMuLog,
    /// `T_d = C/μ²`.
    InvMuSquared,
}

impl Law {
    pub fn regressor(self, mu: f64) -> f64 {
        match self {
            Law::InvMuLog => (1.0 / mu) * (1.0 / mu).ln(),
            Law::InvMuSquared => 1.0 / (mu * mu),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawFit {
    pub law: Law,
    pub c_hat: f64,
    /// `max |T_d − Ĉx| / T_d` over the points.
    pub max_rel_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeLawFit {
    pub points: usize,
    pub log_law: LawFit,
    pub competing: LawFit,
    /// The law with the smaller residual; ties go to the log law.
    pub preferred: Law,
}

fn fit_one(points: &[(f64, f64)], law: Law) -> LawFit {
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(mu, t)| {
        let x = law.regressor(mu);
        (sxy + x * t, sxx + x * x)
    });
    let c_hat = sxy / sxx;
    let max_rel_residual =
        points.iter().map(|&(mu, t)| ((t - c_hat * law.regressor(mu)) / t).abs()).fold(0.0, f64::max);
    LawFit { law, c_hat, max_rel_residual }
}

/// Fit through the origin on `(μ, T_d)` pairs.
pub fn fit_time_law_points(points: &[(f64, f64)]) -> Result<TimeLawFit, ExperimentError> {
    let usable: Vec<(f64, f64)> =
        points.iter().copied().filter(|&(mu, t)| mu > 0.0 && mu < 1.0 && t.is_finite() && t > 0.0).collect();
    if usable.len() < 3 {
        return Err(ExperimentError::TooFewRecords(usable.len()));
    }
    if usable.iter().all(|p| p.0 == usable[0].0) {
        return Err(ExperimentError::DegenerateDesign);
    }
    let log_law = fit_one(&usable, Law::InvMuLog);
    let competing = fit_one(&usable, Law::InvMuSquared);
    let preferred =
        if log_law.max_rel_residual <= competing.max_rel_residual { Law::InvMuLog } else { Law::InvMuSquared };
    Ok(TimeLawFit { points: usable.len(), log_law, competing, preferred })
}

/// Fit `T_d` of the records that reached the final frequency.
pub fn fit_time_law(records: &[DiffusionRecord]) -> Result<TimeLawFit, ExperimentError> {
    let points: Vec<(f64, f64)> = records.iter().filter(|r| r.reached).map(|r| (r.mu, r.t_total())).collect();
    fit_time_law_points(&points)
}
