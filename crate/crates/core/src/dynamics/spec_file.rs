//! TOML perturbation files.
//!
//! ```toml
//! d = 1
//! order = 1            # alias: N
//! norm_kind = "l1"     # l1 | l2 | linf
//!
//! [[modes]]
//! n = [1]
//! l = 0
//! angle = "cos"        # cos | sin, multiplies the profile by trig(n·φ + l t)
//! const = 1.0
//! cos_coeffs = [-1.0]  # coefficients of cos(q), cos(2q), ...
//! sin_coeffs = []      # coefficients of sin(q), sin(2q), ...
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AngleFn, Mode, NormKind, PerturbationError, QPolynomial, TrigPerturbation};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum SpecFileError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parsing perturbation file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("serializing perturbation file: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error(transparent)]
    Invalid(#[from] PerturbationError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationFile {
    pub d: usize,
    #[serde(alias = "N")]
    pub order: i64,
    #[serde(default)]
    pub norm_kind: NormKind,
    #[serde(default)]
    pub modes: Vec<ModeEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub n: Vec<i64>,
    pub l: i64,
    #[serde(default)]
    pub angle: AngleFn,
    #[serde(rename = "const", default)]
    pub constant: f64,
    #[serde(default)]
    pub cos_coeffs: Vec<f64>,
    #[serde(default)]
    pub sin_coeffs: Vec<f64>,
}

impl PerturbationFile {
    pub fn from_toml(text: &str) -> Result<Self, SpecFileError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String, SpecFileError> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self, SpecFileError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SpecFileError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn build<T: Real>(&self) -> Result<TrigPerturbation<T>, SpecFileError> {
        let conv = |xs: &[f64]| xs.iter().map(|&x| T::lit(x)).collect::<Vec<_>>();
        let modes = self
            .modes
            .iter()
            .map(|m| Mode {
                n: m.n.clone(),
                l: m.l,
                angle: m.angle,
                profile: QPolynomial::new(T::lit(m.constant), conv(&m.cos_coeffs), conv(&m.sin_coeffs)),
            })
            .collect();
        Ok(TrigPerturbation::new(self.d, self.order, self.norm_kind, modes)?)
    }

    pub fn from_perturbation<T: Real>(pert: &TrigPerturbation<T>) -> Self {
        let conv = |xs: &[T]| xs.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
        Self {
            d: pert.dim(),
            order: pert.order(),
            norm_kind: pert.norm_kind(),
            modes: pert
                .modes()
                .iter()
                .map(|m| ModeEntry {
                    n: m.n.clone(),
                    l: m.l,
                    angle: m.angle,
                    constant: m.profile.constant.as_f64(),
                    cos_coeffs: conv(&m.profile.cos_coeffs),
                    sin_coeffs: conv(&m.profile.sin_coeffs),
                })
                .collect(),
        }
    }
}

/// Parse a perturbation from TOML text.
pub fn parse_perturbation<T: Real>(text: &str) -> Result<TrigPerturbation<T>, SpecFileError> {
    PerturbationFile::from_toml(text)?.build()
}

pub fn serialize_perturbation<T: Real>(pert: &TrigPerturbation<T>) -> Result<String, SpecFileError> {
    PerturbationFile::from_perturbation(pert).to_toml()
}

/// Resolve a perturbation reference: `arnold`, `arnold:<d>`, or a TOML file path.
pub fn resolve_perturbation<T: Real>(
    reference: &str,
    base_dir: Option<&Path>,
) -> Result<TrigPerturbation<T>, SpecFileError> {
    if reference == "arnold" {
        return Ok(TrigPerturbation::arnold(1));
    }
    if let Some(d) = reference.strip_prefix("arnold:").and_then(|s| s.parse::<usize>().ok()) {
        if d == 0 {
            return Err(PerturbationError::ZeroDimension.into());
        }
        return Ok(TrigPerturbation::arnold(d));
    }
    let path = match base_dir {
        Some(dir) if Path::new(reference).is_relative() => dir.join(reference),
        _ => Path::new(reference).to_path_buf(),
    };
    PerturbationFile::load(&path)?.build()
}
