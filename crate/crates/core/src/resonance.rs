//! The resonant web: the union of hyperplanes `ω·n + l = 0` over the modes
//! `0 < |(n, l)| ≤ N` with `n ≠ 0`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::NormKind;
use crate::scalar::Real;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Primitive modes `(n₁, …, n_d, l)` of the web, one per hyperplane.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonanceSet {
    pub d: usize,
    pub order: i64,
    pub norm_kind: NormKind,
    /// Each entry is `(n, l)` packed as a `d + 1` vector.
    pub modes: Vec<Vec<i64>>,
}

impl ResonanceSet {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

/// Visit every integer vector of length `len` with entries in `[-r, r]`.
pub(crate) fn for_each_in_box(len: usize, r: i64, mut f: impl FnMut(&[i64])) {
    let mut v = vec![-r; len];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            if v[i] < r {
                v[i] += 1;
                break;
            }
            v[i] = -r;
            i += 1;
        }
    }
}

/// All primitive `(n, l)` with `n ≠ 0` and `|(n, l)| ≤ N`, first nonzero entry positive.
pub fn enumerate_modes(d: usize, order: i64, norm_kind: NormKind) -> ResonanceSet {
    assert!(d >= 1 && order >= 1, "enumerate_modes needs d ≥ 1 and N ≥ 1");
    let mut modes = Vec::new();
    for_each_in_box(d + 1, order, |v| {
        if v[..d].iter().all(|&x| x == 0) || !norm_kind.within(v, order) {
            return;
        }
        if v.iter().fold(0, |g, &x| gcd(g, x)) != 1 {
            return;
        }
        if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
            return;
        }
        modes.push(v.to_vec());
    });
    modes.sort();
    ResonanceSet { d, order, norm_kind, modes }
}

/// Signed distance `(ω·n + l)/‖n‖₂` from `ω` to the hyperplane of `mode`.
pub fn signed_distance<T: Real>(omega: &[T], mode: &[i64]) -> T {
    let d = omega.len();
    let dot = omega.iter().zip(&mode[..d]).fold(T::from_int(mode[d]), |acc, (&w, &n)| acc + w * T::from_int(n));
    let norm = T::from_int(mode[..d].iter().map(|&n| n * n).sum::<i64>()).sqrt();
    dot / norm
}

#[derive(Debug, Clone, PartialEq)]
pub struct WebDistance<T> {
    pub distance: T,
    pub mode: Vec<i64>,
}

/// Euclidean distance from `omega` to the nearest hyperplane of the web.
/// `None` when the set has no modes.
pub fn distance_to_web<T: Real>(omega: &[T], rs: &ResonanceSet) -> Option<WebDistance<T>> {
    assert_eq!(omega.len(), rs.d, "frequency dimension differs from the web's d");
    rs.modes
        .iter()
        .map(|m| (signed_distance(omega, m).abs(), m))
        .fold(None, |best: Option<(T, &Vec<i64>)>, (dist, m)| match best {
            Some((b, _)) if b <= dist => best,
            _ => Some((dist, m)),
        })
        .map(|(distance, m)| WebDistance { distance, mode: m.clone() })
}

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("a path needs at least two waypoints, got {0}")]
    TooShort(usize),
    #[error("waypoint {index} has {got} components, expected {want}")]
    Dimension { index: usize, got: usize, want: usize },
    #[error("consecutive waypoints {0} and {0}+1 coincide")]
    Repeated(usize),
    #[error("non-finite waypoint or clearance")]
    NonFinite,
    #[error("cannot read path file {path}: {message}")]
    File { path: String, message: String },
}

/// Polyline sampling a frequency path together with the requested clearance η.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec<T> {
    pub waypoints: Vec<Vec<T>>,
    pub clearance: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathFile {
    waypoints: Vec<Vec<f64>>,
    #[serde(default)]
    clearance: f64,
}

impl<T: Real> PathSpec<T> {
    pub fn new(waypoints: Vec<Vec<T>>, clearance: T) -> Result<Self, PathError> {
        if waypoints.len() < 2 {
            return Err(PathError::TooShort(waypoints.len()));
        }
        let want = waypoints[0].len();
        for (index, w) in waypoints.iter().enumerate() {
            if w.len() != want || want == 0 {
                return Err(PathError::Dimension { index, got: w.len(), want });
            }
            if w.iter().any(|x| !x.is_finite()) {
                return Err(PathError::NonFinite);
            }
        }
        if !clearance.is_finite() || clearance < T::zero() {
            return Err(PathError::NonFinite);
        }
        if let Some(i) = waypoints.windows(2).position(|p| p[0] == p[1]) {
            return Err(PathError::Repeated(i));
        }
        Ok(Self { waypoints, clearance })
    }

    pub fn dim(&self) -> usize {
        self.waypoints[0].len()
    }

    pub fn start(&self) -> &[T] {
        &self.waypoints[0]
    }

    pub fn end(&self) -> &[T] {
        self.waypoints.last().expect("validated path")
    }

    /// Parse `waypoints = [[…], …]` and optional `clearance` from TOML.
    pub fn from_toml(text: &str) -> Result<Self, PathError> {
        let file: PathFile =
            toml::from_str(text).map_err(|e| PathError::File { path: "<string>".into(), message: e.to_string() })?;
        Self::new(
            file.waypoints.iter().map(|w| w.iter().map(|&x| T::lit(x)).collect()).collect(),
            T::lit(file.clearance),
        )
    }

    pub fn load(path: &Path) -> Result<Self, PathError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PathError::File { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml(&text).map_err(|e| match e {
            PathError::File { message, .. } => PathError::File { path: path.display().to_string(), message },
            other => other,
        })
    }

    /// Point at parameter `s ∈ [0, 1]` of segment `seg`.
    pub fn point(&self, seg: usize, s: T) -> Vec<T> {
        self.waypoints[seg].iter().zip(&self.waypoints[seg + 1]).map(|(&a, &b)| a + s * (b - a)).collect()
    }
}

/// Where a path meets the web.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing<T> {
    pub segment: usize,
    /// Parameter in `[0, 1]` along the segment.
    pub parameter: T,
    pub point: Vec<T>,
    pub mode: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathClearance<T> {
    /// Exact minimum distance to the web along the polyline.
    pub distance: T,
    pub worst_mode: Vec<i64>,
    pub worst_point: Vec<T>,
    pub worst_segment: usize,
    /// Whether `distance ≥ η`.
    pub clearance_met: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathVerdict<T> {
    Accepted(PathClearance<T>),
    Rejected(Crossing<T>),
}

/// Certify that a polyline avoids the web.
///
/// Along a segment the signed distance to each hyperplane is affine, so its
/// minimum absolute value is either zero (sign change) or attained at an
/// endpoint; the bound is exact and no subdivision is needed.
pub fn certify_path<T: Real>(path: &PathSpec<T>, rs: &ResonanceSet) -> PathVerdict<T> {
    assert_eq!(path.dim(), rs.d, "path dimension differs from the web's d");
    let mut best: Option<PathClearance<T>> = None;
    for seg in 0..path.waypoints.len() - 1 {
        let (a, b) = (&path.waypoints[seg], &path.waypoints[seg + 1]);
        for m in &rs.modes {
            let ga = signed_distance(a, m);
            let gb = signed_distance(b, m);
            if ga == T::zero() || gb == T::zero() || (ga < T::zero()) != (gb < T::zero()) {
                let s = if ga == T::zero() { T::zero() } else { ga / (ga - gb) };
                return PathVerdict::Rejected(Crossing {
                    segment: seg,
                    parameter: s,
                    point: path.point(seg, s),
                    mode: m.clone(),
                });
            }
            let (dist, point) = if ga.abs() <= gb.abs() { (ga.abs(), a) } else { (gb.abs(), b) };
            if best.as_ref().is_none_or(|c| dist < c.distance) {
                best = Some(PathClearance {
                    distance: dist,
                    worst_mode: m.clone(),
                    worst_point: point.clone(),
                    worst_segment: seg,
                    clearance_met: false,
                });
            }
        }
    }
    let mut c = best.unwrap_or(PathClearance {
        distance: T::infinity(),
        worst_mode: Vec::new(),
        worst_point: path.start().to_vec(),
        worst_segment: 0,
        clearance_met: false,
    });
    c.clearance_met = c.distance >= path.clearance;
    PathVerdict::Accepted(c)
}

/// JSON form of a path verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub accepted: bool,
    pub order: i64,
    pub norm_kind: NormKind,
    pub clearance_requested: f64,
    pub certified_distance: Option<f64>,
    pub clearance_met: Option<bool>,
    pub worst_mode: Option<Vec<i64>>,
    pub worst_point: Option<Vec<f64>>,
    pub crossing_segment: Option<usize>,
    pub crossing_parameter: Option<f64>,
    pub crossing_point: Option<Vec<f64>>,
    pub crossing_mode: Option<Vec<i64>>,
}

impl PathReport {
    pub fn new<T: Real>(verdict: &PathVerdict<T>, path: &PathSpec<T>, rs: &ResonanceSet) -> Self {
        let v64 = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
        let mut r = PathReport {
            accepted: false,
            order: rs.order,
            norm_kind: rs.norm_kind,
            clearance_requested: path.clearance.as_f64(),
            certified_distance: None,
            clearance_met: None,
            worst_mode: None,
            worst_point: None,
            crossing_segment: None,
            crossing_parameter: None,
            crossing_point: None,
            crossing_mode: None,
        };
        match verdict {
            PathVerdict::Accepted(c) => {
                r.accepted = true;
                // JSON has no infinity; an empty web reports no distance
                r.certified_distance = c.distance.is_finite().then(|| c.distance.as_f64());
                r.clearance_met = Some(c.clearance_met);
                r.worst_mode = (!c.worst_mode.is_empty()).then(|| c.worst_mode.clone());
                r.worst_point = Some(v64(&c.worst_point));
            }
            PathVerdict::Rejected(x) => {
                r.crossing_segment = Some(x.segment);
                r.crossing_parameter = Some(x.parameter.as_f64());
                r.crossing_point = Some(v64(&x.point));
                r.crossing_mode = Some(x.mode.clone());
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumerations() {
        let rs = enumerate_modes(1, 2, NormKind::L1);
        assert_eq!(rs.modes, vec![vec![1, -1], vec![1, 0], vec![1, 1]]);
        assert_eq!(enumerate_modes(1, 1, NormKind::L1).modes, vec![vec![1, 0]]);
        assert_eq!(enumerate_modes(2, 1, NormKind::L1).modes, vec![vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn distances() {
        let rs = enumerate_modes(1, 2, NormKind::L1);
        assert_eq!(distance_to_web(&[0.5], &rs).unwrap().distance, 0.5);
        let on = distance_to_web(&[1.0], &rs).unwrap();
        assert_eq!(on.distance, 0.0);
        assert_eq!(on.mode, vec![1, -1]);
        let rs2 = enumerate_modes(2, 1, NormKind::L1);
        let w = distance_to_web(&[0.3, 0.4], &rs2).unwrap();
        assert_eq!(w.distance, 0.3);
        assert_eq!(w.mode, vec![1, 0, 0]);
    }

    #[test]
    fn certify_examples() {
        let rs = enumerate_modes(1, 2, NormKind::L1);
        let ok = PathSpec::new(vec![vec![0.3_f64], vec![0.9]], 0.05).unwrap();
        match certify_path(&ok, &rs) {
            PathVerdict::Accepted(c) => {
                assert!((c.distance - 0.1).abs() < 1e-15);
                assert_eq!(c.worst_point, vec![0.9]);
                assert_eq!(c.worst_mode, vec![1, -1]);
                assert!(c.clearance_met);
            }
            other => panic!("{other:?}"),
        }
        let bad = PathSpec::new(vec![vec![0.9_f64], vec![1.1]], 0.0).unwrap();
        match certify_path(&bad, &rs) {
            PathVerdict::Rejected(x) => {
                assert!((x.point[0] - 1.0).abs() < 1e-15);
                assert_eq!(x.mode, vec![1, -1]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn path_validation_and_file() {
        assert_eq!(PathSpec::<f64>::new(vec![vec![0.1]], 0.0), Err(PathError::TooShort(1)));
        assert_eq!(PathSpec::new(vec![vec![0.1], vec![0.1]], 0.0), Err(PathError::Repeated(0)));
        let p: PathSpec<f64> = PathSpec::from_toml("waypoints = [[0.3], [0.6], [0.9]]\nclearance = 0.01\n").unwrap();
        assert_eq!(p.waypoints.len(), 3);
        assert_eq!(p.clearance, 0.01);
    }
}
