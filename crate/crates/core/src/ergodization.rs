//! Ergodization time of a linear flow `{Ωt}` on a torus `ℝˡ/Γ` and the dual
//! quantities `Γ*_R` and `α(Γ, Ω, R)` that bound it from both sides.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{cholesky_upper, inverse_and_det, mat_mul, mat_vec, transpose, Matrix};
use crate::scalar::{dot, norm2, Real};

/// Default cap on enumerated dual vectors.
pub const ENUMERATION_CAP: usize = 10_000_000;
/// Cap on grid points and tube lattice points in the brute-force time.
pub const GRID_CAP: usize = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum ErgodizationError {
    #[error("basis must be a nonempty square matrix; got {rows} vectors of length {cols}")]
    Shape { rows: usize, cols: usize },
    #[error("basis is singular (|det| = {0:e})")]
    Singular(f64),
    #[error("non-finite basis, flow or parameter")]
    NonFinite,
    #[error("Omega has {got} components, lattice dimension is {l}")]
    Dimension { got: usize, l: usize },
    #[error("Omega must be nonzero")]
    ZeroFlow,
    #[error("delta must be positive, got {0}")]
    BadDelta(f64),
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("more than {cap} dual vectors within radius {radius}; use a smaller radius")]
    EnumerationCap { cap: usize, radius: f64 },
    #[error("brute-force ergodization time supports l <= 3, got l = {0}")]
    Unsupported(usize),
    #[error("grid resolution {grid_res} must lie in (0, delta/4 = {limit}]")]
    BadGrid { grid_res: f64, limit: f64 },
    #[error("t_max must be positive and finite, got {0}")]
    BadHorizon(f64),
    #[error("brute force needs {needed} points, above the cap {cap}")]
    MemoryCap { needed: usize, cap: usize },
    #[error("lower bound violated: T_emp = {t_emp} < {bound} (delta = {delta})")]
    LowerBoundViolated { t_emp: f64, bound: f64, delta: f64 },
    #[error("cannot read basis file {path}: {message}")]
    File { path: String, message: String },
}

/// A lattice `Γ ⊂ ℝˡ` given by basis columns, with its dual basis `D = B^{−T}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice<T> {
    basis: Matrix<T>,
    dual: Matrix<T>,
    det: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisFile {
    /// Basis vectors of the lattice, one per entry.
    vectors: Vec<Vec<f64>>,
}

impl<T: Real> Lattice<T> {
    /// Build from a list of basis vectors.
    pub fn from_vectors(vectors: &[Vec<T>]) -> Result<Self, ErgodizationError> {
        let l = vectors.len();
        if l == 0 || vectors.iter().any(|v| v.len() != l) {
            return Err(ErgodizationError::Shape { rows: l, cols: vectors.first().map_or(0, |v| v.len()) });
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(ErgodizationError::NonFinite);
        }
        let basis = transpose(&vectors.to_vec());
        let (inv, det) = inverse_and_det(&basis).ok_or(ErgodizationError::Singular(0.0))?;
        let scale = vectors.iter().map(|v| norm2(v)).fold(T::one(), |a, b| a * b);
        if det.abs() <= T::lit(1e-12) * scale {
            return Err(ErgodizationError::Singular(det.abs().as_f64()));
        }
        Ok(Self { basis, dual: transpose(&inv), det })
    }

    /// The integer lattice `ℤˡ`.
    pub fn integer(l: usize) -> Self {
        Self::from_vectors(&crate::linalg::identity(l)).expect("identity basis")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis matrix `B`; column `j` is the `j`-th generator.
    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    /// Dual basis matrix `D = B^{−T}`; column `j` is the `j`-th dual generator.
    pub fn dual_basis(&self) -> &Matrix<T> {
        &self.dual
    }

    pub fn det(&self) -> T {
        self.det
    }

    /// Generator `j` as a vector.
    pub fn vector(&self, j: usize) -> Vec<T> {
        self.basis.iter().map(|row| row[j]).collect()
    }

    /// The dual lattice, whose basis is `D`.
    pub fn dual_lattice(&self) -> Self {
        let vectors: Vec<Vec<T>> = transpose(&self.dual);
        Self::from_vectors(&vectors).expect("dual of a nonsingular basis")
    }

    pub fn from_toml(text: &str) -> Result<Self, ErgodizationError> {
        let f: BasisFile = toml::from_str(text)
            .map_err(|e| ErgodizationError::File { path: "<string>".into(), message: e.to_string() })?;
        Self::from_vectors(&f.vectors.iter().map(|v| v.iter().map(|&x| T::lit(x)).collect()).collect::<Vec<_>>())
    }

    pub fn load(path: &Path) -> Result<Self, ErgodizationError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ErgodizationError::File { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml(&text).map_err(|e| match e {
            ErgodizationError::File { message, .. } => {
                ErgodizationError::File { path: path.display().to_string(), message }
            }
            other => other,
        })
    }
}

/// Linear flow direction and covering radius.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSpec<T> {
    pub omega: Vec<T>,
    pub delta: T,
}

impl<T: Real> FlowSpec<T> {
    pub fn new(omega: Vec<T>, delta: T) -> Result<Self, ErgodizationError> {
        if omega.iter().any(|x| !x.is_finite()) || !delta.is_finite() {
            return Err(ErgodizationError::NonFinite);
        }
        if omega.iter().all(|&x| x == T::zero()) {
            return Err(ErgodizationError::ZeroFlow);
        }
        if delta <= T::zero() {
            return Err(ErgodizationError::BadDelta(delta.as_f64()));
        }
        Ok(Self { omega, delta })
    }
}

/// A dual lattice vector `p = D·m` with its integer coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVector<T> {
    pub coeffs: Vec<i64>,
    pub p: Vec<T>,
    pub norm: T,
}

/// Every nonzero `p ∈ Γ*` with `|p| ≤ R`, by Fincke–Pohst enumeration on the
/// Gram matrix of the dual basis. Sorted by norm, ties by coefficients.
pub fn dual_vectors_with_coeffs<T: Real>(
    lat: &Lattice<T>,
    radius: T,
    cap: usize,
) -> Result<Vec<DualVector<T>>, ErgodizationError> {
    if !radius.is_finite() || radius <= T::zero() {
        return Err(ErgodizationError::BadRadius(radius.as_f64()));
    }
    let l = lat.dim();
    let gram = mat_mul(&transpose(&lat.dual), &lat.dual);
    let r = cholesky_upper(&gram).expect("Gram matrix of a basis is positive definite");
    let slack = T::lit(1e-10);
    let r2 = radius * radius;
    let r2_loose = r2 * (T::one() + slack);

    let mut out = Vec::new();
    let mut m = vec![0i64; l];
    // partial[i] = Σ_{k>i} (r_kk m_k + Σ_{j>k} r_kj m_j)², the norm already committed
    let mut partial = vec![T::zero(); l + 1];
    let mut upper = vec![0i64; l];

    let bounds = |i: usize, m: &[i64], used: T| -> Option<(i64, i64)> {
        let rest = r2_loose - used;
        if rest < T::zero() {
            return None;
        }
        let shift: T = ((i + 1)..l).map(|j| r[i][j] * T::from_int(m[j])).sum();
        let center = -shift / r[i][i];
        let half = rest.sqrt() / r[i][i];
        let lo = (center - half - slack).ceil().to_i64()?;
        let hi = (center + half + slack).floor().to_i64()?;
        (lo <= hi).then_some((lo, hi))
    };

    // depth-first over levels l-1 .. 0
    let mut i = l - 1;
    match bounds(i, &m, T::zero()) {
        Some((lo, hi)) => {
            m[i] = lo;
            upper[i] = hi;
        }
        None => return Ok(out),
    }
    loop {
        if m[i] > upper[i] {
            if i == l - 1 {
                break;
            }
            i += 1;
            m[i] += 1;
            continue;
        }
        let row: T = (i..l).map(|j| r[i][j] * T::from_int(m[j])).sum();
        let used = partial[i + 1] + row * row;
        if i == 0 {
            if m.iter().any(|&x| x != 0) {
                let p = mat_vec(&lat.dual, &m.iter().map(|&x| T::from_int(x)).collect::<Vec<_>>());
                let n2 = dot(&p, &p);
                if n2 <= r2 * (T::one() + T::lit(1e-12)) {
                    if out.len() == cap {
                        return Err(ErgodizationError::EnumerationCap { cap, radius: radius.as_f64() });
                    }
                    out.push(DualVector { coeffs: m.clone(), norm: n2.sqrt(), p });
                }
            }
            m[0] += 1;
            continue;
        }
        partial[i] = used;
        match bounds(i - 1, &m, used) {
            Some((lo, hi)) => {
                i -= 1;
                m[i] = lo;
                upper[i] = hi;
            }
            None => m[i] += 1,
        }
    }
    out.sort_by(|a, b| a.norm.partial_cmp(&b.norm).unwrap().then_with(|| a.coeffs.cmp(&b.coeffs)));
    Ok(out)
}

/// `Γ*_R`: every nonzero dual vector of Euclidean norm at most `R`.
pub fn dual_vectors<T: Real>(lat: &Lattice<T>, radius: T) -> Result<Vec<Vec<T>>, ErgodizationError> {
    Ok(dual_vectors_with_coeffs(lat, radius, ENUMERATION_CAP)?.into_iter().map(|v| v.p).collect())
}

/// `α(Γ, Ω, R) = min |p·Ω|` over `Γ*_R`; `+∞` when `Γ*_R` is empty.
pub fn alpha<T: Real>(lat: &Lattice<T>, omega: &[T], radius: T) -> Result<T, ErgodizationError> {
    if omega.len() != lat.dim() {
        return Err(ErgodizationError::Dimension { got: omega.len(), l: lat.dim() });
    }
    Ok(dual_vectors_with_coeffs(lat, radius, ENUMERATION_CAP)?
        .iter()
        .map(|v| dot(&v.p, omega).abs())
        .fold(T::infinity(), T::min))
}

/// Brute-force ergodization time on a grid of the fundamental domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgodizationTime<T> {
    /// Largest first-hit time of a δ-ball over the grid; `+∞` past `t_max`.
    /// Never exceeds the true `T(Γ, Ω, δ)`.
    pub t_emp: T,
    /// Same with radius `δ − slack`; an upper bound on the true time,
    /// `+∞` when `δ ≤ slack` or not reached by `t_max`.
    pub t_upper: T,
    /// Covering radius of the grid.
    pub slack: T,
    pub grid_points: usize,
}

struct Tube<T> {
    /// `(t_c(y), y)` for lattice points `y` near the orbit segment, sorted by `t_c`.
    points: Vec<(T, Vec<T>)>,
}

fn tube_points<T: Real>(lat: &Lattice<T>, omega: &[T], radius: T, t_max: T) -> Result<Tube<T>, ErgodizationError> {
    let l = lat.dim();
    let w2 = dot(omega, omega);
    let wn = w2.sqrt();
    let (inv, _) = inverse_and_det(&lat.basis).expect("nonsingular basis");
    let row_norms: Vec<T> = inv.iter().map(|row| norm2(row)).collect();
    let t_lo = -radius / wn;
    let t_hi = t_max + radius / wn;
    let chunk = radius / wn;
    let chunks = ((t_hi - t_lo) / chunk).ceil().to_usize().unwrap_or(usize::MAX);
    let rho = radius * T::lit(1.5) + T::lit(1e-9);
    let mut points = Vec::new();
    for c in 0..chunks {
        let t0 = t_lo + T::from_usize(c).unwrap() * chunk;
        let t1 = t0 + chunk;
        let mid = (t0 + t1) / T::lit(2.0);
        let z: Vec<T> = omega.iter().map(|&w| w * mid).collect();
        let kz = mat_vec(&inv, &z);
        let lo: Vec<i64> = (0..l).map(|i| (kz[i] - rho * row_norms[i]).floor().to_i64().unwrap()).collect();
        let hi: Vec<i64> = (0..l).map(|i| (kz[i] + rho * row_norms[i]).ceil().to_i64().unwrap()).collect();
        let mut k = lo.clone();
        'boxloop: loop {
            let y = mat_vec(&lat.basis, &k.iter().map(|&x| T::from_int(x)).collect::<Vec<_>>());
            let tc = dot(&y, omega) / w2;
            if tc >= t0 && tc < t1 {
                let perp2 = dot(&y, &y) - tc * tc * w2;
                if perp2 <= radius * radius {
                    if points.len() == GRID_CAP {
                        return Err(ErgodizationError::MemoryCap { needed: GRID_CAP + 1, cap: GRID_CAP });
                    }
                    points.push((tc, y));
                }
            }
            let mut i = 0;
            loop {
                if i == l {
                    break 'boxloop;
                }
                if k[i] < hi[i] {
                    k[i] += 1;
                    break;
                }
                k[i] = lo[i];
                i += 1;
            }
        }
    }
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(Tube { points })
}

/// First `t ∈ [0, t_max]` with `|x + y − tΩ| ≤ r` for some tube point `y`.
fn first_hit<T: Real>(tube: &Tube<T>, x: &[T], omega: &[T], w2: T, r: T, t_max: T) -> T {
    let tx = dot(x, omega) / w2;
    let reach = r / w2.sqrt();
    let mut best = T::infinity();
    for (tc, y) in &tube.points {
        if *tc + tx - reach > best.min(t_max) {
            break;
        }
        let z: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a + b).collect();
        let t = *tc + tx;
        let perp2 = (dot(&z, &z) - t * t * w2).max(T::zero());
        if perp2 > r * r {
            continue;
        }
        let h = (r * r - perp2).sqrt() / w2.sqrt();
        if t + h < T::zero() {
            continue;
        }
        let entry = (t - h).max(T::zero());
        if entry <= t_max && entry < best {
            best = entry;
        }
    }
    best
}

fn grid_cover_time<T: Real>(grid: &[Vec<T>], tube: &Tube<T>, omega: &[T], r: T, t_max: T) -> T {
    let w2 = dot(omega, omega);
    grid.par_iter().map(|x| first_hit(tube, x, omega, w2, r, t_max)).reduce(|| T::zero(), T::max)
}

/// Brute-force `T(Γ, Ω, δ)` over a grid of the fundamental parallelepiped
/// with spacing at most `grid_res` along every basis direction.
///
/// Each grid point gets its exact first-hit time of the δ-ball, so the
/// reported `t_emp` is a lower estimate of the true time; `t_upper` repeats
/// the computation with radius `δ − slack` and is an upper estimate.
pub fn ergodization_time_bruteforce<T: Real>(
    lat: &Lattice<T>,
    flow: &FlowSpec<T>,
    t_max: T,
    grid_res: T,
) -> Result<ErgodizationTime<T>, ErgodizationError> {
    let l = lat.dim();
    if l > 3 {
        return Err(ErgodizationError::Unsupported(l));
    }
    if flow.omega.len() != l {
        return Err(ErgodizationError::Dimension { got: flow.omega.len(), l });
    }
    let limit = flow.delta / T::lit(4.0);
    if !(grid_res > T::zero() && grid_res <= limit * (T::one() + T::lit(1e-12))) {
        return Err(ErgodizationError::BadGrid { grid_res: grid_res.as_f64(), limit: limit.as_f64() });
    }
    if !(t_max > T::zero() && t_max.is_finite()) {
        return Err(ErgodizationError::BadHorizon(t_max.as_f64()));
    }
    let counts: Vec<usize> =
        (0..l).map(|j| (norm2(&lat.vector(j)) / grid_res).ceil().to_usize().unwrap_or(usize::MAX).max(1)).collect();
    let total = counts.iter().try_fold(1usize, |a, &c| a.checked_mul(c)).unwrap_or(usize::MAX);
    if total > GRID_CAP {
        return Err(ErgodizationError::MemoryCap { needed: total, cap: GRID_CAP });
    }
    let mut grid = Vec::with_capacity(total);
    let mut idx = vec![0usize; l];
    for _ in 0..total {
        let u: Vec<T> =
            idx.iter().zip(&counts).map(|(&i, &n)| T::from_usize(i).unwrap() / T::from_usize(n).unwrap()).collect();
        grid.push(mat_vec(&lat.basis, &u));
        for (i, n) in idx.iter_mut().zip(&counts) {
            *i += 1;
            if *i < *n {
                break;
            }
            *i = 0;
        }
    }
    // any point is within half the summed cell edges of a cell vertex
    let slack = (0..l).map(|j| norm2(&lat.vector(j)) / T::from_usize(counts[j]).unwrap()).sum::<T>() / T::lit(2.0);
    // lattice translates of the domain that can meet the δ-tube of the orbit
    let far_vertex = (0..(1usize << l))
        .map(|mask| {
            let u: Vec<T> = (0..l).map(|j| if mask >> j & 1 == 1 { T::one() } else { T::zero() }).collect();
            norm2(&mat_vec(&lat.basis, &u))
        })
        .fold(T::zero(), T::max);
    let tube = tube_points(lat, &flow.omega, flow.delta + far_vertex, t_max)?;
    let t_emp = grid_cover_time(&grid, &tube, &flow.omega, flow.delta, t_max);
    let t_upper = if flow.delta > slack && t_emp.is_finite() {
        grid_cover_time(&grid, &tube, &flow.omega, flow.delta - slack, t_max)
    } else {
        T::infinity()
    };
    Ok(ErgodizationTime { t_emp, t_upper, slack, grid_points: total })
}

/// Outcome of checking both ergodization bounds on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub l: usize,
    pub omega: Vec<f64>,
    pub delta: f64,
    pub grid_res: f64,
    pub slack: f64,
    /// `None` stands for `+∞`.
    pub t_emp: Option<f64>,
    pub t_upper: Option<f64>,
    /// `α(Γ, Ω, 1/(4δ))`, `None` for `+∞`.
    pub alpha_lower: Option<f64>,
    /// `(1/4)·α(Γ, Ω, 1/(4δ))^{−1}`.
    pub lower_bound: f64,
    pub lower_bound_holds: bool,
    /// Smallest `c` with `t_emp ≤ α(Γ, Ω, c/δ)^{−1}`; `None` when `t_emp` is infinite
    /// or no dual vector up to the search cap qualifies.
    pub empirical_c: Option<f64>,
    /// Same constant computed against `t_upper`.
    pub empirical_c_upper: Option<f64>,
}

/// Smallest `c` with `t ≤ 1/α(c/δ)`: walk dual vectors by norm until the
/// running minimum of `|p·Ω|` drops to `1/t`.
pub fn empirical_upper_constant<T: Real>(
    lat: &Lattice<T>,
    omega: &[T],
    delta: T,
    t: T,
) -> Result<Option<T>, ErgodizationError> {
    if !t.is_finite() {
        return Ok(None);
    }
    if t <= T::zero() {
        return Ok(Some(T::zero()));
    }
    let target = T::one() / t;
    let mut radius = T::one() / delta;
    for _ in 0..40 {
        let vs = match dual_vectors_with_coeffs(lat, radius, ENUMERATION_CAP / 10) {
            Ok(vs) => vs,
            Err(ErgodizationError::EnumerationCap { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        if let Some(v) = vs.iter().find(|v| dot(&v.p, omega).abs() <= target) {
            return Ok(Some(v.norm * delta));
        }
        radius = radius * T::lit(2.0);
    }
    Ok(None)
}

/// Compute `T_emp` and check `T ≥ (1/4)·α(Γ, Ω, 1/(4δ))^{−1}` (a hard
/// failure if violated) and the empirical constant of the upper bound.
pub fn check_lemma_bounds<T: Real>(
    lat: &Lattice<T>,
    flow: &FlowSpec<T>,
    t_max: T,
    grid_res: T,
) -> Result<LemmaReport, ErgodizationError> {
    let time = ergodization_time_bruteforce(lat, flow, t_max, grid_res)?;
    let a_low = alpha(lat, &flow.omega, T::one() / (T::lit(4.0) * flow.delta))?;
    let bound = T::one() / (T::lit(4.0) * a_low);
    let holds = time.t_emp >= bound;
    if !holds {
        return Err(ErgodizationError::LowerBoundViolated {
            t_emp: time.t_emp.as_f64(),
            bound: bound.as_f64(),
            delta: flow.delta.as_f64(),
        });
    }
    let fin = |x: T| x.is_finite().then(|| x.as_f64());
    Ok(LemmaReport {
        l: lat.dim(),
        omega: flow.omega.iter().map(|x| x.as_f64()).collect(),
        delta: flow.delta.as_f64(),
        grid_res: grid_res.as_f64(),
        slack: time.slack.as_f64(),
        t_emp: fin(time.t_emp),
        t_upper: fin(time.t_upper),
        alpha_lower: fin(a_low),
        lower_bound: bound.as_f64(),
        lower_bound_holds: holds,
        empirical_c: empirical_upper_constant(lat, &flow.omega, flow.delta, time.t_emp)?.map(|c| c.as_f64()),
        empirical_c_upper: empirical_upper_constant(lat, &flow.omega, flow.delta, time.t_upper)?.map(|c| c.as_f64()),
    })
}

/// `a^τ / (C·δ^τ)`, the ergodization bound for a `(C, τ)`-diophantine flow.
pub fn diophantine_bound<T: Real>(c: T, tau: T, delta: T, a_const: T) -> T {
    a_const.powf(tau) / (c * delta.powf(tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn integer_lattice_duals() {
        let z2 = Lattice::<f64>::integer(2);
        assert_eq!(
            sorted(dual_vectors(&z2, 1.0).unwrap()),
            sorted(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]])
        );
        assert_eq!(dual_vectors(&z2, 2.0).unwrap().len(), 12);
        let two = Lattice::from_vectors(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(
            sorted(dual_vectors(&two, 0.5).unwrap()),
            sorted(vec![vec![0.5, 0.0], vec![-0.5, 0.0], vec![0.0, 0.5], vec![0.0, -0.5]])
        );
    }

    #[test]
    fn alpha_examples() {
        let z2 = Lattice::<f64>::integer(2);
        assert_eq!(alpha(&z2, &[1.0, 1.0], 1.0).unwrap(), 1.0);
        let g = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((alpha(&z2, &[1.0, g], 2.0).unwrap() - (g - 1.0)).abs() < 1e-15);
        assert_eq!(alpha(&z2, &[1.0, 0.5], 3.0).unwrap(), 0.0);
        assert_eq!(alpha(&z2, &[1.0, g], 0.5).unwrap(), f64::INFINITY);
    }

    #[test]
    fn one_dimensional_times() {
        let z = Lattice::<f64>::integer(1);
        let res = 1e-3;
        let t = ergodization_time_bruteforce(&z, &FlowSpec::new(vec![1.0], 0.1).unwrap(), 10.0, res).unwrap();
        assert!((t.t_emp - 0.8).abs() <= res + 1e-12, "{t:?}");
        assert!(t.t_upper >= 0.8 - 1e-12);
        let t2 = ergodization_time_bruteforce(&z, &FlowSpec::new(vec![2.0], 0.1).unwrap(), 10.0, res).unwrap();
        assert!((t2.t_emp - 0.4).abs() <= res + 1e-12);
    }

    #[test]
    fn lemma_report_one_dimensional() {
        let z = Lattice::<f64>::integer(1);
        let r = check_lemma_bounds(&z, &FlowSpec::new(vec![1.0], 0.1).unwrap(), 10.0, 0.025).unwrap();
        assert_eq!(r.alpha_lower, Some(1.0));
        assert_eq!(r.lower_bound, 0.25);
        assert!(r.lower_bound_holds);
        assert!(r.empirical_c.is_some());
    }

    #[test]
    fn resonant_flow_never_covers() {
        let z2 = Lattice::<f64>::integer(2);
        let t = ergodization_time_bruteforce(&z2, &FlowSpec::new(vec![1.0, 1.0], 0.05).unwrap(), 50.0, 0.0125).unwrap();
        assert_eq!(t.t_emp, f64::INFINITY);
    }

    #[test]
    fn diophantine_examples() {
        assert!((diophantine_bound(1.0_f64, 1.0, 0.1, 1.0) - 10.0).abs() < 1e-12);
        let a = diophantine_bound(0.5_f64, 2.0, 0.2, 1.3);
        let b = diophantine_bound(0.5_f64, 2.0, 0.1, 1.3);
        assert!((b / a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Lattice::from_vectors(&[vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(ErgodizationError::Singular(_))
        ));
        assert_eq!(FlowSpec::new(vec![0.0, 0.0], 0.1), Err(ErgodizationError::ZeroFlow));
        let z = Lattice::<f64>::integer(1);
        assert!(matches!(
            ergodization_time_bruteforce(&z, &FlowSpec::new(vec![1.0], 0.1).unwrap(), 10.0, 0.05),
            Err(ErgodizationError::BadGrid { .. })
        ));
    }
}
