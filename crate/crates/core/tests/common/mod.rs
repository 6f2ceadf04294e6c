//! Reference computations written independently of the library: Gauss–Legendre
//! quadrature from scratch, the defining time-domain integral of Γ, and a
//! classical RK4 integrator for the unperturbed pendulum.
#![allow(dead_code)]

use std::f64::consts::PI;

use arnold_lab::dynamics::{AngleFn, Mode, NormKind, QPolynomial, TrigPerturbation};
use rand::Rng;

/// `∫ 2 sech²(t) e^{iνt} dt`, frozen from [`sech2_transform`]
/// (which agrees with the residue sum to ~1e−15).
pub const SECH2_TRANSFORM: [(f64, f64); 6] = [
    (0.0, 4.0),
    (0.3, 3.8557036061160614),
    (0.7, 3.29477828030022),
    (1.0, 2.7302778013234312),
    (1.618, 1.6110507231045588),
    (3.0, 0.33868942499767596),
];

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre on `[a, b]` with `panels` equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for j in 0..panels {
        let mid = a + (j as f64 + 0.5) * h;
        let mut s = 0.0;
        for &(x, w) in rule {
            s += w * f(mid + 0.5 * h * x);
        }
        sum += 0.5 * h * s;
    }
    sum
}

pub fn separatrix_q(t: f64) -> f64 {
    4.0 * t.exp().atan()
}

/// `∫ 2 sech²(t) cos(ν t) dt` over [−T, T] by composite Gauss–Legendre.
pub fn sech2_transform(nu: f64) -> f64 {
    let rule = gauss_legendre(24);
    let t_cut = 40.0;
    integrate(|t| 2.0 / t.cosh().powi(2) * (nu * t).cos(), -t_cut, t_cut, 800, &rule)
}

/// Same integral by residues: the double poles of sech² at `iπ(k + ½)` give
/// `4πν Σ_k e^{−πν(k + ½)}` for ν > 0, summed term by term.
pub fn residue_sum(nu: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..10_000 {
        let term = (-PI * nu * (k as f64 + 0.5)).exp();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    4.0 * PI * nu * sum
}

pub fn closed_form(nu: f64) -> f64 {
    if nu == 0.0 {
        4.0
    } else {
        2.0 * PI * nu / (PI * nu / 2.0).sinh()
    }
}

/// Γ(ω, φ₀, θ₀) straight from its defining integral
/// `−∫ [f(ωt + φ₀, q₀(t), t + θ₀) − f(ωt + φ₀, 0, t + θ₀)] dt`.
pub fn gamma_time_domain(pert: &TrigPerturbation<f64>, omega: &[f64], phi0: &[f64], theta0: f64) -> f64 {
    let rule = gauss_legendre(24);
    let f = |t: f64| {
        let phi: Vec<f64> = phi0.iter().zip(omega).map(|(p, w)| p + w * t).collect();
        pert.eval(&phi, separatrix_q(t), theta0 + t) - pert.eval(&phi, 0.0, theta0 + t)
    };
    -integrate(f, -40.0, 40.0, 1600, &rule)
}

/// Classical RK4 for `q̇ = p, ṗ = sin q`.
pub fn pendulum_rk4(q: f64, p: f64, duration: f64, dt: f64) -> (f64, f64) {
    let n = (duration / dt).round() as usize;
    let rhs = |q: f64, p: f64| (p, q.sin());
    let (mut q, mut p) = (q, p);
    for _ in 0..n {
        let k1 = rhs(q, p);
        let k2 = rhs(q + 0.5 * dt * k1.0, p + 0.5 * dt * k1.1);
        let k3 = rhs(q + 0.5 * dt * k2.0, p + 0.5 * dt * k2.1);
        let k4 = rhs(q + dt * k3.0, p + dt * k3.1);
        q += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (q, p)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// A random perturbation of order ≤ 2 (ℓ1) in `d` rotators with profiles of
/// degree ≤ 2 in q.
pub fn random_perturbation<R: Rng>(rng: &mut R, d: usize) -> TrigPerturbation<f64> {
    let mut modes = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let count = rng.gen_range(1..=4);
    while modes.len() < count {
        let mut n = vec![0i64; d];
        let j = rng.gen_range(0..d);
        n[j] = rng.gen_range(-1..=1);
        let l = if n[j] == 0 { rng.gen_range(1..=2) } else { rng.gen_range(-1..=1) };
        let angle = if rng.gen_bool(0.5) { AngleFn::Cos } else { AngleFn::Sin };
        if !seen.insert((n.clone(), l, angle)) {
            continue;
        }
        let profile = QPolynomial::new(
            rng.gen_range(-1.0..1.0),
            (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        );
        modes.push(Mode { n, l, angle, profile });
    }
    TrigPerturbation::new(d, 3, NormKind::L1, modes).unwrap()
}

/// Distance to the web straight from the full integer ball, no primitivity
/// reduction.
pub fn brute_distance(omega: &[f64], order: i64, norm: NormKind) -> f64 {
    let d = omega.len();
    let mut best = f64::INFINITY;
    let side = (2 * order + 1) as usize;
    for code in 0..side.pow(d as u32 + 1) {
        let mut c = code;
        let mut k = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            k.push((c % side) as i64 - order);
            c /= side;
        }
        let n = &k[..d];
        if n.iter().all(|&x| x == 0) || !norm.within(&k, order) {
            continue;
        }
        let dot: f64 = n.iter().zip(omega).map(|(&a, &w)| a as f64 * w).sum::<f64>() + k[d] as f64;
        let len = n.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
        best = best.min(dot.abs() / len);
    }
    best
}
