//! Poincaré section `q ≡ π (mod 2π)`: the apex of the pendulum separatrix.

use super::{IntegrationError, Stepper};
use crate::dynamics::PhaseState;
use crate::scalar::Real;

/// Refined crossing of the section.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionEvent<T> {
    /// Running count of crossings within the run that produced it.
    pub index: usize,
    pub theta: T,
    pub state: PhaseState<T>,
    /// `+1` when `q` increases through the section, `−1` otherwise.
    pub direction: i8,
}

/// `⌊(q − π) / 2π⌋`: changes exactly when `q` passes a section level.
#[inline]
pub fn crossing_level<T: Real>(q: T) -> i64 {
    ((q - T::PI()) / T::two_pi()).floor().to_i64().unwrap_or(i64::MIN)
}

/// Level of a start state, treating a state sitting on the section as
/// having already crossed it in the direction of motion.
pub(super) fn start_level<T: Real>(q: T, p: T, tol: T) -> i64 {
    let nudge = T::lit(16.0) * tol.max(T::epsilon() * (q.abs() + T::one()));
    if p > T::zero() {
        crossing_level(q + nudge)
    } else if p < T::zero() {
        crossing_level(q - nudge)
    } else {
        crossing_level(q)
    }
}

/// Section level `m` (target `q = π + 2πm`) crossed when moving from `old` to `new`.
pub(super) fn crossed_section(old: i64, new: i64) -> i64 {
    if new > old {
        old + 1
    } else {
        old
    }
}

#[inline]
fn hermite<T: Real>(x0: T, v0: T, x1: T, v1: T, h: T, s: T) -> T {
    let s2 = s * s;
    let s3 = s2 * s;
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let h00 = two * s3 - three * s2 + T::one();
    let h10 = s3 - two * s2 + s;
    let h01 = -two * s3 + three * s2;
    let h11 = s3 - s2;
    h00 * x0 + h10 * h * v0 + h01 * x1 + h11 * h * v1
}

/// Locate `q = π + 2π·level` between two consecutive states using cubic
/// Hermite interpolation and Illinois regula falsi.
pub(super) fn refine<T: Real>(
    stepper: &Stepper<'_, T>,
    prev: &PhaseState<T>,
    cur: &PhaseState<T>,
    level: i64,
    tol: T,
    index: usize,
) -> Result<SectionEvent<T>, IntegrationError> {
    let target = T::PI() + T::two_pi() * T::from_int(level);
    let h = cur.time - prev.time;
    let d0 = stepper.derivative(prev);
    let d1 = stepper.derivative(cur);
    let g = |s: T| hermite(prev.q, d0.dq, cur.q, d1.dq, h, s) - target;
    let eff_tol = tol.max(T::lit(8.0) * T::epsilon() * target.abs());

    let (mut a, mut b) = (T::zero(), T::one());
    let (mut ga, mut gb) = (g(a), g(b));
    let mut s = if ga.abs() <= gb.abs() { a } else { b };
    let mut gs = if ga.abs() <= gb.abs() { ga } else { gb };
    let mut side = 0i8;
    let mut converged = gs.abs() <= eff_tol;
    for _ in 0..100 {
        if converged {
            break;
        }
        s = (a * gb - b * ga) / (gb - ga);
        if !(s > a && s < b) {
            s = (a + b) / T::lit(2.0);
        }
        gs = g(s);
        if gs.abs() <= eff_tol {
            converged = true;
            break;
        }
        if (gs > T::zero()) == (ga > T::zero()) {
            a = s;
            ga = gs;
            if side == -1 {
                gb = gb / T::lit(2.0);
            }
            side = -1;
        } else {
            b = s;
            gb = gs;
            if side == 1 {
                ga = ga / T::lit(2.0);
            }
            side = 1;
        }
        if b - a <= T::epsilon() {
            converged = gs.abs() <= eff_tol;
            break;
        }
    }
    if !converged {
        return Err(IntegrationError::SectionRefinement {
            time: (prev.time + s * h).as_f64(),
            residual: gs.abs().as_f64(),
        });
    }

    let interp = |x0: T, v0: T, x1: T, v1: T| hermite(x0, v0, x1, v1, h, s);
    let phi = (0..prev.dim()).map(|i| interp(prev.phi[i], d0.dphi[i], cur.phi[i], d1.dphi[i])).collect();
    let action = (0..prev.dim()).map(|i| interp(prev.action[i], d0.daction[i], cur.action[i], d1.daction[i])).collect();
    let state = PhaseState {
        phi,
        action,
        q: interp(prev.q, d0.dq, cur.q, d1.dq),
        p: interp(prev.p, d0.dp, cur.p, d1.dp),
        time: prev.time + s * h,
    };
    Ok(SectionEvent { index, theta: state.time, direction: if cur.q > prev.q { 1 } else { -1 }, state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn levels_change_only_at_section() {
        assert_eq!(crossing_level(PI - 1e-9), -1);
        assert_eq!(crossing_level(PI + 1e-9), 0);
        // the wrap at q = 2π is not a section crossing
        assert_eq!(crossing_level(2.0 * PI - 1e-9), crossing_level(2.0 * PI + 1e-9));
        assert_eq!(crossing_level(3.0 * PI + 1e-9), 1);
    }

    #[test]
    fn start_on_section_counts_as_crossed() {
        assert_eq!(start_level(PI - 1e-13, 1.0, 1e-12), 0);
        assert_eq!(start_level(PI + 1e-13, -1.0, 1e-12), -1);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |t: f64| 2.0 * t * t * t - t + 0.5;
        let df = |t: f64| 6.0 * t * t - 1.0;
        let (t0, t1) = (0.3, 0.9);
        let h = t1 - t0;
        for i in 0..=10 {
            let s = i as f64 / 10.0;
            let got = hermite(f(t0), df(t0), f(t1), df(t1), h, s);
            assert!((got - f(t0 + s * h)).abs() < 1e-14);
        }
    }
}
