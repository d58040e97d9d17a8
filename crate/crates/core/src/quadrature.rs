//! One-dimensional quadrature for radial integrals.
//!
//! Each finite segment is integrated with the trapezoid rule in the
//! double-exponential (tanh-sinh) variable, halving the step until the
//! relative change drops below the tolerance. The substitution clusters nodes
//! at both endpoints, so integrable endpoint singularities and kinks placed on
//! segment boundaries cost nothing extra. Long radial ranges are split into
//! decades so that every scale between [`DECADE_FLOOR`] and `r_max` is
//! resolved.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-8;
/// Smallest decade boundary used when splitting `[0, r_max]`.
pub const DECADE_FLOOR: f64 = 1e-6;
const T_MAX: f64 = 3.5;
const MAX_LEVEL: u32 = 14;
const MIN_LEVEL: u32 = 4;

/// `∫_a^b f` on a single segment.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::Quadrature(format!("bad segment [{a}, {b}]")));
    }
    let half = 0.5 * (b - a);
    // Contribution of the node pair at ±t, with its absolute value.
    let pair = |t: f64| -> (f64, f64) {
        let u = FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        let weight = half * FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        // distance from the nearer endpoint, computed without cancellation
        let offset = (b - a) / (1.0 + (2.0 * u).exp());
        let (lo, hi) = (a + offset, b - offset);
        if !weight.is_finite() || weight == 0.0 || lo <= a || hi >= b {
            return (0.0, 0.0);
        }
        let (f_lo, f_hi) = (f(lo), f(hi));
        (weight * (f_lo + f_hi), weight * (f_lo.abs() + f_hi.abs()))
    };

    let mut h = 1.0;
    let mid = f(a + half);
    let mut sum = half * FRAC_PI_2 * mid;
    let mut abs_sum = sum.abs();
    let mut k = 1;
    while k as f64 * h <= T_MAX {
        let (s, m) = pair(k as f64 * h);
        sum += s;
        abs_sum += m;
        k += 1;
    }
    let mut estimate = h * sum;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= T_MAX {
            let (s, m) = pair(k as f64 * h);
            sum += s;
            abs_sum += m;
            k += 2;
        }
        let next = h * sum;
        if !next.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        let change = (next - estimate).abs();
        estimate = next;
        // relative to ∫|f| so that cancelling integrands still terminate
        if level >= MIN_LEVEL && change <= rel_tol * h * abs_sum {
            return Ok(next);
        }
    }
    Err(Error::Quadrature(format!(
        "no convergence on [{a}, {b}] after {MAX_LEVEL} levels"
    )))
}

/// Segment boundaries for `[0, r_max]`: decades from [`DECADE_FLOOR`] plus
/// any extra breakpoints inside the range.
pub fn radial_breakpoints(r_max: f64, extra: &[f64]) -> Vec<f64> {
    let mut points = vec![0.0];
    let mut decade = DECADE_FLOOR;
    while decade < r_max {
        points.push(decade);
        decade *= 10.0;
    }
    points.extend(extra.iter().copied().filter(|&x| x > 0.0 && x < r_max));
    points.push(r_max);
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1e-300));
    points
}

/// `∫_0^{r_max} g(r) dr` split at decades and `extra` breakpoints.
pub fn integrate_radial<F: Fn(f64) -> f64>(g: F, r_max: f64, extra: &[f64], rel_tol: f64) -> Result<f64> {
    if !r_max.is_finite() || r_max <= 0.0 {
        return Err(Error::Quadrature(format!("bad radial range [0, {r_max}]")));
    }
    radial_breakpoints(r_max, extra)
        .windows(2)
        .map(|w| integrate(&g, w[0], w[1], rel_tol))
        .sum()
}
