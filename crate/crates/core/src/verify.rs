//! Oracle suite for the radial blowup tools.
//!
//! Every check compares a numerical routine against a closed form for the
//! Liouville bubble, a constant field or a uniform disk. The checks are
//! independent and run on scoped threads; the report keeps a fixed order.

use std::f64::consts::{LN_2, PI};
use std::thread;

use serde::Serialize;

use crate::blowup::{
    bubble_profile, fit_li_slope, liouville_bubble, mass_gamma, newton_log_slope, pohozaev_residual, radial_laplacian_fd,
    radial_mass, Bubble, Nonlinearity, FAR_FIELD_WINDOW,
};
use crate::error::Result;

pub const BUBBLE_MASS_TOL: f64 = 1e-6;
pub const PDE_RESIDUAL_TOL: f64 = 1e-6;
pub const GAMMA_TOL: f64 = 1e-6;
pub const MASS_IDENTITY_TOL: f64 = 1e-4;
pub const LI_SLOPE_REL_TOL: f64 = 0.02;
pub const POHOZAEV_TOL: f64 = 1e-3;
pub const POHOZAEV_CONSTANT_TOL: f64 = 1e-12;
pub const NEWTON_SLOPE_REL_TOL: f64 = 0.01;

/// Radius beyond which bubble masses are closed by a tail estimate.
const MASS_RADIUS: f64 = 1e6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Negative control: the Pohozaev check uses a profile whose radial scale
    /// is `mu_mismatch · μ` while its normalization keeps `μ`.
    pub mu_mismatch: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub expected: f64,
    /// Absolute tolerance on `|value - expected|`.
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &'static str, value: f64, expected: f64, tolerance: f64) -> Check {
        Check {
            name,
            value,
            expected,
            tolerance,
            passed: (value - expected).abs() <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

type CheckFn = fn(&VerifyOptions) -> Result<Vec<Check>>;

pub fn run(opts: &VerifyOptions) -> Result<VerifyReport> {
    let groups: [CheckFn; 5] = [bubble_checks, mass_checks, li_checks, pohozaev_checks, newton_checks];
    let outcomes: Vec<Result<Vec<Check>>> = thread::scope(|s| {
        let handles: Vec<_> = groups.iter().map(|g| s.spawn(move || g(opts))).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    let mut checks = Vec::new();
    for outcome in outcomes {
        checks.extend(outcome?);
    }
    Ok(VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn reference_bubble() -> Bubble {
    Bubble::new(1.0, 8.0 * PI)
}

fn bubble_checks(_: &VerifyOptions) -> Result<Vec<Check>> {
    let b = reference_bubble();
    let mass = radial_mass(|r| b.density(r), MASS_RADIUS)?;
    let residual = (0..=60)
        .map(|k| {
            let r = 0.1 * 1000f64.powf(k as f64 / 60.0);
            (radial_laplacian_fd(|x| b.value(x), r, 1e-4 * r.max(1.0)) + b.density(r)).abs()
        })
        .fold(0.0, f64::max);
    Ok(vec![
        Check::new("bubble_mass_over_8pi", mass / (8.0 * PI), 1.0, BUBBLE_MASS_TOL),
        Check::new("bubble_pde_residual", residual, 0.0, PDE_RESIDUAL_TOL),
    ])
}

fn mass_checks(_: &VerifyOptions) -> Result<Vec<Check>> {
    let b = reference_bubble();
    let gamma = mass_gamma(|r| b.density(r), MASS_RADIUS)?;
    let identity = PI * gamma * gamma / (2.0 * 8.0 * PI);
    Ok(vec![
        Check::new("gamma_tilde", gamma, 4.0, GAMMA_TOL),
        Check::new("pi_gamma_sq_over_2_lambda_bar", identity, 1.0, MASS_IDENTITY_TOL),
    ])
}

fn li_checks(_: &VerifyOptions) -> Result<Vec<Check>> {
    let b = Bubble::with_peak(8.0 * PI, 20.0);
    let mut checks = Vec::new();
    for (name, alpha) in [("li_slope_alpha_1", 1.0), ("li_slope_alpha_half", 0.5)] {
        let profile = bubble_profile(&b, alpha, (1.0, 1e5), 401)?;
        let slope = fit_li_slope(&profile, FAR_FIELD_WINDOW)?;
        let expected = 4.0 * alpha;
        checks.push(Check::new(name, slope, expected, LI_SLOPE_REL_TOL * expected));
    }
    Ok(checks)
}

fn pohozaev_checks(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let b = reference_bubble();
    let lam = b.lambda;
    let radial_mu = b.mu * opts.mu_mismatch.unwrap_or(1.0);
    let u = move |r: f64| liouville_bubble(b.mu, lam, 0.0) - 2.0 * (radial_mu * radial_mu * r * r).ln_1p();
    let exp = Nonlinearity {
        value: move |x: f64| lam * x.exp(),
        derivative: move |x: f64| lam * x.exp(),
    };
    let bubble = pohozaev_residual(u, |_| 1.0, &exp, 10.0)?;
    let constant = Nonlinearity {
        value: |_: f64| 3.0,
        derivative: |_: f64| 0.0,
    };
    let flat = pohozaev_residual(|_| 0.25, |_| 1.0, &constant, 10.0)?;
    Ok(vec![
        Check::new("pohozaev_bubble", bubble.relative_residual, 0.0, POHOZAEV_TOL),
        Check::new("pohozaev_constant", flat.relative_residual, 0.0, POHOZAEV_CONSTANT_TOL),
    ])
}

fn newton_checks(_: &VerifyOptions) -> Result<Vec<Check>> {
    let bubble = |r: f64| 8.0 / (1.0 + r * r).powi(2);
    let disk = |r: f64| if r <= 1.0 { 2.0 } else { 0.0 };
    let s_bubble = newton_log_slope(bubble, 1e2, 1e4, 9)?;
    let s_disk = newton_log_slope(disk, 1e2, 1e4, 9)?;
    let doubling = newton_log_slope(bubble, 1e2, 2e2, 2)? * LN_2;
    Ok(vec![
        Check::new("newton_slope_bubble", s_bubble, 4.0, NEWTON_SLOPE_REL_TOL * 4.0),
        Check::new("newton_slope_disk", s_disk, 1.0, NEWTON_SLOPE_REL_TOL),
        Check::new("newton_doubling_increment", doubling, 4.0 * LN_2, 0.01),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let report = run(&VerifyOptions::default()).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(report.passed);
    }

    #[test]
    fn mismatched_bubble_fails_pohozaev() {
        let report = run(&VerifyOptions { mu_mismatch: Some(1.1) }).unwrap();
        assert!(!report.passed);
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        assert_eq!(failed, vec!["pohozaev_bubble"]);
    }
}
