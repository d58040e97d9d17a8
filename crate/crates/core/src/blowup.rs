//! Blowup asymptotics and their radial oracles.
//!
//! The reference object is the entire radial solution of `-Δw = λe^w` on the
//! plane,
//!
//! ```text
//! w(r) = log(8μ² / (λ(1 + μ²r²)²)),     ∫ λe^w = 8π,
//! ```
//!
//! against which the profile fit, concentration mass, Pohozaev balance and
//! Newton potential asymptotics are checked.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::log_partition;
use crate::measure::{lambda_bar, lambda_bar_bruteforce, lambda_bar_residual_vanishing, CirculationMeasure, MomentSide, MAX_BRUTEFORCE_ATOMS};
use crate::minimizer::MinimizeResult;
use crate::quadrature::{integrate_radial, DEFAULT_REL_TOL};
use crate::torus::SpectralTorus;

/// Minimum number of samples inside a fit window.
pub const MIN_FIT_SAMPLES: usize = 8;
/// Far-field fit window `r/σ ∈ [1e2, 1e4]` for analytically sampled profiles.
pub const FAR_FIELD_WINDOW: (f64, f64) = (1e2, 1e4);

/// `log(8μ² / (λ(1 + μ²r²)²))`.
pub fn liouville_bubble(mu: f64, lam: f64, r: f64) -> f64 {
    (8.0 * mu * mu / lam).ln() - 2.0 * (mu * mu * r * r).ln_1p()
}

/// Liouville bubble with fixed concentration parameter and coupling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bubble {
    pub mu: f64,
    pub lambda: f64,
}

impl Bubble {
    pub fn new(mu: f64, lambda: f64) -> Self {
        Bubble { mu, lambda }
    }

    /// Bubble whose value at the origin is `peak`.
    pub fn with_peak(lambda: f64, peak: f64) -> Self {
        Bubble {
            mu: (lambda * peak.exp() / 8.0).sqrt(),
            lambda,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        liouville_bubble(self.mu, self.lambda, r)
    }

    /// `λ e^{w(r)} = 8μ² / (1 + μ²r²)²`.
    pub fn density(&self, r: f64) -> f64 {
        let m2 = self.mu * self.mu;
        8.0 * m2 / (1.0 + m2 * r * r).powi(2)
    }

    pub fn peak(&self) -> f64 {
        self.value(0.0)
    }

    /// `e^{-w(0)/2}`.
    pub fn sigma(&self) -> f64 {
        (-0.5 * self.peak()).exp()
    }
}

/// `u'' + u'/r` by central differences with step `h`.
pub fn radial_laplacian_fd(u: impl Fn(f64) -> f64, r: f64, h: f64) -> f64 {
    let (up, mid, down) = (u(r + h), u(r), u(r - h));
    (up - 2.0 * mid + down) / (h * h) + (up - down) / (2.0 * h * r)
}

/// Fourth-order central difference of `u'(r)`.
fn radial_derivative(u: &impl Fn(f64) -> f64, r: f64) -> f64 {
    let h = 1e-3 * r.max(1e-3);
    (8.0 * (u(r + h) - u(r - h)) - (u(r + 2.0 * h) - u(r - 2.0 * h))) / (12.0 * h)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileSample {
    pub r: f64,
    /// Radially averaged `w_α(r) - w_α(0)`.
    pub dw: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LiFit {
    pub slope: f64,
    pub intercept: f64,
    /// Window in units of `σ`.
    pub window: (f64, f64),
    pub samples: usize,
}

impl LiFit {
    pub fn predict(&self, r: f64, sigma: f64) -> f64 {
        self.intercept - self.slope * (r / sigma).ln_1p()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlowupProfile {
    pub alpha: f64,
    /// `e^{-w₁(0)/2}`.
    pub sigma: f64,
    /// `w₁` at the peak.
    pub peak_value: f64,
    pub samples: Vec<ProfileSample>,
    pub fit: Option<LiFit>,
    /// `4 / ∫ β P(dβ)`.
    pub gamma0_reference: f64,
}

impl BlowupProfile {
    /// Profile from radial samples; `peak_value` is `w₁(0)`.
    pub fn from_samples(alpha: f64, peak_value: f64, samples: Vec<ProfileSample>, gamma0_reference: f64) -> Result<Self> {
        if samples.windows(2).any(|w| w[1].r < w[0].r) {
            return Err(Error::InvalidArgument("profile samples must be sorted by r".into()));
        }
        if let Some(s) = samples.iter().find(|s| s.dw > 1e-9) {
            return Err(Error::NoPeak(format!("profile rises above its peak at r = {}", s.r)));
        }
        Ok(BlowupProfile {
            alpha,
            sigma: (-0.5 * peak_value).exp(),
            peak_value,
            samples,
            fit: None,
            gamma0_reference,
        })
    }

    /// Predicted asymptotic slope `α·γ₀`.
    pub fn predicted_slope(&self) -> f64 {
        self.alpha * self.gamma0_reference
    }

    /// Returns a copy with every `dw` multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> BlowupProfile {
        BlowupProfile {
            alpha: self.alpha * factor,
            samples: self
                .samples
                .iter()
                .map(|s| ProfileSample { r: s.r, dw: factor * s.dw })
                .collect(),
            fit: None,
            ..self.clone()
        }
    }
}

/// Profile of `α·(w(r) - w(0))` for a bubble, sampled at `n` log-spaced
/// radii with `r/σ` spanning `rho_range`.
pub fn bubble_profile(bubble: &Bubble, alpha: f64, rho_range: (f64, f64), n: usize) -> Result<BlowupProfile> {
    if n < 2 || !(rho_range.0 > 0.0 && rho_range.1 > rho_range.0) {
        return Err(Error::InvalidArgument("need n >= 2 and 0 < rho_lo < rho_hi".into()));
    }
    let sigma = bubble.sigma();
    let peak = bubble.peak();
    let ratio = rho_range.1 / rho_range.0;
    let samples = (0..n)
        .map(|k| {
            let r = sigma * rho_range.0 * ratio.powf(k as f64 / (n - 1) as f64);
            ProfileSample {
                r,
                dw: alpha * (bubble.value(r) - peak),
            }
        })
        .collect();
    BlowupProfile::from_samples(alpha, peak, samples, 4.0)
}

/// Default torus window: from `max(3σ, 2h)` to `L/4`, in units of `σ`.
pub fn default_li_window(torus: &SpectralTorus, sigma: f64) -> (f64, f64) {
    let lo = 3.0_f64.max(2.0 * torus.spacing() / sigma);
    (lo, 0.25 * torus.side() / sigma)
}

/// Radial profile of `w_α` around the result's peak.
///
/// Samples group grid points by exact minimum-image distance out to `L/2`.
/// The log-slope is fitted over [`default_li_window`] when it holds enough
/// samples.
pub fn rescale_profile(result: &MinimizeResult, torus: &SpectralTorus, measure: &CirculationMeasure, alpha: f64) -> Result<BlowupProfile> {
    let v = &result.v;
    if v.n() != torus.n() {
        return Err(Error::ShapeMismatch {
            expected: torus.n(),
            got: v.values().len(),
        });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} not in (0, 1]")));
    }
    let (pi, pj) = result.peak_point;
    if pi >= torus.n() || pj >= torus.n() || v.get(result.peak_point) < v.max() {
        return Err(Error::NoPeak(format!("{:?} is not the maximum of v", result.peak_point)));
    }
    let m1 = measure.moment(1, MomentSide::Positive);
    if m1 <= 0.0 {
        return Err(Error::InvalidMeasure("first positive moment vanishes".into()));
    }
    let peak_v = v.get(result.peak_point);
    let peak_w1 = peak_v - log_partition(torus, v, 1.0)?;
    let shells = torus.radial_shells(v, result.peak_point, 0.5 * torus.side())?;
    // w_α(r) - w_α(0) = α (v(r) - v(0))
    let samples = shells
        .iter()
        .map(|s| ProfileSample {
            r: s.r,
            dw: alpha * (s.mean - peak_v),
        })
        .collect();
    let mut profile = BlowupProfile::from_samples(alpha, peak_w1, samples, 4.0 / m1)?;
    profile.fit = fit_li(&profile, default_li_window(torus, profile.sigma)).ok();
    Ok(profile)
}

/// Least-squares fit of `dw ≈ c - s·log(1 + r/σ)` over `r/σ ∈ window`.
pub fn fit_li(profile: &BlowupProfile, window: (f64, f64)) -> Result<LiFit> {
    let sigma = profile.sigma;
    let points: Vec<(f64, f64)> = profile
        .samples
        .iter()
        .filter(|s| {
            let rho = s.r / sigma;
            rho >= window.0 && rho <= window.1
        })
        .map(|s| (-(s.r / sigma).ln_1p(), s.dw))
        .collect();
    if points.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples(points.len(), MIN_FIT_SAMPLES));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewSamples(1, MIN_FIT_SAMPLES));
    }
    let slope = sxy / sxx;
    Ok(LiFit {
        slope,
        intercept: mean_y - slope * mean_x,
        window,
        samples: points.len(),
    })
}

pub fn fit_li_slope(profile: &BlowupProfile, window: (f64, f64)) -> Result<f64> {
    Ok(fit_li(profile, window)?.slope)
}

/// `2π ∫_0^{r_max} f(r) r dr`.
pub fn radial_mass(f: impl Fn(f64) -> f64, r_max: f64) -> Result<f64> {
    Ok(2.0 * PI * integrate_radial(|r| f(r) * r, r_max, &[], DEFAULT_REL_TOL)?)
}

/// Power-law tail `∫_{r_max}^∞ f r dr`, fitted on the last decade.
fn radial_tail(f: &impl Fn(f64) -> f64, r_max: f64) -> Result<f64> {
    let outer = f(r_max);
    let inner = f(0.1 * r_max);
    if outer == 0.0 {
        return Ok(0.0);
    }
    let decreasing = outer * r_max * r_max < inner * (0.1 * r_max).powi(2);
    if !decreasing {
        return Err(Error::NonIntegrableTail(format!(
            "f(r)·r² does not decrease over [{}, {}]",
            0.1 * r_max,
            r_max
        )));
    }
    let exponent = (inner / outer).log10();
    Ok(outer * r_max * r_max / (exponent - 2.0))
}

/// `γ̃ = (1/2π) ∫_{R²} f` for radial `f ≥ 0`, with a power-law tail beyond
/// `r_max`.
pub fn mass_gamma(f: impl Fn(f64) -> f64, r_max: f64) -> Result<f64> {
    let body = radial_mass(&f, r_max)? / (2.0 * PI);
    Ok(body + radial_tail(&f, r_max)?)
}

/// Nonlinearity `F` with derivative `F'` for the Pohozaev balance.
pub struct Nonlinearity<F, D> {
    pub value: F,
    pub derivative: D,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PohozaevReport {
    /// `R ∫_{∂B_R} (½|∇u|² - u_r²) ds`.
    pub lhs: f64,
    /// `R ∫_{∂B_R} A F(u) ds - ∫_{B_R} (2A F(u) + F(u) x·∇A) dx`.
    pub rhs: f64,
    /// `|lhs - rhs|` over the largest of `|lhs|` and the two right-hand
    /// terms' combined magnitude.
    pub relative_residual: f64,
    /// `max |Δu + A F'(u)|` over a few radii in `(0, R]`, finite differences.
    pub equation_residual: f64,
}

/// Both sides of the Pohozaev identity on `B_R` for radial `u` and `A`.
pub fn pohozaev_residual<U, A, F, D>(u: U, a: A, nonlinearity: &Nonlinearity<F, D>, radius: f64) -> Result<PohozaevReport>
where
    U: Fn(f64) -> f64,
    A: Fn(f64) -> f64,
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::InvalidArgument(format!("radius {radius}")));
    }
    let big_f = &nonlinearity.value;
    let u_r = radial_derivative(&u, radius);
    let lhs = radius * 2.0 * PI * radius * (0.5 * u_r * u_r - u_r * u_r);
    let boundary = radius * 2.0 * PI * radius * a(radius) * big_f(u(radius));
    let volume = 2.0
        * PI
        * integrate_radial(
            |r| {
                let fu = big_f(u(r));
                let x_grad_a = if r > 0.0 { r * radial_derivative(&a, r) } else { 0.0 };
                (2.0 * a(r) * fu + fu * x_grad_a) * r
            },
            radius,
            &[],
            1e-12,
        )?;
    let rhs = boundary - volume;
    let equation_residual = (1..=8)
        .map(|k| {
            let r = radius * k as f64 / 8.0;
            let h = 1e-3 * r;
            (radial_laplacian_fd(&u, r, h) + a(r) * (nonlinearity.derivative)(u(r))).abs()
        })
        .fold(0.0, f64::max);
    Ok(PohozaevReport {
        lhs,
        rhs,
        relative_residual: (lhs - rhs).abs() / lhs.abs().max(boundary.abs() + volume.abs()).max(f64::MIN_POSITIVE),
        equation_residual,
    })
}

/// Cutoff beyond which the density is treated as zero.
fn newton_cutoff(x_abs: f64) -> f64 {
    (1e3 * x_abs).max(1e6)
}

/// `z(x) = (1/2π) ∫ f(y) log(|x - y| / (1 + |y|)) dy` for radial `f`.
///
/// The angular average of `log|x - y|` is `log max(|x|, |y|)`, leaving
/// `z(R) = ∫_0^∞ f(s) s (log max(R, s) - log(1 + s)) ds`.
pub fn newton_potential(f: impl Fn(f64) -> f64, x_abs: f64) -> Result<f64> {
    if !x_abs.is_finite() || x_abs <= 0.0 {
        return Err(Error::InvalidArgument(format!("|x| = {x_abs}")));
    }
    let cutoff = newton_cutoff(x_abs);
    // beyond the cutoff the kernel is log(s/(1+s)) ≈ -1/s, so only the
    // integrability of f itself matters there
    radial_tail(&f, cutoff)?;
    integrate_radial(
        |s| f(s) * s * (s.max(x_abs).ln() - s.ln_1p()),
        cutoff,
        &[x_abs],
        1e-10,
    )
}

/// Least-squares slope of `z(R)` against `log R` on `n` log-spaced radii.
pub fn newton_log_slope(f: impl Fn(f64) -> f64, r_lo: f64, r_hi: f64, n: usize) -> Result<f64> {
    if n < 2 || !(r_lo > 0.0 && r_hi > r_lo) {
        return Err(Error::InvalidArgument("need n >= 2 and 0 < r_lo < r_hi".into()));
    }
    let mut points = Vec::with_capacity(n);
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        let r = r_lo * (r_hi / r_lo).powf(t);
        points.push((r.ln(), newton_potential(&f, r)?));
    }
    let m = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub alpha_min: f64,
    pub moment1: f64,
    pub lambda_bar: f64,
    pub lambda_bar_subset: Vec<usize>,
    pub lambda_bar_exhaustive: bool,
    pub residual_vanishing_lambda: f64,
    /// `α_min > 1/2`.
    pub alpha_min_above_half: bool,
    /// `λ̄ = 8π / (∫ α dP)²` to relative `1e-9`.
    pub residual_form_matches: bool,
    /// `α_min > ½ ∫ α dP`.
    pub alpha_min_above_half_moment: bool,
    pub implies_residual_form: bool,
    pub implies_half_moment: bool,
}

/// Checks the residual-vanishing conditions for a measure on `[0, 1]`.
pub fn consistency_report(measure: &CirculationMeasure) -> Result<ConsistencyReport> {
    if measure.has_negative_atoms() {
        return Err(Error::NegativeAtoms);
    }
    let alpha_min = measure.alpha_min()?;
    let moment1 = measure.moment(1, MomentSide::Positive);
    let residual_vanishing_lambda = lambda_bar_residual_vanishing(measure)?;
    let exhaustive = measure.len() <= MAX_BRUTEFORCE_ATOMS;
    let extremal = if exhaustive {
        lambda_bar_bruteforce(measure)?
    } else {
        lambda_bar(measure)
    };
    let a = alpha_min > 0.5;
    let b = (extremal.lambda_bar - residual_vanishing_lambda).abs() <= 1e-9 * residual_vanishing_lambda;
    let c = alpha_min > 0.5 * moment1;
    Ok(ConsistencyReport {
        alpha_min,
        moment1,
        lambda_bar: extremal.lambda_bar,
        lambda_bar_subset: extremal.subset,
        lambda_bar_exhaustive: exhaustive,
        residual_vanishing_lambda,
        alpha_min_above_half: a,
        residual_form_matches: b,
        alpha_min_above_half_moment: c,
        implies_residual_form: !a || b,
        implies_half_moment: !a || c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::Problem;
    use crate::torus::Field;

    #[test]
    fn bubble_normalization() {
        assert_eq!(liouville_bubble(1.0, 8.0, 0.0), 0.0);
        let b = Bubble::with_peak(8.0 * PI, 20.0);
        assert!((b.peak() - 20.0).abs() < 1e-12);
        assert!((b.sigma() - (-10.0f64).exp()).abs() < 1e-18);
        assert!((b.density(0.7) - b.lambda * b.value(0.7).exp()).abs() < 1e-12);
    }

    #[test]
    fn bubble_solves_liouville() {
        let b = Bubble::new(1.0, 8.0);
        for r in [0.5, 1.0, 5.0] {
            let lap = radial_laplacian_fd(|x| b.value(x), r, 1e-4 * r.max(1.0));
            assert!((lap + b.density(r)).abs() < 1e-6, "r = {r}");
        }
    }

    #[test]
    fn bubble_mass() {
        let b = Bubble::new(1.0, 8.0 * PI);
        let total = radial_mass(|r| b.density(r), 1e6).unwrap();
        assert!((total / (8.0 * PI) - 1.0).abs() < 1e-6);
        assert!((mass_gamma(|r| b.density(r), 1e6).unwrap() - 4.0).abs() < 1e-6);
        assert_eq!(mass_gamma(|_| 0.0, 100.0).unwrap(), 0.0);
        let scaled = mass_gamma(|r| 3.0 * b.density(r), 1e6).unwrap();
        assert!((scaled - 12.0).abs() < 1e-6);
    }

    #[test]
    fn mass_gamma_rejects_slow_tails() {
        let err = mass_gamma(|r| 1.0 / (1.0 + r * r), 1e4);
        assert!(matches!(err, Err(Error::NonIntegrableTail(_))));
    }

    #[test]
    fn mass_gamma_tail_correction() {
        // f = 1/(1+r)^4: (1/2π)∫ f = ∫_0^∞ r/(1+r)^4 dr = 1/6
        let g = mass_gamma(|r| (1.0 + r).powi(-4), 1e3).unwrap();
        assert!((g - 1.0 / 6.0).abs() < 1e-8, "{g}");
    }

    #[test]
    fn pohozaev_bubble_and_constant() {
        let b = Bubble::new(1.0, 8.0 * PI);
        let lam = b.lambda;
        let nl = Nonlinearity {
            value: move |u: f64| lam * u.exp(),
            derivative: move |u: f64| lam * u.exp(),
        };
        let report = pohozaev_residual(|r| b.value(r), |_| 1.0, &nl, 10.0).unwrap();
        assert!(report.relative_residual <= 1e-3, "{report:?}");
        assert!(report.equation_residual < 1e-5);

        let constant = Nonlinearity {
            value: |_: f64| 2.5,
            derivative: |_: f64| 0.0,
        };
        let flat = pohozaev_residual(|_| 1.7, |_| 1.0, &constant, 4.0).unwrap();
        assert_eq!(flat.lhs, 0.0);
        assert!(flat.relative_residual <= 1e-12, "{flat:?}");
    }

    #[test]
    fn pohozaev_boundary_term_tends_to_mass_identity() {
        let b = Bubble::new(1.0, 8.0 * PI);
        let lam = b.lambda;
        let nl = Nonlinearity {
            value: move |u: f64| lam * u.exp(),
            derivative: move |u: f64| lam * u.exp(),
        };
        let mut previous = 0.0;
        for radius in [10.0, 100.0, 1000.0] {
            let rep = pohozaev_residual(|r| b.value(r), |_| 1.0, &nl, radius).unwrap();
            let gap = (rep.lhs + 16.0 * PI).abs();
            if radius > 10.0 {
                assert!(gap < previous);
            }
            previous = gap;
        }
        assert!(previous / (16.0 * PI) < 1e-5);
    }

    #[test]
    fn newton_potential_closed_forms() {
        assert_eq!(newton_potential(|_| 0.0, 5.0).unwrap(), 0.0);
        // disk of density 2: z(R) = log R - 1/2 for R > 1
        let disk = |r: f64| if r <= 1.0 { 2.0 } else { 0.0 };
        for radius in [2.0, 50.0, 3e3] {
            let z = newton_potential(disk, radius).unwrap();
            assert!((z - (radius.ln() - 0.5)).abs() < 1e-8, "R = {radius}: {z}");
        }
        assert!(newton_potential(|r| 1.0 / (1.0 + r), 10.0).is_err());
        assert!(newton_potential(disk, 0.0).is_err());
    }

    #[test]
    fn newton_increment_over_doubling() {
        let bubble = |r: f64| 8.0 / (1.0 + r * r).powi(2);
        for radius in [100.0, 1e3] {
            let inc = newton_potential(bubble, 2.0 * radius).unwrap() - newton_potential(bubble, radius).unwrap();
            assert!((inc - 4.0 * 2f64.ln()).abs() <= 0.01);
        }
    }

    #[test]
    fn li_fit_on_constant_profile() {
        let samples = (1..40).map(|k| ProfileSample { r: k as f64 * 1e-3, dw: 0.0 }).collect();
        let p = BlowupProfile::from_samples(1.0, 10.0, samples, 4.0).unwrap();
        assert_eq!(fit_li_slope(&p, (1.0, 1e6)).unwrap(), 0.0);
        assert!(matches!(fit_li_slope(&p, (1e9, 1e10)), Err(Error::TooFewSamples(0, _))));
    }

    #[test]
    fn near_core_window_is_biased() {
        // In r/σ ∈ [3, 30] the O(1) core term still bends the profile; the
        // slope exceeds 4 by roughly ten percent.
        let b = Bubble::with_peak(8.0 * PI, 20.0);
        let sigma = b.sigma();
        let samples = (0..=200)
            .map(|k| {
                let r = sigma * (3.0 + 27.0 * k as f64 / 200.0);
                ProfileSample { r, dw: b.value(r) - b.peak() }
            })
            .collect();
        let p = BlowupProfile::from_samples(1.0, b.peak(), samples, 4.0).unwrap();
        let slope = fit_li_slope(&p, (3.0, 30.0)).unwrap();
        assert!(slope > 4.3 && slope < 4.5, "{slope}");
    }

    #[test]
    fn torus_profile_of_sampled_bubble() {
        let t = SpectralTorus::new(1.0, 128).unwrap();
        let b = Bubble::with_peak(8.0 * PI, 6.0);
        let center = (64, 64);
        let field = t.sample_radial(center, |r| b.value(r));
        let p = CirculationMeasure::dirac(1.0).unwrap();
        let prob = Problem::new(t.clone(), p.clone(), 8.0 * PI).unwrap();
        let result = MinimizeResult::from_field(&prob, field, 25.0).unwrap();
        let one = rescale_profile(&result, &t, &p, 1.0).unwrap();
        for s in &one.samples {
            let expected = -2.0 * (b.mu * b.mu * s.r * s.r).ln_1p();
            assert!((s.dw - expected).abs() < 1e-9);
        }
        let half = rescale_profile(&result, &t, &p, 0.5).unwrap();
        for (a, h) in one.samples.iter().zip(&half.samples) {
            assert!((h.dw - 0.5 * a.dw).abs() < 1e-12);
        }
        assert!((one.sigma - (-0.5 * one.peak_value).exp()).abs() < 1e-15);
        assert_eq!(one.gamma0_reference, 4.0);
    }

    #[test]
    fn torus_profile_of_zero_field() {
        let t = SpectralTorus::new(1.0, 32).unwrap();
        let p = CirculationMeasure::dirac(1.0).unwrap();
        let prob = Problem::new(t.clone(), p.clone(), 1.0).unwrap();
        let result = MinimizeResult::from_field(&prob, Field::zeros(32), 25.0).unwrap();
        let profile = rescale_profile(&result, &t, &p, 1.0).unwrap();
        assert!(profile.samples.iter().all(|s| s.dw == 0.0));

        let mut wrong = result.clone();
        wrong.v = t.project_zero_mean(&t.sample(|x1, _| (2.0 * PI * x1).cos()));
        wrong.peak_point = (16, 0);
        assert!(matches!(rescale_profile(&wrong, &t, &p, 1.0), Err(Error::NoPeak(_))));
    }

    #[test]
    fn consistency_examples() {
        let d1 = consistency_report(&CirculationMeasure::dirac(1.0).unwrap()).unwrap();
        assert!(d1.alpha_min_above_half && d1.residual_form_matches && d1.alpha_min_above_half_moment);

        let p = CirculationMeasure::new_atomic(&[(0.6, 0.5), (1.0, 0.5)]).unwrap();
        let r = consistency_report(&p).unwrap();
        assert!(r.alpha_min_above_half && r.residual_form_matches && r.alpha_min_above_half_moment);
        assert!((r.lambda_bar - 8.0 * PI / 0.64).abs() < 1e-12);

        let q = CirculationMeasure::new_atomic(&[(0.1, 0.9), (1.0, 0.1)]).unwrap();
        let r = consistency_report(&q).unwrap();
        assert!(!r.alpha_min_above_half);
        assert!(r.implies_residual_form && r.implies_half_moment);
        assert!(!r.residual_form_matches);
        assert!((r.lambda_bar - 80.0 * PI).abs() < 1e-9);

        let signed = CirculationMeasure::new_atomic(&[(-0.5, 0.5), (1.0, 0.5)]).unwrap();
        assert!(matches!(consistency_report(&signed), Err(Error::NegativeAtoms)));
    }
}
