//! The energy
//!
//! ```text
//! J_λ(v) = ½ ∫ |∇v|² - λ Σ_i b_i log ∫ e^{α_i v}
//! ```
//!
//! on zero-mean fields, its L² gradient (the mean field residual) and the
//! quantities built from the normalized fields `w_α = αv - log ∫ e^{αv}`.
//!
//! Every log-partition is evaluated in one of two stable forms: for small
//! exponents `log|Ω| + log1p(mean(expm1(αv)))`, which keeps full relative
//! accuracy near `v = 0`; otherwise the max-shifted sum.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::CirculationMeasure;
use crate::torus::{Field, GridPoint, SpectralTorus};

/// Beyond this exponent range the shifted form is used.
const SMALL_EXPONENT: f64 = 30.0;

#[derive(Clone, Debug)]
pub struct Problem {
    pub torus: SpectralTorus,
    pub measure: CirculationMeasure,
    pub lambda: f64,
}

impl Problem {
    pub fn new(torus: SpectralTorus, measure: CirculationMeasure, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "interaction strength {lambda} must be finite and positive"
            )));
        }
        Ok(Problem {
            torus,
            measure,
            lambda,
        })
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Problem::new(self.torus.clone(), self.measure.clone(), lambda)
    }
}

/// `log ∫_Ω e^{αv}`.
pub fn log_partition(torus: &SpectralTorus, v: &Field, alpha: f64) -> Result<f64> {
    let area = torus.area();
    if alpha == 0.0 {
        return Ok(area.ln());
    }
    let (lo, hi) = v
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            let y = alpha * x;
            (lo.min(y), hi.max(y))
        });
    if !hi.is_finite() || !lo.is_finite() {
        return Err(Error::Overflow(hi));
    }
    if hi <= SMALL_EXPONENT && lo >= -SMALL_EXPONENT {
        let n = v.values().len() as f64;
        let mean_expm1 = v.values().iter().map(|&x| (alpha * x).exp_m1()).sum::<f64>() / n;
        return Ok(area.ln() + mean_expm1.ln_1p());
    }
    let shifted: f64 = v.values().iter().map(|&x| (alpha * x - hi).exp()).sum();
    let out = torus.cell_area().ln() + hi + shifted.ln();
    if !out.is_finite() {
        return Err(Error::Overflow(hi));
    }
    Ok(out)
}

/// `w_α = αv - log ∫ e^{αv}`, so that `∫ e^{w_α} = 1`.
pub fn w_alpha(prob: &Problem, v: &Field, alpha: f64) -> Result<Field> {
    v.ensure_zero_mean()?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} not in [0, 1]")));
    }
    let log_z = log_partition(&prob.torus, v, alpha)?;
    Ok(v.map(|x| alpha * x - log_z))
}

pub fn energy(prob: &Problem, v: &Field) -> Result<f64> {
    v.ensure_zero_mean()?;
    let dirichlet = prob.torus.dirichlet_energy(v)?;
    Ok(dirichlet - prob.lambda * weighted_log_partition(prob, v)?)
}

fn weighted_log_partition(prob: &Problem, v: &Field) -> Result<f64> {
    let mut total = 0.0;
    for atom in prob.measure.atoms() {
        total += atom.weight * log_partition(&prob.torus, v, atom.alpha)?;
    }
    Ok(total)
}

/// `λ Σ_i b_i α_i (e^{α_i v} / ∫ e^{α_i v} - 1/|Ω|)`, unprojected.
fn nonlinearity(prob: &Problem, v: &Field) -> Result<Vec<f64>> {
    let inv_area = 1.0 / prob.torus.area();
    let mut out = vec![0.0; v.values().len()];
    for atom in prob.measure.atoms() {
        if atom.alpha == 0.0 {
            continue;
        }
        let log_z = log_partition(&prob.torus, v, atom.alpha)?;
        let c = prob.lambda * atom.weight * atom.alpha;
        for (o, &x) in out.iter_mut().zip(v.values()) {
            *o += c * ((atom.alpha * x - log_z).exp() - inv_area);
        }
    }
    Ok(out)
}

/// Mean field residual `-Δv - λ ∫ α (e^{αv}/∫e^{αv} - 1/|Ω|) P(dα)`.
pub fn el_residual(prob: &Problem, v: &Field) -> Result<Field> {
    v.ensure_zero_mean()?;
    let lap = prob.torus.laplacian(v)?;
    residual_from_laplacian(prob, v, &lap)
}

fn residual_from_laplacian(prob: &Problem, v: &Field, lap: &Field) -> Result<Field> {
    let nl = nonlinearity(prob, v)?;
    let values = lap.values().iter().zip(&nl).map(|(l, g)| -l - g).collect();
    let raw = Field::from_values(v.n(), values)?;
    Ok(prob.torus.project_zero_mean(&raw))
}

/// L² gradient of `J` on the zero-mean space; identical to [`el_residual`].
pub fn grad_energy(prob: &Problem, v: &Field) -> Result<Field> {
    el_residual(prob, v)
}

/// Energy, gradient and the spectrum of `v`, computed together.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub energy: f64,
    pub gradient: Field,
    pub(crate) spectrum: Vec<Complex64>,
}

pub(crate) fn evaluate(prob: &Problem, v: &Field) -> Result<Evaluation> {
    v.ensure_zero_mean()?;
    let spectrum = prob.torus.forward(v)?;
    let dirichlet = prob.torus.dirichlet_energy_of_spectrum(&spectrum);
    let mut lap_hat = spectrum.clone();
    for (c, &eig) in lap_hat.iter_mut().zip(prob.torus.eigenvalues()) {
        *c *= -eig;
    }
    let lap = prob.torus.inverse(lap_hat);
    let gradient = residual_from_laplacian(prob, v, &lap)?;
    Ok(Evaluation {
        energy: dirichlet - prob.lambda * weighted_log_partition(prob, v)?,
        gradient,
        spectrum,
    })
}

/// `J(v + t·d) - J(v)` evaluated as a difference, without cancellation.
///
/// The quadratic part is expanded exactly; each log-partition difference is
/// `log1p(⟨expm1(αt·d)⟩_α)` under the Gibbs weights of `v`.
pub(crate) fn energy_change(
    prob: &Problem,
    v: &Field,
    v_hat: &[Complex64],
    direction: &Field,
    direction_hat: &[Complex64],
    t: f64,
) -> Result<f64> {
    let torus = &prob.torus;
    let quadratic =
        t * torus.energy_pairing(v_hat, direction_hat) + 0.5 * t * t * torus.energy_pairing(direction_hat, direction_hat);
    let mut partition = 0.0;
    for atom in prob.measure.atoms() {
        if atom.alpha == 0.0 {
            continue;
        }
        let log_z = log_partition(torus, v, atom.alpha)?;
        let cell = torus.cell_area();
        let expectation: f64 = v
            .values()
            .iter()
            .zip(direction.values())
            .map(|(&x, &d)| cell * (atom.alpha * x - log_z).exp() * (atom.alpha * t * d).exp_m1())
            .sum();
        let change = expectation.ln_1p();
        if !change.is_finite() {
            return Err(Error::Overflow(atom.alpha * t * direction.sup_norm()));
        }
        partition += atom.weight * change;
    }
    Ok(quadratic - prob.lambda * partition)
}

/// `(λ/2) Σ_i b_i (mean(w_{α_i}) + ∫ w_{α_i} e^{w_{α_i}})`.
///
/// Equals `J(v)` at critical points.
pub fn energy_dual(prob: &Problem, v: &Field) -> Result<f64> {
    v.ensure_zero_mean()?;
    if prob.measure.has_negative_atoms() {
        return Err(Error::NegativeAtoms);
    }
    let torus = &prob.torus;
    let mut total = 0.0;
    for atom in prob.measure.atoms() {
        let w = w_alpha(prob, v, atom.alpha)?;
        let mean = torus.mean(&w)?;
        let entropy = torus.integrate(&w.map(|x| x * x.exp()))?;
        total += atom.weight * (mean + entropy);
    }
    Ok(0.5 * prob.lambda * total)
}

fn check_alpha_window(alpha: f64, h: f64) -> Result<()> {
    if !(h > 0.0 && alpha - h > 0.0 && alpha + h <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < alpha - h and alpha + h <= 1 (alpha = {alpha}, h = {h})"
        )));
    }
    Ok(())
}

/// Central difference of `α ↦ w_α(x_peak)` where `x_peak` maximizes `v`.
pub fn dalpha_peak(prob: &Problem, v: &Field, x_peak: GridPoint, alpha: f64, h: f64) -> Result<f64> {
    v.ensure_zero_mean()?;
    check_alpha_window(alpha, h)?;
    let peak = v.get(x_peak);
    if peak < v.max() {
        return Err(Error::NotArgmax(x_peak));
    }
    let w = |a: f64| -> Result<f64> { Ok(a * peak - log_partition(&prob.torus, v, a)?) };
    Ok((w(alpha + h)? - w(alpha - h)?) / (2.0 * h))
}

/// Central difference of `α ↦ ∫ e^{αv}`.
pub fn dalpha_partition(prob: &Problem, v: &Field, alpha: f64, h: f64) -> Result<f64> {
    v.ensure_zero_mean()?;
    check_alpha_window(alpha, h)?;
    let z = |a: f64| -> Result<f64> { Ok(log_partition(&prob.torus, v, a)?.exp()) };
    Ok((z(alpha + h)? - z(alpha - h)?) / (2.0 * h))
}
