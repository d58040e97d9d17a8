//! Descent on the zero-mean space, continuation in `λ`, and concentration
//! detection.
//!
//! The descent direction is the negative L² gradient. Step proposals come from
//! the Barzilai–Borwein quotient, clipped to `[1e-6, 1e3]`, and are backtracked
//! until the Armijo condition holds. Energy decrements are evaluated as
//! differences (see [`crate::functional`]) so the sufficient-decrease test
//! stays meaningful when the gradient is near the convergence tolerance.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::{self, Problem};
use crate::measure::{lambda_bar, CirculationMeasure};
use crate::torus::{Field, GridPoint, SpectralTorus};

pub const MIN_STEP: f64 = 1e-6;
pub const MAX_STEP: f64 = 1e3;
/// Consecutive halvings before the line search gives up.
pub const MAX_BACKTRACKS: usize = 60;
/// Amplitude of the bump added between continuation stages.
pub const BUMP_AMPLITUDE: f64 = 0.5;
/// Slack on the schedule ceiling `λ ≤ λ̄`.
pub const SCHEDULE_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Sup-norm tolerance on the mean field residual.
    pub grad_tol: f64,
    pub step_init: f64,
    pub armijo_c: f64,
    /// Iteration stops (flagged as blowup) once `max v` reaches this.
    pub blowup_peak_threshold: f64,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_iters: 20_000,
            grad_tol: 1e-8,
            step_init: 1e-3,
            armijo_c: 1e-4,
            blowup_peak_threshold: 25.0,
            seed: 0,
        }
    }
}

impl MinimizeOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("grad_tol", self.grad_tol),
            ("step_init", self.step_init),
            ("armijo_c", self.armijo_c),
            ("blowup_peak_threshold", self.blowup_peak_threshold),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidArgument(format!("{name} = {value} must be positive")));
            }
        }
        if self.armijo_c >= 1.0 {
            return Err(Error::InvalidArgument("armijo_c must be below 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// One row of the per-iteration trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub energy: f64,
    pub residual_norm: f64,
    /// Step accepted to reach this iterate (0 for the start).
    pub step: f64,
    pub max_v: f64,
    /// `J(v_t) - J(v_{t-1})` evaluated as a difference.
    pub decrease: f64,
    /// `-armijo_c · step · ‖∇J‖²` at the previous iterate.
    pub armijo_bound: f64,
}

#[derive(Clone, Debug)]
pub struct MinimizeResult {
    pub v: Field,
    pub energy: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub lambda: f64,
    pub peak_point: GridPoint,
    pub peak_value: f64,
    pub blown_up: bool,
    pub converged: bool,
    /// Threshold the run was flagged against.
    pub peak_threshold: f64,
    pub trace: Vec<TraceRow>,
}

impl MinimizeResult {
    /// Wraps an arbitrary zero-mean field as a result, e.g. to analyze a
    /// synthetic or loaded field.
    pub fn from_field(prob: &Problem, v: Field, peak_threshold: f64) -> Result<Self> {
        let v = prob.torus.project_zero_mean(&v);
        let energy = functional::energy(prob, &v)?;
        let residual_norm = functional::el_residual(prob, &v)?.sup_norm();
        let (peak_point, peak_value) = v.argmax();
        Ok(MinimizeResult {
            v,
            energy,
            residual_norm,
            iterations: 0,
            lambda: prob.lambda,
            peak_point,
            peak_value,
            blown_up: peak_value >= peak_threshold,
            converged: false,
            peak_threshold,
            trace: Vec::new(),
        })
    }
}

/// Smooth random zero-mean start built from low Fourier modes.
pub fn random_start(torus: &SpectralTorus, seed: u64, amplitude: f64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    for kx in -3i32..=3 {
        for ky in 0..=3i32 {
            if ky == 0 && kx <= 0 {
                continue;
            }
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            modes.push((kx as f64, ky as f64, a, b));
        }
    }
    let scale = amplitude / (modes.len() as f64).sqrt();
    let k = 2.0 * PI / torus.side();
    let f = torus.sample(|x1, x2| {
        modes
            .iter()
            .map(|&(kx, ky, a, b)| {
                let phase = k * (kx * x1 + ky * x2);
                a * phase.cos() + b * phase.sin()
            })
            .sum::<f64>()
            * scale
    });
    torus.project_zero_mean(&f)
}

/// Zero-mean Gaussian bump of height [`BUMP_AMPLITUDE`] at the grid center.
pub fn symmetry_breaking_bump(torus: &SpectralTorus) -> Field {
    let width = torus.side() / 16.0;
    let f = torus.sample_radial(torus.center(), |r| {
        BUMP_AMPLITUDE * (-(r * r) / (2.0 * width * width)).exp()
    });
    torus.project_zero_mean(&f)
}

fn inner(torus: &SpectralTorus, a: &Field, b: &Field) -> f64 {
    torus.cell_area() * a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum::<f64>()
}

/// Minimizes `J_λ` from `warm_start`, or from [`random_start`] seeded by
/// `opts.seed` when none is given.
pub fn minimize(prob: &Problem, opts: &MinimizeOptions, warm_start: Option<&Field>) -> Result<MinimizeResult> {
    opts.validate()?;
    let torus = &prob.torus;
    let mut v = match warm_start {
        Some(f) => {
            if f.n() != torus.n() {
                return Err(Error::ShapeMismatch {
                    expected: torus.n(),
                    got: f.values().len(),
                });
            }
            f.ensure_zero_mean()?;
            torus.project_zero_mean(f)
        }
        None => random_start(torus, opts.seed, 0.1),
    };

    let mut trace = Vec::new();
    let mut previous: Option<(Field, Field)> = None;
    let mut accepted = (0.0, 0.0, 0.0);
    let mut iter = 0;
    loop {
        let eval = functional::evaluate(prob, &v)?;
        let residual_norm = eval.gradient.sup_norm();
        let max_v = v.max();
        trace.push(TraceRow {
            iter,
            energy: eval.energy,
            residual_norm,
            step: accepted.0,
            max_v,
            decrease: accepted.1,
            armijo_bound: accepted.2,
        });
        let converged = residual_norm <= opts.grad_tol;
        let blown_up = !converged && max_v >= opts.blowup_peak_threshold;
        if converged || blown_up || iter >= opts.max_iters {
            let (peak_point, peak_value) = v.argmax();
            return Ok(MinimizeResult {
                energy: eval.energy,
                residual_norm,
                iterations: iter,
                lambda: prob.lambda,
                peak_point,
                peak_value,
                blown_up,
                converged,
                peak_threshold: opts.blowup_peak_threshold,
                trace,
                v,
            });
        }

        let g = eval.gradient;
        let g_norm2 = inner(torus, &g, &g);
        let proposal = match &previous {
            Some((v_prev, g_prev)) => {
                let dv = v.axpy(-1.0, v_prev)?;
                let dg = g.axpy(-1.0, g_prev)?;
                let curvature = inner(torus, &dv, &dg);
                if curvature > 0.0 {
                    inner(torus, &dv, &dv) / curvature
                } else {
                    opts.step_init
                }
            }
            None => opts.step_init,
        }
        .clamp(MIN_STEP, MAX_STEP);

        let descent = g.scaled(-1.0);
        let descent_hat = torus.forward(&descent)?;
        let mut step = proposal;
        let mut found = None;
        for _ in 0..MAX_BACKTRACKS {
            let bound = -opts.armijo_c * step * g_norm2;
            // An overflowing trial point is treated as a failed trial.
            match functional::energy_change(prob, &v, &eval.spectrum, &descent, &descent_hat, step) {
                Ok(change) if change <= bound => {
                    found = Some((step, change, bound));
                    break;
                }
                Ok(_) | Err(Error::Overflow(_)) => step *= 0.5,
                Err(e) => return Err(e),
            }
        }
        let Some(step_info) = found else {
            return Err(Error::Diverged {
                iterations: iter,
                last: Box::new(v),
            });
        };
        accepted = step_info;
        let next = torus.project_zero_mean(&v.axpy(step_info.0, &descent)?);
        previous = Some((v, g));
        v = next;
        iter += 1;
    }
}

/// Minimizes along an increasing schedule `λ_0 < λ_1 < …`, each stage warm
/// started from the previous minimizer plus [`symmetry_breaking_bump`].
/// Stops after the first stage that blows up.
pub fn continuation_sweep(
    torus: &SpectralTorus,
    measure: &CirculationMeasure,
    schedule: &[f64],
    opts: &MinimizeOptions,
) -> Result<Vec<MinimizeResult>> {
    validate_schedule(measure, schedule)?;
    let bump = symmetry_breaking_bump(torus);
    let mut results: Vec<MinimizeResult> = Vec::with_capacity(schedule.len());
    for &lambda in schedule {
        let prob = Problem::new(torus.clone(), measure.clone(), lambda)?;
        let result = match results.last() {
            None => minimize(&prob, opts, None)?,
            Some(prev) => {
                let start = torus.project_zero_mean(&prev.v.axpy(1.0, &bump)?);
                minimize(&prob, opts, Some(&start))?
            }
        };
        let stop = result.blown_up;
        results.push(result);
        if stop {
            break;
        }
    }
    Ok(results)
}

/// Checks that a schedule is nonempty, positive, strictly increasing and does
/// not exceed `λ̄(P)`.
pub fn validate_schedule(measure: &CirculationMeasure, schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::ScheduleRefused("empty schedule".into()));
    }
    if schedule.iter().any(|l| !l.is_finite() || *l <= 0.0) {
        return Err(Error::ScheduleRefused("entries must be finite and positive".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::ScheduleRefused("schedule must be strictly increasing".into()));
    }
    let ceiling = lambda_bar(measure).lambda_bar;
    if let Some(bad) = schedule.iter().find(|&&l| l > ceiling + SCHEDULE_SLACK) {
        return Err(Error::ScheduleRefused(format!(
            "lambda {bad} exceeds the extremal value {ceiling}"
        )));
    }
    Ok(())
}

/// Returns the concentration point of a blown-up result.
///
/// Candidates are periodic local maxima of `v` at or above the result's peak
/// threshold. The candidate carrying the most `e^{w₁}` mass within radius
/// `L/8` wins (ties go to the first in row-major order) and is reported if
/// that mass exceeds one half.
pub fn detect_concentration(result: &MinimizeResult, torus: &SpectralTorus) -> Option<GridPoint> {
    let v = &result.v;
    if v.n() != torus.n() || result.peak_value < result.peak_threshold {
        return None;
    }
    let log_z = functional::log_partition(torus, v, 1.0).ok()?;
    let candidates: Vec<(GridPoint, f64)> = local_maxima(v)
        .into_iter()
        .filter(|&p| v.get(p) >= result.peak_threshold)
        .map(|p| (p, ball_mass(torus, v, log_z, p, torus.side() / 8.0)))
        .collect();
    let (point, mass) = select_by_mass(&candidates)?;
    (mass > 0.5).then_some(point)
}

/// Highest mass, first in input order on ties.
pub(crate) fn select_by_mass(candidates: &[(GridPoint, f64)]) -> Option<(GridPoint, f64)> {
    candidates
        .iter()
        .copied()
        .fold(None, |best: Option<(GridPoint, f64)>, c| match best {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        })
}

fn local_maxima(v: &Field) -> Vec<GridPoint> {
    let n = v.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let x = v.get((i, j));
            let is_max = [n - 1, 0, 1].iter().all(|&di| {
                [n - 1, 0, 1]
                    .iter()
                    .all(|&dj| v.get(((i + di) % n, (j + dj) % n)) <= x)
            });
            if is_max {
                out.push((i, j));
            }
        }
    }
    out
}

/// `∫_{B_r(center)} e^{v - log_z}` with minimum-image distances.
pub fn ball_mass(torus: &SpectralTorus, v: &Field, log_z: f64, center: GridPoint, radius: f64) -> f64 {
    let n = torus.n();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if torus.distance(center, (i, j)) <= radius {
                sum += (v.get((i, j)) - log_z).exp();
            }
        }
    }
    torus.cell_area() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta1() -> CirculationMeasure {
        CirculationMeasure::dirac(1.0).unwrap()
    }

    fn problem(n: usize, lambda: f64) -> Problem {
        Problem::new(SpectralTorus::new(1.0, n).unwrap(), delta1(), lambda).unwrap()
    }

    #[test]
    fn options_validation() {
        assert!(MinimizeOptions::default().validate().is_ok());
        let bad = MinimizeOptions {
            armijo_c: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = MinimizeOptions {
            grad_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zero_start_is_already_critical() {
        let prob = problem(32, 1.0);
        let r = minimize(&prob, &MinimizeOptions::default(), Some(&prob.torus.zeros())).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.converged);
        assert_eq!(r.energy, 0.0);
        assert_eq!(r.residual_norm, 0.0);
        assert_eq!(r.v.sup_norm(), 0.0);
    }

    #[test]
    fn converges_from_random_start() {
        let prob = problem(32, 0.5 * 8.0 * PI);
        let r = minimize(&prob, &MinimizeOptions::default(), None).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(r.residual_norm <= 1e-8);
        // v = 0 is admissible with J = 0
        assert!(r.energy <= 1e-14);
        assert!(r.v.ensure_zero_mean().is_ok());
        for row in &r.trace[1..] {
            assert!(row.decrease <= row.armijo_bound);
        }
        let recomputed = functional::el_residual(&prob, &r.v).unwrap().sup_norm();
        assert!((recomputed - r.residual_norm).abs() <= 1e-12);
        assert_eq!(r.peak_value, r.v.get(r.peak_point));
        assert_eq!(r.peak_value, r.v.max());
    }

    #[test]
    fn warm_restart_is_a_fixed_point() {
        let prob = problem(32, 10.0);
        let opts = MinimizeOptions::default();
        let first = minimize(&prob, &opts, None).unwrap();
        let again = minimize(&prob, &opts, Some(&first.v)).unwrap();
        assert!(again.iterations <= 2);
        assert!(again.v.max_abs_diff(&first.v).unwrap() <= opts.grad_tol);
    }

    #[test]
    fn wrong_grid_warm_start_is_rejected() {
        let prob = problem(32, 1.0);
        let err = minimize(&prob, &MinimizeOptions::default(), Some(&Field::zeros(16)));
        assert!(matches!(err, Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn iteration_cap_is_not_convergence() {
        let prob = problem(16, 5.0);
        let opts = MinimizeOptions {
            max_iters: 3,
            ..Default::default()
        };
        let start = random_start(&prob.torus, 1, 1.0);
        let r = minimize(&prob, &opts, Some(&start)).unwrap();
        assert!(!r.converged && !r.blown_up);
        assert_eq!(r.iterations, 3);
        assert_eq!(r.trace.len(), 4);
    }

    #[test]
    fn blowup_threshold_stops_iteration() {
        let prob = problem(32, 1.0);
        let opts = MinimizeOptions {
            blowup_peak_threshold: 0.05,
            ..Default::default()
        };
        let start = random_start(&prob.torus, 3, 1.0);
        let r = minimize(&prob, &opts, Some(&start)).unwrap();
        assert!(r.blown_up);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn schedule_guards() {
        let p = delta1();
        let lbar = 8.0 * PI;
        assert!(validate_schedule(&p, &[0.5 * lbar, lbar]).is_ok());
        assert!(validate_schedule(&p, &[1.5 * lbar]).is_err());
        assert!(validate_schedule(&p, &[0.5, 0.4]).is_err());
        assert!(validate_schedule(&p, &[]).is_err());
        let t = SpectralTorus::new(1.0, 16).unwrap();
        assert!(matches!(
            continuation_sweep(&t, &p, &[0.5 * lbar, 1.5 * lbar], &MinimizeOptions::default()),
            Err(Error::ScheduleRefused(_))
        ));
    }

    #[test]
    fn single_stage_sweep_equals_minimize() {
        let t = SpectralTorus::new(1.0, 16).unwrap();
        let opts = MinimizeOptions::default();
        let sweep = continuation_sweep(&t, &delta1(), &[5.0], &opts).unwrap();
        let direct = minimize(&Problem::new(t, delta1(), 5.0).unwrap(), &opts, None).unwrap();
        assert_eq!(sweep.len(), 1);
        assert_eq!(sweep[0].v, direct.v);
        assert_eq!(sweep[0].iterations, direct.iterations);
    }

    fn bubble_field(t: &SpectralTorus, center: GridPoint, peak: f64, width: f64) -> Field {
        t.sample_radial(center, |r| peak - 2.0 * (1.0 + (r / width).powi(2)).ln())
    }

    #[test]
    fn detection_on_zero_and_bubble() {
        let prob = problem(64, 1.0);
        let zero = MinimizeResult::from_field(&prob, prob.torus.zeros(), 25.0).unwrap();
        assert_eq!(detect_concentration(&zero, &prob.torus), None);

        let field = bubble_field(&prob.torus, (20, 41), 30.0, 0.01);
        let r = MinimizeResult::from_field(&prob, field, 5.0).unwrap();
        assert_eq!(detect_concentration(&r, &prob.torus), Some((20, 41)));
    }

    #[test]
    fn detection_prefers_heavier_of_equal_peaks() {
        let t = SpectralTorus::new(1.0, 64).unwrap();
        let narrow = bubble_field(&t, (16, 16), 30.0, 0.004);
        let wide = bubble_field(&t, (48, 48), 30.0, 0.02);
        let field = Field::from_values(
            64,
            narrow
                .values()
                .iter()
                .zip(wide.values())
                .map(|(a, b)| a.max(*b))
                .collect(),
        )
        .unwrap();
        let prob = problem(64, 1.0);
        let r = MinimizeResult::from_field(&prob, field, 5.0).unwrap();
        assert_eq!(detect_concentration(&r, &t), Some((48, 48)));
    }

    #[test]
    fn mass_ties_go_to_first_point() {
        let candidates = [((5, 1), 0.7), ((2, 9), 0.7), ((9, 9), 0.3)];
        assert_eq!(select_by_mass(&candidates), Some(((5, 1), 0.7)));
        assert_eq!(select_by_mass(&[]), None);
    }
}
