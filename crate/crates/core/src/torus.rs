//! Flat periodic square `[0, L)²` discretized on an `n × n` grid.
//!
//! Grid values are stored row-major: `values[i * n + j]` sits at
//! `(x₁, x₂) = (i·h, j·h)` with `h = L / n`. All differential operators are
//! diagonal in the discrete Fourier basis; quadrature is the uniform rectangle
//! rule, exact for trigonometric polynomials below the Nyquist frequency.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};

/// `(i, j)` grid index; `i` runs along `x₁`.
pub type GridPoint = (usize, usize);

/// Relative slack of the zero-mean certificate.
pub const ZERO_MEAN_TOLERANCE: f64 = 1e-12;
/// Relative slack accepted for the mean of a Poisson right-hand side.
pub const POISSON_MEAN_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    n: usize,
    values: Vec<f64>,
    zero_mean: bool,
}

impl Field {
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::ShapeMismatch {
                expected: n,
                got: values.len(),
            });
        }
        Ok(Field {
            n,
            values,
            zero_mean: false,
        })
    }

    pub fn zeros(n: usize) -> Self {
        Field {
            n,
            values: vec![0.0; n * n],
            zero_mean: true,
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Field {
            n,
            values: vec![c; n * n],
            zero_mean: c == 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mean
    }

    pub fn get(&self, (i, j): GridPoint) -> f64 {
        self.values[i * self.n + j]
    }

    /// Largest value and the first grid point (row-major) attaining it.
    pub fn argmax(&self) -> (GridPoint, f64) {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = k;
            }
        }
        ((best / self.n, best % self.n), self.values[best])
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Pointwise map; drops the zero-mean certificate.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            n: self.n,
            values: self.values.iter().map(|&v| f(v)).collect(),
            zero_mean: false,
        }
    }

    /// `self + t·other`; the certificate survives if both inputs carry it.
    pub fn axpy(&self, t: f64, other: &Field) -> Result<Field> {
        self.check_same(other)?;
        Ok(Field {
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + t * b)
                .collect(),
            zero_mean: self.zero_mean && other.zero_mean,
        })
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field {
            n: self.n,
            values: self.values.iter().map(|v| c * v).collect(),
            zero_mean: self.zero_mean,
        }
    }

    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    fn check_same(&self, other: &Field) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch {
                expected: self.n,
                got: other.values.len(),
            });
        }
        Ok(())
    }

    fn raw_mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Accepts certified fields and fields whose mean is numerically zero.
    pub fn ensure_zero_mean(&self) -> Result<()> {
        if self.zero_mean {
            return Ok(());
        }
        let mean = self.raw_mean();
        if mean.abs() <= ZERO_MEAN_TOLERANCE * self.sup_norm().max(1.0) {
            Ok(())
        } else {
            Err(Error::NonZeroMean(mean))
        }
    }
}

/// One radial bin: mean distance of its samples, mean value, sample count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialBin {
    pub r: f64,
    pub mean: f64,
    pub count: usize,
}

#[derive(Clone)]
pub struct SpectralTorus {
    side: f64,
    n: usize,
    /// `(2π/L)² (j² + m²)` per mode, row-major.
    eigenvalues: Vec<f64>,
    /// Signed wavenumber `2πk/L` per index, Nyquist set to zero.
    derivative_wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralTorus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralTorus")
            .field("side", &self.side)
            .field("n", &self.n)
            .finish()
    }
}

fn signed_index(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

impl SpectralTorus {
    pub const DEFAULT_GRID: usize = 128;

    pub fn new(side: f64, n: usize) -> Result<Self> {
        if !side.is_finite() || side <= 0.0 {
            return Err(Error::InvalidArgument(format!("side length {side}")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "grid size {n} must be a power of two >= 16"
            )));
        }
        let scale = 2.0 * PI / side;
        let wavenumbers: Vec<f64> = (0..n).map(|k| signed_index(k, n) as f64).collect();
        let mut eigenvalues = Vec::with_capacity(n * n);
        for kj in &wavenumbers {
            for km in &wavenumbers {
                eigenvalues.push(scale * scale * (kj * kj + km * km));
            }
        }
        let derivative_wavenumbers = (0..n)
            .map(|k| if k == n / 2 { 0.0 } else { scale * wavenumbers[k] })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(SpectralTorus {
            side,
            n,
            eigenvalues,
            derivative_wavenumbers,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.side / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// `|Ω| = L²`.
    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn coordinates(&self, (i, j): GridPoint) -> (f64, f64) {
        let h = self.spacing();
        (i as f64 * h, j as f64 * h)
    }

    pub fn center(&self) -> GridPoint {
        (self.n / 2, self.n / 2)
    }

    pub fn zeros(&self) -> Field {
        Field::zeros(self.n)
    }

    /// Samples `f(x₁, x₂)` on the grid.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Field {
        let h = self.spacing();
        let mut values = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                values.push(f(i as f64 * h, j as f64 * h));
            }
        }
        Field {
            n: self.n,
            values,
            zero_mean: false,
        }
    }

    /// Samples a function of the minimum-image distance to `center`.
    pub fn sample_radial(&self, center: GridPoint, f: impl Fn(f64) -> f64) -> Field {
        let mut values = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                values.push(f(self.distance(center, (i, j))));
            }
        }
        Field {
            n: self.n,
            values,
            zero_mean: false,
        }
    }

    /// Minimum-image distance between grid points.
    pub fn distance(&self, a: GridPoint, b: GridPoint) -> f64 {
        self.spacing() * (self.distance_sq_cells(a, b) as f64).sqrt()
    }

    fn distance_sq_cells(&self, a: GridPoint, b: GridPoint) -> usize {
        let wrap = |x: usize, y: usize| {
            let d = x.abs_diff(y);
            d.min(self.n - d)
        };
        let di = wrap(a.0, b.0);
        let dj = wrap(a.1, b.1);
        di * di + dj * dj
    }

    fn check(&self, f: &Field) -> Result<()> {
        if f.n != self.n {
            return Err(Error::ShapeMismatch {
                expected: self.n,
                got: f.values.len(),
            });
        }
        Ok(())
    }

    /// `∫_Ω f dx` by the rectangle rule.
    pub fn integrate(&self, f: &Field) -> Result<f64> {
        self.check(f)?;
        Ok(self.cell_area() * f.values.iter().sum::<f64>())
    }

    pub fn mean(&self, f: &Field) -> Result<f64> {
        self.check(f)?;
        Ok(f.raw_mean())
    }

    /// Unnormalized forward 2-D DFT.
    pub fn forward(&self, f: &Field) -> Result<Vec<Complex64>> {
        self.check(f)?;
        let mut data: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, &self.forward);
        Ok(data)
    }

    /// Inverse 2-D DFT with `1/n²` normalization; keeps the real part.
    pub fn inverse(&self, mut spectrum: Vec<Complex64>) -> Field {
        self.transform(&mut spectrum, &self.inverse);
        let norm = 1.0 / (self.n * self.n) as f64;
        Field {
            n: self.n,
            values: spectrum.iter().map(|c| c.re * norm).collect(),
            zero_mean: false,
        }
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        plan.process(data);
        transpose(data, self.n);
        plan.process(data);
        transpose(data, self.n);
    }

    /// Spectral `Δf`; the constant mode maps to zero.
    pub fn laplacian(&self, f: &Field) -> Result<Field> {
        let mut spectrum = self.forward(f)?;
        for (c, &eig) in spectrum.iter_mut().zip(&self.eigenvalues) {
            *c *= -eig;
        }
        Ok(self.project_zero_mean(&self.inverse(spectrum)))
    }

    /// Zero-mean `u` with `-Δu = rhs`.
    pub fn solve_poisson_zero_mean(&self, rhs: &Field) -> Result<Field> {
        self.check(rhs)?;
        let mean = rhs.raw_mean();
        if !rhs.zero_mean && mean.abs() > POISSON_MEAN_TOLERANCE * rhs.sup_norm().max(1.0) {
            return Err(Error::NonZeroMean(mean));
        }
        let mut spectrum = self.forward(rhs)?;
        spectrum[0] = Complex64::new(0.0, 0.0);
        for (c, &eig) in spectrum.iter_mut().zip(&self.eigenvalues).skip(1) {
            *c /= eig;
        }
        Ok(self.project_zero_mean(&self.inverse(spectrum)))
    }

    /// `½ ∫ |∇f|²` by Parseval.
    pub fn dirichlet_energy(&self, f: &Field) -> Result<f64> {
        let spectrum = self.forward(f)?;
        Ok(self.dirichlet_energy_of_spectrum(&spectrum))
    }

    pub(crate) fn dirichlet_energy_of_spectrum(&self, spectrum: &[Complex64]) -> f64 {
        let sum: f64 = spectrum
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, eig)| eig * c.norm_sqr())
            .sum();
        0.5 * self.cell_area() * sum / (self.n * self.n) as f64
    }

    /// `⟨f, -Δg⟩_{L²}` by Parseval.
    pub(crate) fn energy_pairing(&self, f_hat: &[Complex64], g_hat: &[Complex64]) -> f64 {
        let sum: f64 = f_hat
            .iter()
            .zip(g_hat)
            .zip(&self.eigenvalues)
            .map(|((a, b), eig)| eig * (a.re * b.re + a.im * b.im))
            .sum();
        self.cell_area() * sum / (self.n * self.n) as f64
    }

    /// `(∂₁f, ∂₂f)` with the Nyquist mode dropped.
    pub fn spectral_gradient(&self, f: &Field) -> Result<(Field, Field)> {
        let spectrum = self.forward(f)?;
        let n = self.n;
        let mut d1 = spectrum.clone();
        let mut d2 = spectrum;
        for a in 0..n {
            for b in 0..n {
                let k = a * n + b;
                d1[k] *= Complex64::new(0.0, self.derivative_wavenumbers[a]);
                d2[k] *= Complex64::new(0.0, self.derivative_wavenumbers[b]);
            }
        }
        Ok((self.inverse(d1), self.inverse(d2)))
    }

    /// Subtracts the mean and sets the certificate.
    pub fn project_zero_mean(&self, f: &Field) -> Field {
        let mean = f.raw_mean();
        Field {
            n: f.n,
            values: f.values.iter().map(|v| v - mean).collect(),
            zero_mean: true,
        }
    }

    /// Averages `f` over `n_bins` equal-width annuli around `center` out to
    /// `L/2`. Empty bins are omitted.
    pub fn radial_average(&self, f: &Field, center: GridPoint, n_bins: usize) -> Result<Vec<RadialBin>> {
        self.check(f)?;
        if n_bins < 2 {
            return Err(Error::InvalidArgument(format!("n_bins = {n_bins} < 2")));
        }
        let r_max = 0.5 * self.side;
        let width = r_max / n_bins as f64;
        let mut sums = vec![(0.0, 0.0, 0usize); n_bins];
        for i in 0..self.n {
            for j in 0..self.n {
                let r = self.distance(center, (i, j));
                if r > r_max {
                    continue;
                }
                let bin = ((r / width) as usize).min(n_bins - 1);
                let slot = &mut sums[bin];
                slot.0 += r;
                slot.1 += f.get((i, j));
                slot.2 += 1;
            }
        }
        Ok(sums
            .into_iter()
            .filter(|s| s.2 > 0)
            .map(|(r, v, count)| RadialBin {
                r: r / count as f64,
                mean: v / count as f64,
                count,
            })
            .collect())
    }

    /// Groups grid points by exact minimum-image distance to `center` up to
    /// `r_max`; a radial function is reproduced without binning error.
    pub fn radial_shells(&self, f: &Field, center: GridPoint, r_max: f64) -> Result<Vec<RadialBin>> {
        self.check(f)?;
        let h = self.spacing();
        let max_sq = self.n * self.n / 2;
        let mut sums = vec![(0.0, 0usize); max_sq + 1];
        for i in 0..self.n {
            for j in 0..self.n {
                let sq = self.distance_sq_cells(center, (i, j));
                sums[sq].0 += f.get((i, j));
                sums[sq].1 += 1;
            }
        }
        Ok(sums
            .into_iter()
            .enumerate()
            .filter(|(_, s)| s.1 > 0)
            .map(|(sq, (v, count))| RadialBin {
                r: h * (sq as f64).sqrt(),
                mean: v / count as f64,
                count,
            })
            .take_while(|bin| bin.r <= r_max)
            .collect())
    }
}
