//! Circulation measures and the extremal parameter.
//!
//! A [`CirculationMeasure`] is an atomic probability measure on `[-1, 1]`.
//! The extremal parameter is
//!
//! ```text
//! λ̄ = inf { 8π P(K) / (∫_K α dP)² : K ⊂ I± ∩ supp P }
//! ```
//!
//! with `I+ = [0, 1]` and `I- = [-1, 0]`. [`lambda_bar_bruteforce`] enumerates
//! every subset of each side; [`lambda_bar`] scans only tail sets (atoms
//! ranked by `|α|`, largest first). Both routes accumulate sums in the same
//! rank order so that a shared witness produces bit-identical values.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Weight-sum slack accepted by [`CirculationMeasure::new_atomic`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;
/// Two circulations closer than this are merged into one atom.
pub const MERGE_TOLERANCE: f64 = 1e-12;
/// Largest per-side atom count accepted by the exhaustive enumeration.
pub const MAX_BRUTEFORCE_ATOMS: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub alpha: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CirculationMeasure {
    atoms: Vec<Atom>,
}

/// Which part of `[-1, 1]` a moment is taken over. Zero belongs to both halves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentSide {
    All,
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalResult {
    /// `+∞` when every candidate subset has zero circulation integral.
    pub lambda_bar: f64,
    /// Indices into [`CirculationMeasure::atoms`], ascending.
    pub subset: Vec<usize>,
    pub side: Option<Side>,
}

impl ExtremalResult {
    fn unbounded() -> Self {
        ExtremalResult {
            lambda_bar: f64::INFINITY,
            subset: Vec::new(),
            side: None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lambda_bar.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdSolution {
    pub s_d: f64,
    pub c_d: f64,
    /// One value in `[0, 1]` per atom, same order as the atoms.
    pub psi: Vec<f64>,
}

impl CirculationMeasure {
    /// Builds a measure from `(alpha, weight)` pairs.
    ///
    /// Weights must already sum to one up to [`WEIGHT_SUM_TOLERANCE`]; they
    /// are then rescaled exactly. Atoms are sorted and coincident circulations
    /// merged.
    pub fn new_atomic(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        for &(alpha, weight) in pairs {
            if !alpha.is_finite() || !(-1.0..=1.0).contains(&alpha) {
                return Err(Error::InvalidMeasure(format!(
                    "circulation {alpha} outside [-1, 1]"
                )));
            }
            if !weight.is_finite() || weight <= 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "weight {weight} is not positive"
                )));
            }
        }
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self::normalized(pairs))
    }

    /// Sorts, merges and rescales; callers have validated the inputs.
    fn normalized(pairs: &[(f64, f64)]) -> Self {
        let mut sorted = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<Atom> = Vec::with_capacity(sorted.len());
        for (alpha, weight) in sorted {
            match atoms.last_mut() {
                Some(last) if (alpha - last.alpha).abs() <= MERGE_TOLERANCE => {
                    last.weight += weight
                }
                _ => atoms.push(Atom { alpha, weight }),
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        for atom in &mut atoms {
            atom.weight /= total;
        }
        CirculationMeasure { atoms }
    }

    /// Dirac mass at `alpha`.
    pub fn dirac(alpha: f64) -> Result<Self> {
        Self::new_atomic(&[(alpha, 1.0)])
    }

    /// Midpoint quadrature of a density on `[lo, hi] ⊂ [-1, 1]`.
    ///
    /// Cells where the density vanishes are dropped.
    pub fn discretize_density<F>(density: F, interval: (f64, f64), n_cells: usize) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        let (lo, hi) = interval;
        if !(-1.0..=1.0).contains(&lo) || !(-1.0..=1.0).contains(&hi) || lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "interval [{lo}, {hi}] is not a nonempty subinterval of [-1, 1]"
            )));
        }
        if n_cells == 0 {
            return Err(Error::InvalidArgument("n_cells must be at least 1".into()));
        }
        let width = (hi - lo) / n_cells as f64;
        let mut pairs = Vec::with_capacity(n_cells);
        for k in 0..n_cells {
            let mid = lo + (k as f64 + 0.5) * width;
            let rho = density(mid);
            if !rho.is_finite() || rho < 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "density is {rho} at {mid}"
                )));
            }
            if rho > 0.0 {
                pairs.push((mid, rho * width));
            }
        }
        if pairs.is_empty() {
            return Err(Error::InvalidMeasure("density integrates to zero".into()));
        }
        Ok(Self::normalized(&pairs))
    }

    /// `t·a + (1 - t)·b` for `t ∈ [0, 1]`.
    pub fn mixture(a: &Self, b: &Self, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("mixture weight {t}")));
        }
        let pairs: Vec<(f64, f64)> = a
            .atoms
            .iter()
            .map(|x| (x.alpha, t * x.weight))
            .chain(b.atoms.iter().map(|x| (x.alpha, (1.0 - t) * x.weight)))
            .filter(|p| p.1 > 0.0)
            .collect();
        Ok(Self::normalized(&pairs))
    }

    /// Replaces every circulation `α` by `c·α`.
    pub fn scale_circulations(&self, c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 || c > 1.0 {
            return Err(Error::InvalidArgument(format!("scale {c} not in (0, 1]")));
        }
        let pairs: Vec<(f64, f64)> = self.atoms.iter().map(|a| (c * a.alpha, a.weight)).collect();
        Ok(Self::normalized(&pairs))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn has_negative_atoms(&self) -> bool {
        self.atoms.iter().any(|a| a.alpha < 0.0)
    }

    /// `Σ α_i^k b_i` over the requested side.
    pub fn moment(&self, k: u32, side: MomentSide) -> f64 {
        self.atoms
            .iter()
            .filter(|a| match side {
                MomentSide::All => true,
                MomentSide::Positive => a.alpha >= 0.0,
                MomentSide::Negative => a.alpha <= 0.0,
            })
            .map(|a| a.alpha.powi(k as i32) * a.weight)
            .sum()
    }

    /// Smallest circulation in `supp P ∩ [0, 1]`.
    pub fn alpha_min(&self) -> Result<f64> {
        self.atoms
            .iter()
            .map(|a| a.alpha)
            .find(|&alpha| alpha >= 0.0)
            .ok_or(Error::NoPositiveAtoms)
    }

    /// Atom indices of one side ranked by `|α|`, largest first.
    fn ranked(&self, side: Side) -> Vec<usize> {
        match side {
            Side::Positive => (0..self.atoms.len())
                .rev()
                .filter(|&i| self.atoms[i].alpha >= 0.0)
                .collect(),
            Side::Negative => (0..self.atoms.len())
                .filter(|&i| self.atoms[i].alpha <= 0.0)
                .collect(),
        }
    }
}

fn subset_ratio(mass: f64, integral: f64) -> Option<f64> {
    if integral == 0.0 {
        None
    } else {
        Some(8.0 * PI * mass / (integral * integral))
    }
}

/// Candidate ordering: ratio, then side, then cardinality, then mask.
type Key = (f64, Side, u32, u64);

fn better(candidate: &Key, best: &Option<(Key, Vec<usize>)>) -> bool {
    match best {
        None => true,
        Some((b, _)) => {
            candidate
                .0
                .total_cmp(&b.0)
                .then(candidate.1.cmp(&b.1))
                .then(candidate.2.cmp(&b.2))
                .then(candidate.3.cmp(&b.3))
                .is_lt()
        }
    }
}

fn finish(best: Option<(Key, Vec<usize>)>) -> ExtremalResult {
    match best {
        None => ExtremalResult::unbounded(),
        Some((key, mut subset)) => {
            subset.sort_unstable();
            ExtremalResult {
                lambda_bar: key.0,
                subset,
                side: Some(key.1),
            }
        }
    }
}

/// Exhaustive `2^n` enumeration of both sides.
pub fn lambda_bar_bruteforce(p: &CirculationMeasure) -> Result<ExtremalResult> {
    let mut best: Option<(Key, Vec<usize>)> = None;
    for side in [Side::Positive, Side::Negative] {
        let ranked = p.ranked(side);
        if ranked.len() > MAX_BRUTEFORCE_ATOMS {
            return Err(Error::TooManyAtoms(ranked.len(), MAX_BRUTEFORCE_ATOMS));
        }
        for mask in 1u64..(1u64 << ranked.len()) {
            let mut mass = 0.0;
            let mut integral = 0.0;
            for (bit, &i) in ranked.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    let atom = p.atoms[i];
                    mass += atom.weight;
                    integral += atom.alpha * atom.weight;
                }
            }
            let Some(ratio) = subset_ratio(mass, integral) else {
                continue;
            };
            let key = (ratio, side, mask.count_ones(), mask);
            if better(&key, &best) {
                let members = ranked
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| mask >> bit & 1 == 1)
                    .map(|(_, &i)| i)
                    .collect();
                best = Some((key, members));
            }
        }
    }
    Ok(finish(best))
}

/// Tail-set scan, `O(n log n)` after sorting (the atoms are kept sorted).
pub fn lambda_bar(p: &CirculationMeasure) -> ExtremalResult {
    let mut best: Option<(Key, Vec<usize>)> = None;
    for side in [Side::Positive, Side::Negative] {
        let ranked = p.ranked(side);
        let mut mass = 0.0;
        let mut integral = 0.0;
        for (j, &i) in ranked.iter().enumerate() {
            let atom = p.atoms[i];
            mass += atom.weight;
            integral += atom.alpha * atom.weight;
            let Some(ratio) = subset_ratio(mass, integral) else {
                continue;
            };
            let count = j as u32 + 1;
            let mask = if count >= 64 { u64::MAX } else { (1u64 << count) - 1 };
            let key = (ratio, side, count, mask);
            if better(&key, &best) {
                best = Some((key, ranked[..=j].to_vec()));
            }
        }
    }
    finish(best)
}

/// `8π / (∫ α dP)²`, valid when the residual vanishes.
pub fn lambda_bar_residual_vanishing(p: &CirculationMeasure) -> Result<f64> {
    if p.has_negative_atoms() {
        return Err(Error::NegativeAtoms);
    }
    let m1 = p.moment(1, MomentSide::Positive);
    if m1 == 0.0 {
        return Err(Error::InvalidMeasure("first moment vanishes".into()));
    }
    Ok(8.0 * PI / (m1 * m1))
}

/// `φ₀(β) = β / ∫ α dP` evaluated at every atom.
pub fn phi0(p: &CirculationMeasure) -> Result<Vec<f64>> {
    if p.has_negative_atoms() {
        return Err(Error::NegativeAtoms);
    }
    let m1 = p.moment(1, MomentSide::Positive);
    if m1 == 0.0 {
        return Err(Error::InvalidMeasure("first moment vanishes".into()));
    }
    Ok(p.atoms.iter().map(|a| a.alpha / m1).collect())
}

/// `Σ φ₀(α_i) ψ_i b_i`.
pub fn threshold_objective(p: &CirculationMeasure, psi: &[f64]) -> Result<f64> {
    let phi = phi0(p)?;
    Ok(phi
        .iter()
        .zip(psi)
        .zip(p.atoms())
        .map(|((f, s), a)| f * s * a.weight)
        .sum())
}

/// Maximizer of `∫ φ₀ ψ dP` over `0 ≤ ψ ≤ 1`, `∫ ψ dP = d`.
///
/// The maximizer is the indicator of `{φ₀ > s_d}` plus `c_d` on the level set
/// `{φ₀ = s_d}`.
pub fn threshold_maximizer(p: &CirculationMeasure, d: f64) -> Result<ThresholdSolution> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::InvalidArgument(format!("mass level {d} not in (0, 1]")));
    }
    let phi = phi0(p)?;
    let n = p.atoms.len();
    let mut psi = vec![0.0; n];
    // φ₀ is increasing in α, so the superlevel sets are tails of the atom list.
    let mut above = 0.0;
    for i in (0..n).rev() {
        let weight = p.atoms[i].weight;
        if i == 0 || above + weight > d + 1e-13 {
            let c_d = ((d - above) / weight).clamp(0.0, 1.0);
            psi[i] = c_d;
            return Ok(ThresholdSolution {
                s_d: phi[i],
                c_d,
                psi,
            });
        }
        psi[i] = 1.0;
        above += weight;
    }
    unreachable!("measure has at least one atom")
}
