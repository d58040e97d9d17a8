//! Run configuration: a `key = value` text file plus command-line overrides.
//!
//! ```text
//! # delta at 1 on the unit torus
//! atoms = 1.0:1.0
//! L = 1
//! n = 128
//! fractions = 0.3, 0.6, 0.9
//! seed = 7
//! ```
//!
//! Recognized keys: `measure` (path), `atoms` (`alpha:weight` list), `L`,
//! `n`, `lambda`, `lambdas`, `fractions`, `max_iters`, `grad_tol`,
//! `step_init`, `armijo_c`, `blowup_threshold`, `seed`, `out`, `field`,
//! `alpha`, `li_window`.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io;
use crate::measure::{lambda_bar, CirculationMeasure};
use crate::minimizer::MinimizeOptions;
use crate::torus::SpectralTorus;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MeasureSource {
    File(PathBuf),
    Atoms(Vec<(f64, f64)>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Schedule {
    Absolute(Vec<f64>),
    /// Fractions of `λ̄(P)`, each in `(0, 1]`.
    Fractions(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub measure: Option<MeasureSource>,
    pub side: f64,
    pub grid_n: usize,
    pub schedule: Option<Schedule>,
    pub options: MinimizeOptions,
    /// Output directory; commands that only report fall back to stdout.
    pub out_dir: Option<PathBuf>,
    /// Field CSV analyzed by `profile`.
    pub field: Option<PathBuf>,
    pub alpha: f64,
    /// Log-slope window in units of `σ`; defaults to the torus window.
    pub li_window: Option<(f64, f64)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            measure: None,
            side: 1.0,
            grid_n: SpectralTorus::DEFAULT_GRID,
            schedule: None,
            options: MinimizeOptions::default(),
            out_dir: None,
            field: None,
            alpha: 1.0,
            li_window: None,
        }
    }
}

fn parse_list(value: &str) -> Result<Vec<f64>> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Error::Config(format!("not a number: {s:?}"))))
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

impl RunConfig {
    /// Reads `path` on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut config = RunConfig::default();
        config.apply_text(&std::fs::read_to_string(path)?, path)?;
        Ok(config)
    }

    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("expected key = value, got {line:?}"),
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// Applies one `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got {assignment:?}")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "measure" => self.measure = Some(MeasureSource::File(PathBuf::from(value))),
            "atoms" => {
                let mut pairs = Vec::new();
                for item in value.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
                    let (a, w) = item
                        .split_once(':')
                        .ok_or_else(|| Error::Config(format!("atom {item:?} is not alpha:weight")))?;
                    pairs.push((parse_num::<f64>(key, a)?, parse_num::<f64>(key, w)?));
                }
                self.measure = Some(MeasureSource::Atoms(pairs));
            }
            "L" => self.side = parse_num(key, value)?,
            "n" => self.grid_n = parse_num(key, value)?,
            "lambda" => self.schedule = Some(Schedule::Absolute(vec![parse_num(key, value)?])),
            "lambdas" => self.schedule = Some(Schedule::Absolute(parse_list(value)?)),
            "fractions" => self.schedule = Some(Schedule::Fractions(parse_list(value)?)),
            "max_iters" => self.options.max_iters = parse_num(key, value)?,
            "grad_tol" => self.options.grad_tol = parse_num(key, value)?,
            "step_init" => self.options.step_init = parse_num(key, value)?,
            "armijo_c" => self.options.armijo_c = parse_num(key, value)?,
            "blowup_threshold" => self.options.blowup_peak_threshold = parse_num(key, value)?,
            "seed" => self.options.seed = parse_num(key, value)?,
            "out" => self.out_dir = Some(PathBuf::from(value)),
            "field" => self.field = Some(PathBuf::from(value)),
            "alpha" => self.alpha = parse_num(key, value)?,
            "li_window" => {
                let w = parse_list(value)?;
                if w.len() != 2 {
                    return Err(Error::Config("li_window needs two numbers".into()));
                }
                self.li_window = Some((w[0], w[1]));
            }
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.grid_n.is_power_of_two() || self.grid_n < 16 {
            return Err(Error::Config(format!("n = {} must be a power of two >= 16", self.grid_n)));
        }
        if !(self.side > 0.0 && self.side.is_finite()) {
            return Err(Error::Config(format!("L = {} must be positive", self.side)));
        }
        if let Some(Schedule::Fractions(f)) = &self.schedule {
            if let Some(bad) = f.iter().find(|&&x| !(x > 0.0 && x <= 1.0)) {
                return Err(Error::ScheduleRefused(format!("fraction {bad} not in (0, 1]")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha = {} not in (0, 1]", self.alpha)));
        }
        self.options.validate()
    }

    pub fn load_measure(&self) -> Result<CirculationMeasure> {
        match &self.measure {
            Some(MeasureSource::File(path)) => io::read_measure(path),
            Some(MeasureSource::Atoms(pairs)) => CirculationMeasure::new_atomic(pairs),
            None => Err(Error::Config("no measure given (use --measure or atoms=)".into())),
        }
    }

    pub fn torus(&self) -> Result<SpectralTorus> {
        SpectralTorus::new(self.side, self.grid_n)
    }

    /// Absolute `λ` values for the configured schedule.
    pub fn lambdas(&self, measure: &CirculationMeasure) -> Result<Vec<f64>> {
        match &self.schedule {
            Some(Schedule::Absolute(l)) => Ok(l.clone()),
            Some(Schedule::Fractions(f)) => {
                let bar = lambda_bar(measure).lambda_bar;
                if !bar.is_finite() {
                    return Err(Error::ScheduleRefused("extremal value is infinite".into()));
                }
                Ok(f.iter().map(|x| x * bar).collect())
            }
            None => Err(Error::Config("no lambda schedule (use lambda=, lambdas= or fractions=)".into())),
        }
    }
}
