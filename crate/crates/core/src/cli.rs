//! Batch front end behind the `vortex-mf` binary.
//!
//! Each subcommand reads a [`RunConfig`] (file, then `--set` overrides, then
//! dedicated flags), runs one computation and writes its results. Exit codes:
//! `0` success, `1` a computation or check failed, `2` usage, parse or
//! refused-input errors.
//!
//! | command      | files written to `--out`                                      |
//! |--------------|---------------------------------------------------------------|
//! | `lambda-bar` | `summary.json`                                                |
//! | `minimize`   | `summary.json`, `stage_0.csv`, `trace_0.csv`                  |
//! | `sweep`      | `summary.json`, `sweep.csv`, `stage_<k>.csv`, `trace_<k>.csv`, `profile_<k>.csv` |
//! | `profile`    | `summary.json`, `profile_0.csv`                               |
//! | `verify`     | `summary.json`                                                |

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::blowup::{consistency_report, fit_li, rescale_profile, BlowupProfile, ConsistencyReport};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::functional::Problem;
use crate::io::{self, fmt_f64};
use crate::measure::{lambda_bar, lambda_bar_residual_vanishing, MomentSide, Side};
use crate::minimizer::{continuation_sweep, detect_concentration, minimize, validate_schedule, MinimizeResult};
use crate::torus::{GridPoint, SpectralTorus};
use crate::verify::{self, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "vortex-mf", version, about = "Point-vortex mean field experiments on the flat torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// key=value configuration file
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Measure file with one `alpha weight` pair per line
    #[arg(long, global = true, value_name = "PATH")]
    pub measure: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Print the JSON summary to stdout
    #[arg(long, global = true)]
    pub json: bool,
    /// Override a configuration key, e.g. `--set n=64`
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extremal parameter of the measure
    LambdaBar,
    /// Minimize J at a single λ
    Minimize,
    /// Continuation in λ with warm starts
    Sweep,
    /// Radial profile and log-slope fit of a saved field
    Profile,
    /// Run the radial oracle suite
    Verify {
        /// Scale the bubble's radial parameter in the Pohozaev check
        #[arg(long, hide = true, value_name = "FACTOR")]
        mu_mismatch: Option<f64>,
    },
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if cli.common.json {
                print!("{}", outcome.json);
            } else {
                print!("{}", outcome.text);
            }
            if outcome.success {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Config(_)
        | Error::ScheduleRefused(_)
        | Error::InvalidMeasure(_)
        | Error::InvalidArgument(_)
        | Error::TooManyAtoms(..)
        | Error::NoPositiveAtoms
        | Error::NegativeAtoms
        | Error::Io(_) => 2,
        _ => 1,
    }
}

/// Result of a command: human text, JSON summary and overall status.
pub struct Outcome {
    pub text: String,
    pub json: String,
    pub success: bool,
}

pub fn load_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for o in &common.overrides {
        config.apply_override(o)?;
    }
    if let Some(m) = &common.measure {
        config.set("measure", &m.to_string_lossy())?;
    }
    if let Some(out) = &common.out {
        config.out_dir = Some(out.clone());
    }
    if let Some(seed) = common.seed {
        config.options.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let config = load_config(&cli.common)?;
    match &cli.command {
        Command::LambdaBar => cmd_lambda_bar(&config),
        Command::Minimize => cmd_minimize(&config),
        Command::Sweep => cmd_sweep(&config),
        Command::Profile => cmd_profile(&config),
        Command::Verify { mu_mismatch } => cmd_verify(&config, &VerifyOptions { mu_mismatch: *mu_mismatch }),
    }
}

fn out_dir(config: &RunConfig) -> PathBuf {
    config.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn finish<T: Serialize>(config: &RunConfig, summary: &T, text: String, success: bool) -> Result<Outcome> {
    let json = io::to_json(summary)?;
    if let Some(dir) = &config.out_dir {
        io::write_text(&dir.join("summary.json"), &json)?;
    }
    Ok(Outcome { text, json, success })
}

#[derive(Debug, Serialize)]
pub struct LambdaBarSummary {
    /// `null` when infinite.
    pub lambda_bar: f64,
    pub lambda_bar_is_finite: bool,
    pub subset: Vec<usize>,
    pub side: Option<Side>,
    pub alpha_min: Option<f64>,
    pub moment1: f64,
    /// `8π / (∫ α dP)²` on the positive side.
    pub residual_vanishing_form: Option<f64>,
    /// Present only for measures on `[0, 1]`.
    pub consistency_report: Option<ConsistencyReport>,
}

pub fn cmd_lambda_bar(config: &RunConfig) -> Result<Outcome> {
    let measure = config.load_measure()?;
    let extremal = lambda_bar(&measure);
    let summary = LambdaBarSummary {
        lambda_bar: extremal.lambda_bar,
        lambda_bar_is_finite: extremal.is_finite(),
        subset: extremal.subset.clone(),
        side: extremal.side,
        alpha_min: measure.alpha_min().ok(),
        moment1: measure.moment(1, MomentSide::Positive),
        residual_vanishing_form: lambda_bar_residual_vanishing(&measure).ok(),
        consistency_report: if measure.has_negative_atoms() {
            None
        } else {
            consistency_report(&measure).ok()
        },
    };
    let text = format!(
        "lambda_bar = {}\nsubset = {:?}\nside = {:?}\n",
        fmt_f64(extremal.lambda_bar),
        extremal.subset,
        extremal.side
    );
    finish(config, &summary, text, true)
}

#[derive(Debug, Serialize)]
pub struct StageSummary {
    pub stage: usize,
    pub lambda: f64,
    pub lambda_over_lambda_bar: f64,
    pub energy: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub blown_up: bool,
    pub max_v: f64,
    pub peak_point: GridPoint,
    pub concentration: Option<GridPoint>,
    pub li_slope: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub side: f64,
    pub grid_n: usize,
    pub lambda_bar: f64,
    pub stages: Vec<StageSummary>,
}

fn stage_summary(k: usize, result: &MinimizeResult, lambda_bar: f64, concentration: Option<GridPoint>, li_slope: Option<f64>) -> StageSummary {
    StageSummary {
        stage: k,
        lambda: result.lambda,
        lambda_over_lambda_bar: result.lambda / lambda_bar,
        energy: result.energy,
        residual_norm: result.residual_norm,
        iterations: result.iterations,
        converged: result.converged,
        blown_up: result.blown_up,
        max_v: result.peak_value,
        peak_point: result.peak_point,
        concentration,
        li_slope,
    }
}

fn write_stage(dir: &Path, k: usize, torus: &SpectralTorus, result: &MinimizeResult, seed: u64) -> Result<()> {
    io::write_text(&dir.join(format!("stage_{k}.csv")), &io::format_field(torus, &result.v))?;
    io::write_text(&dir.join(format!("trace_{k}.csv")), &io::format_trace(&result.trace, seed))
}

fn stage_line(s: &StageSummary) -> String {
    format!(
        "stage {}: lambda = {} J = {} residual = {} max_v = {} iterations = {}{}\n",
        s.stage,
        fmt_f64(s.lambda),
        fmt_f64(s.energy),
        fmt_f64(s.residual_norm),
        fmt_f64(s.max_v),
        s.iterations,
        if s.blown_up { " (blown up)" } else { "" }
    )
}

pub fn cmd_minimize(config: &RunConfig) -> Result<Outcome> {
    let measure = config.load_measure()?;
    let lambdas = config.lambdas(&measure)?;
    let &[lambda] = lambdas.as_slice() else {
        return Err(Error::Config("minimize takes a single lambda".into()));
    };
    validate_schedule(&measure, &[lambda])?;
    let torus = config.torus()?;
    let bar = lambda_bar(&measure).lambda_bar;
    let prob = Problem::new(torus.clone(), measure, lambda)?;
    let result = minimize(&prob, &config.options, None)?;
    let dir = out_dir(config);
    write_stage(&dir, 0, &torus, &result, config.options.seed)?;
    let stage = stage_summary(0, &result, bar, detect_concentration(&result, &torus), None);
    let text = stage_line(&stage);
    let success = result.converged || result.blown_up;
    let summary = RunSummary {
        seed: config.options.seed,
        side: config.side,
        grid_n: config.grid_n,
        lambda_bar: bar,
        stages: vec![stage],
    };
    let json = io::to_json(&summary)?;
    io::write_text(&dir.join("summary.json"), &json)?;
    Ok(Outcome { text, json, success })
}

pub fn format_sweep_rows(stages: &[StageSummary], seed: u64) -> String {
    let mut out = format!("# seed={seed}\nlambda,J,residual,max_v,blown_up,concentration_i,concentration_j\n");
    for s in stages {
        let (ci, cj) = s
            .concentration
            .map(|(i, j)| (i.to_string(), j.to_string()))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_f64(s.lambda),
            fmt_f64(s.energy),
            fmt_f64(s.residual_norm),
            fmt_f64(s.max_v),
            s.blown_up,
            ci,
            cj
        ));
    }
    out
}

pub fn cmd_sweep(config: &RunConfig) -> Result<Outcome> {
    let measure = config.load_measure()?;
    let lambdas = config.lambdas(&measure)?;
    let torus = config.torus()?;
    let bar = lambda_bar(&measure).lambda_bar;
    let results = continuation_sweep(&torus, &measure, &lambdas, &config.options)?;
    let dir = out_dir(config);
    let mut stages = Vec::with_capacity(results.len());
    for (k, result) in results.iter().enumerate() {
        write_stage(&dir, k, &torus, result, config.options.seed)?;
        let concentration = detect_concentration(result, &torus);
        let mut slope = None;
        if concentration.is_some() {
            let profile = rescale_profile(result, &torus, &measure, config.alpha)?;
            let profile = refit(profile, config.li_window);
            slope = profile.fit.map(|f| f.slope);
            io::write_text(&dir.join(format!("profile_{k}.csv")), &io::format_profile(&profile))?;
        }
        stages.push(stage_summary(k, result, bar, concentration, slope));
    }
    io::write_text(&dir.join("sweep.csv"), &format_sweep_rows(&stages, config.options.seed))?;
    let text: String = stages.iter().map(stage_line).collect();
    let success = results.iter().all(|r| r.converged || r.blown_up);
    let summary = RunSummary {
        seed: config.options.seed,
        side: config.side,
        grid_n: config.grid_n,
        lambda_bar: bar,
        stages,
    };
    let json = io::to_json(&summary)?;
    io::write_text(&dir.join("summary.json"), &json)?;
    Ok(Outcome { text, json, success })
}

fn refit(mut profile: BlowupProfile, window: Option<(f64, f64)>) -> BlowupProfile {
    if let Some(w) = window {
        profile.fit = fit_li(&profile, w).ok();
    }
    profile
}

#[derive(Debug, Serialize)]
pub struct ProfileSummary {
    pub alpha: f64,
    pub sigma: f64,
    pub peak_value: f64,
    pub peak_point: GridPoint,
    pub samples: usize,
    pub li_slope: Option<f64>,
    pub li_window: Option<(f64, f64)>,
    pub predicted_slope: f64,
}

pub fn cmd_profile(config: &RunConfig) -> Result<Outcome> {
    let path = config
        .field
        .as_ref()
        .ok_or_else(|| Error::Config("profile needs field=<stage csv>".into()))?;
    let (side, field) = io::read_field(path)?;
    let torus = SpectralTorus::new(side, field.n())?;
    let measure = config.load_measure()?;
    let lambda = config
        .lambdas(&measure)
        .ok()
        .and_then(|l| l.first().copied())
        .unwrap_or(1.0);
    let prob = Problem::new(torus.clone(), measure.clone(), lambda)?;
    let result = MinimizeResult::from_field(&prob, field, config.options.blowup_peak_threshold)?;
    let profile = refit(rescale_profile(&result, &torus, &measure, config.alpha)?, config.li_window);
    let dir = out_dir(config);
    io::write_text(&dir.join("profile_0.csv"), &io::format_profile(&profile))?;
    let summary = ProfileSummary {
        alpha: profile.alpha,
        sigma: profile.sigma,
        peak_value: profile.peak_value,
        peak_point: result.peak_point,
        samples: profile.samples.len(),
        li_slope: profile.fit.map(|f| f.slope),
        li_window: profile.fit.map(|f| f.window),
        predicted_slope: profile.predicted_slope(),
    };
    let text = match profile.fit {
        Some(f) => format!(
            "slope = {} over r/sigma in [{}, {}]\n",
            fmt_f64(f.slope),
            fmt_f64(f.window.0),
            fmt_f64(f.window.1)
        ),
        None => "no fit: too few samples in the window\n".to_string(),
    };
    let json = io::to_json(&summary)?;
    io::write_text(&dir.join("summary.json"), &json)?;
    Ok(Outcome { text, json, success: true })
}

pub fn cmd_verify(config: &RunConfig, opts: &VerifyOptions) -> Result<Outcome> {
    let report = verify::run(opts)?;
    let text: String = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {}: {} (expected {} ± {})\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                fmt_f64(c.value),
                fmt_f64(c.expected),
                fmt_f64(c.tolerance)
            )
        })
        .collect();
    finish(config, &report, text, report.passed)
}
