//! Continuation in λ toward the extremal value for a two-atom measure.
//!
//! ```bash
//! cargo run --release --example continuation_sweep
//! ```

use vortex_mf::measure::lambda_bar;
use vortex_mf::minimizer::{continuation_sweep, detect_concentration};
use vortex_mf::{CirculationMeasure, MinimizeOptions, SpectralTorus};

fn main() -> vortex_mf::Result<()> {
    let torus = SpectralTorus::new(1.0, 64)?;
    let p = CirculationMeasure::new_atomic(&[(0.6, 0.5), (1.0, 0.5)])?;
    let bar = lambda_bar(&p).lambda_bar;
    let schedule: Vec<f64> = [0.25, 0.5, 0.75, 0.95].iter().map(|f| f * bar).collect();
    let opts = MinimizeOptions {
        seed: 7,
        ..Default::default()
    };
    for r in continuation_sweep(&torus, &p, &schedule, &opts)? {
        println!(
            "lambda/lambda_bar = {:.2}  J = {:+.3e}  residual = {:.1e}  max v = {:.3e}  iterations = {:5}  concentration = {:?}",
            r.lambda / bar,
            r.energy,
            r.residual_norm,
            r.peak_value,
            r.iterations,
            detect_concentration(&r, &torus)
        );
    }
    Ok(())
}
