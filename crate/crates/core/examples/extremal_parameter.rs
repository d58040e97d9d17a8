//! Extremal parameter of a few circulation measures, by tail scan and by
//! exhaustive subset enumeration.
//!
//! ```bash
//! cargo run --example extremal_parameter
//! ```

use std::f64::consts::PI;

use vortex_mf::measure::{lambda_bar, lambda_bar_bruteforce};
use vortex_mf::CirculationMeasure;

fn main() -> vortex_mf::Result<()> {
    let measures = [
        ("delta at 1", CirculationMeasure::dirac(1.0)?),
        ("{0.5, 1} equal weights", CirculationMeasure::new_atomic(&[(0.5, 0.5), (1.0, 0.5)])?),
        ("{-1, 0.5} equal weights", CirculationMeasure::new_atomic(&[(-1.0, 0.5), (0.5, 0.5)])?),
        (
            "uniform on [0, 1], 16 cells",
            CirculationMeasure::discretize_density(|_| 1.0, (0.0, 1.0), 16)?,
        ),
    ];
    for (name, p) in &measures {
        let fast = lambda_bar(p);
        let exact = lambda_bar_bruteforce(p)?;
        println!(
            "{name:28} lambda_bar = {:.12} = {:.6} pi   subset {:?} on {:?} side (enumeration agrees: {})",
            fast.lambda_bar,
            fast.lambda_bar / PI,
            fast.subset,
            fast.side,
            fast == exact
        );
    }
    Ok(())
}
