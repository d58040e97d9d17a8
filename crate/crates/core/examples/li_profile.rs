//! Log-slope fits of a concentrated profile, analytically sampled and on a
//! torus grid.

use std::f64::consts::PI;

use vortex_mf::blowup::{bubble_profile, fit_li, rescale_profile, Bubble, FAR_FIELD_WINDOW};
use vortex_mf::{CirculationMeasure, MinimizeResult, Problem, SpectralTorus};

fn main() -> vortex_mf::Result<()> {
    let b = Bubble::with_peak(8.0 * PI, 20.0);
    for window in [(3.0, 30.0), FAR_FIELD_WINDOW] {
        for alpha in [1.0, 0.5] {
            let profile = bubble_profile(&b, alpha, (1.0, 1e5), 401)?;
            let fit = fit_li(&profile, window)?;
            println!("r/σ ∈ {window:?}, α = {alpha}: slope {:.4} (prediction {})", fit.slope, profile.predicted_slope());
        }
    }

    // A bubble sampled on a 256² grid; the fit window starts two cells out.
    let torus = SpectralTorus::new(1.0, 256)?;
    let sharp = Bubble::with_peak(8.0 * PI, 12.0);
    let field = torus.sample_radial(torus.center(), |r| sharp.value(r));
    let p = CirculationMeasure::dirac(1.0)?;
    let prob = Problem::new(torus.clone(), p.clone(), 8.0 * PI)?;
    let result = MinimizeResult::from_field(&prob, field, 25.0)?;
    let profile = rescale_profile(&result, &torus, &p, 1.0)?;
    match profile.fit {
        Some(fit) => println!(
            "torus profile: σ = {:.4}, {} shells, slope {:.4} over r/σ ∈ [{:.1}, {:.1}]",
            profile.sigma,
            profile.samples.len(),
            fit.slope,
            fit.window.0,
            fit.window.1
        ),
        None => println!("torus profile: too few shells in the default window"),
    }
    Ok(())
}
