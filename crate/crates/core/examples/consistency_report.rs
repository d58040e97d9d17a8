//! Residual-vanishing conditions for measures on [0, 1].

use vortex_mf::blowup::consistency_report;
use vortex_mf::CirculationMeasure;

fn main() -> vortex_mf::Result<()> {
    let cases = [
        vec![(1.0, 1.0)],
        vec![(0.6, 0.5), (1.0, 0.5)],
        vec![(0.1, 0.9), (1.0, 0.1)],
        vec![(0.328, 0.5), (0.729, 0.5)],
    ];
    for atoms in cases {
        let r = consistency_report(&CirculationMeasure::new_atomic(&atoms)?)?;
        println!(
            "{atoms:?}\n  α_min > 1/2: {}  λ̄ = 8π/m1²: {}  α_min > m1/2: {}  (λ̄ = {:.6}, 8π/m1² = {:.6})",
            r.alpha_min_above_half, r.residual_form_matches, r.alpha_min_above_half_moment, r.lambda_bar, r.residual_vanishing_lambda
        );
    }
    Ok(())
}
