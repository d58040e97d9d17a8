//! Threshold maximizers of `∫ φ₀ ψ dP` at several mass levels.

use vortex_mf::measure::{phi0, threshold_maximizer, threshold_objective};
use vortex_mf::CirculationMeasure;

fn main() -> vortex_mf::Result<()> {
    let p = CirculationMeasure::new_atomic(&[(0.2, 0.3), (0.5, 0.3), (1.0, 0.4)])?;
    println!("phi0 = {:?}", phi0(&p)?);
    for d in [0.2, 0.4, 0.5, 0.75, 1.0] {
        let sol = threshold_maximizer(&p, d)?;
        println!(
            "d = {d:<4}  s_d = {:.4}  c_d = {:.4}  psi = {:?}  objective = {:.6}",
            sol.s_d,
            sol.c_d,
            sol.psi,
            threshold_objective(&p, &sol.psi)?
        );
    }
    Ok(())
}
