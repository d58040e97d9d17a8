//! Liouville bubble checks: total mass, concentration mass, Pohozaev balance
//! and the Newton potential slope.

use std::f64::consts::PI;

use vortex_mf::blowup::{mass_gamma, newton_log_slope, pohozaev_residual, radial_mass, Bubble, Nonlinearity};

fn main() -> vortex_mf::Result<()> {
    let b = Bubble::new(1.0, 8.0 * PI);
    println!("∫ λe^w / 8π = {:.12}", radial_mass(|r| b.density(r), 1e6)? / (8.0 * PI));
    let gamma = mass_gamma(|r| b.density(r), 1e6)?;
    println!("γ̃ = {gamma:.12},  πγ̃² / 16π = {:.12}", PI * gamma * gamma / (16.0 * PI));

    let lam = b.lambda;
    let f = Nonlinearity {
        value: move |u: f64| lam * u.exp(),
        derivative: move |u: f64| lam * u.exp(),
    };
    for radius in [1.0, 10.0, 100.0, 1000.0] {
        let rep = pohozaev_residual(|r| b.value(r), |_| 1.0, &f, radius)?;
        println!(
            "R = {radius:6}  lhs = {:+.9}  rhs = {:+.9}  residual = {:.1e}  (lhs → -16π = {:.9})",
            rep.lhs,
            rep.rhs,
            rep.relative_residual,
            -16.0 * PI
        );
    }
    let slope = newton_log_slope(|r| 8.0 / (1.0 + r * r).powi(2), 1e2, 1e4, 9)?;
    println!("Newton potential slope over R ∈ [1e2, 1e4]: {slope:.6}");
    Ok(())
}
