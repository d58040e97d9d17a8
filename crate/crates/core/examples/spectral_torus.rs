//! Spectral operators on the flat torus: Laplacian, Poisson inversion,
//! Dirichlet energy and radial averaging.

use std::f64::consts::PI;

use vortex_mf::SpectralTorus;

fn main() -> vortex_mf::Result<()> {
    let torus = SpectralTorus::new(2.0, 128)?;
    let k = 2.0 * PI / torus.side();
    let f = torus.sample(|x, y| (k * x).cos() + 0.5 * (2.0 * k * y).sin());

    let lap = torus.laplacian(&f)?;
    let back = torus.solve_poisson_zero_mean(&lap.scaled(-1.0))?;
    println!("Poisson round trip, max error {:.2e}", back.max_abs_diff(&f)?);

    // ½∫|∇f|² = ½ (k² + 4k²/4) |Ω|/2
    let expected = 0.5 * (k * k + k * k) * torus.area() / 2.0;
    println!("Dirichlet energy {:.12} (closed form {:.12})", torus.dirichlet_energy(&f)?, expected);

    let bump = torus.sample_radial(torus.center(), |r| (-(r / 0.2).powi(2)).exp());
    for bin in torus.radial_average(&bump, torus.center(), 8)? {
        println!("r = {:.3}  mean = {:.6}  ({} points)", bin.r, bin.mean, bin.count);
    }
    Ok(())
}
