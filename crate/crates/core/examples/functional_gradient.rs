//! Energy, gradient and dual energy of the mean field functional, with a
//! finite-difference check of the gradient.

use vortex_mf::functional::{energy, energy_dual, grad_energy, w_alpha};
use vortex_mf::minimizer::random_start;
use vortex_mf::{CirculationMeasure, Problem, SpectralTorus};

fn main() -> vortex_mf::Result<()> {
    let torus = SpectralTorus::new(1.0, 64)?;
    let p = CirculationMeasure::new_atomic(&[(0.3, 0.5), (1.0, 0.5)])?;
    let prob = Problem::new(torus.clone(), p, 20.0)?;
    let v = random_start(&torus, 1, 1.0);
    let phi = random_start(&torus, 2, 1.0);

    let g = grad_energy(&prob, &v)?;
    let analytic = torus.cell_area() * g.values().iter().zip(phi.values()).map(|(a, b)| a * b).sum::<f64>();
    let h = 1e-4;
    let fd = (energy(&prob, &v.axpy(h, &phi)?)? - energy(&prob, &v.axpy(-h, &phi)?)?) / (2.0 * h);
    println!("J(v) = {:.10}", energy(&prob, &v)?);
    println!("directional derivative: gradient {analytic:.10}, central difference {fd:.10}");

    let w = w_alpha(&prob, &v, 0.3)?;
    println!("∫ e^(w_0.3) = {:.12}", torus.integrate(&w.map(f64::exp))?);

    let zero = torus.zeros();
    println!("at v = 0: J = {}, dual = {}", energy(&prob, &zero)?, energy_dual(&prob, &zero)?);
    Ok(())
}
