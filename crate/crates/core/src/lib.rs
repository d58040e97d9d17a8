//! Variational toolkit for the point-vortex mean field equation
//!
//! ```text
//! -Δv = λ ∫ α (e^{αv} / ∫ e^{αv} - 1/|Ω|) P(dα),   ∫ v = 0
//! ```
//!
//! on a flat periodic square, where `P` is a probability measure of vortex
//! circulations on `[-1, 1]`. The crate is organized in layers:
//!
//! - [`measure`]: circulation measures, the extremal Trudinger–Moser
//!   parameter `λ̄` (exhaustive and tail-scan routes) and threshold maximizers.
//! - [`torus`]: the spectral torus, grid fields, Poisson inversion, Dirichlet
//!   energy and radial averaging.
//! - [`functional`]: the energy `J_λ`, its L² gradient, normalized fields
//!   `w_α`, the dual energy representation and α-monotonicity quantities.
//! - [`minimizer`]: Barzilai–Borwein / Armijo descent on the zero-mean space,
//!   continuation sweeps in `λ`, and concentration detection.
//! - [`blowup`]: Liouville bubbles, rescaled profiles, log-slope fits,
//!   concentration mass, Pohozaev balance and Newton potentials.
//! - [`verify`]: the oracle suite shared by the CLI and the tests.
//! - [`cli`]: batch configuration and the subcommands behind the `vortex-mf`
//!   binary.
//!
//! Runnable examples for every capability live in `examples/`.

pub mod blowup;
pub mod cli;
pub mod config;
pub mod error;
pub mod functional;
pub mod io;
pub mod measure;
pub mod minimizer;
pub mod quadrature;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};
pub use functional::Problem;
pub use measure::{CirculationMeasure, ExtremalResult, Side, ThresholdSolution};
pub use minimizer::{MinimizeOptions, MinimizeResult};
pub use torus::{Field, GridPoint, SpectralTorus};
