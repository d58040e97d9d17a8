//! Builds a run configuration the way the `vortex-mf` binary does and runs
//! the `lambda-bar` command in process.

use std::path::Path;

use vortex_mf::cli::cmd_lambda_bar;
use vortex_mf::config::RunConfig;

fn main() -> vortex_mf::Result<()> {
    let mut config = RunConfig::default();
    config.apply_text("atoms = 0.5:0.5 1.0:0.5\nn = 64\nfractions = 0.5, 0.9\n", Path::new("inline"))?;
    config.apply_override("seed=3")?;
    config.validate()?;
    let measure = config.load_measure()?;
    println!("schedule: {:?}", config.lambdas(&measure)?);
    print!("{}", cmd_lambda_bar(&config)?.json);
    Ok(())
}
