// Runs the experiment commands programmatically and renders their artifacts.

use clique_llt::clique::CliqueSpec;
use clique_llt::experiment::{cmd_exact_dist, cmd_llt_verify, cmd_moments, linspace, ExperimentConfig, OutputFormat};
use clique_llt::mc::MCConfig;

pub fn run_example() -> clique_llt::Result<()> {
    let mut cfg = ExperimentConfig::new(CliqueSpec::with_default_tau(5, 3, 0.5)?, MCConfig::new(1, 2000, 2)?);
    cfg.t_grid = linspace(0.0, 2.0, 5);
    cfg.sweep = vec![4, 5, 6];

    let moments = cmd_moments(&cfg)?;
    print!("{}", moments.render(&cfg)?);

    let law = cmd_exact_dist(&cfg)?;
    println!("exact law: {} rows, passed = {}", law.table.rows.len(), law.passed());

    cfg.format = OutputFormat::Json;
    let sweep = cmd_llt_verify(&cfg)?;
    println!("{}", sweep.render(&cfg)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> clique_llt::Result<()> {
    run_example()
}
