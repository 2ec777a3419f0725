// Exact triangle-count laws against the discrete Gaussian.

use clique_llt::clique::{exact_distribution, moments, CliqueSpec};
use clique_llt::experiment::gaussian_distances;

pub fn run_example() -> clique_llt::Result<()> {
    let spec = CliqueSpec::with_default_tau(5, 3, 0.5)?;
    let law = exact_distribution(&spec)?;
    println!("law of the triangle count in G(5, 1/2):");
    for (k, mass) in law.points() {
        println!("  P(f = {k}) = {mass:.6}");
    }

    println!("{:>3} {:>10} {:>10} {:>12}", "n", "sigma", "l1", "sigma*linf");
    for n in [4, 5, 6] {
        let spec = CliqueSpec::with_default_tau(n, 3, 0.5)?;
        let m = moments(&spec)?;
        let (linf, l1) = gaussian_distances(&exact_distribution(&spec)?, m.mu, m.sigma)?;
        println!("{n:>3} {:>10.5} {l1:>10.5} {:>12.5}", m.sigma, m.sigma * linf);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> clique_llt::Result<()> {
    run_example()
}
