// Closed-form mean, variance and Fourier weight split of clique counts.

use clique_llt::clique::{fourier_coeff_fr, moments, CliqueSpec};

pub fn run_example() -> clique_llt::Result<()> {
    println!("{:>5} {:>2} {:>5} {:>14} {:>14} {:>8} {:>8}", "n", "r", "p", "mean", "variance", "W^1", "W^>1");
    for (n, r, p) in [(4, 3, 0.5), (10, 3, 0.5), (30, 3, 0.5), (100, 3, 0.5), (40, 4, 0.3), (1000, 3, 0.05)] {
        let spec = CliqueSpec::with_default_tau(n, r, p)?;
        let m = moments(&spec)?;
        println!(
            "{n:>5} {r:>2} {p:>5} {:>14.4} {:>14.4} {:>8.5} {:>8.5}",
            m.mu, m.sigma2, m.weight_deg1, m.weight_tail
        );
    }

    // Coefficients depend only on the shape of the edge set.
    let spec = CliqueSpec::with_default_tau(6, 3, 0.5)?;
    let g = spec.ground();
    let single = g.clique_edges(&[0, 1]);
    let path = g.clique_edges(&[0, 1]).union(&g.clique_edges(&[1, 2]));
    let triangle = g.clique_edges(&[0, 1, 2]);
    for (name, set) in [("edge", single), ("path", path), ("triangle", triangle)] {
        println!("coefficient of f_3 on the {name}: {:.6}", fourier_coeff_fr(&spec, &set));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> clique_llt::Result<()> {
    run_example()
}
