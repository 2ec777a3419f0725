// Sampled characteristic function of the normalized triangle count.

use clique_llt::clique::{moments, CliqueSpec};
use clique_llt::mc::{kappa_chf, sample_clique_counts, MCConfig};

pub fn run_example() -> clique_llt::Result<()> {
    let spec = CliqueSpec::with_default_tau(20, 3, 0.5)?;
    let m = moments(&spec)?;
    let mc = MCConfig::new(7, 20_000, 4)?;
    let counts = sample_clique_counts(&spec, &mc)?;
    println!("n = 20: mean {:.2}, sigma {:.3}, {} samples", m.mu, m.sigma, mc.samples);
    println!("{:>6} {:>9} {:>9} {:>8}", "t", "|phi|", "gauss", "stderr");
    for t in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0] {
        let e = kappa_chf(&counts, m.mu, m.sigma, t)?;
        println!("{t:>6.2} {:>9.5} {:>9.5} {:>8.5}", e.value.norm(), (-t * t / 2.0f64).exp(), e.stderr);
    }
    // Same seed and worker count, same histogram.
    assert_eq!(counts, sample_clique_counts(&spec, &mc)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> clique_llt::Result<()> {
    run_example()
}
