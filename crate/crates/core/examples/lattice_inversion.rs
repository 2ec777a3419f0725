// Recovers point masses from a characteristic function by quadrature.

use clique_llt::clique::{exact_distribution, CliqueSpec};
use clique_llt::dist::{chf_exact_from_distribution, lattice_inversion_report, LatticeSpec};

pub fn run_example() -> clique_llt::Result<()> {
    let law = exact_distribution(&CliqueSpec::with_default_tau(4, 3, 0.4)?)?;
    let chf = |t: f64| chf_exact_from_distribution(&law, t);
    for k in 0..=5 {
        let x = k as f64;
        let report = lattice_inversion_report(chf, LatticeSpec::integers(), x)?;
        let want = law.mass_at(x)?;
        println!(
            "P(f = {k}): inverted {:.10}, exact {want:.10} ({} intervals)",
            report.probability, report.intervals
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> clique_llt::Result<()> {
    run_example()
}
