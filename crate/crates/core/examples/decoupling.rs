// Block partitions, the alternating operator, and the decoupling inequality.

use clique_llt::clique::{clique_function, kappa_function, CliqueSpec};
use clique_llt::decoupling::{
    alpha_restricted_coeffs, alpha_transform, build_clique_partition, build_color_partition, decoupling_check,
    rainbow_cliques, DoubledAssignment,
};
use clique_llt::mc::MCConfig;

pub fn run_example() -> clique_llt::Result<()> {
    let spec = CliqueSpec::with_default_tau(5, 3, 0.5)?;
    let f = clique_function(&spec)?;
    let part = build_color_partition(5, 1, &[3, 2])?;
    println!("partition {}", part.to_json()?);

    let alpha = alpha_transform(&f, &part)?;
    println!("alpha(f_3): {} terms on {} doubled slots, degree {}", alpha.num_terms(), alpha.vars(), alpha.degree());

    let mc = MCConfig::new(3, 4000, 4)?;
    for t in [0.0, 0.5, 1.0, 2.0] {
        let c = decoupling_check(&f, &part, t, &mc)?;
        println!("t = {t}: |phi|^2 = {:.5} <= {:.5} +- {:.5}", c.lhs, c.rhs, c.rhs_stderr);
    }

    // With k = r - 2 colors, fixing the copies leaves a linear function of X.
    let spec = CliqueSpec::with_default_tau(7, 4, 0.5)?;
    let kappa = kappa_function(&spec)?;
    let part = build_color_partition(7, 2, &[3, 2, 2])?;
    let mut rng = mc.stream(0);
    let z = DoubledAssignment::sample(&part, spec.p, &mut rng)?;
    let g = alpha_restricted_coeffs(&kappa, &part, &z)?;
    println!("restricted alpha(kappa_4) on n = 7: degree {}, {} terms", g.degree(), g.num_terms());

    let part = build_clique_partition(9, 3)?;
    println!("rainbow triangles for the clique partition of K_9: {:?}", rainbow_cliques(&part, 3));
    Ok(())
}

#[allow(dead_code)]
fn main() -> clique_llt::Result<()> {
    run_example()
}
