// Builds a small p-biased function, checks Parseval, and restricts it.

use clique_llt::edges::{Assignment, EdgeSet, PartialAssignment};
use clique_llt::pbf::{transform_dense, PBFunction};

pub fn run_example() -> clique_llt::Result<()> {
    let p = 0.3;
    // 2 + chi_0 - 0.5 chi_0 chi_1 + 0.25 chi_1 chi_2 on three bits.
    let f = PBFunction::from_coeffs(
        3,
        None,
        p,
        [
            (EdgeSet::new(), 2.0),
            (EdgeSet::singleton(0), 1.0),
            (EdgeSet::from_indices([0, 1]), -0.5),
            (EdgeSet::from_indices([1, 2]), 0.25),
        ],
    )?;
    println!("degree {}, mean {}, variance {:.4}", f.degree(), f.mean(), f.variance());
    println!("||f||_2 = {:.4}, spectral 1-norm = {:.4}", f.norm2(), f.spectral_norm1());

    // Tabulate f and transform it back.
    let table: Vec<f64> = (0..8u64).map(|x| f.eval(&Assignment::from_mask(x, 3))).collect::<Result<_, _>>()?;
    let back = transform_dense(3, p, table)?;
    assert_eq!(back.num_terms(), f.num_terms());
    for (s, c) in f.terms() {
        println!("  coeff {:?}: {c:+.4} (recovered {:+.4})", s.iter().collect::<Vec<_>>(), back.coeff(s));
    }

    let square = f.multiply(&f)?;
    println!("E[f^2] = {:.4} = ||f||^2 = {:.4}", square.mean(), f.norm2().powi(2));

    // Fix bit 2 to 1 and look at what is left on bits 0 and 1.
    let keep = EdgeSet::from_indices([0, 1]);
    let beta = PartialAssignment::outside(&keep, &Assignment::from_mask(0b100, 3));
    let r = f.restrict(&keep, &beta)?;
    println!("restricted to x_2 = 1: {} terms, mean {:.4}", r.num_terms(), r.mean());
    println!("json: {}", f.to_json()?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> clique_llt::Result<()> {
    run_example()
}
