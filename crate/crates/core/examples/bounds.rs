// The explicit inequalities, each next to the quantity it controls.

use clique_llt::bounds::{
    bernoulli_chf_bound, bernoulli_chf_exact, berry_esseen_gap, hyperconc_moment, hyperconc_tail, mainchf_terms,
    BernoulliVariant, BoundParams, HypParams,
};
use clique_llt::experiment::bounds_suite;
use clique_llt::mc::MCConfig;

pub fn run_example() -> clique_llt::Result<()> {
    let p = 0.3;
    for variant in BernoulliVariant::ALL {
        let t = 0.6 * variant.limit(p);
        println!(
            "{variant:?} at t = {t:.3}: |chf| = {:.4} <= {:.4}",
            bernoulli_chf_exact(t, p, variant),
            bernoulli_chf_bound(t, p, variant)?
        );
    }

    let be = berry_esseen_gap(30, p, 0.8)?;
    println!("edge sum, n = 30: gap {:.2e} <= {:.2e}", be.exact_gap, be.bound);

    let hp = HypParams::new(2, p)?;
    let tail = hyperconc_tail(hp, 1.0, 40.0)?;
    println!("degree 2 tail at 40: threshold {:.2}, probability <= {:.3e}", tail.threshold, tail.probability);
    println!("E|f|^4 <= {:.2} for ||f||_2 = 1", hyperconc_moment(hp, 1.0, 2.0)?);

    // Many small linear coefficients and a tiny nonlinear part.
    let bp = BoundParams::new(2, 3, 10.0, 1.0, 1e-4, 1e-3, 1e-3, 0.5)?;
    let terms = mainchf_terms(&bp)?;
    println!("perturbation bound at t = 10: {terms:?}, total {:.4}", terms.total());

    for check in bounds_suite(&MCConfig::new(1, 20_000, 4)?)? {
        println!("  {:<28} {} margin {:.3e}", check.name, if check.passed { "ok  " } else { "FAIL" }, check.margin);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> clique_llt::Result<()> {
    run_example()
}
