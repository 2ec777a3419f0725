//! Brute-force oracles shared by the integration tests. Everything here is
//! computed straight from definitions, independently of the library's
//! transforms and closed forms.
#![allow(dead_code)]

use clique_llt::edges::{Assignment, EdgeSet};
use clique_llt::pbf::PBFunction;
use proptest::prelude::*;

/// Probability of the assignment encoded by `mask` on `m` p-biased bits.
pub fn weight(mask: u64, m: usize, p: f64) -> f64 {
    let ones = mask.count_ones() as i32;
    p.powi(ones) * (1.0 - p).powi(m as i32 - ones)
}

pub fn chi(bit: bool, p: f64) -> f64 {
    let s = (p * (1.0 - p)).sqrt();
    if bit {
        (1.0 - p) / s
    } else {
        -p / s
    }
}

/// `chi_S` at the assignment `mask`.
pub fn chi_set(mask: u64, set: &EdgeSet, p: f64) -> f64 {
    set.iter().map(|e| chi(mask >> e & 1 == 1, p)).product()
}

/// `E[f]` over all `2^m` assignments of a table indexed by mask.
pub fn expect(m: usize, p: f64, f: impl Fn(u64) -> f64) -> f64 {
    (0..1u64 << m).map(|x| weight(x, m, p) * f(x)).sum()
}

/// `E[f chi_S]`.
pub fn coeff_by_definition(m: usize, p: f64, f: impl Fn(u64) -> f64, set: &EdgeSet) -> f64 {
    expect(m, p, |x| f(x) * chi_set(x, set, p))
}

pub fn set_of_mask(mask: u64) -> EdgeSet {
    EdgeSet::from_indices((0..64).filter(|i| mask >> i & 1 == 1))
}

pub fn eval_mask(f: &PBFunction, mask: u64) -> f64 {
    f.eval(&Assignment::from_mask(mask, f.vars())).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Random sparse function on `m` plain variables with keys of size at
/// most `max_degree`.
pub fn arb_function(m: usize, max_degree: usize) -> impl Strategy<Value = PBFunction> {
    let p = prop_oneof![Just(0.5), 0.1f64..0.9];
    let terms = prop::collection::vec(
        (
            prop::collection::btree_set(0..m, 0..=max_degree),
            -2.0f64..2.0,
        ),
        0..8,
    );
    (p, terms).prop_map(move |(p, terms)| {
        PBFunction::from_coeffs(
            m,
            None,
            p,
            terms.into_iter().map(|(s, c)| (s.into_iter().collect::<EdgeSet>(), c)),
        )
        .unwrap()
    })
}
