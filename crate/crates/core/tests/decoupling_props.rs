mod common;

use clique_llt::clique::{clique_function, kappa_function, CliqueSpec};
use clique_llt::decoupling::{
    alpha_of_chi, alpha_pointwise, alpha_product_transform, alpha_restricted_coeffs, alpha_transform,
    build_clique_partition, build_color_partition, decoupling_check, flatten, is_rainbow, partition_cliques,
    rainbow_cliques, BlockPartition, DoubledAssignment,
};
use clique_llt::edges::{Assignment, EdgeGround, EdgeSet, PartialAssignment};
use clique_llt::mc::MCConfig;
use clique_llt::pbf::{gamma, transform_dense, PBFunction};
use common::*;
use proptest::prelude::*;

fn halves(n: usize) -> BlockPartition {
    let u0 = n.div_ceil(2);
    build_color_partition(n, 1, &[u0, n - u0]).unwrap()
}

fn partitions(n: usize) -> Vec<BlockPartition> {
    let mut out = vec![halves(n)];
    if n == 4 {
        out.push(build_color_partition(4, 2, &[2, 1, 1]).unwrap());
    } else {
        out.push(build_color_partition(n, 2, &[n - 2 * (n / 3), n / 3, n / 3]).unwrap());
    }
    out
}

/// Enumerates assignments of the used slots of the doubled ground with
/// their probabilities; unused slots stay 0.
fn doubled_assignments(part: &BlockPartition, p: f64) -> Vec<(DoubledAssignment, f64)> {
    let slots: Vec<usize> = part.used_slots().collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << slots.len() {
        let mut z = DoubledAssignment::zeros(part);
        for (i, &s) in slots.iter().enumerate() {
            let bit = mask >> i & 1 == 1;
            let e = s / 2;
            if part.block(e) == 0 {
                z.set_x(part, e, bit);
            } else {
                z.set_y(part, e, s % 2, bit);
            }
        }
        out.push((z, weight(mask, slots.len(), p)));
    }
    out
}

fn function_on(n: usize, p: f64, terms: &[(Vec<usize>, f64)]) -> PBFunction {
    let m = EdgeGround::new(n).num_edges();
    PBFunction::from_coeffs(
        m,
        Some(n),
        p,
        terms.iter().map(|(s, c)| (EdgeSet::from_indices(s.iter().map(|&e| e % m)), *c)),
    )
    .unwrap()
}

fn arb_graph_function(n: usize, max_degree: usize) -> impl Strategy<Value = PBFunction> {
    let m = EdgeGround::new(n).num_edges();
    (
        prop_oneof![Just(0.5), 0.15f64..0.85],
        prop::collection::vec((prop::collection::vec(0..m, 0..=max_degree), -2.0f64..2.0), 1..10),
    )
        .prop_map(move |(p, terms)| function_on(n, p, &terms))
}

#[test]
fn partition_invariants() {
    for n in 4..8 {
        for part in partitions(n) {
            let sizes: Vec<usize> = (0..=part.k()).map(|i| part.edges_in(i).len()).collect();
            assert_eq!(part.doubled_size(), sizes[0] + 2 * sizes[1..].iter().sum::<usize>());
            let slots: EdgeSet = part.used_slots().collect();
            assert_eq!(flatten(&slots), part.ground().full_set());
            assert_eq!(BlockPartition::from_json(&part.to_json().unwrap()).unwrap(), part);
        }
    }
    let part = halves(6);
    assert_eq!(part.edges_in(0).len(), 3);
}

#[test]
fn orthogonality_against_pointwise_enumeration() {
    let n = 4;
    for p in [0.5, 0.3] {
        for part in partitions(n) {
            let space = doubled_assignments(&part, p);
            let ground = part.ground();
            let m = ground.num_edges();
            let values: Vec<Vec<f64>> = (0..1u64 << m)
                .map(|s| {
                    let chi = PBFunction::chi_on(ground, p, set_of_mask(s)).unwrap();
                    space.iter().map(|(z, _)| alpha_pointwise(&chi, &part, z).unwrap()).collect()
                })
                .collect();
            let k = part.k() as i32;
            for s in 0..1u64 << m {
                for t in s..1u64 << m {
                    let inner: f64 = space
                        .iter()
                        .enumerate()
                        .map(|(i, (_, w))| w * values[s as usize][i] * values[t as usize][i])
                        .sum();
                    let want = if s == t && is_rainbow(&set_of_mask(s), &part) { 2f64.powi(k) } else { 0.0 };
                    assert!((inner - want).abs() < 1e-10, "p={p} k={k} S={s:b} T={t:b}: {inner}");
                }
            }
        }
    }
}

#[test]
fn orthogonality_from_expansions() {
    let n = 5;
    let p = 0.35;
    for part in partitions(n) {
        let m = part.ground().num_edges();
        let alphas: Vec<PBFunction> = (0..1u64 << m).map(|s| alpha_of_chi(&set_of_mask(s), &part, p).unwrap()).collect();
        let k = part.k() as i32;
        for s in 0..1usize << m {
            let rainbow = is_rainbow(&set_of_mask(s as u64), &part);
            assert_eq!(alphas[s].is_zero(), !rainbow);
            if !rainbow {
                continue;
            }
            assert!((alphas[s].norm2().powi(2) - 2f64.powi(k)).abs() < 1e-10);
            assert_eq!(alphas[s].mean(), 0.0);
            for t in s + 1..1usize << m {
                let inner: f64 = alphas[s].terms().map(|(u, c)| c * alphas[t].coeff(u)).sum();
                assert!(inner.abs() < 1e-10);
            }
        }
    }
}

#[test]
fn product_support_and_magnitude() {
    let n = 4;
    let part = halves(n);
    let m = part.ground().num_edges();
    for p in [0.2, 0.5, 0.7] {
        let g = gamma(p).abs();
        let k = part.k() as i32;
        let mut exceeded_stated = false;
        for s in 0..1u64 << m {
            let sset = set_of_mask(s);
            for t in 0..1u64 << m {
                let tset = set_of_mask(t);
                let prod = alpha_product_transform(&sset, &tset, &part, p).unwrap();
                if !is_rainbow(&sset, &part) || !is_rainbow(&tset, &part) {
                    assert!(prod.is_zero());
                    continue;
                }
                let sym = sset.symmetric_difference(&tset);
                let uni = sset.union(&tset);
                for (u, c) in prod.terms() {
                    let flat = flatten(u);
                    assert!(sym.is_subset(&flat) && flat.is_subset(&uni), "S={s:b} T={t:b} U={u:?}");
                    let cap = g.powi(u.len() as i32).max(1.0);
                    assert!(c.abs() <= 2f64.powi(k) * cap + 1e-10);
                    exceeded_stated |= c.abs() > cap + 1e-10;
                }
                if s == t {
                    assert!((prod.mean() - 2f64.powi(k)).abs() < 1e-10);
                }
            }
        }
        assert!(exceeded_stated);
    }
}

#[test]
fn restricted_coefficients_match_restriction_of_expansion() {
    let spec = CliqueSpec::with_default_tau(5, 3, 0.4).unwrap();
    let f = clique_function(&spec).unwrap();
    for part in partitions(5) {
        let alpha = alpha_transform(&f, &part).unwrap();
        let b0 = part.edges_in(0);
        let x_slots: EdgeSet = b0.iter().map(|e| 2 * e).collect();
        let mut rng = MCConfig::new(77, 1, 1).unwrap().stream(0);
        for _ in 0..20 {
            let z = DoubledAssignment::sample(&part, spec.p, &mut rng).unwrap();
            let g = alpha_restricted_coeffs(&f, &part, &z).unwrap();
            let beta = PartialAssignment::outside(&x_slots, z.bits());
            let r = alpha.restrict(&x_slots, &beta).unwrap();
            assert_eq!(g.num_terms(), r.num_terms());
            for (u, c) in r.terms() {
                assert!((g.coeff(&flatten(u)) - c).abs() < 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_identity(f in arb_graph_function(5, 4), which in 0usize..2) {
        let part = &partitions(5)[which];
        let alpha = alpha_transform(&f, part).unwrap();
        let rainbow: f64 = f.terms().filter(|(s, _)| is_rainbow(s, part)).map(|(_, c)| c * c).sum();
        prop_assert!(close(alpha.norm2().powi(2), 2f64.powi(part.k() as i32) * rainbow, 1e-10));
        prop_assert_eq!(alpha.mean(), 0.0);
    }

    #[test]
    fn linearity(f in arb_graph_function(5, 3), g in arb_graph_function(5, 3), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let g = function_on(5, f.p(), &g.terms().map(|(s, c)| (s.iter().collect(), c)).collect::<Vec<_>>());
        let part = &partitions(5)[1];
        let mut combo = f.scale(a);
        combo.add_scaled(&g, b).unwrap();
        let lhs = alpha_transform(&combo, part).unwrap();
        let mut rhs = alpha_transform(&f, part).unwrap().scale(a);
        rhs.add_scaled(&alpha_transform(&g, part).unwrap(), b).unwrap();
        for (u, _) in lhs.terms().chain(rhs.terms()) {
            prop_assert!((lhs.coeff(u) - rhs.coeff(u)).abs() < 1e-9);
        }
    }

    #[test]
    fn pointwise_matches_expansion(f in arb_graph_function(5, 4), seed in 0u64..1_000_000, which in 0usize..2) {
        let part = &partitions(5)[which];
        let alpha = alpha_transform(&f, part).unwrap();
        let mut rng = MCConfig::new(seed, 1, 1).unwrap().stream(0);
        for _ in 0..3 {
            let z = DoubledAssignment::sample(part, f.p(), &mut rng).unwrap();
            let direct = alpha_pointwise(&f, part, &z).unwrap();
            prop_assert!(close(direct, alpha.eval(z.bits()).unwrap(), 1e-10));
        }
    }

    #[test]
    fn restricted_matches_pointwise(f in arb_graph_function(5, 4), seed in 0u64..1_000_000) {
        let part = halves(5);
        let b0: Vec<usize> = part.edges_in(0).iter().collect();
        let mut rng = MCConfig::new(seed, 1, 1).unwrap().stream(0);
        let mut z = DoubledAssignment::sample(&part, f.p(), &mut rng).unwrap();
        let g = alpha_restricted_coeffs(&f, &part, &z).unwrap();
        for (s, _) in g.terms() {
            prop_assert!(s.is_subset(&part.edges_in(0)));
        }
        for mask in 0u64..1 << b0.len() {
            let mut x = Assignment::zeros(10);
            for (i, &e) in b0.iter().enumerate() {
                let bit = mask >> i & 1 == 1;
                x.set(e, bit);
                z.set_x(&part, e, bit);
            }
            prop_assert!(close(g.eval(&x).unwrap(), alpha_pointwise(&f, &part, &z).unwrap(), 1e-10));
        }
    }
}

#[test]
fn identical_copies_and_x_only_functions() {
    let part = halves(5);
    let f = function_on(5, 0.3, &[(vec![0], 1.5), (vec![0, 1], -0.5), (vec![], 2.0)]);
    assert!(part.edges_in(0).contains(0) && part.edges_in(0).contains(1));
    assert!(alpha_transform(&f, &part).unwrap().is_zero());
    let c = decoupling_check(&f, &part, 1.3, &MCConfig::new(4, 200, 2).unwrap()).unwrap();
    assert!((c.rhs - 1.0).abs() < 1e-12);
    assert!(c.lhs <= 1.0);
}

#[test]
fn decoupling_inequality_on_triangles() {
    let spec = CliqueSpec::with_default_tau(5, 3, 0.5).unwrap();
    let f = clique_function(&spec).unwrap();
    let mc = MCConfig::new(8, 4000, 4).unwrap();
    for part in partitions(5) {
        for t in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let c = decoupling_check(&f, &part, t, &mc).unwrap();
            assert!(c.holds(3.0), "k={} t={t}: {c:?}", part.k());
        }
    }
}

#[test]
fn degree_collapse_for_color_partitions() {
    for (n, r, sizes) in [(6, 3, vec![3, 3]), (8, 3, vec![4, 4]), (7, 4, vec![3, 2, 2]), (8, 4, vec![4, 2, 2])] {
        let spec = CliqueSpec::with_default_tau(n, r, 0.5).unwrap();
        let kappa = kappa_function(&spec).unwrap();
        let part = build_color_partition(n, r - 2, &sizes).unwrap();
        let b0: Vec<usize> = part.edges_in(0).iter().collect();
        let mut rng = MCConfig::new(n as u64, 1, 1).unwrap().stream(0);
        for _ in 0..25 {
            let mut z = DoubledAssignment::sample(&part, spec.p, &mut rng).unwrap();
            let g = alpha_restricted_coeffs(&kappa, &part, &z).unwrap();
            assert!(g.terms().all(|(s, _)| s.len() <= 1), "n={n} r={r}");
            // Independent check: transform the pointwise values in X.
            let table: Vec<f64> = (0u64..1 << b0.len())
                .map(|mask| {
                    for (i, &e) in b0.iter().enumerate() {
                        z.set_x(&part, e, mask >> i & 1 == 1);
                    }
                    alpha_pointwise(&kappa, &part, &z).unwrap()
                })
                .collect();
            let h = transform_dense(b0.len(), spec.p, table).unwrap();
            for (s, c) in h.terms() {
                assert!(s.len() <= 1 || c.abs() < 1e-10, "n={n} r={r} S={s:?} c={c}");
            }
        }
    }
}

#[test]
fn clique_partition_structure() {
    for (n, r) in [(6, 3), (10, 3), (8, 4), (7, 3)] {
        let part = build_clique_partition(n, r).unwrap();
        assert_eq!(part.k(), r * (r - 1) / 2 - 1);
        for i in 1..=part.k() {
            assert_eq!(part.edges_in(i).len(), n / r);
        }
        assert_eq!(rainbow_cliques(&part, r), partition_cliques(n, r));
    }
}

#[test]
fn alpha_of_clique_count_sees_only_partition_cliques() {
    let (n, r, p) = (6, 3, 0.4);
    let spec = CliqueSpec::with_default_tau(n, r, p).unwrap();
    let part = build_clique_partition(n, r).unwrap();
    let ground = part.ground();
    let f = clique_function(&spec).unwrap();
    let mut from_partition = f.zero_like();
    for clique in partition_cliques(n, r) {
        from_partition.add_scaled(&PBFunction::indicator_monomial(&f, &ground.clique_edges(&clique)).unwrap(), 1.0).unwrap();
    }
    let lhs = alpha_transform(&f, &part).unwrap();
    let rhs = alpha_transform(&from_partition, &part).unwrap();
    assert!(!lhs.is_zero());
    for (u, _) in lhs.terms().chain(rhs.terms()) {
        assert!((lhs.coeff(u) - rhs.coeff(u)).abs() < 1e-12);
    }
    let partition: Vec<Vec<usize>> = partition_cliques(n, r);
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let tri = vec![a, b, c];
                if partition.contains(&tri) {
                    continue;
                }
                let mono = PBFunction::indicator_monomial(&f, &ground.clique_edges(&tri)).unwrap();
                assert!(alpha_transform(&mono, &part).unwrap().is_zero(), "{tri:?}");
            }
        }
    }
}
