//! The r-clique count `f_r` on `G(n,p)`: exact counting, closed-form
//! moments and Fourier profile, and exact small-n laws.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{EmpiricalDistribution, LatticeSpec};
use crate::edges::{Adjacency, EdgeGround, EdgeSet, GraphAssignment};
use crate::error::{Error, Result};
use crate::pbf::{check_probability, PBFunction};

/// Largest number of edges for which the exact law is enumerated.
pub const MAX_EXACT_EDGES: usize = 21;

/// Parameters of the clique-count experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueSpec {
    pub n: usize,
    pub r: usize,
    pub p: f64,
    pub tau: f64,
}

impl CliqueSpec {
    /// Validates `r >= 3`, `0 < p < 1` and `0 < tau < min(1/12, 1/(2r))`.
    pub fn new(n: usize, r: usize, p: f64, tau: f64) -> Result<Self> {
        if r < 3 {
            return Err(Error::Domain(format!("clique size r = {r} must be at least 3")));
        }
        check_probability(p)?;
        let tau_max = (1.0 / 12.0f64).min(1.0 / (2.0 * r as f64));
        if !(tau > 0.0 && tau < tau_max) {
            return Err(Error::Domain(format!("tau = {tau} must lie in (0, {tau_max})")));
        }
        Ok(Self { n, r, p, tau })
    }

    /// Spec with `tau` set to half its upper limit.
    pub fn with_default_tau(n: usize, r: usize, p: f64) -> Result<Self> {
        let tau = 0.5 * (1.0 / 12.0f64).min(1.0 / (2.0 * r.max(1) as f64));
        Self::new(n, r, p, tau)
    }

    /// `min(p, 1 - p)`.
    pub fn lambda(&self) -> f64 {
        self.p.min(1.0 - self.p)
    }

    pub fn ground(&self) -> EdgeGround {
        EdgeGround::new(self.n)
    }

    fn clique_edges(&self) -> i32 {
        (self.r * (self.r - 1) / 2) as i32
    }
}

/// Closed-form statistics of `f_r` and of its normalization `kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueMoments {
    pub mu: f64,
    pub sigma2: f64,
    pub sigma: f64,
    /// `W^1(kappa)`: Fourier weight on single edges.
    pub weight_deg1: f64,
    /// `W^{>1}(kappa)`: Fourier weight on sets of two or more edges.
    pub weight_tail: f64,
}

/// `C(n, k)` as a float; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of `m`-edge subsets of `K_t` whose edges touch all `t` vertices,
/// by inclusion-exclusion over the uncovered vertices.
pub fn covering_edge_subsets(t: usize, m: usize) -> u128 {
    let mut total: i128 = 0;
    for j in 0..=t {
        let rest = (t - j) as u64;
        let term = binomial_u128(t as u64, j as u64) * binomial_u128(rest * rest.saturating_sub(1) / 2, m as u64);
        if j % 2 == 0 {
            total += term as i128;
        } else {
            total -= term as i128;
        }
    }
    debug_assert!(total >= 0);
    total as u128
}

/// `mu = p^{C(r,2)} C(n,r)`, in log space for `n > 1000`.
pub fn mean(spec: &CliqueSpec) -> f64 {
    let e = spec.clique_edges();
    if spec.n > 1000 {
        (e as f64 * spec.p.ln() + ln_binomial(spec.n, spec.r)).exp()
    } else {
        spec.p.powi(e) * binomial(spec.n, spec.r)
    }
}

/// `f_r(S) = p^{C(r,2)} ((1-p)/p)^{|S|/2} C(n-s, r-s)` with `s = |supp S|`.
pub fn fourier_coeff_fr(spec: &CliqueSpec, set: &EdgeSet) -> f64 {
    let s = spec.ground().support_vertices(set).len();
    coeff_by_shape(spec, s, set.len())
}

/// Coefficient of a set of `m` edges spanning `s` vertices.
fn coeff_by_shape(spec: &CliqueSpec, s: usize, m: usize) -> f64 {
    if s > spec.r || s > spec.n {
        return 0.0;
    }
    let ratio = (1.0 - spec.p) / spec.p;
    spec.p.powi(spec.clique_edges()) * ratio.powf(m as f64 / 2.0) * binomial(spec.n - s, spec.r - s)
}

fn check_variance_domain(spec: &CliqueSpec) -> Result<()> {
    if spec.n <= spec.r {
        return Err(Error::Domain(format!(
            "variance needs n > r (n = {}, r = {})",
            spec.n, spec.r
        )));
    }
    Ok(())
}

/// Parseval sum of squared coefficients over nonempty sets, grouped by
/// support size `t` and edge count `m`, restricted to `m` in `edges`.
fn grouped_square_sum(spec: &CliqueSpec, edges: impl Fn(usize) -> bool) -> f64 {
    let mut total = 0.0;
    for t in 2..=spec.r.min(spec.n) {
        let sets_on_t = binomial(spec.n, t);
        for m in 1..=t * (t - 1) / 2 {
            if !edges(m) {
                continue;
            }
            let count = covering_edge_subsets(t, m) as f64;
            if count == 0.0 {
                continue;
            }
            let c = coeff_by_shape(spec, t, m);
            total += sets_on_t * count * c * c;
        }
    }
    total
}

/// `sigma^2 = sum_{S != empty} f_r(S)^2`.
pub fn variance(spec: &CliqueSpec) -> Result<f64> {
    check_variance_domain(spec)?;
    Ok(grouped_square_sum(spec, |_| true))
}

/// `kappa(S) = f_r(S) / sigma` for nonempty `S`, and `kappa(empty) = 0`.
pub fn kappa_coeff(spec: &CliqueSpec, set: &EdgeSet) -> Result<f64> {
    if set.is_empty() {
        return Ok(0.0);
    }
    Ok(fourier_coeff_fr(spec, set) / variance(spec)?.sqrt())
}

/// `(W^1, W^{>1})` of `kappa`, each summed directly from coefficients.
pub fn weight_profile(spec: &CliqueSpec) -> Result<(f64, f64)> {
    let sigma2 = variance(spec)?;
    let w1 = grouped_square_sum(spec, |m| m == 1) / sigma2;
    let tail = grouped_square_sum(spec, |m| m > 1) / sigma2;
    Ok((w1, tail))
}

pub fn moments(spec: &CliqueSpec) -> Result<CliqueMoments> {
    let sigma2 = variance(spec)?;
    let (weight_deg1, weight_tail) = weight_profile(spec)?;
    Ok(CliqueMoments {
        mu: mean(spec),
        sigma2,
        sigma: sigma2.sqrt(),
        weight_deg1,
        weight_tail,
    })
}

/// Lexicographic `k`-subsets of `0..n`.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut next = (k <= n).then(|| (0..k).collect::<Vec<_>>());
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut c = current.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                next = Some(c);
                break;
            }
        }
        Some(current)
    })
}

/// The Fourier expansion of `f_r` as a sparse function on the edges of
/// `K_n`: every edge set spanning at most `r` vertices.
pub fn clique_function(spec: &CliqueSpec) -> Result<PBFunction> {
    let ground = spec.ground();
    let mut f = PBFunction::zero_on(ground, spec.p)?;
    f.add_term(EdgeSet::new(), mean(spec));
    for t in 2..=spec.r.min(spec.n) {
        let local = EdgeGround::new(t);
        let local_edges = local.num_edges();
        for verts in combinations(spec.n, t) {
            let map: Vec<usize> = local
                .edges()
                .map(|(a, b)| ground.index(verts[a], verts[b]))
                .collect();
            for mask in 1u64..1 << local_edges {
                let mut seen = 0u64;
                for (i, (a, b)) in local.edges().enumerate() {
                    if mask >> i & 1 == 1 {
                        seen |= 1 << a | 1 << b;
                    }
                }
                if seen.count_ones() as usize != t {
                    continue;
                }
                let set = EdgeSet::from_indices((0..local_edges).filter(|i| mask >> i & 1 == 1).map(|i| map[i]));
                f.add_term(set, coeff_by_shape(spec, t, mask.count_ones() as usize));
            }
        }
    }
    f.prune();
    Ok(f)
}

/// `kappa = (f_r - mu) / sigma` as a sparse function.
pub fn kappa_function(spec: &CliqueSpec) -> Result<PBFunction> {
    let sigma = variance(spec)?.sqrt();
    let f = clique_function(spec)?;
    Ok(f.filter(|s| !s.is_empty()).scale(1.0 / sigma))
}

/// Number of `r`-cliques of `g`.
pub fn count_cliques(g: &GraphAssignment, r: usize) -> u64 {
    let n = g.ground().vertices();
    if n <= 64 {
        let mut rows = vec![0u64; n];
        for e in 0..g.ground().num_edges() {
            if g.bits().get(e) {
                let (i, j) = g.ground().endpoints(e);
                rows[i] |= 1 << j;
                rows[j] |= 1 << i;
            }
        }
        count_cliques_rows(&rows, r)
    } else {
        count_cliques_adjacency(&g.adjacency(), r)
    }
}

/// Vertices strictly above `v` in a single-word row.
#[inline]
fn above(v: usize) -> u64 {
    if v >= 63 {
        0
    } else {
        !0u64 << (v + 1)
    }
}

/// Clique count for `n <= 64` with one `u64` neighbourhood row per vertex.
///
/// Ordered backtracking: each clique is found once, from its smallest
/// vertex, by intersecting candidate sets with neighbourhoods above the
/// current vertex.
pub fn count_cliques_rows(rows: &[u64], r: usize) -> u64 {
    fn extend(rows: &[u64], candidates: u64, remaining: usize) -> u64 {
        if remaining == 1 {
            return candidates.count_ones() as u64;
        }
        let mut total = 0;
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let next = candidates & rows[v] & above(v);
            if next.count_ones() as usize >= remaining - 1 {
                total += extend(rows, next, remaining - 1);
            }
        }
        total
    }
    match r {
        0 => 1,
        1 => rows.len() as u64,
        _ => (0..rows.len())
            .map(|v| extend(rows, rows[v] & above(v), r - 1))
            .sum(),
    }
}

/// Triangle count from pairwise row intersections.
pub fn count_triangles_rows(rows: &[u64]) -> u64 {
    let mut total = 0;
    for (u, &row_u) in rows.iter().enumerate() {
        let mut higher = row_u & above(u);
        while higher != 0 {
            let v = higher.trailing_zeros() as usize;
            higher &= higher - 1;
            total += (row_u & rows[v] & above(v)).count_ones() as u64;
        }
    }
    total
}

/// Clique count on general multi-word adjacency bitsets.
pub fn count_cliques_adjacency(adj: &Adjacency, r: usize) -> u64 {
    let n = adj.vertices();
    let stride = adj.stride();
    if r == 0 {
        return 1;
    }
    if r == 1 {
        return n as u64;
    }
    fn above_words(v: usize, stride: usize) -> Vec<u64> {
        (0..stride)
            .map(|w| match (v + 1).cmp(&(w * 64)) {
                std::cmp::Ordering::Less | std::cmp::Ordering::Equal => !0,
                _ if v + 1 >= (w + 1) * 64 => 0,
                _ => !0u64 << ((v + 1) % 64),
            })
            .collect()
    }
    fn extend(adj: &Adjacency, candidates: &[u64], remaining: usize, stride: usize) -> u64 {
        if remaining == 1 {
            return candidates.iter().map(|w| w.count_ones() as u64).sum();
        }
        let mut total = 0;
        for (w, &word) in candidates.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let v = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let mask = above_words(v, stride);
                let next: Vec<u64> = candidates
                    .iter()
                    .zip(adj.row(v))
                    .zip(&mask)
                    .map(|((c, a), m)| c & a & m)
                    .collect();
                total += extend(adj, &next, remaining - 1, stride);
            }
        }
        total
    }
    (0..n)
        .map(|v| {
            let mask = above_words(v, stride);
            let cand: Vec<u64> = adj.row(v).iter().zip(&mask).map(|(a, m)| a & m).collect();
            extend(adj, &cand, r - 1, stride)
        })
        .sum()
}

/// Exact law of `f_r` by enumerating all `2^{C(n,2)}` graphs, on the
/// integer lattice. Graphs are tallied by (clique count, edge count) in
/// integers, so the result does not depend on the thread schedule.
pub fn exact_distribution(spec: &CliqueSpec) -> Result<EmpiricalDistribution> {
    let ground = spec.ground();
    let m = ground.num_edges();
    if m > MAX_EXACT_EDGES {
        return Err(Error::Capacity {
            what: "edges for exact enumeration",
            actual: m,
            limit: MAX_EXACT_EDGES,
        });
    }
    let n = spec.n;
    let r = spec.r;
    let ends: Vec<(usize, usize)> = (0..m).map(|e| ground.endpoints(e)).collect();
    let max_count = binomial_u128(n as u64, r as u64) as usize;
    let width = m + 1;
    const CHUNK: u64 = 1 << 12;
    let total: u64 = 1 << m;
    let chunks = total.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut table = vec![0u64; (max_count + 1) * width];
            let mut rows = vec![0u64; n];
            for mask in c * CHUNK..((c + 1) * CHUNK).min(total) {
                rows.iter_mut().for_each(|w| *w = 0);
                let mut bits = mask;
                while bits != 0 {
                    let e = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let (i, j) = ends[e];
                    rows[i] |= 1 << j;
                    rows[j] |= 1 << i;
                }
                let count = if r == 3 {
                    count_triangles_rows(&rows)
                } else {
                    count_cliques_rows(&rows, r)
                } as usize;
                table[count * width + mask.count_ones() as usize] += 1;
            }
            table
        })
        .reduce(
            || vec![0u64; (max_count + 1) * width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let p = spec.p;
    let weights: Vec<f64> = (0..width)
        .map(|k| p.powi(k as i32) * (1.0 - p).powi((m - k) as i32))
        .collect();
    let mut masses = BTreeMap::new();
    for count in 0..=max_count {
        let row = &tally[count * width..(count + 1) * width];
        if row.iter().all(|&x| x == 0) {
            continue;
        }
        let prob: f64 = row.iter().zip(&weights).map(|(&x, w)| x as f64 * w).sum();
        masses.insert(count as i64, prob);
    }
    EmpiricalDistribution::from_masses(LatticeSpec::integers(), masses)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, r: usize, p: f64) -> CliqueSpec {
        CliqueSpec::with_default_tau(n, r, p).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(CliqueSpec::new(5, 2, 0.5, 0.01).is_err());
        assert!(CliqueSpec::new(5, 3, 1.0, 0.01).is_err());
        assert!(CliqueSpec::new(5, 3, 0.5, 1.0 / 6.0).is_err());
        assert!(CliqueSpec::new(5, 3, 0.5, 0.0).is_err());
        assert!(CliqueSpec::new(5, 7, 0.5, 0.072).is_err());
        assert!(CliqueSpec::new(5, 7, 0.5, 0.07).is_ok());
        assert!(CliqueSpec::new(5, 3, 0.5, 0.08).is_ok());
        assert!((spec(5, 3, 0.8).lambda() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn counting_on_fixed_graphs() {
        let g = EdgeGround::new(5);
        assert_eq!(count_cliques(&GraphAssignment::complete(g), 3), 10);
        assert_eq!(count_cliques(&GraphAssignment::complete(g), 4), 5);
        assert_eq!(count_cliques(&GraphAssignment::complete(g), 5), 1);
        for r in 3..6 {
            assert_eq!(count_cliques(&GraphAssignment::empty(g), r), 0);
        }
    }

    #[test]
    fn petersen_has_no_triangles() {
        let g = EdgeGround::new(10);
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        let petersen = GraphAssignment::from_edges(g, &edges).unwrap();
        assert_eq!(petersen.edge_count(), 15);
        let brute = combinations(10, 3)
            .filter(|c| petersen.has_edge(c[0], c[1]) && petersen.has_edge(c[0], c[2]) && petersen.has_edge(c[1], c[2]))
            .count();
        assert_eq!(brute, 0);
        assert_eq!(count_cliques(&petersen, 3), 0);
    }

    #[test]
    fn multiword_counter_matches_single_word() {
        // Complete graph on 70 vertices goes through the multi-word path.
        let g = GraphAssignment::complete(EdgeGround::new(70));
        assert_eq!(count_cliques(&g, 3), binomial(70, 3) as u64);
        assert_eq!(count_cliques(&g, 4), binomial(70, 4) as u64);
        let mut sparse = GraphAssignment::empty(EdgeGround::new(66));
        for (a, b, c) in [(0, 1, 65), (63, 64, 65), (2, 3, 4)] {
            sparse.set_edge(a, b, true);
            sparse.set_edge(a, c, true);
            sparse.set_edge(b, c, true);
        }
        assert_eq!(count_cliques(&sparse, 3), 3);
    }

    #[test]
    fn covering_counts() {
        assert_eq!(covering_edge_subsets(2, 1), 1);
        assert_eq!(covering_edge_subsets(3, 2), 3);
        assert_eq!(covering_edge_subsets(3, 3), 1);
        assert_eq!(covering_edge_subsets(4, 3), 16);
        assert_eq!(covering_edge_subsets(4, 1), 0);
    }

    #[test]
    fn covering_counts_match_enumeration() {
        for t in 2..=6usize {
            let g = EdgeGround::new(t);
            let m_max = g.num_edges();
            let mut by_size = vec![0u128; m_max + 1];
            for mask in 0u64..1 << m_max {
                let set = EdgeSet::from_indices((0..m_max).filter(|i| mask >> i & 1 == 1));
                if g.support_vertices(&set).len() == t {
                    by_size[set.len()] += 1;
                }
            }
            for (m, &expected) in by_size.iter().enumerate() {
                assert_eq!(covering_edge_subsets(t, m), expected, "t={t} m={m}");
            }
            let total: u128 = by_size.iter().sum();
            let alt: i128 = (0..=t)
                .map(|j| {
                    let rest = (t - j) as u32;
                    let v = binomial_u128(t as u64, j as u64) as i128 * (1i128 << (rest * rest.saturating_sub(1) / 2));
                    if j % 2 == 0 { v } else { -v }
                })
                .sum();
            assert_eq!(total as i128, alt);
        }
    }

    #[test]
    fn small_moments() {
        let s = spec(4, 3, 0.5);
        assert!((mean(&s) - 0.5).abs() < 1e-15);
        assert!((variance(&s).unwrap() - 0.625).abs() < 1e-14);
        let big = spec(6, 3, 1.0 - 1e-12);
        assert!((mean(&big) - 20.0).abs() < 1e-9);
        assert!(variance(&big).unwrap() < 1e-9);
        assert!(variance(&spec(3, 3, 0.5)).is_err());
    }

    #[test]
    fn log_space_mean_agrees() {
        let s = spec(1500, 3, 0.3);
        let direct = 0.3f64.powi(3) * binomial(1500, 3);
        assert!((mean(&s) / direct - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coefficient_cases() {
        let s = spec(3, 3, 0.5);
        assert!((fourier_coeff_fr(&s, &EdgeSet::new()) - 0.125).abs() < 1e-15);
        assert!((fourier_coeff_fr(&s, &EdgeSet::singleton(0)) - 0.125).abs() < 1e-15);
        let s = spec(6, 3, 0.4);
        let g = s.ground();
        let spread = EdgeSet::from_indices([g.index(0, 1), g.index(2, 3)]);
        assert_eq!(fourier_coeff_fr(&s, &spread), 0.0);
        assert!((fourier_coeff_fr(&s, &EdgeSet::new()) - mean(&s)).abs() < 1e-12);
        assert_eq!(kappa_coeff(&s, &EdgeSet::new()).unwrap(), 0.0);
    }

    #[test]
    fn weight_profile_sums_to_one() {
        for (n, r, p) in [(6, 3, 0.5), (9, 4, 0.3), (40, 3, 0.7)] {
            let (w1, tail) = weight_profile(&spec(n, r, p)).unwrap();
            assert!((w1 + tail - 1.0).abs() < 1e-12, "n={n} r={r}");
        }
    }

    #[test]
    fn kappa_function_is_standardized() {
        let s = spec(6, 3, 0.3);
        let k = kappa_function(&s).unwrap();
        assert_eq!(k.mean(), 0.0);
        assert!((k.variance() - 1.0).abs() < 1e-12);
        assert!((k.norm2() - 1.0).abs() < 1e-12);
        assert_eq!(k.degree(), 3);
    }

    #[test]
    fn exact_law_of_a_single_triangle() {
        let d = exact_distribution(&spec(3, 3, 0.5)).unwrap();
        let pts: Vec<_> = d.points().collect();
        assert_eq!(pts, vec![(0.0, 0.875), (1.0, 0.125)]);
        assert!(matches!(exact_distribution(&spec(8, 3, 0.5)), Err(Error::Capacity { .. })));
    }

    #[test]
    fn combinations_enumerate_all() {
        assert_eq!(combinations(5, 3).count(), 10);
        assert_eq!(combinations(4, 0).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
        assert_eq!(combinations(4, 2).last().unwrap(), vec![2, 3]);
    }
}
