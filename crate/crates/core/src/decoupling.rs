//! The alternating-sum decoupling operator `alpha` over a block partition
//! `B_0, B_1, ..., B_k` of the edges of `K_n`.
//!
//! Every edge of a block `B_i` with `i >= 1` gets two independent copies.
//! Variables of the doubled ground use slot `2e + copy`; an edge `e` of `B_0`
//! uses slot `2e` and slot `2e + 1` is unused. Functions on the doubled
//! ground are therefore [`PBFunction`]s over `2 * C(n,2)` variables.
//!
//! `alpha` is implemented twice: [`alpha_pointwise`] evaluates the
//! alternating sum directly and [`alpha_transform`] expands it in the
//! Fourier basis. They are tested against each other.

use num_complex::Complex64;
use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clique::combinations;
use crate::edges::{Assignment, EdgeGround, EdgeSet};
use crate::error::{Error, Result};
use crate::mc::{KahanSum, MCConfig};
use crate::pbf::{chi_pair, mask_weight, PBFunction, MAX_TRANSFORM_VARS};

/// Largest `|B_0|` for which the inner expectation over `X` is enumerated.
pub const MAX_INNER_EDGES: usize = 20;

/// Assignment of every edge of `K_n` to one of the blocks `0..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    n: usize,
    k: usize,
    block_of: Vec<usize>,
}

impl BlockPartition {
    pub fn new(ground: EdgeGround, k: usize, block_of: Vec<usize>) -> Result<Self> {
        if block_of.len() != ground.num_edges() {
            return Err(Error::InvalidPartition(format!(
                "{} block labels for {} edges",
                block_of.len(),
                ground.num_edges()
            )));
        }
        let mut sizes = vec![0usize; k + 1];
        for (e, &b) in block_of.iter().enumerate() {
            if b > k {
                return Err(Error::InvalidPartition(format!("edge {e} in block {b} > k = {k}")));
            }
            sizes[b] += 1;
        }
        if let Some(i) = (1..=k).find(|&i| sizes[i] == 0) {
            return Err(Error::InvalidPartition(format!("block B_{i} is empty")));
        }
        Ok(Self {
            n: ground.vertices(),
            k,
            block_of,
        })
    }

    pub fn ground(&self) -> EdgeGround {
        EdgeGround::new(self.n)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn block(&self, e: usize) -> usize {
        self.block_of[e]
    }

    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    pub fn edges_in(&self, block: usize) -> EdgeSet {
        EdgeSet::from_indices(
            self.block_of
                .iter()
                .enumerate()
                .filter(|(_, &b)| b == block)
                .map(|(e, _)| e),
        )
    }

    /// Number of variables of the doubled ground, `|B_0| + 2 sum |B_i|`.
    pub fn doubled_size(&self) -> usize {
        self.block_of.iter().map(|&b| if b == 0 { 1 } else { 2 }).sum()
    }

    /// Number of slots used to index the doubled ground, `2 C(n,2)`.
    pub fn doubled_slots(&self) -> usize {
        2 * self.block_of.len()
    }

    /// Slot of the `X` variable for `e` in `B_0`.
    pub fn x_slot(&self, e: usize) -> usize {
        debug_assert_eq!(self.block_of[e], 0);
        2 * e
    }

    /// Slot of copy `copy` of `e` in some `B_i`, `i >= 1`.
    pub fn y_slot(&self, e: usize, copy: usize) -> usize {
        debug_assert!(self.block_of[e] != 0 && copy < 2);
        2 * e + copy
    }

    /// Slots that actually carry a variable, ascending.
    pub fn used_slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.block_of.iter().enumerate().flat_map(|(e, &b)| {
            let copies = if b == 0 { 1 } else { 2 };
            (0..copies).map(move |c| 2 * e + c)
        })
    }

    /// Serialized as `{n, k, block_of}`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BlockPartition = serde_json::from_str(text)?;
        Self::new(EdgeGround::new(raw.n), raw.k, raw.block_of)
    }
}

/// True iff `set` meets every block `B_1..B_k`.
pub fn is_rainbow(set: &EdgeSet, part: &BlockPartition) -> bool {
    let mut hit = vec![false; part.k + 1];
    for e in set.iter() {
        hit[part.block(e)] = true;
    }
    hit[1..].iter().all(|&h| h)
}

/// Base edges with at least one copy (or their `X` slot) in `set`.
pub fn flatten(set: &EdgeSet) -> EdgeSet {
    set.iter().map(|slot| slot / 2).collect()
}

/// A full assignment of the doubled ground: `X` on `B_0` and both copies
/// `Y_i^0, Y_i^1` of every other block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubledAssignment {
    bits: Assignment,
}

impl DoubledAssignment {
    pub fn zeros(part: &BlockPartition) -> Self {
        Self {
            bits: Assignment::zeros(part.doubled_slots()),
        }
    }

    pub fn set_x(&mut self, part: &BlockPartition, e: usize, bit: bool) {
        self.bits.set(part.x_slot(e), bit);
    }

    pub fn set_y(&mut self, part: &BlockPartition, e: usize, copy: usize, bit: bool) {
        self.bits.set(part.y_slot(e, copy), bit);
    }

    pub fn bits(&self) -> &Assignment {
        &self.bits
    }

    /// Draws every copy slot i.i.d. Bernoulli(p), in ascending slot order,
    /// leaving `X` untouched.
    pub fn resample_y<R: Rng + ?Sized>(&mut self, part: &BlockPartition, coin: &Bernoulli, rng: &mut R) {
        for (e, &b) in part.block_of.iter().enumerate() {
            if b != 0 {
                for c in 0..2 {
                    self.bits.set(2 * e + c, coin.sample(rng));
                }
            }
        }
    }

    /// Draws every used slot i.i.d. Bernoulli(p).
    pub fn sample<R: Rng + ?Sized>(part: &BlockPartition, p: f64, rng: &mut R) -> Result<Self> {
        let coin = Bernoulli::new(p).map_err(|e| Error::Domain(e.to_string()))?;
        let mut z = Self::zeros(part);
        for slot in part.used_slots() {
            z.bits.set(slot, coin.sample(rng));
        }
        Ok(z)
    }

    /// Base-graph assignment `(X, Y^v)`: block `i` reads copy `v_i`
    /// (bit `i - 1` of `v`).
    pub fn select(&self, part: &BlockPartition, v: u64) -> Assignment {
        let mut out = Assignment::zeros(part.block_of.len());
        for (e, &b) in part.block_of.iter().enumerate() {
            let slot = if b == 0 { 2 * e } else { 2 * e + (v >> (b - 1) & 1) as usize };
            out.set(e, self.bits.get(slot));
        }
        out
    }
}

fn check_on_partition(f: &PBFunction, part: &BlockPartition) -> Result<()> {
    if f.ground() != Some(part.ground()) {
        return Err(Error::GroundMismatch(format!(
            "function on {:?} vertices, partition of K_{}",
            f.ground().map(|g| g.vertices()),
            part.n
        )));
    }
    Ok(())
}

/// `alpha(f)(X, Y) = sum_{v in {0,1}^k} (-1)^{|v|} f(X, Y^v)`.
pub fn alpha_pointwise(f: &PBFunction, part: &BlockPartition, z: &DoubledAssignment) -> Result<f64> {
    check_on_partition(f, part)?;
    if part.k >= 63 {
        return Err(Error::Capacity { what: "blocks", actual: part.k, limit: 62 });
    }
    let mut total = 0.0;
    for v in 0u64..1 << part.k {
        let sign = if v.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * f.eval(&z.select(part, v))?;
    }
    Ok(total)
}

/// Fourier expansion of `alpha(f)` on the doubled ground:
/// `alpha(chi_S) = chi_{S_0}(X) prod_i (chi_{S_i}(Y_i^0) - chi_{S_i}(Y_i^1))`,
/// and zero for non-rainbow `S`.
pub fn alpha_transform(f: &PBFunction, part: &BlockPartition) -> Result<PBFunction> {
    check_on_partition(f, part)?;
    let mut out = PBFunction::zero(part.doubled_slots(), f.p())?;
    for (set, c) in f.terms() {
        if !is_rainbow(set, part) {
            continue;
        }
        for v in 0u64..1 << part.k {
            let sign = if v.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            let key: EdgeSet = set
                .iter()
                .map(|e| match part.block(e) {
                    0 => 2 * e,
                    b => 2 * e + (v >> (b - 1) & 1) as usize,
                })
                .collect();
            out.add_term(key, sign * c);
        }
    }
    out.prune();
    Ok(out)
}

/// `alpha(chi_S)` on the doubled ground.
pub fn alpha_of_chi(set: &EdgeSet, part: &BlockPartition, p: f64) -> Result<PBFunction> {
    let chi = PBFunction::chi_on(part.ground(), p, set.clone())?;
    alpha_transform(&chi, part)
}

/// The function of `X` obtained from `alpha(f)` by fixing every copy
/// variable to its value in `y` (the `X` part of `y` is ignored). The
/// result is over the base edges with keys inside `B_0`; its coefficient at
/// `S` is `sum_{T rainbow} f(S u T) alpha(chi_T)(Y)`.
pub fn alpha_restricted_coeffs(f: &PBFunction, part: &BlockPartition, y: &DoubledAssignment) -> Result<PBFunction> {
    check_on_partition(f, part)?;
    let chi = chi_pair(f.p());
    let mut out = f.zero_like();
    let mut diff = vec![[1.0f64; 2]; part.k + 1];
    for (set, c) in f.terms() {
        if !is_rainbow(set, part) {
            continue;
        }
        diff.iter_mut().for_each(|d| *d = [1.0, 1.0]);
        let mut inside = EdgeSet::new();
        for e in set.iter() {
            match part.block(e) {
                0 => inside.insert(e),
                b => {
                    for (copy, d) in diff[b].iter_mut().enumerate() {
                        *d *= chi[y.bits.get(2 * e + copy) as usize];
                    }
                }
            }
        }
        let weight: f64 = diff[1..].iter().map(|[a, b]| a - b).product();
        out.add_term(inside, c * weight);
    }
    out.prune();
    Ok(out)
}

/// Fourier expansion of `alpha(chi_S) alpha(chi_T)` on the doubled ground.
pub fn alpha_product_transform(s: &EdgeSet, t: &EdgeSet, part: &BlockPartition, p: f64) -> Result<PBFunction> {
    alpha_of_chi(s, part, p)?.multiply(&alpha_of_chi(t, part, p)?)
}

/// Both sides of `|phi_f(t)|^{2^k} <= E_Y |E_X e^{it alpha(f)(X,Y)}|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingCheck {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub rhs_stderr: f64,
    /// Whether `lhs` was computed by exhaustive enumeration.
    pub lhs_exact: bool,
}

impl DecouplingCheck {
    /// `lhs <= rhs + sigmas * rhs_stderr` (plus a tiny rounding slack).
    pub fn holds(&self, sigmas: f64) -> bool {
        self.lhs <= self.rhs + sigmas * self.rhs_stderr + 1e-12
    }
}

/// Characteristic function of `f` by enumeration of all assignments.
pub fn exact_chf(f: &PBFunction, t: f64) -> Result<Complex64> {
    let m = f.vars();
    if m > MAX_TRANSFORM_VARS {
        return Err(Error::Capacity { what: "variables for exact chf", actual: m, limit: MAX_TRANSFORM_VARS });
    }
    let mut x = Assignment::zeros(m);
    let mut acc = Complex64::new(0.0, 0.0);
    for mask in 0u64..1 << m {
        x.load_mask(mask);
        acc += Complex64::from_polar(mask_weight(mask, m, f.p()), t * f.eval(&x)?);
    }
    Ok(acc)
}

/// Evaluates both sides of the decoupling inequality. The left side is
/// exact when `f` has at most 25 variables and otherwise estimated from
/// `mc.samples` graphs; the right side averages the exact inner
/// expectation over `X` across `mc.samples` draws of the copies.
pub fn decoupling_check(f: &PBFunction, part: &BlockPartition, t: f64, mc: &MCConfig) -> Result<DecouplingCheck> {
    check_on_partition(f, part)?;
    let b0: Vec<usize> = part.edges_in(0).iter().collect();
    if b0.len() > MAX_INNER_EDGES {
        return Err(Error::Capacity { what: "edges in B_0", actual: b0.len(), limit: MAX_INNER_EDGES });
    }
    let p = f.p();
    let power = 1i32 << part.k.min(30);
    let (phi, lhs_exact) = if f.vars() <= MAX_TRANSFORM_VARS {
        (exact_chf(f, t)?.norm(), true)
    } else {
        let coin = Bernoulli::new(p).map_err(|e| Error::Domain(e.to_string()))?;
        let parts = mc.run(|rng, share| {
            let mut x = Assignment::zeros(f.vars());
            let mut acc = Complex64::new(0.0, 0.0);
            for _ in 0..share {
                for i in 0..x.len() {
                    x.set(i, coin.sample(rng));
                }
                acc += Complex64::from_polar(1.0, t * f.eval(&x).expect("sizes match"));
            }
            acc
        });
        let total: Complex64 = parts.into_iter().sum();
        ((total / mc.samples as f64).norm(), false)
    };
    let lhs = phi.powi(power);

    let coin = Bernoulli::new(p).map_err(|e| Error::Domain(e.to_string()))?;
    let inner_vars = b0.len();
    let parts = mc.run(|rng, share| -> Result<(f64, f64)> {
        let mut z = DoubledAssignment::zeros(part);
        let mut x = Assignment::zeros(part.block_of.len());
        let (mut sum, mut sq) = (KahanSum::default(), KahanSum::default());
        for _ in 0..share {
            z.resample_y(part, &coin, rng);
            let g = alpha_restricted_coeffs(f, part, &z)?;
            let mut inner = Complex64::new(0.0, 0.0);
            for mask in 0u64..1 << inner_vars {
                for (i, &e) in b0.iter().enumerate() {
                    x.set(e, mask >> i & 1 == 1);
                }
                inner += Complex64::from_polar(mask_weight(mask, inner_vars, p), t * g.eval(&x)?);
            }
            let a = inner.norm();
            sum.add(a);
            sq.add(a * a);
        }
        Ok((sum.value(), sq.value()))
    });
    let (mut sum, mut sq) = (0.0, 0.0);
    for part in parts {
        let (s, q) = part?;
        sum += s;
        sq += q;
    }
    let n = mc.samples as f64;
    let rhs = sum / n;
    let rhs_stderr = if mc.samples > 1 {
        (((sq - n * rhs * rhs) / (n - 1.0)).max(0.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(DecouplingCheck { t, lhs, rhs, rhs_stderr, lhs_exact })
}

/// Colors vertices consecutively with `sizes[0]` vertices of color 0, then
/// `sizes[1]` of color 1, and so on.
pub fn vertex_colors(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
        .collect()
}

/// Partition by vertex colors: edge `{u, v}` goes to block
/// `max(color(u), color(v))`.
pub fn build_color_partition(n: usize, k: usize, sizes: &[usize]) -> Result<BlockPartition> {
    if sizes.len() != k + 1 {
        return Err(Error::InvalidPartition(format!("{} color sizes for k = {k}", sizes.len())));
    }
    if sizes.iter().sum::<usize>() != n {
        return Err(Error::InvalidPartition(format!("color sizes sum to {}, n = {n}", sizes.iter().sum::<usize>())));
    }
    if sizes[0] * (k + 1) < n {
        return Err(Error::InvalidPartition(format!("|U_0| = {} is below n/(k+1)", sizes[0])));
    }
    let colors = vertex_colors(sizes);
    let ground = EdgeGround::new(n);
    let block_of = ground.edges().map(|(u, v)| colors[u].max(colors[v])).collect();
    BlockPartition::new(ground, k, block_of)
}

/// Vertex sets `{r c, ..., r c + r - 1}` for `c < floor(n / r)`.
pub fn partition_cliques(n: usize, r: usize) -> Vec<Vec<usize>> {
    (0..n / r).map(|c| (c * r..(c + 1) * r).collect()).collect()
}

/// Partition from `floor(n/r)` disjoint `r`-cliques: within each clique the
/// lexicographically smallest edge goes to `B_0` and the remaining edges,
/// in lexicographic order, to `B_1, ..., B_{C(r,2)-1}`. All other edges are
/// in `B_0`.
pub fn build_clique_partition(n: usize, r: usize) -> Result<BlockPartition> {
    if r < 2 || n < r {
        return Err(Error::InvalidPartition(format!("need 2 <= r <= n, got n = {n}, r = {r}")));
    }
    let ground = EdgeGround::new(n);
    let mut block_of = vec![0; ground.num_edges()];
    for clique in partition_cliques(n, r) {
        let mut edges: Vec<usize> = ground.clique_edges(&clique).iter().collect();
        edges.sort_unstable();
        for (i, e) in edges.into_iter().enumerate() {
            block_of[e] = i;
        }
    }
    BlockPartition::new(ground, r * (r - 1) / 2 - 1, block_of)
}

/// All `r`-vertex sets whose clique edge set is rainbow, by exhaustive scan.
pub fn rainbow_cliques(part: &BlockPartition, r: usize) -> Vec<Vec<usize>> {
    let ground = part.ground();
    combinations(ground.vertices(), r)
        .filter(|c| is_rainbow(&ground.clique_edges(c), part))
        .collect()
}
