//! Edge indexing for `K_n`, edge sets and 0/1 assignments.
//!
//! Edges `{i, j}` with `0 <= i < j < n` are numbered lexicographically on
//! `(i, j)`, so `(0,1) -> 0`, `(0,2) -> 1`, ..., `(n-2,n-1) -> C(n,2)-1`.

use std::fmt;

use crate::error::{Error, Result};

/// Vertex set `{0..n}` together with the canonical edge numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeGround {
    n: usize,
}

impl EdgeGround {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    /// Index of edge `{i, j}`; argument order does not matter.
    pub fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(i != j && j < self.n, "edge ({i},{j}) invalid for n={}", self.n);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    pub fn try_index(&self, i: usize, j: usize) -> Result<usize> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::Domain(format!("({i},{j}) is not an edge of K_{}", self.n)));
        }
        Ok(self.index(i, j))
    }

    /// Endpoints `(i, j)` with `i < j` of the edge with the given index.
    pub fn endpoints(&self, index: usize) -> (usize, usize) {
        debug_assert!(index < self.num_edges());
        let mut rest = index;
        let mut i = 0;
        loop {
            let row = self.n - i - 1;
            if rest < row {
                return (i, i + 1 + rest);
            }
            rest -= row;
            i += 1;
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j)))
    }

    pub fn full_set(&self) -> EdgeSet {
        EdgeSet::from_indices(0..self.num_edges())
    }

    /// Edges of the complete graph on `vertices`.
    pub fn clique_edges(&self, vertices: &[usize]) -> EdgeSet {
        let mut set = EdgeSet::new();
        for (a, &u) in vertices.iter().enumerate() {
            for &v in &vertices[a + 1..] {
                set.insert(self.index(u, v));
            }
        }
        set
    }

    /// Vertices incident to an edge of `set`, ascending.
    pub fn support_vertices(&self, set: &EdgeSet) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        for e in set.iter() {
            let (i, j) = self.endpoints(e);
            seen[i] = true;
            seen[j] = true;
        }
        seen.iter()
            .enumerate()
            .filter_map(|(v, &s)| s.then_some(v))
            .collect()
    }
}

/// Set of variable (edge) indices stored as a bitset.
///
/// Trailing zero words are never stored, so structurally equal sets compare
/// equal and order deterministically.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeSet {
    words: Vec<u64>,
}

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(index: usize) -> Self {
        let mut s = Self::new();
        s.insert(index);
        s
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::new();
        for i in indices {
            s.insert(i);
        }
        s
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, index: usize) {
        let w = index / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (index % 64);
    }

    pub fn remove(&mut self, index: usize) {
        if let Some(word) = self.words.get_mut(index / 64) {
            *word &= !(1 << (index % 64));
            self.trim();
        }
    }

    pub fn contains(&self, index: usize) -> bool {
        self.words
            .get(index / 64)
            .is_some_and(|w| w >> (index % 64) & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Largest member, if any.
    pub fn max_index(&self) -> Option<usize> {
        let w = self.words.len().checked_sub(1)?;
        Some(w * 64 + 63 - self.words[w].leading_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }

    fn zip_with(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        let len = self.words.len().max(other.words.len());
        let words = (0..len)
            .map(|i| {
                op(
                    self.words.get(i).copied().unwrap_or(0),
                    other.words.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        let mut s = Self { words };
        s.trim();
        s
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, &w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == 0)
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(&self) -> impl Iterator<Item = EdgeSet> + '_ {
        let members: Vec<usize> = self.iter().collect();
        assert!(members.len() < 64, "subset enumeration of {} elements", members.len());
        (0u64..1 << members.len()).map(move |mask| {
            EdgeSet::from_indices(
                members
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &e)| e),
            )
        })
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_indices(iter)
    }
}

/// A 0/1 value for each of `len` variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    words: Vec<u64>,
    len: usize,
}

impl Assignment {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut a = Self::zeros(len);
        for i in 0..len {
            a.set(i, true);
        }
        a
    }

    /// Low `len` bits of `mask`, bit `i` is variable `i`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut a = Self::zeros(len);
        if len > 0 {
            a.words[0] = if len == 64 { mask } else { mask & ((1 << len) - 1) };
        }
        a
    }

    /// Overwrites variables `0..len` (len <= 64) from the bits of `mask`.
    pub fn load_mask(&mut self, mask: u64) {
        debug_assert!(self.len <= 64);
        if let Some(w) = self.words.first_mut() {
            *w = if self.len == 64 { mask } else { mask & ((1 << self.len) - 1) };
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut a = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            a.set(i, b);
        }
        a
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The set of variables with value 1.
    pub fn ones_set(&self) -> EdgeSet {
        EdgeSet::from_indices((0..self.len).filter(|&i| self.get(i)))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "Assignment({s})")
    }
}

/// A graph on the vertices of `ground`: one 0/1 value per edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphAssignment {
    ground: EdgeGround,
    bits: Assignment,
}

impl GraphAssignment {
    pub fn empty(ground: EdgeGround) -> Self {
        Self {
            ground,
            bits: Assignment::zeros(ground.num_edges()),
        }
    }

    pub fn complete(ground: EdgeGround) -> Self {
        Self {
            ground,
            bits: Assignment::ones(ground.num_edges()),
        }
    }

    pub fn from_assignment(ground: EdgeGround, bits: Assignment) -> Result<Self> {
        if bits.len() != ground.num_edges() {
            return Err(Error::GroundMismatch(format!(
                "assignment has {} values, K_{} has {} edges",
                bits.len(),
                ground.vertices(),
                ground.num_edges()
            )));
        }
        Ok(Self { ground, bits })
    }

    pub fn from_edges(ground: EdgeGround, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(ground);
        for &(i, j) in edges {
            let e = ground.try_index(i, j)?;
            g.bits.set(e, true);
        }
        Ok(g)
    }

    pub fn ground(&self) -> EdgeGround {
        self.ground
    }

    pub fn bits(&self) -> &Assignment {
        &self.bits
    }

    pub fn bits_mut(&mut self) -> &mut Assignment {
        &mut self.bits
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits.get(self.ground.index(i, j))
    }

    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        let e = self.ground.index(i, j);
        self.bits.set(e, present);
    }

    pub fn edge_count(&self) -> usize {
        self.bits.count_ones()
    }

    /// Neighbourhood bitsets, one row of `ceil(n/64)` words per vertex.
    pub fn adjacency(&self) -> Adjacency {
        let n = self.ground.vertices();
        let mut adj = Adjacency::new(n);
        for e in 0..self.ground.num_edges() {
            if self.bits.get(e) {
                let (i, j) = self.ground.endpoints(e);
                adj.add_edge(i, j);
            }
        }
        adj
    }
}

/// Dense adjacency bitsets.
#[derive(Clone, Debug)]
pub struct Adjacency {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
}

impl Adjacency {
    pub fn new(n: usize) -> Self {
        let stride = n.div_ceil(64).max(1);
        Self {
            n,
            stride,
            rows: vec![0; n * stride],
        }
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.rows[i * self.stride + j / 64] |= 1 << (j % 64);
        self.rows[j * self.stride + i / 64] |= 1 << (i % 64);
    }

    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.stride..(v + 1) * self.stride]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.row(i)[j / 64] >> (j % 64) & 1 == 1
    }
}

/// Values for the edges outside a kept set `H`; `None` for edges in `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialAssignment {
    values: Vec<Option<bool>>,
}

impl PartialAssignment {
    pub fn new(values: Vec<Option<bool>>) -> Self {
        Self { values }
    }

    /// Takes the values of `full` on every variable outside `keep`.
    pub fn outside(keep: &EdgeSet, full: &Assignment) -> Self {
        Self {
            values: (0..full.len())
                .map(|i| (!keep.contains(i)).then(|| full.get(i)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.values.get(i).copied().flatten()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_index_round_trips() {
        for n in 2..12 {
            let g = EdgeGround::new(n);
            let mut expected = 0;
            for (i, j) in g.edges() {
                assert_eq!(g.index(i, j), expected);
                assert_eq!(g.index(j, i), expected);
                assert_eq!(g.endpoints(expected), (i, j));
                expected += 1;
            }
            assert_eq!(expected, g.num_edges());
        }
    }

    #[test]
    fn support_of_small_sets() {
        let g = EdgeGround::new(5);
        assert!(g.support_vertices(&EdgeSet::new()).is_empty());
        assert_eq!(g.support_vertices(&EdgeSet::singleton(g.index(1, 2))), vec![1, 2]);
        let tri = g.clique_edges(&[1, 2, 3]);
        assert_eq!(tri.len(), 3);
        assert_eq!(g.support_vertices(&tri), vec![1, 2, 3]);
    }

    #[test]
    fn edge_set_ops_are_canonical() {
        let a = EdgeSet::from_indices([1, 70, 3]);
        let b = EdgeSet::from_indices([70]);
        let d = a.difference(&b);
        assert_eq!(d, EdgeSet::from_indices([1, 3]));
        assert_eq!(d.max_index(), Some(3));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![1, 3, 70]);
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.symmetric_difference(&a), EdgeSet::new());
        let mut c = b.clone();
        c.remove(70);
        assert!(c.is_empty());
        assert_eq!(EdgeSet::from_indices([0, 2]).subsets().count(), 4);
    }

    #[test]
    fn try_index_rejects_loops() {
        let g = EdgeGround::new(4);
        assert!(g.try_index(2, 2).is_err());
        assert!(g.try_index(1, 4).is_err());
    }
}
