//! Real functions on the p-biased hypercube, stored by their Fourier
//! coefficients in the orthonormal basis `chi_S = prod_{e in S} chi_e`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::edges::{Assignment, EdgeGround, EdgeSet, GraphAssignment, PartialAssignment};
use crate::error::{Error, Result};

/// Coefficients with magnitude below this are dropped after arithmetic.
pub const PRUNE_TOLERANCE: f64 = 1e-14;

/// Largest number of variables accepted by the exhaustive transform.
pub const MAX_TRANSFORM_VARS: usize = 25;

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("edge probability {p} is not in (0,1)")))
    }
}

/// `chi(p, bit) = (bit - p) / sqrt(p(1-p))`.
pub fn chi_value(p: f64, bit: bool) -> Result<f64> {
    check_probability(p)?;
    Ok(chi_pair(p)[bit as usize])
}

/// `[chi(0), chi(1)]`; caller guarantees `0 < p < 1`.
pub(crate) fn chi_pair(p: f64) -> [f64; 2] {
    let s = (p * (1.0 - p)).sqrt();
    [-p / s, (1.0 - p) / s]
}

/// `gamma = (1-2p)/sqrt(p(1-p))`, from `chi_e^2 = 1 + gamma chi_e`.
pub fn gamma(p: f64) -> f64 {
    (1.0 - 2.0 * p) / (p * (1.0 - p)).sqrt()
}

/// Sparse Fourier representation over `vars` independent p-biased bits.
///
/// When the variables are the edges of `K_n` the function remembers `n`,
/// which is required for serialization and for graph-level evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct PBFunction {
    vars: usize,
    vertices: Option<usize>,
    p: f64,
    coeffs: BTreeMap<EdgeSet, f64>,
}

impl PBFunction {
    /// The zero function over `vars` plain variables.
    pub fn zero(vars: usize, p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self {
            vars,
            vertices: None,
            p,
            coeffs: BTreeMap::new(),
        })
    }

    /// The zero function over the edges of `ground`.
    pub fn zero_on(ground: EdgeGround, p: f64) -> Result<Self> {
        let mut f = Self::zero(ground.num_edges(), p)?;
        f.vertices = Some(ground.vertices());
        Ok(f)
    }

    /// Same variables and `p` as `self`, no coefficients.
    pub fn zero_like(&self) -> Self {
        Self {
            vars: self.vars,
            vertices: self.vertices,
            p: self.p,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant_on(ground: EdgeGround, p: f64, c: f64) -> Result<Self> {
        let mut f = Self::zero_on(ground, p)?;
        f.add_term(EdgeSet::new(), c);
        f.prune();
        Ok(f)
    }

    /// The basis function `chi_S` on `ground`.
    pub fn chi_on(ground: EdgeGround, p: f64, set: EdgeSet) -> Result<Self> {
        let mut f = Self::zero_on(ground, p)?;
        f.check_key(&set)?;
        f.coeffs.insert(set, 1.0);
        Ok(f)
    }

    /// The indicator monomial `x^S = prod_{e in S} (sqrt(p(1-p)) chi_e + p)`
    /// over the variables of `like`.
    pub fn indicator_monomial(like: &Self, set: &EdgeSet) -> Result<Self> {
        like.check_key(set)?;
        let p = like.p;
        let s = (p * (1.0 - p)).sqrt();
        let k = set.len() as i32;
        let mut f = like.zero_like();
        for sub in set.subsets() {
            let j = sub.len() as i32;
            f.coeffs.insert(sub, s.powi(j) * p.powi(k - j));
        }
        f.prune();
        Ok(f)
    }

    /// Builds a function from explicit coefficients.
    pub fn from_coeffs(
        vars: usize,
        vertices: Option<usize>,
        p: f64,
        coeffs: impl IntoIterator<Item = (EdgeSet, f64)>,
    ) -> Result<Self> {
        if let Some(n) = vertices {
            if EdgeGround::new(n).num_edges() != vars {
                return Err(Error::GroundMismatch(format!("K_{n} does not have {vars} edges")));
            }
        }
        let mut f = Self::zero(vars, p)?;
        f.vertices = vertices;
        for (set, c) in coeffs {
            f.check_key(&set)?;
            f.add_term(set, c);
        }
        f.prune();
        Ok(f)
    }

    fn check_key(&self, set: &EdgeSet) -> Result<()> {
        match set.max_index() {
            Some(m) if m >= self.vars => Err(Error::GroundMismatch(format!(
                "variable {m} out of range for {} variables",
                self.vars
            ))),
            _ => Ok(()),
        }
    }

    pub(crate) fn add_term(&mut self, set: EdgeSet, c: f64) {
        *self.coeffs.entry(set).or_insert(0.0) += c;
    }

    pub(crate) fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.abs() >= PRUNE_TOLERANCE);
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn ground(&self) -> Option<EdgeGround> {
        self.vertices.map(EdgeGround::new)
    }

    pub fn coeff(&self, set: &EdgeSet) -> f64 {
        self.coeffs.get(set).copied().unwrap_or(0.0)
    }

    /// Nonzero coefficients in ascending key order.
    pub fn terms(&self) -> impl Iterator<Item = (&EdgeSet, f64)> {
        self.coeffs.iter().map(|(s, &c)| (s, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|S|` with a stored coefficient; 0 for the zero function.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(EdgeSet::len).max().unwrap_or(0)
    }

    /// `E[f]`, the coefficient of the empty set.
    pub fn mean(&self) -> f64 {
        self.coeff(&EdgeSet::new())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars || self.vertices != other.vertices {
            return Err(Error::GroundMismatch(format!(
                "{} vs {} variables",
                self.vars, other.vars
            )));
        }
        if self.p != other.p {
            return Err(Error::GroundMismatch(format!("p = {} vs p = {}", self.p, other.p)));
        }
        Ok(())
    }

    /// Evaluates `sum_S f(S) chi_S(x)`.
    pub fn eval(&self, x: &Assignment) -> Result<f64> {
        if x.len() != self.vars {
            return Err(Error::GroundMismatch(format!(
                "assignment of {} values for {} variables",
                x.len(),
                self.vars
            )));
        }
        let chi = chi_pair(self.p);
        Ok(self
            .coeffs
            .iter()
            .map(|(s, c)| c * s.iter().map(|e| chi[x.get(e) as usize]).product::<f64>())
            .sum())
    }

    pub fn eval_graph(&self, g: &GraphAssignment) -> Result<f64> {
        if self.vertices != Some(g.ground().vertices()) {
            return Err(Error::GroundMismatch(format!(
                "function on {:?} vertices, graph on {}",
                self.vertices,
                g.ground().vertices()
            )));
        }
        self.eval(g.bits())
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &Self, factor: f64) -> Result<()> {
        self.check_compatible(other)?;
        for (s, c) in &other.coeffs {
            self.add_term(s.clone(), factor * c);
        }
        self.prune();
        Ok(())
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut f = self.zero_like();
        f.coeffs = self
            .coeffs
            .iter()
            .map(|(s, c)| (s.clone(), c * factor))
            .collect();
        f.prune();
        f
    }

    /// Fourier expansion of the pointwise product.
    ///
    /// `chi_S chi_T = chi_{S^T} prod_{e in S&T} (1 + gamma chi_e)`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let g = gamma(self.p);
        let mut out = self.zero_like();
        for (s, a) in &self.coeffs {
            for (t, b) in &other.coeffs {
                let base = s.symmetric_difference(t);
                let shared = s.intersection(t);
                if shared.is_empty() || g == 0.0 {
                    out.add_term(base, a * b);
                    continue;
                }
                for u in shared.subsets() {
                    let w = a * b * g.powi(u.len() as i32);
                    out.add_term(base.union(&u), w);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// `f^j` by repeated multiplication; `f^0` is the constant 1.
    pub fn power(&self, j: u32) -> Result<Self> {
        let mut acc = self.zero_like();
        acc.add_term(EdgeSet::new(), 1.0);
        for _ in 0..j {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// `f^{=k}`: the terms with `|S| = k`.
    pub fn degree_slice(&self, k: usize) -> Self {
        self.filter(|s| s.len() == k)
    }

    /// `f^{>k}`: the terms with `|S| > k`.
    pub fn tail(&self, k: usize) -> Self {
        self.filter(|s| s.len() > k)
    }

    pub fn filter(&self, keep: impl Fn(&EdgeSet) -> bool) -> Self {
        let mut f = self.zero_like();
        f.coeffs = self
            .coeffs
            .iter()
            .filter(|(s, _)| keep(s))
            .map(|(s, &c)| (s.clone(), c))
            .collect();
        f
    }

    /// `sqrt(E[f^2])`.
    pub fn norm2(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Sum of absolute Fourier coefficients.
    pub fn spectral_norm1(&self) -> f64 {
        self.coeffs.values().map(|c| c.abs()).sum()
    }

    pub fn variance(&self) -> f64 {
        self.coeffs
            .iter()
            .filter(|(s, _)| !s.is_empty())
            .map(|(_, c)| c * c)
            .sum()
    }

    /// Restriction to the variables in `keep`, with every other variable
    /// fixed by `beta`. The result lives on the same variables but only
    /// has keys inside `keep`.
    pub fn restrict(&self, keep: &EdgeSet, beta: &PartialAssignment) -> Result<Self> {
        if beta.len() != self.vars {
            return Err(Error::GroundMismatch(format!(
                "partial assignment of {} values for {} variables",
                beta.len(),
                self.vars
            )));
        }
        for i in 0..self.vars {
            if !keep.contains(i) && beta.get(i).is_none() {
                return Err(Error::IncompleteAssignment(i));
            }
        }
        let chi = chi_pair(self.p);
        let mut out = self.zero_like();
        for (key, c) in &self.coeffs {
            let inside = key.intersection(keep);
            let fixed: f64 = key
                .difference(keep)
                .iter()
                .map(|e| chi[beta.get(e).expect("checked above") as usize])
                .product();
            out.add_term(inside, c * fixed);
        }
        out.prune();
        Ok(out)
    }

    /// Serializes as `{n, p, coeffs: [{edges, value}]}`. Functions that are
    /// not over the edges of some `K_n` write `vars` in place of `n`.
    pub fn to_json(&self) -> Result<String> {
        let doc = PbfJson {
            n: self.vertices,
            vars: if self.vertices.is_none() { Some(self.vars) } else { None },
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .map(|(s, &value)| CoeffJson {
                    edges: s.iter().collect(),
                    value,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PbfJson = serde_json::from_str(text)?;
        let vars = match (doc.n, doc.vars) {
            (Some(n), _) => EdgeGround::new(n).num_edges(),
            (None, Some(v)) => v,
            (None, None) => return Err(Error::Parse("either `n` or `vars` is required".into())),
        };
        Self::from_coeffs(
            vars,
            doc.n,
            doc.p,
            doc.coeffs
                .into_iter()
                .map(|c| (EdgeSet::from_indices(c.edges), c.value)),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct PbfJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    vars: Option<usize>,
    p: f64,
    coeffs: Vec<CoeffJson>,
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    edges: Vec<usize>,
    value: f64,
}

/// Fourier coefficients of `f` over all graphs on `ground`:
/// `f(S) = sum_g P_p(g) f(g) chi_S(g)`.
pub fn fourier_transform(
    ground: EdgeGround,
    p: f64,
    f: impl Fn(&GraphAssignment) -> f64 + Sync,
) -> Result<PBFunction> {
    check_probability(p)?;
    let m = ground.num_edges();
    if m > MAX_TRANSFORM_VARS {
        return Err(Error::Capacity {
            what: "edges for exhaustive transform",
            actual: m,
            limit: MAX_TRANSFORM_VARS,
        });
    }
    let mut values = vec![0.0; 1 << m];
    const CHUNK: usize = 1 << 12;
    values
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(c, chunk)| {
            let mut g = GraphAssignment::empty(ground);
            for (k, v) in chunk.iter_mut().enumerate() {
                g.bits_mut().load_mask((c * CHUNK + k) as u64);
                *v = f(&g);
            }
        });
    let mut out = transform_dense(m, p, values)?;
    out.vertices = Some(ground.vertices());
    Ok(out)
}

/// Transform of a dense table indexed by assignment bitmask (bit `i` is
/// variable `i`).
pub fn transform_dense(vars: usize, p: f64, mut values: Vec<f64>) -> Result<PBFunction> {
    check_probability(p)?;
    if vars > MAX_TRANSFORM_VARS {
        return Err(Error::Capacity {
            what: "variables for exhaustive transform",
            actual: vars,
            limit: MAX_TRANSFORM_VARS,
        });
    }
    if values.len() != 1 << vars {
        return Err(Error::GroundMismatch(format!(
            "table of {} values for {vars} variables",
            values.len()
        )));
    }
    let chi = chi_pair(p);
    let q = 1.0 - p;
    // One variable at a time: (f|0, f|1) -> (E f, E f chi).
    for bit in 0..vars {
        let stride = 1 << bit;
        values.par_chunks_mut(2 * stride).for_each(|block| {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x0, x1) = (*a, *b);
                *a = q * x0 + p * x1;
                *b = q * chi[0] * x0 + p * chi[1] * x1;
            }
        });
    }
    let mut f = PBFunction::zero(vars, p)?;
    for (mask, c) in values.into_iter().enumerate() {
        if c.abs() >= PRUNE_TOLERANCE {
            f.coeffs.insert(
                EdgeSet::from_indices((0..vars).filter(|i| mask >> i & 1 == 1)),
                c,
            );
        }
    }
    Ok(f)
}

/// Probability of the assignment with bitmask `mask` over `vars` variables.
pub(crate) fn mask_weight(mask: u64, vars: usize, p: f64) -> f64 {
    let ones = mask.count_ones() as i32;
    p.powi(ones) * (1.0 - p).powi(vars as i32 - ones)
}
