//! Seeded, parallel `G(n,p)` sampling and empirical characteristic
//! functions.
//!
//! Worker `w` of an [`MCConfig`] draws from a ChaCha8 generator seeded with
//! `seed` and switched to stream `w`, and handles a fixed contiguous share of
//! the samples. Results are combined in worker order, so the output depends
//! only on `(seed, samples, workers)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clique::{count_cliques_adjacency, count_cliques_rows, count_triangles_rows, CliqueSpec};
use crate::dist::{EmpiricalDistribution, LatticeSpec};
use crate::edges::{Adjacency, EdgeGround, GraphAssignment};
use crate::error::{Error, Result};
use crate::pbf::check_probability;

/// Monte Carlo run parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MCConfig {
    pub seed: u64,
    pub samples: usize,
    pub workers: usize,
}

impl MCConfig {
    pub fn new(seed: u64, samples: usize, workers: usize) -> Result<Self> {
        if samples == 0 || workers == 0 {
            return Err(Error::Domain("samples and workers must be positive".into()));
        }
        Ok(Self { seed, samples, workers })
    }

    /// Independent generator for worker `w`.
    pub fn stream(&self, worker: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(worker as u64);
        rng
    }

    /// Number of samples handled by worker `w`.
    pub fn share(&self, worker: usize) -> usize {
        let base = self.samples / self.workers;
        base + usize::from(worker < self.samples % self.workers)
    }

    /// Runs `job(rng, share)` once per worker in parallel and returns the
    /// results in worker order.
    pub fn run<T: Send>(&self, job: impl Fn(&mut ChaCha8Rng, usize) -> T + Sync) -> Vec<T> {
        (0..self.workers)
            .into_par_iter()
            .map(|w| job(&mut self.stream(w), self.share(w)))
            .collect()
    }
}

/// Draws graphs from `G(n,p)`, one Bernoulli draw per edge in canonical
/// edge order.
#[derive(Clone, Debug)]
pub struct GnpSampler {
    ground: EdgeGround,
    coin: Bernoulli,
    ends: Vec<(usize, usize)>,
}

impl GnpSampler {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        check_probability(p)?;
        let ground = EdgeGround::new(n);
        let coin = Bernoulli::new(p).map_err(|e| Error::Domain(e.to_string()))?;
        Ok(Self {
            ground,
            coin,
            ends: ground.edges().collect(),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GraphAssignment {
        let mut g = GraphAssignment::empty(self.ground);
        for e in 0..self.ends.len() {
            if self.coin.sample(rng) {
                g.bits_mut().set(e, true);
            }
        }
        g
    }

    /// Same draws as [`sample`](Self::sample), written as adjacency rows
    /// (requires `n <= 64`).
    pub fn sample_rows<R: Rng + ?Sized>(&self, rng: &mut R, rows: &mut [u64]) {
        debug_assert!(rows.len() == self.ground.vertices() && rows.len() <= 64);
        rows.iter_mut().for_each(|r| *r = 0);
        for &(i, j) in &self.ends {
            if self.coin.sample(rng) {
                rows[i] |= 1 << j;
                rows[j] |= 1 << i;
            }
        }
    }
}

/// One graph from `G(n,p)` drawn from `rng`.
pub fn sample_gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<GraphAssignment> {
    Ok(GnpSampler::new(n, p)?.sample(rng))
}

/// Histogram of sampled clique counts.
pub fn sample_clique_counts(spec: &CliqueSpec, mc: &MCConfig) -> Result<BTreeMap<i64, u64>> {
    let sampler = GnpSampler::new(spec.n, spec.p)?;
    let n = spec.n;
    let r = spec.r;
    let parts = mc.run(|rng, share| {
        let mut hist = BTreeMap::new();
        if n <= 64 {
            let mut rows = vec![0u64; n];
            for _ in 0..share {
                sampler.sample_rows(rng, &mut rows);
                let c = if r == 3 {
                    count_triangles_rows(&rows)
                } else {
                    count_cliques_rows(&rows, r)
                };
                *hist.entry(c as i64).or_insert(0u64) += 1;
            }
        } else {
            for _ in 0..share {
                let g = sampler.sample(rng);
                let adj: Adjacency = g.adjacency();
                *hist.entry(count_cliques_adjacency(&adj, r) as i64).or_insert(0u64) += 1;
            }
        }
        hist
    });
    let mut total = BTreeMap::new();
    for part in parts {
        for (k, c) in part {
            *total.entry(k).or_insert(0) += c;
        }
    }
    Ok(total)
}

/// Monte Carlo law of `f_r` on the integer lattice.
pub fn sample_law(spec: &CliqueSpec, mc: &MCConfig) -> Result<EmpiricalDistribution> {
    EmpiricalDistribution::from_counts(LatticeSpec::integers(), &sample_clique_counts(spec, mc)?)
}

/// Compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Sample estimate of `E[e^{itX}]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChfEstimate {
    pub t: f64,
    #[serde(with = "complex_parts")]
    pub value: Complex64,
    /// `sqrt((s_cos^2 + s_sin^2) / N)` with sample variances of the cosine
    /// and sine parts; bounds the standard error of each component.
    pub stderr: f64,
    pub samples: u64,
}

mod complex_parts {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Empirical characteristic function of `values` at `t`.
pub fn empirical_chf(values: &[f64], t: f64) -> Result<ChfEstimate> {
    empirical_chf_weighted(values.iter().map(|&x| (x, 1)), t)
}

/// As [`empirical_chf`] for a sample given as `(value, multiplicity)`.
pub fn empirical_chf_weighted(points: impl IntoIterator<Item = (f64, u64)>, t: f64) -> Result<ChfEstimate> {
    let mut n = 0u64;
    let (mut c, mut s, mut cc, mut ss) = (KahanSum::default(), KahanSum::default(), KahanSum::default(), KahanSum::default());
    for (x, w) in points {
        let (sin, cos) = (t * x).sin_cos();
        let wf = w as f64;
        c.add(wf * cos);
        s.add(wf * sin);
        cc.add(wf * cos * cos);
        ss.add(wf * sin * sin);
        n += w;
    }
    if n < 2 {
        return Err(Error::Domain(format!("empirical chf needs at least 2 samples, got {n}")));
    }
    let nf = n as f64;
    let (mc, ms) = (c.value() / nf, s.value() / nf);
    let var = |sq: f64, m: f64| ((sq - nf * m * m) / (nf - 1.0)).max(0.0);
    let stderr = ((var(cc.value(), mc) + var(ss.value(), ms)) / nf).sqrt();
    Ok(ChfEstimate {
        t,
        value: Complex64::new(mc, ms),
        stderr,
        samples: n,
    })
}

/// Empirical chf of `kappa = (f_r - mu)/sigma` from a histogram of counts.
pub fn kappa_chf(counts: &BTreeMap<i64, u64>, mu: f64, sigma: f64, t: f64) -> Result<ChfEstimate> {
    empirical_chf_weighted(counts.iter().map(|(&k, &w)| ((k as f64 - mu) / sigma, w)), t)
}
