//! Lattice-supported distributions, discrete Gaussians, distances between
//! them and Fourier inversion for lattice variables.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for deciding that a point lies on a lattice.
pub const LATTICE_TOLERANCE: f64 = 1e-9;

/// Half-width of the discrete Gaussian support, in standard deviations.
pub const GAUSSIAN_TRUNCATION_SIGMAS: f64 = 12.0;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// The lattice `b + hZ`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LatticeSpec {
    pub b: f64,
    pub h: f64,
}

impl LatticeSpec {
    pub fn new(b: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!("lattice step {h} must be positive and finite")));
        }
        Ok(Self { b, h })
    }

    /// The integers.
    pub fn integers() -> Self {
        Self { b: 0.0, h: 1.0 }
    }

    pub fn point(&self, k: i64) -> f64 {
        self.b + self.h * k as f64
    }

    /// Index `k` with `x = b + hk`, or an error if `x` is off the lattice.
    pub fn index_of(&self, x: f64) -> Result<i64> {
        let k = (x - self.b) / self.h;
        let r = k.round();
        if (k - r).abs() < LATTICE_TOLERANCE {
            Ok(r as i64)
        } else {
            Err(Error::OffLattice { x, b: self.b, h: self.h })
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.index_of(x).is_ok()
    }

    /// The image of the lattice under `x -> (x - shift) / scale`.
    pub fn affine(&self, shift: f64, scale: f64) -> Result<Self> {
        Self::new((self.b - shift) / scale, self.h / scale)
    }

    /// If `other` is the same point set, the index offset `d` with
    /// `other.point(k) = self.point(k + d)`.
    fn offset_of(&self, other: &Self) -> Result<i64> {
        if (self.h - other.h).abs() > 1e-12 * self.h {
            return Err(Error::LatticeMismatch(format!("steps {} and {}", self.h, other.h)));
        }
        self.index_of(other.b).map_err(|_| {
            Error::LatticeMismatch(format!("offsets {} and {} differ modulo {}", self.b, other.b, self.h))
        })
    }
}

/// Probability masses on lattice points, keyed by lattice index.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    lattice: LatticeSpec,
    mass: BTreeMap<i64, f64>,
}

impl EmpiricalDistribution {
    pub fn new(lattice: LatticeSpec) -> Self {
        Self {
            lattice,
            mass: BTreeMap::new(),
        }
    }

    pub fn from_masses(lattice: LatticeSpec, masses: impl IntoIterator<Item = (i64, f64)>) -> Result<Self> {
        let mut d = Self::new(lattice);
        for (k, m) in masses {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::Domain(format!("mass {m} at index {k}")));
            }
            *d.mass.entry(k).or_insert(0.0) += m;
        }
        Ok(d)
    }

    /// Monte Carlo law: mass of index `k` is `count_k / total`.
    pub fn from_counts(lattice: LatticeSpec, counts: &BTreeMap<i64, u64>) -> Result<Self> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(Error::Domain("no samples".into()));
        }
        Ok(Self {
            lattice,
            mass: counts
                .iter()
                .map(|(&k, &c)| (k, c as f64 / total as f64))
                .collect(),
        })
    }

    pub fn lattice(&self) -> LatticeSpec {
        self.lattice
    }

    /// `(x, mass)` in ascending `x`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.mass.iter().map(|(&k, &m)| (self.lattice.point(k), m))
    }

    pub fn indexed(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.mass.iter().map(|(&k, &m)| (k, m))
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass_at(&self, x: f64) -> Result<f64> {
        let k = self.lattice.index_of(x)?;
        Ok(self.mass.get(&k).copied().unwrap_or(0.0))
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.values().sum()
    }

    pub fn mean(&self) -> f64 {
        self.points().map(|(x, m)| x * m).sum::<f64>() / self.total_mass()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.points().map(|(x, m)| (x - mu).powi(2) * m).sum::<f64>() / self.total_mass()
    }

    /// Same masses viewed under `x -> (x - shift) / scale`; for a count
    /// `f` this maps the raw law to the law of `(f - mu) / sigma`.
    pub fn standardized(&self, shift: f64, scale: f64) -> Result<Self> {
        Ok(Self {
            lattice: self.lattice.affine(shift, scale)?,
            mass: self.mass.clone(),
        })
    }

    /// CSV with header `value,probability`, ascending value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,probability\n");
        for (x, m) in self.points() {
            let _ = writeln!(out, "{},{}", fmt_f64(x), fmt_f64(m));
        }
        out
    }

    pub fn from_csv(text: &str, lattice: LatticeSpec) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "value,probability" => {}
            other => return Err(Error::Parse(format!("unexpected header {other:?}"))),
        }
        let mut masses = Vec::new();
        for line in lines {
            let (v, m) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad row {line:?}")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
            };
            masses.push((lattice.index_of(parse(v)?)?, parse(m)?));
        }
        Self::from_masses(lattice, masses)
    }
}

/// `mass(x) = h / (sqrt(2 pi) sigma) exp(-(x - mu)^2 / (2 sigma^2))` on the
/// lattice points within 12 sigma of `mu`. Not renormalized.
pub fn discrete_gaussian(lattice: LatticeSpec, mu: f64, sigma: f64) -> Result<EmpiricalDistribution> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("sigma {sigma} must be positive")));
    }
    let LatticeSpec { b, h } = lattice;
    let lo = ((mu - GAUSSIAN_TRUNCATION_SIGMAS * sigma - b) / h).ceil() as i64;
    let hi = ((mu + GAUSSIAN_TRUNCATION_SIGMAS * sigma - b) / h).floor() as i64;
    let norm = h / ((2.0 * PI).sqrt() * sigma);
    let mass = (lo..=hi)
        .map(|k| {
            let z = (lattice.point(k) - mu) / sigma;
            (k, norm * (-0.5 * z * z).exp())
        })
        .collect();
    Ok(EmpiricalDistribution { lattice, mass })
}

fn aligned_differences(d1: &EmpiricalDistribution, d2: &EmpiricalDistribution) -> Result<Vec<f64>> {
    let shift = d1.lattice.offset_of(&d2.lattice)?;
    let mut diff: BTreeMap<i64, f64> = d1.mass.clone();
    for (&k, &m) in &d2.mass {
        *diff.entry(k + shift).or_insert(0.0) -= m;
    }
    Ok(diff.into_values().map(f64::abs).collect())
}

/// `sup_x |d1(x) - d2(x)|` over the union of supports.
pub fn linf_distance(d1: &EmpiricalDistribution, d2: &EmpiricalDistribution) -> Result<f64> {
    Ok(aligned_differences(d1, d2)?.into_iter().fold(0.0, f64::max))
}

/// `sum_x |d1(x) - d2(x)|` over the union of supports.
pub fn l1_distance(d1: &EmpiricalDistribution, d2: &EmpiricalDistribution) -> Result<f64> {
    Ok(aligned_differences(d1, d2)?.into_iter().sum())
}

/// `sum_x mass(x) e^{itx}`.
pub fn chf_exact_from_distribution(d: &EmpiricalDistribution, t: f64) -> Complex64 {
    d.points()
        .map(|(x, m)| Complex64::from_polar(m, t * x))
        .sum()
}

/// Outcome of a lattice inversion, including its resolution self-check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InversionReport {
    pub probability: f64,
    /// Simpson intervals used for the accepted value.
    pub intervals: usize,
    /// Change between the last two resolutions.
    pub delta: f64,
}

/// Accepted change between successive resolution doublings.
pub const INVERSION_TOLERANCE: f64 = 1e-10;
const MAX_INVERSION_INTERVALS: usize = 1 << 23;

/// `P(X = x) = (h / 2 pi) int_{-pi/h}^{pi/h} e^{-itx} chf(t) dt` by
/// composite Simpson. The starting resolution samples `e^{-itx}` at least
/// 32 times per period; it is doubled until successive values agree.
pub fn lattice_inversion(chf: impl Fn(f64) -> Complex64, lattice: LatticeSpec, x: f64) -> Result<f64> {
    lattice_inversion_report(chf, lattice, x).map(|r| r.probability)
}

pub fn lattice_inversion_report(
    chf: impl Fn(f64) -> Complex64,
    lattice: LatticeSpec,
    x: f64,
) -> Result<InversionReport> {
    lattice.index_of(x)?;
    let h = lattice.h;
    let half = PI / h;
    let integrand = |t: f64| (Complex64::from_polar(1.0, -t * x) * chf(t)).re;
    let periods = x.abs() / h;
    let mut intervals = ((32.0 * periods).ceil() as usize).max(64);
    intervals += intervals % 2;
    let mut prev = simpson(integrand, -half, half, intervals);
    loop {
        intervals *= 2;
        let next = simpson(integrand, -half, half, intervals);
        let delta = (h / (2.0 * PI) * (next - prev)).abs();
        if delta < INVERSION_TOLERANCE {
            return Ok(InversionReport {
                probability: h / (2.0 * PI) * next,
                intervals,
                delta,
            });
        }
        if intervals >= MAX_INVERSION_INTERVALS {
            return Err(Error::Quadrature { delta, points: intervals + 1 });
        }
        prev = next;
    }
}

/// Composite Simpson with an even number of intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    debug_assert!(intervals >= 2 && intervals.is_multiple_of(2));
    let step = (b - a) / intervals as f64;
    let mut sum = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + step * i as f64);
    }
    sum * step / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_membership() {
        let l = LatticeSpec::new(0.5, 0.25).unwrap();
        assert_eq!(l.index_of(1.5).unwrap(), 4);
        assert_eq!(l.index_of(-0.5).unwrap(), -4);
        assert!(l.index_of(0.6).is_err());
        assert!(LatticeSpec::new(0.0, 0.0).is_err());
        assert!(LatticeSpec::new(0.0, -1.0).is_err());
    }

    #[test]
    fn point_masses_distance() {
        let l = LatticeSpec::integers();
        let a = EmpiricalDistribution::from_masses(l, [(0, 1.0)]).unwrap();
        let b = EmpiricalDistribution::from_masses(l, [(1, 1.0)]).unwrap();
        assert_eq!(l1_distance(&a, &b).unwrap(), 2.0);
        assert_eq!(linf_distance(&a, &b).unwrap(), 1.0);
        assert_eq!(l1_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(linf_distance(&b, &b).unwrap(), 0.0);
    }

    #[test]
    fn distances_require_matching_lattices() {
        let a = EmpiricalDistribution::from_masses(LatticeSpec::integers(), [(0, 1.0)]).unwrap();
        let half = EmpiricalDistribution::from_masses(LatticeSpec::new(0.0, 0.5).unwrap(), [(0, 1.0)]).unwrap();
        let shifted = EmpiricalDistribution::from_masses(LatticeSpec::new(0.3, 1.0).unwrap(), [(0, 1.0)]).unwrap();
        assert!(matches!(l1_distance(&a, &half), Err(Error::LatticeMismatch(_))));
        assert!(matches!(linf_distance(&a, &shifted), Err(Error::LatticeMismatch(_))));
        // Same point set written with a different offset.
        let same = EmpiricalDistribution::from_masses(LatticeSpec::new(2.0, 1.0).unwrap(), [(-2, 1.0)]).unwrap();
        assert_eq!(l1_distance(&a, &same).unwrap(), 0.0);
    }

    #[test]
    fn discrete_gaussian_mass_and_symmetry() {
        for sigma in [10.0, 25.0, 100.0] {
            let d = discrete_gaussian(LatticeSpec::integers(), 3.0, sigma).unwrap();
            assert!((d.total_mass() - 1.0).abs() < 1e-6, "sigma {sigma}");
            for delta in 1..20 {
                let a = d.mass_at(3.0 + delta as f64).unwrap();
                let b = d.mass_at(3.0 - delta as f64).unwrap();
                assert!((a - b).abs() < 1e-17);
            }
        }
        let wide = discrete_gaussian(LatticeSpec::integers(), 0.0, 1e3).unwrap();
        let density = 1.0 / ((2.0 * PI).sqrt() * 1e3);
        assert!((wide.mass_at(0.0).unwrap() - density).abs() < 1e-15);
        assert!(discrete_gaussian(LatticeSpec::integers(), 0.0, 0.0).is_err());
    }

    #[test]
    fn chf_of_distribution() {
        let d = EmpiricalDistribution::from_masses(LatticeSpec::integers(), [(0, 0.25), (3, 0.5), (7, 0.25)]).unwrap();
        assert_eq!(chf_exact_from_distribution(&d, 0.0), Complex64::new(1.0, 0.0));
        for t in [-2.0, 0.3, 1.7, 9.0] {
            let a = chf_exact_from_distribution(&d, t);
            let b = chf_exact_from_distribution(&d, -t);
            assert!((a - b.conj()).norm() < 1e-15);
            assert!(a.norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn inversion_of_point_mass_and_bernoulli() {
        let l = LatticeSpec::new(0.25, 1.0).unwrap();
        let c = 0.25;
        let chf = |t: f64| Complex64::from_polar(1.0, t * c);
        assert!((lattice_inversion(chf, l, c).unwrap() - 1.0).abs() < 1e-8);
        assert!(lattice_inversion(chf, l, c + 1.0).unwrap().abs() < 1e-8);
        assert!(lattice_inversion(chf, l, c - 1.0).unwrap().abs() < 1e-8);
        assert!(matches!(lattice_inversion(chf, l, 0.3), Err(Error::OffLattice { .. })));

        let p = 0.3;
        let bern = |t: f64| Complex64::new(1.0 - p, 0.0) + Complex64::from_polar(p, t);
        let z = LatticeSpec::integers();
        assert!((lattice_inversion(bern, z, 0.0).unwrap() - 0.7).abs() < 1e-8);
        assert!((lattice_inversion(bern, z, 1.0).unwrap() - 0.3).abs() < 1e-8);
        assert!(lattice_inversion(bern, z, 2.0).unwrap().abs() < 1e-8);
    }

    #[test]
    fn csv_round_trip() {
        let l = LatticeSpec::integers();
        let d = EmpiricalDistribution::from_masses(l, [(0, 0.875), (1, 0.125)]).unwrap();
        let text = d.to_csv();
        assert!(text.starts_with("value,probability\n0.0000000000000000e0,8.7500000000000000e-1\n"));
        assert_eq!(EmpiricalDistribution::from_csv(&text, l).unwrap(), d);
        assert!(EmpiricalDistribution::from_csv("x,y\n", l).is_err());
    }

    #[test]
    fn standardized_keeps_masses() {
        let d = EmpiricalDistribution::from_masses(LatticeSpec::integers(), [(0, 0.5), (2, 0.5)]).unwrap();
        let s = d.standardized(1.0, 1.0).unwrap();
        assert!((s.mean()).abs() < 1e-15);
        assert!((s.variance() - 1.0).abs() < 1e-15);
        assert_eq!(s.mass_at(-1.0).unwrap(), 0.5);
    }
}
