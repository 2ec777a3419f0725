//! Explicit-constant inequalities: Bernoulli characteristic function
//! bounds, a Berry-Esseen estimate, hypercontractive tail and moment
//! bounds, and the four-term bound on `|phi_{X+Y}(t) - phi_X(t)|`.
//!
//! Every evaluator checks its validity region and returns
//! [`Error::Precondition`] outside it.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clique::binomial;
use crate::error::{Error, Result};
use crate::pbf::check_probability;

/// Which two-point variable a Bernoulli bound refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BernoulliVariant {
    /// `+1` with probability `p`, `-1` otherwise.
    Sign,
    /// The 0/1 indicator `x_e`.
    Indicator,
    /// The normalized `chi_e`.
    Chi,
}

impl BernoulliVariant {
    pub const ALL: [BernoulliVariant; 3] = [Self::Sign, Self::Indicator, Self::Chi];

    /// Open range `|t| < limit` on which the bound holds.
    pub fn limit(self, p: f64) -> f64 {
        match self {
            Self::Sign => PI / 2.0,
            Self::Indicator => PI,
            Self::Chi => (p * (1.0 - p)).sqrt() * PI,
        }
    }
}

/// Upper bound on `|E e^{itV}|` for the chosen two-point variable `V`.
///
/// The indicator bound is `1 - 2p(1-p)t^2/pi^2`, obtained by rescaling the
/// sign bound; the sharper `4p(1-p)` constant fails for `p != 1/2` near
/// `|t| = pi`.
pub fn bernoulli_chf_bound(t: f64, p: f64, variant: BernoulliVariant) -> Result<f64> {
    check_probability(p)?;
    let limit = variant.limit(p);
    if t != 0.0 && t.abs() >= limit {
        return Err(Error::Precondition(format!("|t| = {} outside [0, {limit})", t.abs())));
    }
    let q = p * (1.0 - p);
    let t2 = t * t / (PI * PI);
    Ok(match variant {
        BernoulliVariant::Sign => 1.0 - 8.0 * q * t2,
        BernoulliVariant::Indicator => 1.0 - 2.0 * q * t2,
        BernoulliVariant::Chi => 1.0 - 2.0 * t2,
    })
}

/// Exact `|E e^{itV}|` from the two-point law.
pub fn bernoulli_chf_exact(t: f64, p: f64, variant: BernoulliVariant) -> f64 {
    let (lo, hi) = match variant {
        BernoulliVariant::Sign => (-1.0, 1.0),
        BernoulliVariant::Indicator => (0.0, 1.0),
        BernoulliVariant::Chi => {
            let s = (p * (1.0 - p)).sqrt();
            (-p / s, (1.0 - p) / s)
        }
    };
    (Complex64::from_polar(1.0 - p, t * lo) + Complex64::from_polar(p, t * hi)).norm()
}

/// Normalized edge sum `X = sum_e chi_e / sqrt(C(n,2))` compared with the
/// standard Gaussian at frequency `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerryEsseen {
    /// Lyapunov ratio `L_n`.
    pub lyapunov: f64,
    /// `16 L_n |t|^3 e^{-t^2/3}`.
    pub bound: f64,
    /// `|E e^{itX} - e^{-t^2/2}|`, computed in closed form.
    pub exact_gap: f64,
}

/// `L_n = (p^2 + (1-p)^2) / sqrt(C(n,2) p (1-p))`.
pub fn lyapunov_ratio(n: usize, p: f64) -> f64 {
    (p * p + (1.0 - p) * (1.0 - p)) / (binomial(n, 2) * p * (1.0 - p)).sqrt()
}

/// Berry-Esseen estimate for the normalized edge sum, valid for
/// `|t| <= 1/(4 L_n)`.
pub fn berry_esseen_gap(n: usize, p: f64, t: f64) -> Result<BerryEsseen> {
    check_probability(p)?;
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2, got {n}")));
    }
    let lyapunov = lyapunov_ratio(n, p);
    if t.abs() > 1.0 / (4.0 * lyapunov) {
        return Err(Error::Precondition(format!(
            "|t| = {} exceeds 1/(4 L_n) = {}",
            t.abs(),
            1.0 / (4.0 * lyapunov)
        )));
    }
    let edges = n * (n - 1) / 2;
    let q = 1.0 / (edges as f64).sqrt();
    let s = (p * (1.0 - p)).sqrt();
    let u = t * q;
    let single = Complex64::from_polar(1.0 - p, -u * p / s) + Complex64::from_polar(p, u * (1.0 - p) / s);
    let phi = single.powu(edges as u32);
    Ok(BerryEsseen {
        lyapunov,
        bound: 16.0 * lyapunov * t.abs().powi(3) * (-t * t / 3.0).exp(),
        exact_gap: (phi - (-t * t / 2.0).exp()).norm(),
    })
}

/// Degree and bias for the hypercontractive inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypParams {
    pub d: u32,
    /// `min(p, 1 - p)`.
    pub lambda: f64,
}

impl HypParams {
    pub fn new(d: u32, lambda: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("degree must be at least 1".into()));
        }
        if !(lambda > 0.0 && lambda <= 0.5) {
            return Err(Error::Domain(format!("lambda = {lambda} must lie in (0, 1/2]")));
        }
        Ok(Self { d, lambda })
    }

    /// Smallest `t` for which the tail bound applies, `(2e/lambda)^{d/2}`.
    pub fn tail_threshold(&self) -> f64 {
        (2.0 * E / self.lambda).powf(self.d as f64 / 2.0)
    }
}

/// `P(|f| >= threshold) <= probability` for `f` of degree at most `d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    /// `t * ||f||_2`.
    pub threshold: f64,
    pub probability: f64,
}

/// `P(|f| >= t ||f||_2) <= lambda^d exp(-(d/2e) lambda t^{2/d})` for
/// `t >= (2e/lambda)^{d/2}`.
pub fn hyperconc_tail(hp: HypParams, norm2: f64, t: f64) -> Result<TailBound> {
    if norm2 < 0.0 {
        return Err(Error::Domain(format!("negative norm {norm2}")));
    }
    let min_t = hp.tail_threshold();
    if t < min_t {
        return Err(Error::Precondition(format!("t = {t} below (2e/lambda)^(d/2) = {min_t}")));
    }
    let d = hp.d as f64;
    Ok(TailBound {
        threshold: t * norm2,
        probability: hp.lambda.powf(d) * (-(d / (2.0 * E)) * hp.lambda * t.powf(2.0 / d)).exp(),
    })
}

/// `E|f|^{2q} <= (2q-1)^{dq} lambda^{d(1-q)} ||f||_2^{2q}` for `q >= 1`.
pub fn hyperconc_moment(hp: HypParams, norm2: f64, q: f64) -> Result<f64> {
    if norm2 < 0.0 {
        return Err(Error::Domain(format!("negative norm {norm2}")));
    }
    if q.is_nan() || q < 1.0 {
        return Err(Error::Precondition(format!("moment order q = {q} must be at least 1")));
    }
    let d = hp.d as f64;
    Ok((2.0 * q - 1.0).powf(d * q) * hp.lambda.powf(d * (1.0 - q)) * norm2.powf(2.0 * q))
}

/// Inputs of [`mainchf_bound`] for `X = sum a_i chi_i` and a degree-`d`
/// polynomial `Y` without linear terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    /// Taylor order `l >= 1`.
    pub ell: u32,
    /// Degree of `Y`.
    pub d: u32,
    pub t: f64,
    /// `sum a_i^2`.
    pub mass: f64,
    /// `max a_i^2`.
    pub delta: f64,
    /// `||Y||_2`.
    pub eta: f64,
    /// Spectral 1-norm of `Y`.
    pub spectral1: f64,
    pub lambda: f64,
}

impl BoundParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(ell: u32, d: u32, t: f64, mass: f64, delta: f64, eta: f64, spectral1: f64, lambda: f64) -> Result<Self> {
        if ell == 0 || d == 0 {
            return Err(Error::Domain("ell and d must be at least 1".into()));
        }
        if [mass, delta, eta, spectral1].iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::Domain("mass, delta, eta and spectral1 must be nonnegative".into()));
        }
        if !(lambda > 0.0 && lambda <= 0.5) {
            return Err(Error::Domain(format!("lambda = {lambda} must lie in (0, 1/2]")));
        }
        Ok(Self { ell, d, t, mass, delta, eta, spectral1, lambda })
    }

    /// `exp(-2 t^2 (T - delta d l) / pi^2)`.
    pub fn epsilon(&self) -> f64 {
        let slack = self.mass - self.delta * (self.d * self.ell) as f64;
        (-2.0 * self.t * self.t * slack / (PI * PI)).exp()
    }

    /// `(1 + |1-2p|/sqrt(p(1-p))) sqrt((1-lambda)/lambda)`.
    pub fn c_p(&self) -> f64 {
        let l = self.lambda;
        (1.0 + (1.0 - 2.0 * l) / (l * (1.0 - l)).sqrt()) * ((1.0 - l) / l).sqrt()
    }

    /// Supremum of admissible `|t|`.
    pub fn t_limit(&self) -> f64 {
        let l = self.lambda;
        let a = if self.delta > 0.0 {
            (l * (1.0 - l)).sqrt() * PI / self.delta.sqrt()
        } else {
            f64::INFINITY
        };
        let b = if self.eta > 0.0 {
            (2.0 * E / l).powf(self.ell as f64 / 2.0) / self.eta
        } else {
            f64::INFINITY
        };
        a.min(b)
    }
}

/// The four terms of [`mainchf_bound`], in order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainChfTerms {
    pub taylor_main: f64,
    pub taylor_remainder: f64,
    pub tail: f64,
    pub tail_cross: f64,
}

impl MainChfTerms {
    pub fn total(&self) -> f64 {
        self.taylor_main + self.taylor_remainder + self.tail + self.tail_cross
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Terms of the bound on `|phi_{X+Y}(t) - phi_X(t)|`, with
/// `s = |t eta|`:
///
/// - `l eps (1 + |t C_p^d spectral1|^l)`
/// - `s^{l+1}/(l+1)! * l^{d(l+1)/2} lambda^{d(1-l)/2}`
/// - `lambda^d exp(-(d lambda/2e) s^{-2/d})`
/// - `(l+1) s^{(l+1)/2} l^{d(l+1)/4} lambda^{d(3-l)/4} exp(-(d lambda/4e) s^{-2/d})`
///
/// The last term is the Cauchy-Schwarz product of the tail probability and
/// the moment bound. `s = 0` gives zero for every term containing `s`.
pub fn mainchf_terms(bp: &BoundParams) -> Result<MainChfTerms> {
    let limit = bp.t_limit();
    if bp.t.abs() >= limit {
        return Err(Error::Precondition(format!("|t| = {} outside [0, {limit})", bp.t.abs())));
    }
    let (l, d, lam) = (bp.ell as f64, bp.d as f64, bp.lambda);
    let s = (bp.t * bp.eta).abs();
    let scaled = (bp.t * bp.c_p().powf(d) * bp.spectral1).abs();
    let taylor_main = l * bp.epsilon() * (1.0 + scaled.powf(l));
    if s == 0.0 {
        return Ok(MainChfTerms { taylor_main, taylor_remainder: 0.0, tail: 0.0, tail_cross: 0.0 });
    }
    let decay = s.powf(-2.0 / d);
    Ok(MainChfTerms {
        taylor_main,
        taylor_remainder: s.powf(l + 1.0) / factorial(bp.ell + 1) * l.powf(d * (l + 1.0) / 2.0) * lam.powf(d * (1.0 - l) / 2.0),
        tail: lam.powf(d) * (-(d * lam / (2.0 * E)) * decay).exp(),
        tail_cross: (l + 1.0)
            * s.powf((l + 1.0) / 2.0)
            * l.powf(d * (l + 1.0) / 4.0)
            * lam.powf(d * (3.0 - l) / 4.0)
            * (-(d * lam / (4.0 * E)) * decay).exp(),
    })
}

/// Upper bound on `|phi_{X+Y}(t) - phi_X(t)|`. The caller is responsible
/// for `Y` having no degree-1 terms.
pub fn mainchf_bound(bp: &BoundParams) -> Result<f64> {
    Ok(mainchf_terms(bp)?.total())
}
