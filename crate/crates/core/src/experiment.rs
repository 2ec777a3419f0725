//! Seeded experiments behind the `cliquellt` subcommands.
//!
//! Each command returns a [`Report`]: a numeric table, named summary values
//! and pass/fail checks with margins (positive margin means the check holds
//! with room to spare). Rendered output starts with `#` lines carrying the
//! library version and the full configuration.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    bernoulli_chf_bound, bernoulli_chf_exact, berry_esseen_gap, hyperconc_moment, hyperconc_tail, mainchf_bound,
    BernoulliVariant, BoundParams, HypParams,
};
use crate::clique::{clique_function, exact_distribution, kappa_function, mean, moments, CliqueSpec, MAX_EXACT_EDGES};
use crate::decoupling::{build_color_partition, decoupling_check, exact_chf};
use crate::dist::{
    chf_exact_from_distribution, discrete_gaussian, fmt_f64, l1_distance, lattice_inversion, linf_distance,
    EmpiricalDistribution, LatticeSpec,
};
use crate::edges::{Assignment, EdgeGround, EdgeSet};
use crate::error::{Error, Result};
use crate::mc::{kappa_chf, sample_clique_counts, sample_law, GnpSampler, MCConfig};
use crate::pbf::{mask_weight, PBFunction};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Everything a run depends on. Embedded in every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: CliqueSpec,
    pub mc: MCConfig,
    pub t_grid: Vec<f64>,
    /// Values of `n` for the distance sweep.
    pub sweep: Vec<usize>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(spec: CliqueSpec, mc: MCConfig) -> Self {
        Self {
            spec,
            mc,
            t_grid: vec![0.0, 0.5, 1.0, 2.0],
            sweep: vec![5, 6, 7],
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
}

impl Check {
    /// Passes iff `margin >= 0`.
    pub fn margin(name: impl Into<String>, margin: f64) -> Self {
        Self {
            name: name.into(),
            passed: margin >= 0.0,
            margin,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub table: Table,
    pub summary: Vec<(String, f64)>,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(command: &str, table: Table) -> Self {
        Self {
            command: command.into(),
            table,
            summary: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn note(&mut self, key: &str, value: f64) {
        self.summary.push((key.into(), value));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn render(&self, config: &ExperimentConfig) -> Result<String> {
        match config.format {
            OutputFormat::Csv => self.to_csv(config),
            OutputFormat::Json => self.to_json(config),
        }
    }

    /// Header comments, then the table. A report without table columns
    /// writes its checks as `check,passed,margin` instead.
    pub fn to_csv(&self, config: &ExperimentConfig) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "# clique-llt {VERSION} {}", self.command).unwrap();
        writeln!(out, "# config {}", serde_json::to_string(config)?).unwrap();
        for (k, v) in &self.summary {
            writeln!(out, "# {k} = {}", fmt_f64(*v)).unwrap();
        }
        if self.table.columns.is_empty() {
            out.push_str("check,passed,margin\n");
            for c in &self.checks {
                writeln!(out, "{},{},{}", c.name, c.passed, fmt_f64(c.margin)).unwrap();
            }
            return Ok(out);
        }
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            writeln!(out, "# check {} {status} margin = {}", c.name, fmt_f64(c.margin)).unwrap();
        }
        out.push_str(&self.table.columns.join(","));
        out.push('\n');
        for row in &self.table.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn to_json(&self, config: &ExperimentConfig) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            version: &'a str,
            config: &'a ExperimentConfig,
            #[serde(flatten)]
            report: &'a Report,
            passed: bool,
        }
        let mut text = serde_json::to_string_pretty(&Doc {
            version: VERSION,
            config,
            report: self,
            passed: self.passed(),
        })?;
        text.push('\n');
        Ok(text)
    }
}

fn relative_margin(a: f64, b: f64, tol: f64) -> f64 {
    tol * a.abs().max(1.0) - (a - b).abs()
}

/// Closed-form moments and Fourier weights, cross-checked by enumeration
/// when `C(n,2) <= 21` and by Monte Carlo otherwise.
pub fn cmd_moments(config: &ExperimentConfig) -> Result<Report> {
    let spec = &config.spec;
    let m = moments(spec)?;
    let mut table = Table::new(&["mu", "sigma2", "weight_deg1", "weight_tail"]);
    table.push(vec![m.mu, m.sigma2, m.weight_deg1, m.weight_tail]);
    let mut report = Report::new("moments", table);
    if spec.ground().num_edges() <= MAX_EXACT_EDGES {
        let law = exact_distribution(spec)?;
        report.note("enumerated_mu", law.mean());
        report.note("enumerated_sigma2", law.variance());
        report.checks.push(Check::margin("mu_matches_enumeration", relative_margin(m.mu, law.mean(), 1e-9)));
        report
            .checks
            .push(Check::margin("sigma2_matches_enumeration", relative_margin(m.sigma2, law.variance(), 1e-9)));
    } else {
        let law = sample_law(spec, &config.mc)?;
        let se = (law.variance() / config.mc.samples as f64).sqrt();
        report.note("sampled_mu", law.mean());
        report.note("sampled_mu_stderr", se);
        report.checks.push(Check::margin("mu_within_4se_of_sample", 4.0 * se - (law.mean() - m.mu).abs()));
    }
    report.checks.push(Check::margin("weights_sum_to_one", 1e-9 - (m.weight_deg1 + m.weight_tail - 1.0).abs()));
    Ok(report)
}

/// Distances between a law on the integers and the discrete Gaussian with
/// the given moments.
pub fn gaussian_distances(law: &EmpiricalDistribution, mu: f64, sigma: f64) -> Result<(f64, f64)> {
    let gauss = discrete_gaussian(law.lattice(), mu, sigma)?;
    Ok((linf_distance(law, &gauss)?, l1_distance(law, &gauss)?))
}

/// Exact law of `f_r`, its distances to the discrete Gaussian, and a
/// round trip through the characteristic function.
pub fn cmd_exact_dist(config: &ExperimentConfig) -> Result<Report> {
    let law = exact_distribution(&config.spec)?;
    let (mu, sigma) = (law.mean(), law.variance().sqrt());
    let (linf, l1) = gaussian_distances(&law, mu, sigma)?;
    let mut table = Table::new(&["value", "probability"]);
    for (x, m) in law.points() {
        table.push(vec![x, m]);
    }
    let mut report = Report::new("exact-dist", table);
    report.note("total_mass", law.total_mass());
    report.note("mu", mu);
    report.note("sigma", sigma);
    report.note("linf", linf);
    report.note("l1", l1);
    report.note("sigma_linf", sigma * linf);
    report.note("gaussian_mass", discrete_gaussian(law.lattice(), mu, sigma)?.total_mass());
    report.checks.push(Check::margin("mass_sums_to_one", 1e-10 - (law.total_mass() - 1.0).abs()));
    let mut worst: f64 = 0.0;
    for (x, m) in law.points() {
        let back = lattice_inversion(|t| chf_exact_from_distribution(&law, t), law.lattice(), x)?;
        worst = worst.max((back - m).abs());
    }
    report.note("inversion_max_error", worst);
    report.checks.push(Check::margin("inversion_round_trip", 1e-8 - worst));
    Ok(report)
}

/// `n,linf,l1,sigma` for every `n` in the sweep: exact laws where
/// enumeration is feasible, Monte Carlo laws otherwise. Asserts that
/// `sigma * linf` strictly decreases along the exact entries.
pub fn cmd_llt_verify(config: &ExperimentConfig) -> Result<Report> {
    let mut table = Table::new(&["n", "linf", "l1", "sigma"]);
    let mut exact_scaled: Vec<(usize, f64)> = Vec::new();
    let mut exact_l1_min = f64::INFINITY;
    let mut sampled_l1: Vec<(usize, f64)> = Vec::new();
    for &n in &config.sweep {
        let spec = CliqueSpec { n, ..config.spec };
        let sigma = moments(&spec)?.sigma;
        let exact = spec.ground().num_edges() <= MAX_EXACT_EDGES;
        let law = if exact {
            exact_distribution(&spec)?
        } else {
            sample_law(&spec, &config.mc)?
        };
        let (linf, l1) = gaussian_distances(&law, mean(&spec), sigma)?;
        table.push(vec![n as f64, linf, l1, sigma]);
        if exact {
            exact_scaled.push((n, sigma * linf));
            exact_l1_min = exact_l1_min.min(l1);
        } else {
            sampled_l1.push((n, l1));
        }
    }
    let mut report = Report::new("llt-verify", table);
    report.note("scale_raw", 1.0);
    for w in exact_scaled.windows(2) {
        let ((a, x), (b, y)) = (w[0], w[1]);
        report.checks.push(Check {
            name: format!("sigma_linf_decreases_{a}_to_{b}"),
            passed: y < x,
            margin: x - y,
        });
    }
    if exact_l1_min.is_finite() {
        for (n, l1) in sampled_l1 {
            report.checks.push(Check::margin(format!("sampled_l1_below_exact_n{n}"), exact_l1_min - l1));
        }
    }
    Ok(report)
}

/// Empirical characteristic function of `kappa` over the `t` grid.
pub fn cmd_chf_scan(config: &ExperimentConfig) -> Result<Report> {
    let m = moments(&config.spec)?;
    let counts = sample_clique_counts(&config.spec, &config.mc)?;
    let mut table = Table::new(&["t", "re", "im", "stderr"]);
    let mut report_checks = Vec::new();
    for &t in &config.t_grid {
        let est = kappa_chf(&counts, m.mu, m.sigma, t)?;
        table.push(vec![t, est.value.re, est.value.im, est.stderr]);
        report_checks.push(Check::margin(
            format!("modulus_at_t{t}"),
            1.0 + 3.0 * est.stderr - est.value.norm(),
        ));
    }
    let mut report = Report::new("chf-scan", table);
    report.note("mu", m.mu);
    report.note("sigma", m.sigma);
    report.checks = report_checks;
    Ok(report)
}

/// Decoupling inequality for `f_r` under the two-color partition that puts
/// the first `ceil(n/2)` vertices in color 0.
pub fn cmd_decoupling_check(config: &ExperimentConfig) -> Result<Report> {
    let n = config.spec.n;
    let u0 = n.div_ceil(2);
    let part = build_color_partition(n, 1, &[u0, n - u0])?;
    let f = clique_function(&config.spec)?;
    let mut table = Table::new(&["t", "lhs", "rhs", "rhs_stderr"]);
    let mut checks = Vec::new();
    let mut lhs_exact = 1.0;
    for &t in &config.t_grid {
        let c = decoupling_check(&f, &part, t, &config.mc)?;
        table.push(vec![t, c.lhs, c.rhs, c.rhs_stderr]);
        checks.push(Check::margin(format!("decoupling_at_t{t}"), c.rhs + 3.0 * c.rhs_stderr + 1e-12 - c.lhs));
        if !c.lhs_exact {
            lhs_exact = 0.0;
        }
    }
    let mut report = Report::new("decoupling-check", table);
    report.note("k", 1.0);
    report.note("lhs_exact", lhs_exact);
    report.checks = checks;
    Ok(report)
}

fn min_margin(name: &str, margins: impl IntoIterator<Item = f64>) -> Check {
    Check::margin(name, margins.into_iter().fold(f64::INFINITY, f64::min))
}

/// Every explicit bound against an exact or Monte Carlo oracle.
pub fn cmd_bounds_check(config: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::new("bounds-check", Table::default());
    report.checks = bounds_suite(&config.mc)?;
    Ok(report)
}

/// The bound suites: Bernoulli chf bounds on 100-point grids, Berry-Esseen
/// at `n = 20, 50`, the hypercontractive tail (Monte Carlo, 3 standard
/// errors) and fourth moment (enumeration), and the characteristic
/// function perturbation bound (enumeration at `n = 5`).
pub fn bounds_suite(mc: &MCConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    for variant in BernoulliVariant::ALL {
        let mut margins = Vec::new();
        for p in [0.2, 0.5, 0.8] {
            let limit = variant.limit(p);
            for i in 0..100 {
                let t = limit * i as f64 / 100.0;
                margins.push(bernoulli_chf_bound(t, p, variant)? - bernoulli_chf_exact(t, p, variant));
            }
        }
        checks.push(min_margin(&format!("bernoulli_{variant:?}").to_lowercase(), margins));
    }

    for n in [20, 50] {
        for p in [0.3, 0.5] {
            let cap = 1.0 / (4.0 * crate::bounds::lyapunov_ratio(n, p));
            let mut margins = Vec::new();
            for i in 1..=100 {
                let be = berry_esseen_gap(n, p, cap * i as f64 / 100.0)?;
                margins.push(be.bound - be.exact_gap);
            }
            checks.push(min_margin(&format!("berry_esseen_n{n}_p{p}"), margins));
        }
    }

    checks.push(hyper_tail_check(mc)?);
    checks.push(hyper_moment_check(mc.seed)?);
    checks.extend(mainchf_checks()?);
    Ok(checks)
}

/// Tail of the normalized edge sum on `n = 10`, `p = 1/2`, at `t = 3.5`.
fn hyper_tail_check(mc: &MCConfig) -> Result<Check> {
    let n = 10;
    let sampler = GnpSampler::new(n, 0.5)?;
    let edges = EdgeGround::new(n).num_edges();
    let t = 3.5;
    let bound = hyperconc_tail(HypParams::new(1, 0.5)?, 1.0, t)?;
    let hits: u64 = mc
        .run(|rng, share| {
            (0..share)
                .filter(|_| {
                    let g = sampler.sample(rng);
                    let ones = g.edge_count() as f64;
                    let sum = (2.0 * ones - edges as f64) / (edges as f64).sqrt();
                    sum.abs() >= bound.threshold
                })
                .count() as u64
        })
        .into_iter()
        .sum();
    let n_samples = mc.samples as f64;
    let freq = hits as f64 / n_samples;
    let se = (freq * (1.0 - freq) / n_samples).sqrt();
    Ok(Check::margin("hypercontractive_tail", bound.probability + 3.0 * se - freq))
}

/// Random degree-2 polynomial on the edges of `K_5` with seeded
/// coefficients.
pub fn random_quadratic(seed: u64, p: f64) -> Result<PBFunction> {
    let ground = EdgeGround::new(5);
    let mut rng = MCConfig::new(seed, 1, 1)?.stream(0);
    let m = ground.num_edges();
    let mut terms = Vec::new();
    for i in 0..m {
        terms.push((EdgeSet::singleton(i), rng.random_range(-1.0..1.0)));
        for j in i + 1..m {
            terms.push((EdgeSet::from_indices([i, j]), rng.random_range(-1.0..1.0)));
        }
    }
    PBFunction::from_coeffs(m, Some(5), p, terms)
}

fn exact_abs_moment(f: &PBFunction, power: i32) -> Result<f64> {
    let m = f.vars();
    let mut x = Assignment::zeros(m);
    let mut total = 0.0;
    for mask in 0u64..1 << m {
        x.load_mask(mask);
        total += mask_weight(mask, m, f.p()) * f.eval(&x)?.abs().powi(power);
    }
    Ok(total)
}

fn hyper_moment_check(seed: u64) -> Result<Check> {
    let mut margins = Vec::new();
    for p in [0.3, 0.5] {
        let f = random_quadratic(seed, p)?;
        let hp = HypParams::new(2, p.min(1.0 - p))?;
        margins.push(hyperconc_moment(hp, f.norm2(), 2.0)? - exact_abs_moment(&f, 4)?);
    }
    Ok(min_margin("hypercontractive_moment", margins))
}

fn mainchf_checks() -> Result<Vec<Check>> {
    let spec = CliqueSpec::with_default_tau(5, 3, 0.5)?;
    let kappa = kappa_function(&spec)?;
    let y = kappa.tail(1);
    let ground = spec.ground();
    let m = ground.num_edges();
    let a = 1.0 / (m as f64).sqrt();
    let x = PBFunction::from_coeffs(m, Some(5), spec.p, (0..m).map(|e| (EdgeSet::singleton(e), a)))?;
    let mut z = x.clone();
    z.add_scaled(&y, 1.0)?;
    let mut checks = Vec::new();
    for ell in [1, 2] {
        let mut margins = Vec::new();
        for t in [0.5, 1.0] {
            let gap = (exact_chf(&z, t)? - exact_chf(&x, t)?).norm();
            let bp = BoundParams::new(ell, y.degree() as u32, t, 1.0, a * a, y.norm2(), y.spectral_norm1(), 0.5)?;
            margins.push(mainchf_bound(&bp)? - gap);
        }
        checks.push(min_margin(&format!("mainchf_l{ell}"), margins));
    }
    Ok(checks)
}

/// Re-runs `command` with twice the samples and records the largest
/// change in any table cell as `self_check_max_delta`.
pub fn with_self_check(
    command: impl Fn(&ExperimentConfig) -> Result<Report>,
    config: &ExperimentConfig,
) -> Result<Report> {
    let mut report = command(config)?;
    let mut doubled = config.clone();
    doubled.mc.samples *= 2;
    let again = command(&doubled)?;
    if again.table.rows.len() != report.table.rows.len() {
        return Err(Error::Precondition("self-check produced a different table shape".into()));
    }
    let delta = report
        .table
        .rows
        .iter()
        .zip(&again.table.rows)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    report.note("self_check_max_delta", delta);
    Ok(report)
}

/// Discrete Gaussian in `kappa` scale for a law of `f_r`: lattice
/// `-mu/sigma + (1/sigma) Z`.
pub fn kappa_scale(law: &EmpiricalDistribution, mu: f64, sigma: f64) -> Result<(EmpiricalDistribution, EmpiricalDistribution)> {
    let scaled = law.standardized(mu, sigma)?;
    let gauss = discrete_gaussian(scaled.lattice(), 0.0, 1.0)?;
    Ok((scaled, gauss))
}

/// Right-hand side of the lattice comparison: `h (int_{-pi/h}^{pi/h}
/// |phi - e^{-t^2/2}| dt + e^{-pi^2/(2h^2)})` for a `kappa`-scale law.
pub fn lattice_comparison_bound(scaled: &EmpiricalDistribution, intervals: usize) -> f64 {
    let h = scaled.lattice().h;
    let half = PI / h;
    let integral = crate::dist::simpson(
        |t| (chf_exact_from_distribution(scaled, t) - (-t * t / 2.0).exp()).norm(),
        -half,
        half,
        intervals,
    );
    h * (integral + (-PI * PI / (2.0 * h * h)).exp())
}

/// `LatticeSpec` of `kappa` for a law on the integers.
pub fn kappa_lattice(mu: f64, sigma: f64) -> Result<LatticeSpec> {
    LatticeSpec::integers().affine(mu, sigma)
}
