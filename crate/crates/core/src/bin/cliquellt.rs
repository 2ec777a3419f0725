use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clique_llt::clique::CliqueSpec;
use clique_llt::experiment::{self, linspace, ExperimentConfig, OutputFormat, Report};
use clique_llt::mc::MCConfig;

/// Clique-count local limit experiments on G(n,p).
///
/// Every flag can also be set through an environment variable named
/// CLIQUELLT_<FLAG>, e.g. CLIQUELLT_SAMPLES=100000.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Closed-form mean, variance and Fourier weights.
    Moments,
    /// Exact law by enumeration, with discrete Gaussian distances.
    ExactDist,
    /// Distance table over an n-sweep.
    LltVerify,
    /// Empirical characteristic function of the normalized count.
    ChfScan,
    /// Both sides of the decoupling inequality.
    DecouplingCheck,
    /// Every explicit bound against its oracle.
    BoundsCheck,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Opts {
    #[arg(long, global = true, default_value_t = 5, env = "CLIQUELLT_N")]
    n: usize,
    #[arg(long, global = true, default_value_t = 3, env = "CLIQUELLT_R")]
    r: usize,
    #[arg(long, global = true, default_value_t = 0.5, env = "CLIQUELLT_P")]
    p: f64,
    /// Defaults to half of min(1/12, 1/(2r)).
    #[arg(long, global = true, env = "CLIQUELLT_TAU")]
    tau: Option<f64>,
    #[arg(long, global = true, default_value_t = 1, env = "CLIQUELLT_SEED")]
    seed: u64,
    #[arg(long, global = true, default_value_t = 10_000, env = "CLIQUELLT_SAMPLES")]
    samples: usize,
    #[arg(long, global = true, default_value_t = 4, env = "CLIQUELLT_WORKERS")]
    workers: usize,
    #[arg(long, global = true, default_value_t = 0.0, env = "CLIQUELLT_T_MIN")]
    t_min: f64,
    #[arg(long, global = true, default_value_t = 2.0, env = "CLIQUELLT_T_MAX")]
    t_max: f64,
    #[arg(long, global = true, default_value_t = 5, env = "CLIQUELLT_T_STEPS")]
    t_steps: usize,
    /// Values of n for llt-verify.
    #[arg(long, global = true, value_delimiter = ',', default_value = "5,6,7", env = "CLIQUELLT_SWEEP")]
    sweep: Vec<usize>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true, env = "CLIQUELLT_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv", env = "CLIQUELLT_FORMAT")]
    format: Format,
    /// Rerun with doubled samples and report the largest change.
    #[arg(long, global = true, env = "CLIQUELLT_SELF_CHECK")]
    self_check: bool,
}

fn config(opts: &Opts) -> clique_llt::Result<ExperimentConfig> {
    let spec = match opts.tau {
        Some(tau) => CliqueSpec::new(opts.n, opts.r, opts.p, tau)?,
        None => CliqueSpec::with_default_tau(opts.n, opts.r, opts.p)?,
    };
    let mut cfg = ExperimentConfig::new(spec, MCConfig::new(opts.seed, opts.samples, opts.workers)?);
    cfg.t_grid = linspace(opts.t_min, opts.t_max, opts.t_steps);
    cfg.sweep = opts.sweep.clone();
    cfg.out = opts.out.clone();
    cfg.format = match opts.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    Ok(cfg)
}

fn run(command: Command, opts: &Opts) -> clique_llt::Result<Report> {
    let cfg = config(opts)?;
    let f = match command {
        Command::Moments => experiment::cmd_moments,
        Command::ExactDist => experiment::cmd_exact_dist,
        Command::LltVerify => experiment::cmd_llt_verify,
        Command::ChfScan => experiment::cmd_chf_scan,
        Command::DecouplingCheck => experiment::cmd_decoupling_check,
        Command::BoundsCheck => experiment::cmd_bounds_check,
    };
    let report = if opts.self_check {
        experiment::with_self_check(f, &cfg)?
    } else {
        f(&cfg)?
    };
    let text = report.render(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, &cli.opts) {
        Ok(report) if report.passed() => ExitCode::SUCCESS,
        Ok(report) => {
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {} (margin {:e})", c.name, c.margin);
            }
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
