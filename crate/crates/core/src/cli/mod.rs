//! Command-line front end: `sweep`, `witness`, `bell` and `verify`.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or config error, 3 numerical
//! failure (truncation caps or budgets).

pub mod config;
pub mod output;
pub mod sweep;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::amplifier::{GainParams, LossChannel};
use crate::bell::{chsh_value, simulate_trials, ChshSettings};
use crate::detection::{compose_transmission, joint_stats, ThresholdDetector};
use crate::error::Error;
use crate::oracle::{default_n_trunc, witness_oracle};
use crate::verify::{run_verify, Level};
use crate::witness::{witness_closed_form, WitnessReport};

use config::Resolver;
use output::{csv_num, csv_opt, emit, json_string, write_csv, Format};
use sweep::{run_sweep, Grid, SweepConfig, CSV_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("numerical failure: {0}")]
    Numerical(Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub(crate) fn io(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "eyeclone", version, about = "Human-eye detection of amplified single-photon qubits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Efficiency and visibility over a grid of gains, one curve per extra transmission.
    Sweep(SweepArgs),
    /// Micro-macro separability witness.
    Witness(WitnessArgs),
    /// CHSH value, analytic and Monte Carlo.
    Bell(BellArgs),
    /// Equivalence checks between the analytic path and the Fock-space oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Detection threshold in photons [default: 7].
    #[arg(long)]
    pub theta: Option<u32>,
    /// Transmission of the eye [default: 0.08].
    #[arg(long)]
    pub eta: Option<f64>,
    /// Extra transmission factors after the amplifier, comma separated.
    #[arg(long = "extra-loss", value_delimiter = ',')]
    pub extra_loss: Option<Vec<f64>>,
    /// Tail mass tolerance for photon-number truncation [default: 1e-12].
    #[arg(long = "tail-tol")]
    pub tail_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// `key = value` config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Explicit gains, comma separated (overrides the <N_a> grid).
    #[arg(long = "g-list", value_delimiter = ',')]
    pub g_list: Option<Vec<f64>>,
    /// Smallest <N_a> of the geometric grid [default: 2].
    #[arg(long = "n-min")]
    pub n_min: Option<f64>,
    /// Largest <N_a> of the geometric grid [default: 20000].
    #[arg(long = "n-max")]
    pub n_max: Option<f64>,
    /// Number of grid points [default: 200].
    #[arg(long = "n-count")]
    pub n_count: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct GainArg {
    /// Amplifier gain g.
    #[arg(long, conflicts_with = "n_mean")]
    pub g: Option<f64>,
    /// Total mean photon number <N_a> = 4 sinh^2 g + 1 (alternative to --g).
    #[arg(long = "n-mean")]
    pub n_mean: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub gain: GainArg,
    /// Also evaluate the Fock-space oracle and fail if it disagrees beyond 1e-8.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BellArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub gain: GainArg,
    /// Number of Monte Carlo trials [default: 1000000].
    #[arg(long)]
    pub trials: Option<u64>,
    /// RNG seed (ChaCha8) [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub level: Option<VerifyLevel>,
    /// Force the named check to fail.
    #[arg(long = "inject-failure", hide = true)]
    pub inject_failure: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyLevel {
    Quick,
    Full,
}

impl std::str::FromStr for VerifyLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <VerifyLevel as clap::ValueEnum>::from_str(s, true)
    }
}

/// Parses `args` (including the program name), runs the command and returns the
/// process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Witness(args) => cmd_witness(args),
        Command::Bell(args) => cmd_bell(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

// Common settings after merging flags, config file and defaults.
struct Common {
    theta: u32,
    eta: f64,
    extra: Vec<f64>,
    tail_tol: f64,
    format: Format,
    output: Option<PathBuf>,
}

fn resolve_common(c: &CommonArgs, r: &Resolver, default_extra: &[f64]) -> Result<Common, CliError> {
    Ok(Common {
        theta: r.get("theta", c.theta)?.unwrap_or(7),
        eta: r.get("eta", c.eta)?.unwrap_or(0.08),
        extra: r.get_list("extra_loss", c.extra_loss.clone())?.unwrap_or_else(|| default_extra.to_vec()),
        tail_tol: r.get("tail_tol", c.tail_tol)?.unwrap_or(1e-12),
        format: r.get("format", c.format)?.unwrap_or(Format::Csv),
        output: r.get("output", c.output.clone())?,
    })
}

fn resolve_gain(arg: &GainArg, r: &Resolver) -> Result<GainParams, CliError> {
    let g = r.get("g", arg.g)?;
    let n_mean = r.get("n_mean", arg.n_mean)?;
    match (g, n_mean) {
        (Some(g), None) => Ok(GainParams::new(g)?),
        (None, Some(n)) => Ok(GainParams::from_total_mean_photons(n)?),
        // a flag given alongside a config value of the other kind: the flag wins
        (Some(g), Some(n)) => match (arg.g, arg.n_mean) {
            (Some(_), _) => Ok(GainParams::new(g)?),
            (_, Some(_)) => Ok(GainParams::from_total_mean_photons(n)?),
            _ => Err(CliError::Usage("config sets both g and n_mean".into())),
        },
        (None, None) => Err(CliError::Usage("one of --g or --n-mean is required".into())),
    }
}

/// Resolved sweep configuration from flags and an optional config file.
pub fn sweep_config(args: &SweepArgs) -> Result<SweepConfig, CliError> {
    let r = Resolver::from_file(args.common.config.as_deref())?;
    let defaults = SweepConfig::default();
    let c = resolve_common(&args.common, &r, &defaults.extra_transmissions)?;
    let g_list = r.get_list("g_list", args.g_list.clone())?;
    let grid = match (g_list, &defaults.grid) {
        (Some(gs), _) if args.n_min.is_none() && args.n_max.is_none() && args.n_count.is_none() => {
            Grid::Gains(gs)
        }
        (_, &Grid::MeanPhotons { min, max, count }) => Grid::MeanPhotons {
            min: r.get("n_min", args.n_min)?.unwrap_or(min),
            max: r.get("n_max", args.n_max)?.unwrap_or(max),
            count: r.get("n_count", args.n_count)?.unwrap_or(count),
        },
        _ => defaults.grid.clone(),
    };
    let config = SweepConfig {
        grid,
        theta: c.theta,
        eta_eye: c.eta,
        extra_transmissions: c.extra,
        tail_tol: c.tail_tol,
        format: c.format,
        output: c.output,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let config = sweep_config(&args)?;
    let report = run_sweep(&config)?;
    let bytes = match config.format {
        Format::Json => json_string(&report)?.into_bytes(),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        csv_num(r.g),
                        csv_num(r.n_mean),
                        csv_num(r.epsilon),
                        csv_opt(r.visibility),
                        csv_num(r.p_yn),
                        csv_num(r.p_ny),
                        csv_num(r.p_yy),
                        csv_num(r.p_nn),
                        csv_num(r.eta_total),
                    ]
                })
                .collect();
            let mut buf = Vec::new();
            write_csv(&mut buf, &CSV_HEADER, &rows)?;
            for p in &report.summary {
                eprintln!(
                    "# peak eta_total={} epsilon_max={} N_mean={} g={} V_at_max={} V_min={}",
                    csv_num(p.eta_total),
                    csv_num(p.epsilon_max),
                    csv_num(p.n_mean_at_max),
                    csv_num(p.g_at_max),
                    csv_opt(p.visibility_at_max),
                    csv_opt(p.visibility_min),
                );
            }
            buf
        }
    };
    emit(config.output.as_deref(), &bytes)
}

#[derive(Debug, Serialize)]
struct WitnessOutput {
    g: f64,
    eta: f64,
    #[serde(flatten)]
    report: WitnessReport,
    oracle: Option<WitnessReport>,
    oracle_max_deviation: Option<f64>,
}

fn cmd_witness(args: WitnessArgs) -> Result<(), CliError> {
    let r = Resolver::from_file(args.common.config.as_deref())?;
    let c = resolve_common(&args.common, &r, &[1.0])?;
    let gain = resolve_gain(&args.gain, &r)?;
    let mut etas = vec![c.eta];
    etas.extend(&c.extra);
    let loss = LossChannel::new(compose_transmission(&etas)?)?;
    let report = witness_closed_form(gain, loss);
    let verify = args.verify || r.get::<bool>("verify", None)?.unwrap_or(false);

    let (oracle, deviation) = if verify {
        let o = witness_oracle(gain, loss, default_n_trunc(gain))?;
        let dev = [
            report.jz_sz - o.jz_sz,
            report.jx_sx - o.jx_sx,
            report.jy_sy - o.jy_sy,
            report.n_a - o.n_a,
            report.margin - o.margin,
        ]
        .iter()
        .fold(0.0_f64, |m, d| m.max(d.abs()));
        (Some(o), Some(dev))
    } else {
        (None, None)
    };

    let out = WitnessOutput { g: gain.g(), eta: loss.eta(), report, oracle, oracle_max_deviation: deviation };
    let bytes = match c.format {
        Format::Json => json_string(&out)?.into_bytes(),
        Format::Csv => {
            let mut header = vec!["g", "eta", "jz_sz", "jx_sx", "jy_sy", "n_a", "lhs", "rhs", "margin"];
            let mut row = vec![
                csv_num(out.g),
                csv_num(out.eta),
                csv_num(report.jz_sz),
                csv_num(report.jx_sx),
                csv_num(report.jy_sy),
                csv_num(report.n_a),
                csv_num(report.lhs),
                csv_num(report.rhs),
                csv_num(report.margin),
            ];
            if verify {
                header.push("oracle_max_deviation");
                row.push(csv_opt(deviation));
            }
            let mut buf = Vec::new();
            write_csv(&mut buf, &header, &[row])?;
            buf
        }
    };
    emit(c.output.as_deref(), &bytes)?;
    match deviation {
        Some(d) if d > crate::verify::WITNESS_TOL => {
            Err(CliError::Check(format!("witness oracle deviates by {d:e}")))
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct BellOutput {
    g: f64,
    n_mean: f64,
    eta_total: f64,
    theta: u32,
    epsilon: f64,
    visibility: Option<f64>,
    s_analytic: Option<f64>,
    s_mc: Option<f64>,
    s_mc_std_error: Option<f64>,
    conclusive_rate: f64,
    n_trials: u64,
    seed: u64,
}

fn cmd_bell(args: BellArgs) -> Result<(), CliError> {
    let r = Resolver::from_file(args.common.config.as_deref())?;
    let c = resolve_common(&args.common, &r, &[1.0])?;
    let gain = resolve_gain(&args.gain, &r)?;
    let trials = r.get("trials", args.trials)?.unwrap_or(1_000_000);
    let seed = r.get("seed", args.seed)?.unwrap_or(0);
    let detector = ThresholdDetector::new(c.theta, c.eta)?;
    let extra = compose_transmission(&c.extra)?;
    let stats = joint_stats(gain, &detector, extra, c.tail_tol)?;
    let estimate = simulate_trials(trials, &stats, &ChshSettings::default(), seed)?;
    let out = BellOutput {
        g: gain.g(),
        n_mean: stats.mean_n,
        eta_total: c.eta * extra,
        theta: c.theta,
        epsilon: stats.epsilon,
        visibility: stats.visibility,
        s_analytic: stats.visibility.map(chsh_value).transpose()?,
        s_mc: estimate.s,
        s_mc_std_error: estimate.std_error,
        conclusive_rate: estimate.conclusive_rate,
        n_trials: estimate.n_trials,
        seed,
    };
    let bytes = match c.format {
        Format::Json => json_string(&out)?.into_bytes(),
        Format::Csv => {
            let header = [
                "g", "N_mean", "eta_total", "theta", "epsilon", "V", "S_analytic", "S_mc",
                "S_mc_se", "conclusive_rate", "n_trials", "seed",
            ];
            let row = vec![
                csv_num(out.g),
                csv_num(out.n_mean),
                csv_num(out.eta_total),
                out.theta.to_string(),
                csv_num(out.epsilon),
                csv_opt(out.visibility),
                csv_opt(out.s_analytic),
                csv_opt(out.s_mc),
                csv_opt(out.s_mc_std_error),
                csv_num(out.conclusive_rate),
                out.n_trials.to_string(),
                out.seed.to_string(),
            ];
            let mut buf = Vec::new();
            write_csv(&mut buf, &header, &[row])?;
            buf
        }
    };
    emit(c.output.as_deref(), &bytes)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let r = Resolver::from_file(args.common.config.as_deref())?;
    let level = match r.get("level", args.level)?.unwrap_or(VerifyLevel::Quick) {
        VerifyLevel::Quick => Level::Quick,
        VerifyLevel::Full => Level::Full,
    };
    let format = r.get("format", args.common.format)?;
    let output = r.get("output", args.common.output.clone())?;
    let results = run_verify(level, args.inject_failure.as_deref())?;

    let bytes = match format {
        Some(Format::Json) => json_string(&results)?.into_bytes(),
        Some(Format::Csv) => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        if c.passed { "pass" } else { "fail" }.to_string(),
                        csv_num(c.deviation),
                        csv_num(c.tolerance),
                        c.error.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            let mut buf = Vec::new();
            write_csv(&mut buf, &["check", "status", "deviation", "tolerance", "error"], &rows)?;
            buf
        }
        None => {
            let mut text = String::new();
            for c in &results {
                let status = if c.passed { "PASS" } else { "FAIL" };
                match &c.error {
                    Some(e) => text.push_str(&format!("{status} {} error: {e}\n", c.name)),
                    None => text.push_str(&format!(
                        "{status} {} deviation={:.3e} tolerance={:.3e}\n",
                        c.name, c.deviation, c.tolerance
                    )),
                }
            }
            let passed = results.iter().filter(|c| c.passed).count();
            text.push_str(&format!("{passed}/{} checks passed\n", results.len()));
            text.into_bytes()
        }
    };
    emit(output.as_deref(), &bytes)?;

    let failed: Vec<&str> = results.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failed.join(", ")))
    }
}
