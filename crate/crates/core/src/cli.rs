//! The `ppok` command line: simulate paths, tabulate pmfs, estimate ruin
//! surfaces and run the validation suites.
//!
//! Exit codes: 0 success or passing validation, 1 validation failure,
//! 2 configuration or runtime error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::combinatorics::PoKParams;
use crate::error::{Error, Result};
use crate::io::{
    write_curves_csv, write_json, write_paths_csv, write_pmf_csv, write_report_csv, write_ruin_csv, Format, PathRecord,
    PmfTable,
};
use crate::process::simulate_ppok;
use crate::rng::{replicate, with_threads, RngStream};
use crate::ruin::{simulate_ruin, solve_g_fixed_point, solve_g_jump_law, ClaimDist, RiskModel};
use crate::subordinator::SubordinatorSpec;
use crate::time_change::{
    simulate, tcppok1_pmf_table, tcppok2_pmf_table, McBudget, Mode, PmfMethod, PmfValue, TimeChangedSpec,
};
use crate::validate::{self, Suite, ValidateOptions};

#[derive(Debug, Parser)]
#[command(name = "ppok", version, about = "Poisson processes of order k, their time changes, and order-k ruin")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write sample paths as `t,value,path_id`.
    Simulate(RunArgs),
    /// Tabulate `P[Q(t) = n]` for `n ≤ n_max`.
    Pmf(PmfArgs),
    /// Estimate `G(u, y)` and `ψ(u)` by simulation or by the integro-differential solver.
    Ruin(RuinArgs),
    /// Run a validation suite and exit nonzero if a mandatory check fails.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Ppok,
    Tcppok1,
    Tcppok2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubKind {
    Drift,
    Gamma,
    Tempered,
    Ig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "ppok")]
    pub process: ProcessKind,
    /// Subordinator family (required for tcppok1 and tcppok2).
    #[arg(long, value_enum)]
    pub sub: Option<SubKind>,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long, default_value_t = 1.2)]
    pub lambda: f64,
    /// Subordinator parameters: `b` for drift, `p,α` for gamma, `α,μ` for
    /// tempered stable, `δ,γ` for inverse Gaussian.
    #[arg(long)]
    pub sub_params: Option<String>,
    /// Time horizon (simulate, ruin) or default evaluation time (pmf).
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    /// Paths, Monte Carlo samples or ruin replications.
    #[arg(long, default_value_t = 10)]
    pub n_paths: usize,
    /// Observation grid step for time-changed paths; defaults to `t_max/1000`.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, env = "PPOK_SEED", default_value_t = 20_240_601)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Closed,
    Quadrature,
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct PmfArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Evaluation time; defaults to `--t-max`.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub n_max: u32,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuinSource {
    /// Finite-horizon simulation.
    Mc,
    /// Solver with the arrival jump-law kernel.
    JumpLaw,
    /// Solver with the `k·B₁` kernel (fixed point from `∫G = 0`).
    Displayed,
}

#[derive(Debug, Clone, Args)]
pub struct RuinArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Premium rate `c`.
    #[arg(long)]
    pub premium: f64,
    #[arg(long, default_value_t = 1.0)]
    pub claim_mean: f64,
    /// Erlang claim shape; claims are exponential when it is 1.
    #[arg(long, default_value_t = 1)]
    pub claim_shape: u32,
    #[arg(long, default_value_t = 5.0)]
    pub u_max: f64,
    /// Spacing of the `u` grid.
    #[arg(long, default_value_t = 0.5)]
    pub du: f64,
    /// Deficit levels, comma separated.
    #[arg(long, default_value = "0.5,1,2")]
    pub y: String,
    #[arg(long, value_enum, default_value = "mc")]
    pub source: RuinSource,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// combinatorics | ppok | subordinators | timechange | dde | ruin | all
    pub suite: String,
    #[arg(long, env = "PPOK_SEED", default_value_t = 20_240_601)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Simulate with a doubled rate to confirm the suites can fail.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub process: ProcessKind,
    pub pok: PoKParams,
    pub sub: Option<SubordinatorSpec>,
    pub horizon: f64,
    pub n_paths: usize,
    pub step: f64,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: usize,
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Config(format!("{what}: cannot parse '{x}' as a number"))))
        .collect()
}

fn positive(x: f64, what: &str) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Config(format!("{what} must be positive and finite, got {x}")))
    }
}

impl RunConfig {
    pub fn from_args(a: &RunArgs) -> Result<Self> {
        let pok = PoKParams::new(a.k, a.lambda).map_err(|e| Error::Config(e.to_string()))?;
        let horizon = positive(a.t_max, "--t-max")?;
        if a.n_paths == 0 {
            return Err(Error::Config("--n-paths must be at least 1".into()));
        }
        let step = positive(a.step.unwrap_or(horizon / 1000.0), "--step")?;
        let sub = match a.sub {
            None => None,
            Some(kind) => {
                let params = match &a.sub_params {
                    Some(s) => parse_list(s, "--sub-params")?,
                    None => match kind {
                        SubKind::Drift => vec![1.0],
                        SubKind::Gamma => vec![3.0, 4.0],
                        SubKind::Tempered => vec![0.6, 1.0],
                        SubKind::Ig => vec![1.0, 1.0],
                    },
                };
                let want = if kind == SubKind::Drift { 1 } else { 2 };
                if params.len() != want {
                    return Err(Error::Config(format!("--sub-params needs {want} value(s) for {kind:?}")));
                }
                let spec = match kind {
                    SubKind::Drift => SubordinatorSpec::drift(params[0]),
                    SubKind::Gamma => SubordinatorSpec::gamma(params[0], params[1]),
                    SubKind::Tempered => SubordinatorSpec::tempered_stable(params[0], params[1]),
                    SubKind::Ig => SubordinatorSpec::inverse_gaussian(params[0], params[1]),
                };
                Some(spec.map_err(|e| Error::Config(e.to_string()))?)
            }
        };
        if a.process != ProcessKind::Ppok && sub.is_none() {
            return Err(Error::Config("--sub is required for tcppok1 and tcppok2".into()));
        }
        Ok(Self {
            process: a.process,
            pok,
            sub,
            horizon,
            n_paths: a.n_paths,
            step,
            seed: a.seed,
            format: match a.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
            out: a.out.clone(),
            threads: a.threads,
        })
    }

    /// The time-changed spec for tcppok1/tcppok2.
    pub fn time_changed(&self) -> Result<TimeChangedSpec> {
        let sub = self.sub.ok_or_else(|| Error::Config("--sub is required".into()))?;
        let mode = match self.process {
            ProcessKind::Tcppok2 => Mode::Inverse,
            _ => Mode::Direct,
        };
        TimeChangedSpec::new(self.pok, sub, mode)
    }

    fn stream(&self) -> RngStream {
        RngStream::new(self.seed, 0)
    }
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Sample paths for `config`; replication `i` uses substream `i`.
pub fn cmd_simulate(config: &RunConfig) -> Result<Vec<PathRecord>> {
    let horizon = config.horizon;
    let records = match config.process {
        ProcessKind::Ppok => replicate(config.stream(), config.n_paths, |i, rng| {
            let path = simulate_ppok(&config.pok, horizon, rng)?;
            let mut t = vec![0.0];
            let mut value = vec![0.0];
            for (s, c) in path.jump_times().iter().zip(path.cumulative()) {
                t.push(*s);
                value.push(*c as f64);
            }
            t.push(horizon);
            value.push(path.terminal() as f64);
            Ok(PathRecord { path_id: i, t, value })
        }),
        _ => {
            let spec = config.time_changed()?;
            replicate(config.stream(), config.n_paths, |i, rng| {
                let p = simulate(&spec, horizon, config.step, rng)?;
                Ok(PathRecord { path_id: i, t: p.grid, value: p.counts.iter().map(|&c| c as f64).collect() })
            })
        }
    };
    records.into_iter().collect()
}

pub fn cmd_pmf(config: &RunConfig, t: f64, n_max: u32, method: MethodArg) -> Result<PmfTable> {
    let t = positive(t, "--t")?;
    let rows = match config.process {
        ProcessKind::Ppok => {
            if method == MethodArg::Mc {
                return Err(Error::Config("the PPoK pmf is exact; use --method closed".into()));
            }
            (0..=n_max)
                .map(|n| PmfValue::Exact { value: crate::combinatorics::pok_pmf(&config.pok, t, n), error: 0.0 })
                .collect()
        }
        ProcessKind::Tcppok1 => {
            let spec = config.time_changed()?;
            let method = match method {
                MethodArg::Closed => PmfMethod::Closed,
                MethodArg::Quadrature => PmfMethod::Quadrature,
                MethodArg::Mc => PmfMethod::MonteCarlo,
            };
            tcppok1_pmf_table(&spec, t, n_max, method, Some(McBudget::new(config.n_paths.max(2), config.stream())))?
        }
        ProcessKind::Tcppok2 => {
            if method != MethodArg::Mc {
                return Err(Error::Config("tcppok2 pmfs are available by --method mc only".into()));
            }
            let spec = config.time_changed()?;
            tcppok2_pmf_table(&spec, t, n_max, McBudget::new(config.n_paths.max(2), config.stream()))?
                .values
                .into_iter()
                .map(PmfValue::Estimate)
                .collect()
        }
    };
    Ok(PmfTable::new(t, rows))
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum RuinOutput {
    Estimate(crate::ruin::RuinEstimate),
    Curves(Vec<crate::ruin::GCurve>),
}

pub fn cmd_ruin(config: &RunConfig, args: &RuinArgs) -> Result<RuinOutput> {
    if config.process != ProcessKind::Tcppok1 && config.process != ProcessKind::Ppok {
        return Err(Error::Config("the risk model uses ppok or tcppok1 arrivals".into()));
    }
    let sub = config.sub.unwrap_or(SubordinatorSpec::Drift { b: 1.0 });
    let arrivals = TimeChangedSpec::direct(config.pok, sub)?;
    let claim = if args.claim_shape <= 1 {
        ClaimDist::exponential(args.claim_mean)?
    } else {
        ClaimDist::erlang(args.claim_shape, args.claim_shape as f64 / positive(args.claim_mean, "--claim-mean")?)?
    };
    let model = RiskModel::new(args.premium, 0.0, claim, arrivals).map_err(|e| Error::Config(e.to_string()))?;
    let du = positive(args.du, "--du")?;
    let u_max = positive(args.u_max, "--u-max")?;
    let ys = parse_list(&args.y, "--y")?;
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::Config("--y levels must be positive".into()));
    }
    let n_u = (u_max / du).round() as usize;
    let u_grid: Vec<f64> = (0..=n_u).map(|i| i as f64 * du).collect();
    match args.source {
        RuinSource::Mc => Ok(RuinOutput::Estimate(simulate_ruin(
            &model,
            &u_grid,
            &ys,
            config.horizon,
            config.n_paths,
            config.stream(),
        )?)),
        RuinSource::JumpLaw | RuinSource::Displayed => {
            let step = 1e-3 * u_max;
            ys.iter()
                .map(|&y| match args.source {
                    RuinSource::JumpLaw => solve_g_jump_law(&model, y, u_max, step),
                    _ => solve_g_fixed_point(&model, y, u_max, step, 200, 1e-10),
                })
                .collect::<Result<Vec<_>>>()
                .map(RuinOutput::Curves)
        }
    }
}

fn emit<T: Serialize>(format: Format, out: &Option<PathBuf>, value: &T, csv: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let mut w = open_output(out)?;
    match format {
        Format::Json => write_json(&mut w, value)?,
        Format::Csv => csv(&mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate(a) => {
            let config = RunConfig::from_args(&a)?;
            let paths = with_threads(config.threads, || cmd_simulate(&config))?;
            emit(config.format, &config.out, &paths, |w| write_paths_csv(w, &paths))?;
        }
        Command::Pmf(a) => {
            let config = RunConfig::from_args(&a.run)?;
            let table = with_threads(config.threads, || cmd_pmf(&config, a.t.unwrap_or(config.horizon), a.n_max, a.method))?;
            emit(config.format, &config.out, &table, |w| write_pmf_csv(w, &table))?;
        }
        Command::Ruin(a) => {
            let config = RunConfig::from_args(&a.run)?;
            let output = with_threads(config.threads, || cmd_ruin(&config, &a))?;
            emit(config.format, &config.out, &output, |w| match &output {
                RuinOutput::Estimate(e) => write_ruin_csv(w, e),
                RuinOutput::Curves(c) => write_curves_csv(w, c),
            })?;
            if let RuinOutput::Estimate(e) = &output {
                if e.horizon_too_short {
                    eprintln!("warning: more than 1% of ruin times fall in the last 10% of the horizon; ψ is biased low");
                }
            }
        }
        Command::Validate(a) => {
            let suite: Suite = a.suite.parse()?;
            let opts = ValidateOptions { seed: a.seed, inject_fault: a.inject_fault };
            let report = with_threads(a.threads, || validate::run(suite, opts));
            let format = match a.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            emit(format, &a.out, &report, |w| write_report_csv(w, &report))?;
            for c in &report.checks {
                eprintln!(
                    "{} [{}] {} ({}{})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.suite,
                    c.name,
                    c.provenance,
                    if c.mandatory { "" } else { ", advisory" }
                );
            }
            return Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Parse `args` and run; never panics on bad input.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
