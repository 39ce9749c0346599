//! `ensemble-verify` command-line runner.
//!
//! Single queries print JSON, sweeps and simulations print CSV. Exit codes:
//! 0 success, 2 domain error, 3 resource error, 4 cross-check failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use ensemble_verify::analytic::{copies_required, failure_probability};
use ensemble_verify::arith::{parse_exact, Exact};
use ensemble_verify::crosscheck::{crosscheck, CrosscheckConfig};
use ensemble_verify::ghz::{ghz_failure_probability, ghz_monte_carlo, GHZDiagonalState, GhzRounds};
use ensemble_verify::model::NoiseModel;
use ensemble_verify::protocol::{monte_carlo, Strategy, StrategySpec};
use ensemble_verify::reproduce::{default_grid, reproduce, to_csv_string, Figure, Record, DEFAULT_DELTA};
use ensemble_verify::Error;

macro_rules! out {
    ($($arg:tt)*) => {
        write!(std::io::stdout().lock(), $($arg)*)?
    };
}

macro_rules! outln {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)?
    };
}

#[derive(Parser)]
#[command(name = "ensemble-verify", version, about = "Collective verification of Bell-pair ensembles")]
struct Cli {
    /// JSON file whose keys mirror the subcommand's long flags (flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form failure probability or copy count, as JSON.
    Analytic(AnalyticArgs),
    /// Monte Carlo estimate, as a CSV row.
    Simulate(SimulateArgs),
    /// Writes the figure datasets as CSV files.
    Reproduce(ReproduceArgs),
    /// Runs the equivalence suite; exits with 4 on any violation.
    Crosscheck(CrosscheckArgs),
    /// GHZ ensemble acceptance probability, as JSON.
    Ghz(GhzArgs),
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct AnalyticArgs {
    #[arg(long)]
    strategy: Option<String>,
    /// Fidelity, decimal or `p/q`.
    #[arg(long)]
    fidelity: Option<String>,
    #[arg(long)]
    n: Option<u64>,
    /// Subspace parity rounds.
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    m_embed: Option<u32>,
    /// Target failure probability; solves for the copy count instead of `n`.
    #[arg(long)]
    delta: Option<f64>,
    /// Noise family (`pure`, `rank2`, `werner`); defaults to the strategy's.
    #[arg(long)]
    noise: Option<String>,
    /// Rational arithmetic.
    #[arg(long)]
    #[serde(skip)]
    exact: bool,
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct SimulateArgs {
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    fidelity: Option<f64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    m_embed: Option<u32>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct ReproduceArgs {
    /// `2a`, `2b`, `app-c` or `all`.
    #[arg(long)]
    figure: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    /// Comma-separated fidelities.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct CrosscheckArgs {
    #[arg(long)]
    max_n: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Offset added to every closed-form value (fault injection).
    #[arg(long, hide = true)]
    perturb: Option<f64>,
    /// Print the report as JSON.
    #[arg(long)]
    #[serde(skip)]
    json: bool,
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct GhzArgs {
    #[arg(long)]
    parties: Option<usize>,
    #[arg(long)]
    fidelity: Option<String>,
    #[arg(long)]
    lambda0: Option<String>,
    /// Comma-separated `λ_k`, `k = 1 ..= 2^(m-1) - 1`.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<String>>,
    #[arg(long)]
    n: Option<u64>,
    /// `amplitude` or `two-round`.
    #[arg(long)]
    rounds: Option<String>,
    /// Monte Carlo trials; exact dynamic programming when absent.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

macro_rules! merge {
    ($cli:expr, $cfg:expr, $($field:ident),*) => {{
        let mut out = $cli;
        $(if out.$field.is_none() { out.$field = $cfg.$field; })*
        out
    }};
}

fn load_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Domain(format!("bad config {}: {e}", path.display())).into())
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Domain(format!("missing --{flag}")).into())
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn noise_model<P: ensemble_verify::arith::Prob>(
    name: Option<&str>,
    strategy: Strategy,
    fidelity: P,
) -> Result<NoiseModel<P>> {
    Ok(match name {
        None => strategy.design_noise(fidelity)?,
        Some("pure") => NoiseModel::PureTarget,
        Some("rank2") => NoiseModel::rank2(fidelity)?,
        Some("werner") => NoiseModel::werner(fidelity)?,
        Some(other) => return Err(Error::Domain(format!("unknown noise {other}")).into()),
    })
}

fn cmd_analytic(args: AnalyticArgs) -> Result<()> {
    let strategy = Strategy::from_parts(&require(args.strategy, "strategy")?, args.m, args.m_embed)?;
    let fidelity_text = require(args.fidelity, "fidelity")?;
    let fidelity_exact = parse_exact(&fidelity_text)?;
    let fidelity = ensemble_verify::arith::exact_to_f64(&fidelity_exact);
    let record = match (args.n, args.delta) {
        (Some(_), Some(_)) => return Err(Error::Domain("give either --n or --delta, not both".into()).into()),
        (None, Some(target)) => {
            let r = copies_required(strategy, fidelity, target)?;
            json!({
                "strategy": r.strategy.name(),
                "F": fidelity,
                "n": r.n,
                "m": r.strategy.rounds(),
                "m_embed": r.strategy.embedded(),
                "target_delta": target,
                "delta": r.delta,
                "copies_consumed": r.copies_consumed,
                "ebits_consumed": r.ebits_consumed,
            })
        }
        (n, None) => {
            let spec = StrategySpec::new(strategy, n.unwrap_or(0))?;
            let mut record = json!({
                "strategy": strategy.name(),
                "F": fidelity,
                "n": spec.n,
                "m": strategy.rounds(),
                "m_embed": strategy.embedded(),
                "copies_consumed": spec.copies_consumed(),
                "ebits_consumed": spec.ebits_consumed(),
            });
            if args.exact {
                let noise = noise_model::<Exact>(args.noise.as_deref(), strategy, fidelity_exact)?;
                let delta = failure_probability(&spec, &noise)?;
                record["delta"] = json!(ensemble_verify::arith::exact_to_f64(&delta));
                record["delta_exact"] = json!(delta.to_string());
            } else {
                let noise = noise_model(args.noise.as_deref(), strategy, fidelity)?;
                record["delta"] = json!(failure_probability(&spec, &noise)?);
            }
            record
        }
    };
    outln!("{}", serde_json::to_string_pretty(&record)?);
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let strategy = Strategy::from_parts(&require(args.strategy, "strategy")?, args.m, args.m_embed)?;
    let fidelity = args.fidelity.unwrap_or(1.0);
    let spec = StrategySpec::new(strategy, require(args.n, "n")?)?;
    let noise = noise_model(args.noise.as_deref(), strategy, fidelity)?;
    let seed = args.seed.unwrap_or(0);
    let est = monte_carlo(&spec, &noise, args.trials.unwrap_or(100_000), seed, args.workers.unwrap_or_else(default_workers))?;
    out!("{}", to_csv_string(&[Record::monte_carlo(&spec, noise.fidelity(), &est, seed)])?);
    Ok(())
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<()> {
    let out = require(args.out, "out")?;
    let figures = match args.figure.as_deref().unwrap_or("all") {
        "all" => Figure::ALL.to_vec(),
        f => vec![f.parse::<Figure>()?],
    };
    let grid = args.grid.unwrap_or_else(default_grid);
    for figure in figures {
        for path in reproduce(figure, &out, &grid, args.delta.unwrap_or(DEFAULT_DELTA))? {
            outln!("{}", path.display());
        }
    }
    Ok(())
}

fn cmd_crosscheck(args: CrosscheckArgs) -> Result<bool> {
    let d = CrosscheckConfig::default();
    let config = CrosscheckConfig {
        max_n: args.max_n.unwrap_or(d.max_n),
        grid: args.grid.unwrap_or(d.grid),
        trials: args.trials.unwrap_or(d.trials),
        seed: args.seed.unwrap_or(d.seed),
        workers: args.workers.unwrap_or_else(default_workers),
        perturb: args.perturb.unwrap_or(d.perturb),
    };
    let report = crosscheck(&config)?;
    if args.json {
        outln!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        out!("{report}");
    }
    Ok(report.passed())
}

fn cmd_ghz(args: GhzArgs) -> Result<()> {
    let parties = args.parties.unwrap_or(3);
    let k = (1usize << (parties.clamp(2, 12) - 1)) - 1;
    let fidelity = parse_exact(&require(args.fidelity, "fidelity")?)?;
    let lambda0 = parse_exact(args.lambda0.as_deref().unwrap_or("0"))?;
    let lambda = match args.lambda {
        Some(list) => list.iter().map(|s| parse_exact(s)).collect::<Result<Vec<_>, _>>()?,
        None => vec![<Exact as num::Zero>::zero(); k],
    };
    let noise = GHZDiagonalState::new(parties, fidelity, lambda0, lambda)?;
    let rounds = match args.rounds.as_deref().unwrap_or("two-round") {
        "amplitude" => GhzRounds::Amplitude,
        "two-round" => GhzRounds::AmplitudeThenPhase,
        other => return Err(Error::Domain(format!("unknown rounds {other}")).into()),
    };
    let n = require(args.n, "n")?;
    let record = match args.trials {
        None => {
            let p = ghz_failure_probability(&noise, n, rounds)?;
            json!({
                "parties": parties,
                "n": n,
                "rounds": rounds,
                "delta": ensemble_verify::arith::exact_to_f64(&p),
                "delta_exact": p.to_string(),
            })
        }
        Some(trials) => {
            let seed = args.seed.unwrap_or(0);
            let workers = args.workers.unwrap_or_else(default_workers);
            let est = ghz_monte_carlo(&noise.to_f64(), n, rounds, trials, seed, workers)?;
            json!({
                "parties": parties,
                "n": n,
                "rounds": rounds,
                "trials": trials,
                "seed": seed,
                "estimate": est.estimate,
                "ci_low": est.ci_low,
                "ci_high": est.ci_high,
            })
        }
    };
    outln!("{}", serde_json::to_string_pretty(&record)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Analytic(a) => {
            let c: AnalyticArgs = load_config(cfg)?;
            cmd_analytic(merge!(a, c, strategy, fidelity, n, m, m_embed, delta, noise))?
        }
        Command::Simulate(a) => {
            let c: SimulateArgs = load_config(cfg)?;
            cmd_simulate(merge!(a, c, strategy, noise, fidelity, n, m, m_embed, trials, seed, workers))?
        }
        Command::Reproduce(a) => {
            let c: ReproduceArgs = load_config(cfg)?;
            cmd_reproduce(merge!(a, c, figure, out, delta, grid))?
        }
        Command::Crosscheck(a) => {
            let c: CrosscheckArgs = load_config(cfg)?;
            if !cmd_crosscheck(merge!(a, c, max_n, grid, trials, seed, workers, perturb))? {
                return Ok(ExitCode::from(4));
            }
        }
        Command::Ghz(a) => {
            let c: GhzArgs = load_config(cfg)?;
            cmd_ghz(merge!(a, c, parties, fidelity, lambda0, lambda, n, rounds, trials, seed, workers))?
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Domain(_) | Error::BaselineUndefined) => 2,
        Some(Error::Resource(_) | Error::SearchFailed(_)) => 3,
        None if err.downcast_ref::<std::io::Error>().is_some() => 3,
        None => 2,
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        // a closed stdout, e.g. when piping into `head`
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
