use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ordpat::affine::{count_alcoves, pattern_distribution_uniform, uniform_probability};
use ordpat::analysis::{fingerprint, TimeSeries};
use ordpat::exact::{
    format_rational, laplace_probability, pattern_distribution_laplace, rational_to_f64,
    symmetric_universal_probability,
};
use ordpat::gaussian::{l_equivalent, lev_dominates, Comparison, OrderClosure};
use ordpat::montecarlo::{estimate_distribution, estimate_probability, Estimate, StepDistribution};
use ordpat::{is_almost_consecutive, parse_permutation, level_vector, Permutation, TiePolicy};
use serde_json::{json, Value};

const TOOL: &str = "ordpat";
const DEFAULT_TRIALS: u64 = 1_000_000;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Input(#[from] ordpat::Error),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) | Self::Read { .. } => 2,
            Self::Internal(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "ordpat", version, about = "Ordinal pattern probabilities for symmetric random walks")]
struct Cli {
    /// Worker threads (default: all cores); results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    Laplace,
    Uniform,
    Normal,
}

impl Dist {
    fn step(self) -> StepDistribution {
        match self {
            Self::Laplace => StepDistribution::LaplaceUnit,
            Self::Uniform => StepDistribution::UniformPm1,
            Self::Normal => StepDistribution::NormalUnit,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Laplace => "laplace",
            Self::Uniform => "uniform",
            Self::Normal => "normal",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactDist {
    Laplace,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    Reject,
    StableLeft,
}

fn pattern(text: &str) -> Result<Permutation, String> {
    parse_permutation(text).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Probability of one pattern.
    Prob {
        #[arg(long)]
        dist: Dist,
        #[arg(long, value_parser = pattern)]
        pattern: Permutation,
        /// Monte Carlo trials (normal steps, or a cross-check for the exact laws).
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compare against another pattern in the Gaussian order (normal only).
        #[arg(long, value_parser = pattern)]
        versus: Option<Permutation>,
    },
    /// Exact distribution over all patterns of length n.
    Table {
        #[arg(long)]
        dist: ExactDist,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Gaussian order verdict on P(pi) versus P(tau).
    Compare {
        #[arg(long, value_parser = pattern)]
        pi: Permutation,
        #[arg(long, value_parser = pattern)]
        tau: Permutation,
    },
    /// Seeded Monte Carlo estimate of the whole distribution.
    Simulate {
        #[arg(long)]
        dist: Dist,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Pattern frequencies and reference divergences of a series.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        window: usize,
        #[arg(long, value_enum, default_value_t = Tie::StableLeft)]
        tie: Tie,
    },
}

fn estimate_json(e: &Estimate) -> Value {
    json!({ "value": e.value, "stderr": e.standard_error, "trials": e.trials })
}

fn prob(
    dist: Dist,
    pi: &Permutation,
    trials: Option<u64>,
    seed: u64,
    versus: Option<&Permutation>,
) -> Result<Value, CliError> {
    if versus.is_some() && !matches!(dist, Dist::Normal) {
        return Err(ordpat::Error::InvalidArgument("--versus needs --dist normal".into()).into());
    }
    let mut out = json!({
        "pattern": pi.to_string(),
        "dist": dist.name(),
        "almost_consecutive": is_almost_consecutive(pi),
        "level_vector": level_vector(pi).counts(),
    });
    let exact = match dist {
        Dist::Laplace => Some(laplace_probability(pi)),
        Dist::Uniform => {
            out["alcoves"] = json!(count_alcoves(pi)?);
            Some(uniform_probability(pi)?)
        }
        Dist::Normal => None,
    };
    if let Some(p) = &exact {
        out["probability"] = json!(format_rational(p));
        out["probability_float"] = json!(rational_to_f64(p));
    }
    let trials = match (dist, trials) {
        (Dist::Normal, t) => Some(t.unwrap_or(DEFAULT_TRIALS)),
        (_, t) => t,
    };
    if let Some(trials) = trials {
        out["estimate"] = estimate_json(&estimate_probability(dist.step(), pi, trials, seed)?);
        out["seed"] = json!(seed);
    }
    if let Dist::Normal = dist {
        out["universal"] = match symmetric_universal_probability(pi).value() {
            Some(r) => json!(format_rational(r)),
            None => Value::Null,
        };
        if let Some(tau) = versus {
            out["versus"] = json!({ "pattern": tau.to_string(), "verdict": verdict(pi, tau)?.name() });
        }
    }
    Ok(out)
}

fn verdict(pi: &Permutation, tau: &Permutation) -> Result<Comparison, CliError> {
    if pi.len() != tau.len() {
        return Err(ordpat::Error::SizeMismatch { left: pi.len(), right: tau.len() }.into());
    }
    Ok(OrderClosure::cached(pi.len())?.compare(pi, tau)?)
}

fn compare(pi: &Permutation, tau: &Permutation) -> Result<Value, CliError> {
    let v = verdict(pi, tau)?;
    Ok(json!({
        "pi": pi.to_string(),
        "tau": tau.to_string(),
        "verdict": v.name(),
        "lev_dominates": lev_dominates(pi, tau)?,
        "l_equivalent": l_equivalent(pi, tau)?,
    }))
}

fn table(dist: ExactDist, n: usize) -> Result<(Value, Vec<(String, String)>), CliError> {
    let (name, d) = match dist {
        ExactDist::Laplace => ("laplace", pattern_distribution_laplace(n)?),
        ExactDist::Uniform => ("uniform", pattern_distribution_uniform(n)?),
    };
    let values = d.exact_values().ok_or_else(|| CliError::Internal("table is not exact".into()))?;
    let rows: Vec<(String, String)> =
        Permutation::all(n).zip(values).map(|(pi, p)| (pi.to_string(), format_rational(p))).collect();
    let entries: Vec<Value> = rows.iter().map(|(pi, p)| json!({ "pattern": pi, "probability": p })).collect();
    let sum = d.exact_sum().map(|s| format_rational(&s));
    Ok((json!({ "dist": name, "n": n, "entries": entries, "sum": sum }), rows))
}

fn simulate(dist: Dist, n: usize, trials: u64, seed: u64) -> Result<Value, CliError> {
    let d = estimate_distribution(dist.step(), n, trials, seed)?;
    let counts = d.counts().unwrap_or_default();
    let entries: Vec<Value> = Permutation::all(n)
        .zip(counts)
        .map(|(pi, &c)| {
            let e = Estimate::from_counts(c, trials);
            json!({ "pattern": pi.to_string(), "count": c, "estimate": estimate_json(&e) })
        })
        .collect();
    Ok(json!({ "dist": dist.name(), "n": n, "trials": trials, "seed": seed, "entries": entries }))
}

fn analyze(input: &PathBuf, window: usize, tie: Tie) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(input).map_err(|source| CliError::Read { path: input.clone(), source })?;
    let series = TimeSeries::parse(&text)?;
    let policy = match tie {
        Tie::Reject => TiePolicy::Reject,
        Tie::StableLeft => TiePolicy::StableLeft,
    };
    let report = fingerprint(&series, window, policy)?;
    let counts = report.empirical.counts().unwrap_or_default();
    let frequencies: Vec<Value> = report
        .empirical
        .iter()
        .zip(counts)
        .filter(|(_, &c)| c > 0)
        .map(|((pi, f), c)| json!({ "pattern": pi.to_string(), "count": c, "frequency": f }))
        .collect();
    Ok(json!({
        "input": input.display().to_string(),
        "samples": series.len(),
        "window": window,
        "tie": match tie { Tie::Reject => "reject", Tie::StableLeft => "stable-left" },
        "windows": report.empirical.total(),
        "entropy": report.entropy,
        "kl": { "laplace": report.divergence.laplace, "uniform": report.divergence.uniform },
        "almost_consecutive_mass": {
            "observed": report.ac_mass_observed,
            "expected": format_rational(&report.ac_mass_expected),
        },
        "frequencies": frequencies,
    }))
}

fn envelope(command: &str, result: Value) -> Value {
    json!({ "tool": TOOL, "version": env!("CARGO_PKG_VERSION"), "command": command, "result": result })
}

fn run(cli: Cli) -> Result<String, CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let doc = match cli.command {
        Command::Prob { dist, pattern, trials, seed, versus } => {
            envelope("prob", prob(dist, &pattern, trials, seed, versus.as_ref())?)
        }
        Command::Table { dist, n, format } => {
            let (result, rows) = table(dist, n)?;
            if let Format::Csv = format {
                let mut out = String::from("pattern,probability\n");
                for (pi, p) in rows {
                    out.push_str(&format!("{pi},{p}\n"));
                }
                return Ok(out);
            }
            envelope("table", result)
        }
        Command::Compare { pi, tau } => envelope("compare", compare(&pi, &tau)?),
        Command::Simulate { dist, n, trials, seed } => envelope("simulate", simulate(dist, n, trials, seed)?),
        Command::Analyze { input, window, tie } => envelope("analyze", analyze(&input, window, tie)?),
    };
    Ok(format!("{doc}\n"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("usage error"));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
