use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use bbk_cli::config::Config;
use bbk_cli::grid::{parse_axis, AxisTexts, Grid};
use bbk_cli::scan::run_scan;
use bbk_cli::suites::{blowup_probe, diagonal_probe, diagonal_radii, probe_radii, run_suite, Suite, SuiteOptions};
use bbk_cli::thread_pool;
use bbk_core::classifier::{classify_values, Exponent, Params, Value};
use clap::{Args, Parser, Subcommand};

const PARAM_KEYS: [&str; 7] = ["n", "b", "c", "alpha", "beta", "p", "q"];

/// Boundedness of Bergman-Besov integral operators on the unit ball of R^n.
#[derive(Parser)]
#[command(name = "bbk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one tuple; exit code 0 when bounded, 1 when unbounded, 2 on invalid input.
    Classify(TupleArgs),
    /// Classify every tuple of a grid and write CSV.
    Scan(ScanArgs),
    /// Run a verification suite and write a JSON report; nonzero exit on any failed check.
    Verify(VerifyArgs),
    /// Evaluate a diagnostic along a radius ladder and write JSON.
    #[command(subcommand)]
    Probe(ProbeCommand),
}

/// Parameters may be integers, fractions `a/b`, decimals (all exact) or scientific notation
/// (floating point); `p` and `q` also accept `inf`.
#[derive(Args)]
struct TupleArgs {
    #[arg(long)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// File of `key = value` lines with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Each axis is a value, a comma list, or `start:stop:step` (inclusive of `stop`).
#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    axes: TupleArgs,
    /// Recorded in every row.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[arg(long)]
    n: Option<usize>,
    /// Random draws per check (default depends on the suite).
    #[arg(long)]
    samples: Option<usize>,
    /// Restrict `schur` to `1.1` or `1.3`, or `jroute` to a theorem or route label.
    #[arg(long)]
    theorem: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ProbeCommand {
    /// `∫|R_β(x,y)|dν_β(y)` against `1 + log(1/(1-|x|^2))`.
    Blowup {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
        /// Comma-separated radii (default 0.5, 0.55, ..., 0.95).
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Growth of `R_α(x,x)` along a radius ladder.
    Diagonal {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(value: &impl serde::Serialize, path: Option<&Path>) -> Result<()> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn load_config(path: Option<&Path>, keys: &[&str]) -> Result<Config> {
    path.map_or_else(|| Ok(Config::default()), |p| Config::load(p, keys))
}

fn resolved(config: &Config, args: &TupleArgs) -> Result<[String; 7]> {
    let flags = [&args.n, &args.b, &args.c, &args.alpha, &args.beta, &args.p, &args.q];
    let mut out: [String; 7] = Default::default();
    for ((slot, key), flag) in out.iter_mut().zip(PARAM_KEYS).zip(flags) {
        *slot = config
            .resolve(key, flag.as_deref())
            .ok_or_else(|| anyhow!("missing parameter {key}"))?;
    }
    Ok(out)
}

fn single(text: &str, key: &str) -> Result<Value> {
    match parse_axis(text, false)
        .with_context(|| format!("parameter {key}"))?
        .as_slice()
    {
        [Exponent::Finite(v)] => Ok(v.clone()),
        _ => Err(anyhow!("parameter {key} must be a single number, got {text:?}")),
    }
}

fn exponent(text: &str, key: &str) -> Result<Exponent<Value>> {
    Exponent::parse(text).with_context(|| format!("parameter {key}"))
}

fn classify_command(args: TupleArgs) -> Result<ExitCode> {
    let mut keys = PARAM_KEYS.to_vec();
    keys.push("output");
    let config = load_config(args.config.as_deref(), &keys)?;
    let [n, b, c, alpha, beta, p, q] = resolved(&config, &args)?;
    let params = Params {
        n: n.trim()
            .parse()
            .with_context(|| format!("parameter n must be an integer, got {n:?}"))?,
        b: single(&b, "b")?,
        c: single(&c, "c")?,
        alpha: single(&alpha, "alpha")?,
        beta: single(&beta, "beta")?,
        p: exponent(&p, "p")?,
        q: exponent(&q, "q")?,
    };
    let verdict = classify_values(&params)?;
    let output = args.output.or_else(|| config.get("output").map(PathBuf::from));
    write_json(&verdict, output.as_deref())?;
    Ok(if verdict.bounded {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn scan_command(args: ScanArgs) -> Result<ExitCode> {
    let mut keys = PARAM_KEYS.to_vec();
    keys.extend(["seed", "output"]);
    let config = load_config(args.axes.config.as_deref(), &keys)?;
    let [n, b, c, alpha, beta, p, q] = resolved(&config, &args.axes)?;
    let grid = Grid::parse(AxisTexts {
        n: &n,
        b: &b,
        c: &c,
        alpha: &alpha,
        beta: &beta,
        p: &p,
        q: &q,
    })?;
    let seed = match args.seed {
        Some(seed) => seed,
        None => config
            .get("seed")
            .map(|s| s.parse().with_context(|| format!("seed must be an integer, got {s:?}")))
            .transpose()?
            .unwrap_or(0),
    };
    let output = args.axes.output.or_else(|| config.get("output").map(PathBuf::from));
    let pool = thread_pool()?;
    let summary = run_scan(&grid, seed, &pool, sink(output.as_deref())?)?;
    if summary.downgraded {
        eprintln!("note: the grid mixes exact and floating-point entries; every tuple was compared in floating point");
    }
    eprintln!("{} tuples, {} bounded", summary.rows, summary.bounded);
    Ok(ExitCode::SUCCESS)
}

fn verify_command(args: VerifyArgs) -> Result<ExitCode> {
    let config = load_config(args.config.as_deref(), &["n", "samples", "theorem", "seed", "output"])?;
    let number = |key: &str| -> Result<Option<u64>> {
        config
            .get(key)
            .map(|s| {
                s.parse()
                    .with_context(|| format!("{key} must be an integer, got {s:?}"))
            })
            .transpose()
    };
    let options = SuiteOptions {
        n: args.n.or(number("n")?.map(|v| v as usize)),
        samples: args.samples.or(number("samples")?.map(|v| v as usize)),
        theorem: config.resolve("theorem", args.theorem.as_deref()),
        seed: args.seed.or(number("seed")?).unwrap_or(0),
    };
    let output = args.output.or_else(|| config.get("output").map(PathBuf::from));
    let report = run_suite(args.suite, &options, &thread_pool()?)?;
    write_json(&report, output.as_deref())?;
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn probe_command(command: ProbeCommand) -> Result<ExitCode> {
    let (json, output) = match command {
        ProbeCommand::Blowup { n, beta, radii, output } => {
            (blowup_probe(n, beta, &radii.unwrap_or_else(probe_radii))?, output)
        }
        ProbeCommand::Diagonal {
            n,
            alpha,
            radii,
            output,
        } => (diagonal_probe(n, alpha, &radii.unwrap_or_else(diagonal_radii))?, output),
    };
    write_json(&json, output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Classify(args) => classify_command(args),
        Command::Scan(args) => scan_command(args),
        Command::Verify(args) => verify_command(args),
        Command::Probe(command) => probe_command(command),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
