use std::fs;
use std::hash::{BuildHasher, RandomState};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use zeck_core::experiments::{interval_distribution, IntervalAnalysis};
use zeck_core::report::{decimal, to_canonical_json, to_canonical_value};
use zeck_core::sample::stream_rng;
use zeck_core::stats::{summarize, DistributionSummary};
use zeck_core::{
    bad_probability, cdf_sandwich_check, check_lemmas, decompose, exact_distribution_below,
    exact_distribution_prefix, exact_distribution_top_block, fib, run_counterexample, run_gap_scan,
    run_moment_slopes, run_theorem1, uniform_in_range, AlphaRule, DistributionKind,
    ExperimentConfig, ExperimentReport, IntervalParams, QRule, SamplingMode, SummandDistribution,
    ZeckError,
};

/// Environment variable holding the default worker count.
const WORKERS_ENV: &str = "ZECK_WORKERS";

#[derive(Parser)]
#[command(
    name = "zeck",
    version,
    about = "Zeckendorf decompositions and summand statistics"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (default: $ZECK_WORKERS, else all cores). Never changes the output.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// The Fibonacci number F_k (F_0 = F_1 = 1).
    Fib { k: i64 },
    /// Zeckendorf decomposition of a nonnegative integer.
    Decompose {
        #[arg(value_parser = parse_big)]
        m: BigUint,
    },
    /// Exact probability that the middle block has no two adjacent zeros.
    CountBad {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        q: usize,
    },
    /// Summand-count distribution of a block or prefix interval.
    Dist(DistArgs),
    /// Summand-count distribution of [m, m + F_alpha).
    IntervalDist(IntervalDistArgs),
    /// Exhaustive check of the interval lemmas for small n.
    LemmaCheck {
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        #[arg(long, default_value_t = 18)]
        n_max: usize,
    },
    /// Run an experiment and emit its report.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("range").required(true).args(["n", "prefix", "below"]))]
struct DistArgs {
    /// Top block [F_n, F_{n+1}).
    #[arg(long)]
    n: Option<usize>,
    /// Legal strings of length k, i.e. [0, F_{k+1}).
    #[arg(long)]
    prefix: Option<usize>,
    /// [0, F_alpha).
    #[arg(long)]
    below: Option<usize>,
    /// Exact weights (the default).
    #[arg(long, conflicts_with = "samples")]
    exact: bool,
    /// Estimate from this many uniform draws instead.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct IntervalDistArgs {
    #[arg(long, value_parser = parse_big)]
    m: BigUint,
    /// Top index of the base point (default: that of m).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: usize,
    #[arg(long)]
    q: usize,
    /// auto, exhaustive, sampled or sampled:N.
    #[arg(long, default_value = "auto")]
    mode: SamplingMode,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Experiment {
    /// Gaussian behavior on random intervals [m, m + F_alpha).
    Theorem1(Theorem1Args),
    /// The interval whose summand counts split into two far-apart groups.
    Counterexample {
        #[arg(long)]
        n: usize,
    },
    /// No-gap probabilities over an (n, q) grid.
    GapScan {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<usize>,
        #[arg(long, default_value = "half")]
        alpha_rule: AlphaRule,
    },
    /// Exact means and variances over [0, F_{k+1}) and their slopes in k.
    MomentSlopes {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "50,100,150,200,250,300,350,400"
        )]
        k: Vec<usize>,
    },
}

#[derive(Args)]
struct Theorem1Args {
    /// JSON file with any of: n, alpha_rule, q_rule, trials, seed, mode. Flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha_rule: Option<AlphaRule>,
    #[arg(long)]
    q_rule: Option<QRule>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mode: Option<SamplingMode>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    n: Option<usize>,
    alpha_rule: Option<AlphaRule>,
    q_rule: Option<QRule>,
    trials: Option<usize>,
    seed: Option<u64>,
    mode: Option<SamplingMode>,
}

const DEFAULT_TRIALS: usize = 100;

#[derive(Debug)]
enum CliError {
    Core(ZeckError),
    /// Reading input or writing output failed.
    Io(String),
    /// Reports always serialize; failure is a bug.
    Internal(String),
}

impl From<ZeckError> for CliError {
    fn from(e: ZeckError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(ZeckError::Capability { .. }) => 2,
            CliError::Core(ZeckError::Invariant(_)) | CliError::Internal(_) => 3,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Io(m) => m.clone(),
            CliError::Internal(m) => format!("internal error: {m}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn parse_big(s: &str) -> Result<BigUint, String> {
    s.parse::<BigUint>()
        .map_err(|_| format!("{s:?} is not a nonnegative decimal integer"))
}

fn argument(msg: impl Into<String>) -> CliError {
    CliError::Core(ZeckError::Argument(msg.into()))
}

/// Uses the given seed, or picks one and reports it so the run can be replayed.
fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = RandomState::new().hash_one(std::time::SystemTime::now());
        eprintln!("seed: {s}");
        s
    })
}

fn resolve_workers(flag: Option<usize>) -> CliResult<Option<usize>> {
    if let Some(w) = flag {
        return Ok(Some(w));
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .parse()
            .map(Some)
            .map_err(|_| argument(format!("{WORKERS_ENV}={v:?} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

/// A command's result: JSON, plus CSV rows for distribution commands.
struct Output {
    json: Value,
    csv: Option<SummandDistribution>,
    /// Exit with an invariant failure after writing the report.
    failed_check: Option<String>,
}

impl Output {
    fn json<T: Serialize>(value: &T) -> CliResult<Output> {
        Ok(Output {
            json: to_canonical_value(value).map_err(|e| CliError::Internal(e.to_string()))?,
            csv: None,
            failed_check: None,
        })
    }
}

fn distribution_csv(dist: &SummandDistribution) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(["summands", "weight"]).map_err(io)?;
    for (j, weight) in dist.weights() {
        w.write_record([j.to_string(), weight.to_string()])
            .map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

fn summary_or_null(dist: &SummandDistribution) -> CliResult<Option<DistributionSummary>> {
    match summarize(dist) {
        Ok(s) => Ok(Some(s)),
        Err(ZeckError::Degenerate(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct DistReport {
    #[serde(serialize_with = "decimal")]
    lo: BigUint,
    #[serde(serialize_with = "decimal")]
    hi: BigUint,
    distribution: SummandDistribution,
    summary: Option<DistributionSummary>,
    seed: Option<u64>,
}

fn dist(args: &DistArgs) -> CliResult<Output> {
    let f = |k: usize| fib(k as i64);
    let (lo, hi) = match (args.n, args.prefix, args.below) {
        (Some(n), _, _) => (f(n)?, f(n + 1)?),
        (_, Some(k), _) => (BigUint::default(), f(k + 1)?),
        (_, _, Some(a)) => (BigUint::default(), f(a)?),
        _ => unreachable!("clap requires one range"),
    };
    let (distribution, seed) = match args.samples {
        None => {
            let d = match (args.n, args.prefix, args.below) {
                (Some(n), _, _) => exact_distribution_top_block(n)?,
                (_, Some(k), _) => exact_distribution_prefix(k),
                (_, _, Some(a)) => exact_distribution_below(a)?,
                _ => unreachable!(),
            };
            (d, None)
        }
        Some(0) => return Err(argument("samples must be >= 1")),
        Some(samples) => {
            let seed = resolve_seed(args.seed);
            let mut rng = stream_rng(seed, 0);
            let mut counts = Vec::new();
            for _ in 0..samples {
                let s = decompose(&uniform_in_range(&lo, &hi, &mut rng)?).summand_count();
                if counts.len() <= s {
                    counts.resize(s + 1, 0u64);
                }
                counts[s] += 1;
            }
            let d = SummandDistribution::from_counts(DistributionKind::Empirical, &counts)?;
            (d, Some(seed))
        }
    };
    let report = DistReport {
        summary: summary_or_null(&distribution)?,
        lo,
        hi,
        distribution,
        seed,
    };
    let mut out = Output::json(&report)?;
    out.csv = Some(report.distribution);
    Ok(out)
}

#[derive(Serialize)]
struct IntervalDistReport {
    #[serde(serialize_with = "decimal")]
    m: BigUint,
    params: IntervalParams,
    analysis: IntervalAnalysis,
    summary: Option<DistributionSummary>,
    baseline: Option<DistributionSummary>,
    /// Exhaustive runs only.
    sandwich: Option<bool>,
    defects_in_range: bool,
    seed: Option<u64>,
}

fn interval_dist(args: &IntervalDistArgs) -> CliResult<Output> {
    let n = args.n.unwrap_or_else(|| decompose(&args.m).top_index());
    let params = IntervalParams::new(n, args.alpha, args.q)?;
    let sampled = matches!(
        args.mode.resolve(&fib(args.alpha as i64)?),
        SamplingMode::Sampled(_)
    );
    let seed = sampled.then(|| resolve_seed(args.seed));
    let mut rng = stream_rng(seed.unwrap_or(0), 0);
    let analysis = interval_distribution(&args.m, &params, args.mode, &mut rng)?;
    let baseline = exact_distribution_below(params.alpha())?;
    let sandwich = match analysis.distribution.kind() {
        DistributionKind::Exact => Some(cdf_sandwich_check(
            &analysis.distribution,
            &baseline,
            analysis.s3,
            params.q(),
        )?),
        DistributionKind::Empirical => None,
    };
    let report = IntervalDistReport {
        m: args.m.clone(),
        params,
        summary: summary_or_null(&analysis.distribution)?,
        baseline: summary_or_null(&baseline)?,
        sandwich,
        defects_in_range: analysis.defects_within(params.q()),
        analysis,
        seed,
    };
    let mut out = Output::json(&report)?;
    out.csv = Some(report.analysis.distribution);
    Ok(out)
}

fn theorem1_config(args: &Theorem1Args, workers: Option<usize>) -> CliResult<ExperimentConfig> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<ConfigFile>(&text)
                .map_err(|e| argument(format!("config {}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let n = args
        .n
        .or(file.n)
        .ok_or_else(|| argument("theorem1 needs --n or a config file with n"))?;
    let mut config = ExperimentConfig::new(
        n,
        args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
        resolve_seed(args.seed.or(file.seed)),
    );
    if let Some(rule) = args.alpha_rule.or(file.alpha_rule) {
        config.alpha_rule = rule;
    }
    if let Some(rule) = args.q_rule.or(file.q_rule) {
        config.q_rule = rule;
    }
    if let Some(mode) = args.mode.or(file.mode) {
        config.mode = mode;
    }
    config.workers = workers;
    Ok(config)
}

fn dispatch(cli: &Cli, workers: Option<usize>) -> CliResult<Output> {
    match &cli.command {
        Command::Fib { k } => Output::json(&json!({ "k": k, "value": fib(*k)?.to_string() })),
        Command::Decompose { m } => {
            let code = decompose(m);
            Output::json(&json!({
                "m": m.to_string(),
                "indices": code.indices(),
                "s": code.summand_count(),
            }))
        }
        Command::CountBad { n, alpha, q } => {
            let params = IntervalParams::new(*n, *alpha, *q)?;
            let p = bad_probability(&params);
            let mut v = serde_json::to_value(&p).map_err(|e| CliError::Internal(e.to_string()))?;
            v["n"] = json!(n);
            v["alpha"] = json!(alpha);
            v["q"] = json!(q);
            v["probability_exact"] = json!(p.ratio_string());
            Output::json(&v)
        }
        Command::Dist(args) => dist(args),
        Command::IntervalDist(args) => interval_dist(args),
        Command::LemmaCheck { n_min, n_max } => {
            let report = check_lemmas(*n_min, *n_max)?;
            let mut out = Output::json(&report)?;
            if !report.all_hold {
                out.failed_check = Some(format!("lemma check failed: {:?}", report.total));
            }
            Ok(out)
        }
        Command::Experiment(e) => {
            let report = match e {
                Experiment::Theorem1(args) => {
                    ExperimentReport::Theorem1(run_theorem1(&theorem1_config(args, workers)?)?)
                }
                Experiment::Counterexample { n } => {
                    ExperimentReport::Counterexample(run_counterexample(*n)?)
                }
                Experiment::GapScan { n, q, alpha_rule } => {
                    ExperimentReport::GapScan(run_gap_scan(n, q, *alpha_rule)?)
                }
                Experiment::MomentSlopes { k } => {
                    ExperimentReport::MomentSlopes(run_moment_slopes(k)?)
                }
            };
            Output::json(&report)
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let workers = resolve_workers(cli.workers)?;
    if let Some(w) = workers {
        if w == 0 {
            return Err(argument("workers must be >= 1"));
        }
        // fails only if already initialized, which cannot happen here
        let _ = rayon_pool(w);
    }
    let out = dispatch(&cli, workers)?;
    let text = match cli.format {
        Format::Json => {
            to_canonical_json(&out.json).map_err(|e| CliError::Internal(e.to_string()))? + "\n"
        }
        Format::Csv => match &out.csv {
            Some(d) => distribution_csv(d)?,
            None => {
                return Err(argument(
                    "csv output is available for dist and interval-dist only",
                ))
            }
        },
    };
    write_output(cli.output.as_deref(), &text)?;
    match out.failed_check {
        Some(msg) => Err(CliError::Core(ZeckError::Invariant(msg))),
        None => Ok(()),
    }
}

fn rayon_pool(workers: usize) -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
