//! End-to-end experiments: Gaussian behavior on random small intervals, the
//! non-Gaussian counterexample, gap-probability scans and moment slopes.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{DistributionKind, SummandDistribution};
use crate::error::{arg, Result, ZeckError};
use crate::exact::{
    bad_probability, census_bad_c2, exact_distribution_below, exact_distribution_prefix,
    GoldenConstants,
};
use crate::fib;
use crate::interval::{split, Coverage, IntervalMap, IntervalParams, EXHAUSTIVE_LIMIT};
use crate::report::decimal;
use crate::sample;
use crate::stats::{cdf_sandwich_check, summarize, DistributionSummary};
use crate::zeck::decompose;

/// Offsets drawn per interval in sampled mode unless configured otherwise.
pub const DEFAULT_SAMPLES: u64 = 100_000;

/// Largest `n` for which gap scans also run the exhaustive census.
pub const CENSUS_MAX_N: usize = 18;

/// `floor(x^(1/k))` for integers.
pub fn integer_root(x: usize, k: u32) -> usize {
    let mut r = (x as f64).powf(1.0 / k as f64) as usize;
    while r.checked_pow(k).is_none_or(|p| p > x) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|p| p <= x) {
        r += 1;
    }
    r
}

fn ceil_root(x: usize, k: u32) -> usize {
    let r = integer_root(x, k);
    if r.pow(k) == x {
        r
    } else {
        r + 1
    }
}

/// How `alpha(n)` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum AlphaRule {
    /// `floor(n/2)`
    Half,
    /// `floor(sqrt n)`
    Sqrt,
    /// `floor(ln n)`
    Log,
    Fixed(usize),
}

impl AlphaRule {
    pub fn alpha(&self, n: usize) -> usize {
        match *self {
            AlphaRule::Half => n / 2,
            AlphaRule::Sqrt => integer_root(n, 2),
            AlphaRule::Log => (n as f64).ln().floor().max(0.0) as usize,
            AlphaRule::Fixed(k) => k,
        }
    }
}

/// How `q(n)` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum QRule {
    /// `2 ceil(n^(1/4))`: even, unbounded, and small against `sqrt n`.
    FourthRoot,
    Fixed(usize),
}

impl QRule {
    pub fn q(&self, n: usize) -> usize {
        match *self {
            QRule::FourthRoot => 2 * ceil_root(n, 4),
            QRule::Fixed(k) => k,
        }
    }
}

fn parse_fixed(s: &str) -> Option<std::result::Result<usize, ZeckError>> {
    s.strip_prefix("fixed:").map(|k| {
        k.parse()
            .map_err(|e| ZeckError::Argument(format!("bad fixed value {k:?}: {e}")))
    })
}

impl FromStr for AlphaRule {
    type Err = ZeckError;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(k) = parse_fixed(s) {
            return Ok(AlphaRule::Fixed(k?));
        }
        match s {
            "half" => Ok(AlphaRule::Half),
            "sqrt" => Ok(AlphaRule::Sqrt),
            "log" => Ok(AlphaRule::Log),
            _ => arg(format!(
                "unknown alpha rule {s:?} (half, sqrt, log, fixed:K)"
            )),
        }
    }
}

impl fmt::Display for AlphaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaRule::Half => write!(f, "half"),
            AlphaRule::Sqrt => write!(f, "sqrt"),
            AlphaRule::Log => write!(f, "log"),
            AlphaRule::Fixed(k) => write!(f, "fixed:{k}"),
        }
    }
}

impl FromStr for QRule {
    type Err = ZeckError;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(k) = parse_fixed(s) {
            return Ok(QRule::Fixed(k?));
        }
        match s {
            "fourthroot" => Ok(QRule::FourthRoot),
            _ => arg(format!("unknown q rule {s:?} (fourthroot, fixed:K)")),
        }
    }
}

impl fmt::Display for QRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QRule::FourthRoot => write!(f, "fourthroot"),
            QRule::Fixed(k) => write!(f, "fixed:{k}"),
        }
    }
}

/// Whether an interval distribution is enumerated or sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SamplingMode {
    /// Exhaustive when `F_alpha <= 2^20`, otherwise [`DEFAULT_SAMPLES`] offsets.
    Auto,
    Exhaustive,
    Sampled(u64),
}

impl SamplingMode {
    /// The concrete mode used for an interval of the given length.
    pub fn resolve(&self, width: &BigUint) -> SamplingMode {
        match *self {
            SamplingMode::Auto if width.to_u64().is_some_and(|w| w <= EXHAUSTIVE_LIMIT) => {
                SamplingMode::Exhaustive
            }
            SamplingMode::Auto => SamplingMode::Sampled(DEFAULT_SAMPLES),
            other => other,
        }
    }
}

impl FromStr for SamplingMode {
    type Err = ZeckError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SamplingMode::Auto),
            "exhaustive" => Ok(SamplingMode::Exhaustive),
            "sampled" => Ok(SamplingMode::Sampled(DEFAULT_SAMPLES)),
            _ => match s.strip_prefix("sampled:").map(str::parse::<u64>) {
                Some(Ok(k)) if k > 0 => Ok(SamplingMode::Sampled(k)),
                _ => arg(format!(
                    "unknown mode {s:?} (auto, exhaustive, sampled[:N])"
                )),
            },
        }
    }
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingMode::Auto => write!(f, "auto"),
            SamplingMode::Exhaustive => write!(f, "exhaustive"),
            SamplingMode::Sampled(k) => write!(f, "sampled:{k}"),
        }
    }
}

macro_rules! string_conversions {
    ($($t:ty),*) => {$(
        impl From<$t> for String {
            fn from(v: $t) -> String {
                v.to_string()
            }
        }
        impl TryFrom<String> for $t {
            type Error = ZeckError;
            fn try_from(s: String) -> Result<Self> {
                s.parse()
            }
        }
    )*};
}
string_conversions!(AlphaRule, QRule, SamplingMode);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    #[serde(default = "default_alpha_rule")]
    pub alpha_rule: AlphaRule,
    #[serde(default = "default_q_rule")]
    pub q_rule: QRule,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: SamplingMode,
    /// Thread count; never affects the report.
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
}

fn default_alpha_rule() -> AlphaRule {
    AlphaRule::Half
}

fn default_q_rule() -> QRule {
    QRule::FourthRoot
}

fn default_mode() -> SamplingMode {
    SamplingMode::Auto
}

impl ExperimentConfig {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            n,
            alpha_rule: default_alpha_rule(),
            q_rule: default_q_rule(),
            trials,
            seed,
            mode: default_mode(),
            workers: None,
        }
    }

    pub fn params(&self) -> Result<IntervalParams> {
        IntervalParams::new(self.n, self.alpha_rule.alpha(self.n), self.q_rule.q(self.n))
    }
}

/// The summand distribution of an interval `[m, m + F_alpha)` along with the
/// defect and bijection bookkeeping of its map onto `[0, F_alpha)`.
#[derive(Debug, Clone, Serialize)]
pub struct IntervalAnalysis {
    pub s3: usize,
    pub coverage: Coverage,
    /// Distribution of `s(x)`.
    pub distribution: SummandDistribution,
    /// Distribution of `s(t(x))`.
    pub image: SummandDistribution,
    /// Observed `s(x) - s3 - s(t(x))` values and their multiplicities.
    pub defects: BTreeMap<i64, u64>,
}

impl IntervalAnalysis {
    pub fn defects_within(&self, q: usize) -> bool {
        self.defects.keys().all(|&d| d >= 0 && d < q as i64)
    }
}

fn histogram(counts: &[u64], kind: DistributionKind) -> Result<SummandDistribution> {
    SummandDistribution::from_counts(kind, counts)
}

fn bump(counts: &mut Vec<u64>, j: usize) {
    if counts.len() <= j {
        counts.resize(j + 1, 0);
    }
    counts[j] += 1;
}

/// Analyzes `[m, m + F_alpha)` for a gap-case `m`. Exhaustive mode walks every
/// offset; sampled mode draws offsets with replacement from `rng`.
pub fn interval_distribution(
    m: &BigUint,
    params: &IntervalParams,
    mode: SamplingMode,
    rng: &mut dyn RngCore,
) -> Result<IntervalAnalysis> {
    let map = IntervalMap::new(m, params)?;
    let mut xs = Vec::new();
    let mut ts = Vec::new();
    let mut defects = BTreeMap::new();
    let (coverage, kind) = match mode.resolve(map.width()) {
        SamplingMode::Exhaustive => {
            map.walk(|step| {
                bump(&mut xs, step.x.summand_count());
                bump(&mut ts, step.t.summand_count());
                *defects.entry(step.defect()).or_insert(0) += 1;
                ControlFlow::<()>::Continue(())
            })?;
            let width = map.width().to_u64().expect("walk checked the width");
            (Coverage::Exhaustive(width), DistributionKind::Exact)
        }
        SamplingMode::Sampled(samples) => {
            for _ in 0..samples {
                let h = sample::uniform_below(map.width(), rng)?;
                let sx = decompose(&(m + &h)).summand_count();
                let st = decompose(&map.t(&h)?).summand_count();
                bump(&mut xs, sx);
                bump(&mut ts, st);
                *defects
                    .entry(sx as i64 - map.s3() as i64 - st as i64)
                    .or_insert(0) += 1;
            }
            (Coverage::Sampled(samples), DistributionKind::Empirical)
        }
        SamplingMode::Auto => unreachable!("resolved above"),
    };
    Ok(IntervalAnalysis {
        s3: map.s3(),
        coverage,
        distribution: histogram(&xs, kind)?,
        image: histogram(&ts, kind)?,
        defects,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    #[serde(serialize_with = "decimal")]
    pub m: BigUint,
    pub s3: usize,
    pub gap_found: bool,
    pub coverage: Option<Coverage>,
    pub summary: Option<DistributionSummary>,
    /// `ks - baseline ks`.
    pub ks_deviation: Option<f64>,
    pub defect_histogram: Option<BTreeMap<i64, u64>>,
    pub defects_in_range: Option<bool>,
    /// Exhaustive mode only: the CDF sandwich against `[0, F_alpha)`.
    pub sandwich: Option<bool>,
    /// Exhaustive mode only: `s(t(x))` has exactly the `[0, F_alpha)` law.
    pub image_matches_baseline: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Aggregates {
    pub gap_trials: usize,
    pub bad_trials: usize,
    pub gap_fraction: f64,
    pub bad_fraction: f64,
    pub bad_probability: f64,
    pub bad_probability_exact: String,
    /// `(bad_fraction - p) / sqrt(p (1-p) / trials)`.
    pub bad_fraction_z: f64,
    pub baseline: DistributionSummary,
    pub median_ks: Option<f64>,
    pub max_abs_ks_deviation: Option<f64>,
    pub all_defects_in_range: bool,
    pub all_sandwiches_hold: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub config: ExperimentConfig,
    pub params: IntervalParams,
    pub trials: Vec<TrialRecord>,
    pub aggregates: Theorem1Aggregates,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentReport {
    Theorem1(Theorem1Report),
    Counterexample(CounterexampleReport),
    GapScan(GapScanReport),
    MomentSlopes(MomentSlopesReport),
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| ZeckError::Invariant(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

fn run_trial(
    trial: usize,
    config: &ExperimentConfig,
    params: &IntervalParams,
    baseline: &SummandDistribution,
    baseline_ks: f64,
) -> Result<TrialRecord> {
    let mut rng = sample::stream_rng(config.seed, trial as u64);
    let lo = fib::fib(params.n() as i64)?;
    let hi = fib::fib(params.n() as i64 + 1)?;
    let m = sample::uniform_in_range(&lo, &hi, &mut rng)?;
    let sp = split(&decompose(&m), params)?;
    let s3 = sp.c3.count_ones();
    let mut record = TrialRecord {
        trial,
        m,
        s3,
        gap_found: sp.c2.has_adjacent_zeros(),
        coverage: None,
        summary: None,
        ks_deviation: None,
        defect_histogram: None,
        defects_in_range: None,
        sandwich: None,
        image_matches_baseline: None,
    };
    if !record.gap_found {
        return Ok(record);
    }
    let analysis = interval_distribution(&record.m, params, config.mode, &mut rng)?;
    let summary = summarize(&analysis.distribution)?;
    if analysis.distribution.kind() == DistributionKind::Exact {
        record.sandwich = Some(cdf_sandwich_check(
            &analysis.distribution,
            baseline,
            analysis.s3,
            params.q(),
        )?);
        record.image_matches_baseline = Some(&analysis.image == baseline);
    }
    record.defects_in_range = Some(analysis.defects_within(params.q()));
    record.ks_deviation = Some(summary.ks - baseline_ks);
    record.coverage = Some(analysis.coverage);
    record.summary = Some(summary);
    record.defect_histogram = Some(analysis.defects);
    Ok(record)
}

/// Draws `trials` uniform base points from `[F_n, F_{n+1})` and analyzes the
/// interval `[m, m + F_alpha)` of each one that has a gap in its middle block.
/// Trials use independent random substreams, so the report does not depend
/// on the worker count.
pub fn run_theorem1(config: &ExperimentConfig) -> Result<Theorem1Report> {
    let params = config.params()?;
    if config.trials == 0 {
        return arg("trials must be >= 1");
    }
    let width = fib::fib(params.alpha() as i64)?;
    if config.mode == SamplingMode::Exhaustive
        && width.to_u64().is_none_or(|w| w > EXHAUSTIVE_LIMIT)
    {
        return Err(ZeckError::Capability {
            what: format!(
                "exhaustive intervals of length F_{} = {width}",
                params.alpha()
            ),
            limit: EXHAUSTIVE_LIMIT.to_string(),
        });
    }
    let baseline = exact_distribution_below(params.alpha())?;
    let baseline_summary = summarize(&baseline)?;
    let trials: Vec<TrialRecord> = with_workers(config.workers, || {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(i, config, &params, &baseline, baseline_summary.ks))
            .collect::<Result<Vec<_>>>()
    })??;

    let gap_trials = trials.iter().filter(|t| t.gap_found).count();
    let bad_trials = trials.len() - gap_trials;
    let exact = bad_probability(&params);
    let n = trials.len() as f64;
    let bad_fraction = bad_trials as f64 / n;
    let p = exact.probability;
    let deviations: Vec<f64> = trials.iter().filter_map(|t| t.ks_deviation).collect();
    let sandwiches: Vec<bool> = trials.iter().filter_map(|t| t.sandwich).collect();
    let aggregates = Theorem1Aggregates {
        gap_trials,
        bad_trials,
        gap_fraction: gap_trials as f64 / n,
        bad_fraction,
        bad_probability: p,
        bad_probability_exact: exact.ratio_string(),
        bad_fraction_z: (bad_fraction - p) / (p * (1.0 - p) / n).sqrt(),
        baseline: baseline_summary,
        median_ks: median(
            trials
                .iter()
                .filter_map(|t| t.summary.map(|s| s.ks))
                .collect(),
        ),
        max_abs_ks_deviation: deviations.iter().map(|d| d.abs()).reduce(f64::max),
        all_defects_in_range: trials.iter().all(|t| t.defects_in_range != Some(false)),
        all_sandwiches_hold: (!sandwiches.is_empty()).then(|| sandwiches.iter().all(|&s| s)),
    };
    Ok(Theorem1Report {
        config: config.clone(),
        params,
        trials,
        aggregates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexamplePoint {
    #[serde(serialize_with = "decimal")]
    pub x: BigUint,
    pub s: usize,
    /// `true` below the split point `F_{2n} + F_{n+1}`.
    pub low: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub n: usize,
    /// `floor(n^(1/4))`.
    pub r: usize,
    #[serde(serialize_with = "decimal")]
    pub lower: BigUint,
    #[serde(serialize_with = "decimal")]
    pub split: BigUint,
    #[serde(serialize_with = "decimal")]
    pub upper: BigUint,
    pub points: Vec<CounterexamplePoint>,
    pub s_values: Vec<usize>,
    pub low_range: [usize; 2],
    pub high_range: [usize; 2],
    pub disjoint: bool,
}

/// Largest counterexample interval that is enumerated.
pub const COUNTEREXAMPLE_LIMIT: u64 = 1 << 20;

/// Enumerates `[F_{2n} + F_n + F_{n-2} + ... + F_r, F_{2n} + F_{n+1} + F_r)`
/// with `r = floor(n^(1/4))`. Below `F_{2n} + F_{n+1}` the decompositions use
/// about `n/2` summands; above it at most about `r`.
///
/// The descending sum runs over `n, n-2, ...` down to the smallest index
/// `>= r` of the same parity as `n`.
pub fn run_counterexample(n: usize) -> Result<CounterexampleReport> {
    if n < 3 {
        return arg(format!("the counterexample needs n >= 3 (n = {n})"));
    }
    let r = integer_root(n, 4);
    let f = |k: usize| fib::fib(k as i64).expect("nonnegative index");
    let base = f(2 * n);
    let lower = &base + (r..=n).rev().step_by(2).map(f).sum::<BigUint>();
    let split_point = &base + f(n + 1);
    let upper = &split_point + f(r);
    let len = (&upper - &lower)
        .to_u64()
        .filter(|l| *l <= COUNTEREXAMPLE_LIMIT)
        .ok_or_else(|| ZeckError::Capability {
            what: format!("counterexample interval for n = {n}"),
            limit: COUNTEREXAMPLE_LIMIT.to_string(),
        })?;
    let mut code = decompose(&lower);
    let mut x = lower.clone();
    let mut points = Vec::with_capacity(len as usize);
    for _ in 0..len {
        points.push(CounterexamplePoint {
            low: x < split_point,
            s: code.summand_count(),
            x: x.clone(),
        });
        code.increment();
        x += 1u32;
    }
    let range = |low: bool| {
        let s = points.iter().filter(|p| p.low == low).map(|p| p.s);
        [s.clone().min().unwrap_or(0), s.max().unwrap_or(0)]
    };
    let (low_range, high_range) = (range(true), range(false));
    Ok(CounterexampleReport {
        n,
        r,
        s_values: points.iter().map(|p| p.s).collect(),
        disjoint: low_range[0] > high_range[1] || high_range[0] > low_range[1],
        low_range,
        high_range,
        lower,
        split: split_point,
        upper,
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapScanRow {
    pub n: usize,
    pub alpha: usize,
    pub q: usize,
    #[serde(serialize_with = "decimal")]
    pub bad_count: BigUint,
    #[serde(serialize_with = "decimal")]
    pub total: BigUint,
    pub probability_exact: String,
    pub probability: f64,
    pub asymptote: f64,
    pub ratio_to_asymptote: f64,
    /// The `phi^(-q)` form of the constant, off by a factor `phi`.
    pub asymptote_minus_q: f64,
    pub census_bad_count: Option<String>,
    pub census_matches: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapScanReport {
    pub alpha_rule: AlphaRule,
    pub rows: Vec<GapScanRow>,
    /// Per `n`: probability strictly decreasing along increasing `q`.
    pub decreasing_in_q: BTreeMap<usize, bool>,
}

/// Exact no-gap probabilities over an `(n, q)` grid with `alpha = rule(n)`,
/// plus the exhaustive census where `n <= 18`.
pub fn run_gap_scan(
    n_list: &[usize],
    q_list: &[usize],
    alpha_rule: AlphaRule,
) -> Result<GapScanReport> {
    if n_list.is_empty() || q_list.is_empty() {
        return arg("gap scan needs at least one n and one q");
    }
    let mut qs = q_list.to_vec();
    qs.sort_unstable();
    qs.dedup();
    let mut rows = Vec::new();
    let mut decreasing_in_q = BTreeMap::new();
    for &n in n_list {
        let mut previous: Option<num_rational::BigRational> = None;
        let mut decreasing = true;
        for &q in &qs {
            let params = IntervalParams::new(n, alpha_rule.alpha(n), q)?;
            let p = bad_probability(&params);
            let census = (n <= CENSUS_MAX_N)
                .then(|| census_bad_c2(&params))
                .transpose()?;
            if let Some(prev) = &previous {
                decreasing &= p.ratio < *prev;
            }
            previous = Some(p.ratio.clone());
            rows.push(GapScanRow {
                n,
                alpha: params.alpha(),
                q,
                probability_exact: p.ratio_string(),
                probability: p.probability,
                asymptote: p.asymptote,
                ratio_to_asymptote: p.probability / p.asymptote,
                asymptote_minus_q: p.asymptote_minus_q,
                census_bad_count: census.as_ref().map(|c| c.0.to_string()),
                census_matches: census.map(|c| c.0 == p.bad_count),
                bad_count: p.bad_count,
                total: p.total,
            });
        }
        decreasing_in_q.insert(n, decreasing);
    }
    Ok(GapScanReport {
        alpha_rule,
        rows,
        decreasing_in_q,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub k: usize,
    pub mean: f64,
    pub variance: f64,
    /// `mean - k/(phi+2)`.
    pub mean_residual: f64,
    /// `variance - phi k/(5(phi+2))`.
    pub variance_residual: f64,
    pub ks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSlopesReport {
    pub rows: Vec<MomentRow>,
    pub mean_slope: f64,
    pub variance_slope: f64,
    pub mean_slope_reference: f64,
    pub variance_slope_reference: f64,
    pub max_abs_mean_residual: f64,
}

/// Least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Largest string length accepted by [`run_moment_slopes`].
pub const MOMENT_MAX_K: usize = 5000;

/// Exact moments of the summand count over `[0, F_{k+1})` for each `k`, and
/// their regression slopes against `k`.
pub fn run_moment_slopes(ks: &[usize]) -> Result<MomentSlopesReport> {
    if ks.len() < 2 {
        return arg("moment slopes need at least two values of k");
    }
    if let Some(&k) = ks.iter().find(|&&k| !(2..=MOMENT_MAX_K).contains(&k)) {
        return arg(format!("k = {k} outside 2..={MOMENT_MAX_K}"));
    }
    let g = GoldenConstants::get();
    let rows = ks
        .par_iter()
        .map(|&k| {
            let d = exact_distribution_prefix(k);
            let s = summarize(&d)?;
            Ok(MomentRow {
                k,
                mean: s.mean,
                variance: s.variance,
                mean_residual: s.mean - k as f64 * g.lek_slope,
                variance_residual: s.variance - k as f64 * g.var_slope,
                ks: s.ks,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
    let means: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    let vars: Vec<f64> = rows.iter().map(|r| r.variance).collect();
    Ok(MomentSlopesReport {
        mean_slope: ols_slope(&xs, &means),
        variance_slope: ols_slope(&xs, &vars),
        mean_slope_reference: g.lek_slope,
        variance_slope_reference: g.var_slope,
        max_abs_mean_residual: rows
            .iter()
            .map(|r| r.mean_residual.abs())
            .fold(0.0, f64::max),
        rows,
    })
}
