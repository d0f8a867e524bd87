//! Zeckendorf decompositions and the summand-count statistics of small
//! intervals `[m, m + F_alpha)`.
//!
//! Fibonacci numbers are indexed so that `F_1 = 1, F_2 = 2` (and `F_0 = 1`).
//! Every positive integer is a unique sum of non-adjacent `F_j`; the number
//! of summands, over an interval, is approximately Gaussian.

pub mod distribution;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod fib;
pub mod interval;
pub mod lemmas;
pub mod report;
pub mod sample;
pub mod stats;
pub mod zeck;

pub use distribution::{DistributionKind, SummandDistribution};
pub use error::{Result, ZeckError};
pub use exact::{
    bad_probability, census_bad_c2, count_bad_c2, count_legal_top_one, exact_distribution_below,
    exact_distribution_prefix, exact_distribution_top_block, reference_mean, reference_variance,
    BadProbability, GoldenConstants,
};
pub use experiments::{
    run_counterexample, run_gap_scan, run_moment_slopes, run_theorem1, AlphaRule, ExperimentConfig,
    ExperimentReport, QRule, SamplingMode,
};
pub use fib::{fib, index_of, FibTable};
pub use interval::{
    bijection_t, c3_is_constant, counts, has_double_zero, shift_defect, split, IntervalMap,
    IntervalParams, IntervalSplit, OffsetRule, SummandCounts,
};
pub use lemmas::{check_lemmas, LemmaReport, LemmaTally};
pub use sample::uniform_in_range;
pub use stats::{
    cdf_sandwich_check, ks_to_normal, normal_cdf, standardize, KsReport, StandardizedDistribution,
};
pub use zeck::{decompose, is_legal, recompose, summand_count, Coeffs, ZeckCode};
