//! Exact counting: legal strings, the census of base points without a gap in
//! the middle block, and summand-count distributions by dynamic programming.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::distribution::{ratio_to_f64, DistributionKind, SummandDistribution};
use crate::error::{arg, Result, ZeckError};
use crate::fib;
use crate::interval::{split, IntervalParams};
use crate::zeck::decompose;

/// The golden mean and the summand-count growth constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoldenConstants {
    pub phi: f64,
    /// Mean number of summands per index, `1/(phi+2) = 1/(phi^2+1)`.
    pub lek_slope: f64,
    /// Variance per index, `phi/(5(phi+2))`.
    pub var_slope: f64,
}

impl GoldenConstants {
    pub fn get() -> Self {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        GoldenConstants {
            phi,
            lek_slope: 1.0 / (phi + 2.0),
            var_slope: phi / (5.0 * (phi + 2.0)),
        }
    }
}

/// `n/(phi+2)`: reference mean summand count at length parameter `n`.
pub fn reference_mean(n: usize) -> f64 {
    n as f64 * GoldenConstants::get().lek_slope
}

/// `phi n/(5(phi+2))`: reference variance at length parameter `n`.
pub fn reference_variance(n: usize) -> f64 {
    n as f64 * GoldenConstants::get().var_slope
}

/// `F_k`, with `F_{-1} = 0` as the recurrence extends it.
fn fib_ext(k: i64) -> BigUint {
    if k == -1 {
        BigUint::zero()
    } else {
        fib::fib(k).expect("index >= -1")
    }
}

/// Number of legal strings of length `len` whose top coefficient is 1.
/// Equals `F_{len-1}`.
pub fn count_legal_top_one(len: usize) -> Result<BigUint> {
    if len < 1 {
        return arg("string length must be >= 1");
    }
    Ok(fib_ext(len as i64 - 1))
}

/// Number of `m` in `[F_n, F_{n+1})` whose middle block has no two adjacent
/// zeros: `F_{n-a-q-1} F_a + F_{n-a-q-2} F_{a+1}`.
///
/// Such a block alternates, starting with either 1 or 0. The first pattern
/// forces `a_alpha = 0` and leaves `C3` free apart from `a_n = 1`; the second
/// leaves `C1` free and forces `a_{alpha+q+1} = 0`.
pub fn count_bad_c2(params: &IntervalParams) -> BigUint {
    let tail = params.c3_len() as i64;
    let a = params.alpha() as i64;
    fib_ext(tail - 1) * fib_ext(a) + fib_ext(tail - 2) * fib_ext(a + 1)
}

/// Exhaustive census by enumeration of the top block: `(bad, total)`.
pub fn census_bad_c2(params: &IntervalParams) -> Result<(BigUint, BigUint)> {
    const LIMIT: u64 = 1 << 24;
    let n = params.n();
    let total = fib::fib(n as i64 - 1)?;
    if total.to_u64().is_none_or(|t| t > LIMIT) {
        return Err(ZeckError::Capability {
            what: format!("census of [F_{n}, F_{})", n + 1),
            limit: LIMIT.to_string(),
        });
    }
    let mut code = decompose(&fib::fib(n as i64)?);
    let mut bad = 0u64;
    for _ in 0..total.to_u64().unwrap() {
        if !split(&code, params)?.c2.has_adjacent_zeros() {
            bad += 1;
        }
        code.increment();
    }
    Ok((BigUint::from(bad), total))
}

/// Exact probability that a uniform `m` in `[F_n, F_{n+1})` has no gap in
/// its middle block, with the asymptotic reference values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BadProbability {
    #[serde(serialize_with = "crate::report::decimal")]
    pub bad_count: BigUint,
    #[serde(serialize_with = "crate::report::decimal")]
    pub total: BigUint,
    #[serde(skip)]
    pub ratio: BigRational,
    pub probability: f64,
    /// `(2/sqrt 5) phi^(1-q)`, the limit of the probability as the low and
    /// high blocks grow.
    pub asymptote: f64,
    /// `(2/sqrt 5) phi^(-q)`, smaller than the limit by a factor `phi`.
    pub asymptote_minus_q: f64,
}

impl BadProbability {
    pub fn ratio_string(&self) -> String {
        format!("{}/{}", self.ratio.numer(), self.ratio.denom())
    }
}

pub fn bad_probability(params: &IntervalParams) -> BadProbability {
    let bad_count = count_bad_c2(params);
    let total = fib::fib(params.n() as i64 - 1).expect("n >= 3");
    let ratio = BigRational::new(BigInt::from(bad_count.clone()), BigInt::from(total.clone()));
    let g = GoldenConstants::get();
    let lead = 2.0 / 5f64.sqrt();
    let q = params.q() as f64;
    BadProbability {
        probability: ratio_to_f64(&ratio),
        asymptote: lead * g.phi.powf(1.0 - q),
        asymptote_minus_q: lead * g.phi.powf(-q),
        bad_count,
        total,
        ratio,
    }
}

/// Per-length DP state: counts of legal strings by summand count, split on
/// whether the last coefficient is 1.
fn legal_string_counts(len: usize) -> (Vec<BigUint>, Vec<BigUint>) {
    let width = len / 2 + 2;
    let mut end0 = vec![BigUint::zero(); width];
    let mut end1 = vec![BigUint::zero(); width];
    end0[0] = BigUint::from(1u32);
    for _ in 0..len {
        let mut next0 = vec![BigUint::zero(); width];
        let mut next1 = vec![BigUint::zero(); width];
        for j in 0..width {
            if !end0[j].is_zero() {
                next0[j] += &end0[j];
                if j + 1 < width {
                    next1[j + 1] += &end0[j];
                }
            }
            if !end1[j].is_zero() {
                next0[j] += &end1[j];
            }
        }
        end0 = next0;
        end1 = next1;
    }
    (end0, end1)
}

/// Exact distribution of `s(y)` over `y` in `[0, F_{k+1})`, i.e. over the
/// legal strings of length `k` with leading zeros allowed.
pub fn exact_distribution_prefix(k: usize) -> SummandDistribution {
    let (end0, end1) = legal_string_counts(k);
    SummandDistribution::from_weights(
        DistributionKind::Exact,
        end0.into_iter().zip(end1).map(|(a, b)| a + b).enumerate(),
    )
    .expect("the zero string is always counted")
}

/// Exact distribution of `s` over `[0, F_alpha)`.
pub fn exact_distribution_below(alpha: usize) -> Result<SummandDistribution> {
    if alpha < 1 {
        return arg("the interval [0, F_alpha) needs alpha >= 1");
    }
    Ok(exact_distribution_prefix(alpha - 1))
}

/// Exact distribution of `s(m)` over the top block `m` in `[F_n, F_{n+1})`.
pub fn exact_distribution_top_block(n: usize) -> Result<SummandDistribution> {
    if n < 1 {
        return arg("top block index must be >= 1");
    }
    // a_n = 1 forces a_{n-1} = 0; a_1..a_{n-2} are free.
    let free = exact_distribution_prefix(n.saturating_sub(2));
    SummandDistribution::from_weights(
        DistributionKind::Exact,
        free.weights().iter().map(|(&j, w)| (j + 1, w.clone())),
    )
}
