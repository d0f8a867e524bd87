//! Exhaustive verification of the interval lemmas at small `n`: high-block
//! constancy, the bounded shift defect, bijectivity of `t`, the CDF
//! sandwich and the no-gap census.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::{DistributionKind, SummandDistribution};
use crate::error::{arg, Result, ZeckError};
use crate::exact::{census_bad_c2, count_bad_c2, exact_distribution_below};
use crate::fib;
use crate::interval::{IntervalMap, IntervalParams, OffsetRule};
use crate::stats::cdf_sandwich_check;
use crate::zeck::{decompose, ZeckCode};

/// Largest `n` accepted by [`check_lemmas`].
pub const LEMMA_MAX_N: usize = 24;

/// Failure counts for one `n`, summed over every valid `(alpha, q)` and every
/// `m` in `[F_n, F_{n+1})`. Every `*_failures` field is zero when the lemmas
/// hold.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LemmaTally {
    pub n: usize,
    pub param_sets: u64,
    /// `(params, m)` pairs with two adjacent zeros in the middle block.
    pub gap_cases: u64,
    pub bad_cases: u64,
    /// Offsets `x = m + h` visited over all gap cases.
    pub offsets: u64,
    /// `C3(x) != C3(m)`, equivalently `x` and `m` disagree above `alpha + q`.
    pub c3_failures: u64,
    /// Defect outside `[0, q)`.
    pub defect_failures: u64,
    /// Intervals where `t` misses or repeats a point of `[0, F_alpha)`.
    pub bijection_failures: u64,
    pub sandwich_failures: u64,
    /// Offsets, before the wrap and with `a_alpha(m) = 0`, where `x` and
    /// `t(x)` disagree below `alpha`.
    pub low_agreement_failures: u64,
    /// `(params)` where the closed-form no-gap count differs from `bad_cases`
    /// or from the census.
    pub census_failures: u64,
    pub max_defect: i64,
    /// Offsets where the plain-`m0` map leaves `[0, q)`; informational.
    pub truncated_rule_violations: u64,
}

impl LemmaTally {
    pub fn all_hold(&self) -> bool {
        self.c3_failures == 0
            && self.defect_failures == 0
            && self.bijection_failures == 0
            && self.sandwich_failures == 0
            && self.low_agreement_failures == 0
            && self.census_failures == 0
    }

    fn merge(mut self, o: LemmaTally) -> LemmaTally {
        self.param_sets += o.param_sets;
        self.gap_cases += o.gap_cases;
        self.bad_cases += o.bad_cases;
        self.offsets += o.offsets;
        self.c3_failures += o.c3_failures;
        self.defect_failures += o.defect_failures;
        self.bijection_failures += o.bijection_failures;
        self.sandwich_failures += o.sandwich_failures;
        self.low_agreement_failures += o.low_agreement_failures;
        self.census_failures += o.census_failures;
        self.max_defect = self.max_defect.max(o.max_defect);
        self.truncated_rule_violations += o.truncated_rule_violations;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub n_min: usize,
    pub n_max: usize,
    pub per_n: Vec<LemmaTally>,
    pub total: LemmaTally,
    pub all_hold: bool,
}

fn code_value(code: &ZeckCode, fibs: &[u64]) -> u64 {
    code.coeffs().ones().map(|j| fibs[j]).sum()
}

fn agree(a: &ZeckCode, b: &ZeckCode, lo: usize, hi: usize) -> bool {
    (lo..=hi).all(|j| a.get(j) == b.get(j))
}

/// Checks one `(params, m)` gap case, adding to `tally`.
fn check_interval(
    m: &BigUint,
    params: &IntervalParams,
    baseline: &SummandDistribution,
    fibs: &[u64],
    tally: &mut LemmaTally,
) -> Result<()> {
    let (n, alpha, q) = (params.n(), params.alpha(), params.q());
    let map = IntervalMap::new(m, params)?;
    let width = map.width().to_u64().expect("small n");
    let base = map.base_code().clone();
    let offset = map.offset().to_u64().expect("small n");
    let carry_free = !base.get(alpha);
    let mut seen = vec![false; width as usize];
    let mut hist = vec![0u64; n + 1];
    let mut c3_ok = true;
    map.walk(|step| {
        tally.offsets += 1;
        if step.x.top_index() > n || !agree(step.x, &base, alpha + q + 1, n) {
            c3_ok = false;
        }
        let d = step.defect();
        tally.max_defect = tally.max_defect.max(d);
        if d < 0 || d >= q as i64 {
            tally.defect_failures += 1;
        }
        let y = code_value(step.t, fibs);
        if y < width {
            seen[y as usize] = true;
        }
        if carry_free && step.h < width - offset && !agree(step.x, step.t, 1, alpha - 1) {
            tally.low_agreement_failures += 1;
        }
        let shifted = step.x.summand_count() as i64 - map.s3() as i64;
        hist[shifted.clamp(0, n as i64) as usize] += 1;
        ControlFlow::<()>::Continue(())
    })?;
    if !c3_ok {
        tally.c3_failures += 1;
    }
    if !seen.iter().all(|&s| s) {
        tally.bijection_failures += 1;
    }
    let interval = SummandDistribution::from_counts(DistributionKind::Exact, &hist)?;
    // shift already applied above
    if !cdf_sandwich_check(&interval, baseline, 0, q)? {
        tally.sandwich_failures += 1;
    }
    IntervalMap::with_rule(m, params, OffsetRule::Truncated)?.walk(|step| {
        let d = step.defect();
        if d < 0 || d >= q as i64 {
            tally.truncated_rule_violations += 1;
        }
        ControlFlow::<()>::Continue(())
    })?;
    Ok(())
}

fn check_params(params: &IntervalParams) -> Result<LemmaTally> {
    let n = params.n();
    let fibs: Vec<u64> = (0..=n + 1)
        .map(|k| fib::fib_u64(k).expect("small n"))
        .collect();
    let baseline = exact_distribution_below(params.alpha())?;
    let mut tally = LemmaTally {
        n,
        param_sets: 1,
        ..Default::default()
    };
    let mut m = BigUint::from(fibs[n]);
    let mut code = decompose(&m);
    for _ in 0..fibs[n - 1] {
        let sp = crate::interval::split(&code, params)?;
        if sp.c2.has_adjacent_zeros() {
            tally.gap_cases += 1;
            check_interval(&m, params, &baseline, &fibs, &mut tally)?;
        } else {
            tally.bad_cases += 1;
        }
        code.increment();
        m += 1u32;
    }
    let formula = count_bad_c2(params);
    let (census, _) = census_bad_c2(params)?;
    if formula != census || formula != BigUint::from(tally.bad_cases) {
        tally.census_failures += 1;
    }
    Ok(tally)
}

/// Runs every check for each `n` in `n_min..=n_max`, all valid `(alpha, q)`
/// and all `m` in `[F_n, F_{n+1})`.
pub fn check_lemmas(n_min: usize, n_max: usize) -> Result<LemmaReport> {
    if n_min < 4 || n_min > n_max {
        return arg(format!(
            "need 4 <= n_min <= n_max (n_min = {n_min}, n_max = {n_max})"
        ));
    }
    if n_max > LEMMA_MAX_N {
        return Err(ZeckError::Capability {
            what: format!("exhaustive lemma check up to n = {n_max}"),
            limit: format!("n <= {LEMMA_MAX_N}"),
        });
    }
    let params: Vec<IntervalParams> = (n_min..=n_max).flat_map(IntervalParams::all_for).collect();
    let tallies = params
        .par_iter()
        .map(check_params)
        .collect::<Result<Vec<_>>>()?;
    let per_n: Vec<LemmaTally> = (n_min..=n_max)
        .map(|n| {
            tallies.iter().filter(|t| t.n == n).cloned().fold(
                LemmaTally {
                    n,
                    ..Default::default()
                },
                LemmaTally::merge,
            )
        })
        .collect();
    let total = per_n
        .iter()
        .cloned()
        .fold(LemmaTally::default(), LemmaTally::merge);
    Ok(LemmaReport {
        n_min,
        n_max,
        all_hold: total.all_hold(),
        per_n,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_holds() {
        let r = check_lemmas(4, 10).unwrap();
        assert!(r.all_hold, "{:?}", r.total);
        assert!(r.total.gap_cases > 0 && r.total.bad_cases > 0);
        assert!(r.total.max_defect > 0 && r.total.max_defect < 8);
        // the plain-m0 map first fails at n = 6
        assert_eq!(r.per_n[0].truncated_rule_violations, 0);
        assert_eq!(r.per_n[1].truncated_rule_violations, 0);
        assert!(r.per_n[2].truncated_rule_violations > 0);
    }

    #[test]
    fn bounds() {
        assert!(check_lemmas(3, 5).is_err());
        assert!(check_lemmas(9, 8).is_err());
        assert!(matches!(
            check_lemmas(4, 40),
            Err(ZeckError::Capability { .. })
        ));
    }
}
