//! The low/middle/high split of a decomposition and the correspondence
//! between `[m, m + F_alpha)` and `[0, F_alpha)`.
//!
//! For `m` in the top block `[F_n, F_{n+1})` write `m = sum a_j F_j` and cut
//! the coefficients into `C1 = a_1..a_alpha`, `C2 = a_{alpha+1}..a_{alpha+q}`
//! and `C3 = a_{alpha+q+1}..a_n`. When `C2(m)` contains two adjacent zeros,
//! adding any `h < F_alpha` to `m` cannot carry past the gap, so `C3` is the
//! same for the whole interval and the interval maps onto `[0, F_alpha)` by a
//! translation modulo `F_alpha`.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{arg, Result, ZeckError};
use crate::fib;
use crate::sample;
use crate::zeck::{decompose, Coeffs, ZeckCode};

/// Exhaustive interval walks are limited to this many offsets.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 20;

/// Offsets checked by [`c3_is_constant`] once the interval outgrows
/// [`EXHAUSTIVE_LIMIT`].
pub const C3_SAMPLES: u64 = 10_000;

const C3_SAMPLE_SEED: u64 = 0x00c3_5eed;

/// The split `(n, alpha, q)`: `1 <= alpha`, `q` positive and even, and
/// `alpha + q < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct IntervalParams {
    n: usize,
    alpha: usize,
    q: usize,
}

impl IntervalParams {
    pub fn new(n: usize, alpha: usize, q: usize) -> Result<Self> {
        if alpha < 1 {
            return arg(format!("alpha must be >= 1 (alpha = {alpha})"));
        }
        if q == 0 || !q.is_multiple_of(2) {
            return arg(format!("q must be a positive even integer (q = {q})"));
        }
        if alpha + q >= n {
            return arg(format!(
                "require alpha + q < n (n = {n}, alpha = {alpha}, q = {q})"
            ));
        }
        Ok(IntervalParams { n, alpha, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Length of the high block, `n - alpha - q >= 1`.
    pub fn c3_len(&self) -> usize {
        self.n - self.alpha - self.q
    }

    /// Every valid `(alpha, q)` for this `n`.
    pub fn all_for(n: usize) -> impl Iterator<Item = IntervalParams> {
        (1..n).flat_map(move |alpha| {
            (2..n)
                .step_by(2)
                .filter_map(move |q| IntervalParams::new(n, alpha, q).ok())
        })
    }
}

/// `C1 ‖ C2 ‖ C3` of one code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSplit {
    pub c1: Coeffs,
    pub c2: Coeffs,
    pub c3: Coeffs,
}

impl IntervalSplit {
    pub fn rejoin(&self) -> Coeffs {
        self.c1.concat(&self.c2).concat(&self.c3)
    }
}

/// `(s, s1, s2, s3)` with `s = s1 + s2 + s3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SummandCounts {
    pub s: usize,
    pub s1: usize,
    pub s2: usize,
    pub s3: usize,
}

/// Splits a code, zero-padded to `params.n()`, into its three blocks.
pub fn split(code: &ZeckCode, params: &IntervalParams) -> Result<IntervalSplit> {
    let padded = code.padded(params.n)?;
    let c = padded.coeffs();
    let (a, q) = (params.alpha, params.q);
    Ok(IntervalSplit {
        c1: c.slice(1, a),
        c2: c.slice(a + 1, a + q),
        c3: c.slice(a + q + 1, params.n),
    })
}

pub fn counts(code: &ZeckCode, params: &IntervalParams) -> Result<SummandCounts> {
    let sp = split(code, params)?;
    let (s1, s2, s3) = (sp.c1.count_ones(), sp.c2.count_ones(), sp.c3.count_ones());
    Ok(SummandCounts {
        s: s1 + s2 + s3,
        s1,
        s2,
        s3,
    })
}

/// True iff the slice has two adjacent zero coefficients.
pub fn has_double_zero(c2: &Coeffs) -> Result<bool> {
    if c2.len() < 2 {
        return arg(format!(
            "a double-zero test needs at least 2 coefficients, got {}",
            c2.len()
        ));
    }
    Ok(c2.has_adjacent_zeros())
}

/// Whether `m` in `[F_n, F_{n+1})` has a double zero in `C2(m)`.
pub fn gap_found(m: &BigUint, params: &IntervalParams) -> Result<bool> {
    check_top_block(m, params)?;
    has_double_zero(&split(&decompose(m), params)?.c2)
}

fn check_top_block(m: &BigUint, params: &IntervalParams) -> Result<()> {
    if m.is_zero() || fib::index_of(m)? != params.n {
        return arg(format!(
            "m = {m} is not in [F_{0}, F_{1})",
            params.n,
            params.n + 1
        ));
    }
    Ok(())
}

/// How many offsets of the interval a check looked at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "offsets", rename_all = "lowercase")]
pub enum Coverage {
    Exhaustive(u64),
    Sampled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct C3Check {
    pub constant: bool,
    pub coverage: Coverage,
}

/// Checks whether `C3(x)` (with `x` padded to top index `n`) is the same for
/// every `x` in `[m, m + F_alpha)`.
///
/// Exhaustive up to [`EXHAUSTIVE_LIMIT`] offsets; beyond that it checks
/// [`C3_SAMPLES`] uniformly drawn offsets from a fixed stream and reports
/// the result as sampled.
pub fn c3_is_constant(m: &BigUint, params: &IntervalParams) -> Result<C3Check> {
    check_top_block(m, params)?;
    let base = decompose(m);
    let lo = params.alpha + params.q + 1;
    let expected = base.coeffs().slice(lo, params.n);
    let same_c3 =
        |x: &ZeckCode| x.top_index() <= params.n && x.coeffs().slice(lo, params.n) == expected;

    let width = fib::fib(params.alpha as i64)?;
    match width.to_u64().filter(|w| *w <= EXHAUSTIVE_LIMIT) {
        Some(width) => {
            let mut x = base;
            for h in 0..width {
                if !same_c3(&x) {
                    return Ok(C3Check {
                        constant: false,
                        coverage: Coverage::Exhaustive(h + 1),
                    });
                }
                x.increment();
            }
            Ok(C3Check {
                constant: true,
                coverage: Coverage::Exhaustive(width),
            })
        }
        None => {
            let mut rng = sample::stream_rng(C3_SAMPLE_SEED, 0);
            for i in 0..C3_SAMPLES {
                let h = sample::uniform_below(&width, &mut rng)?;
                if !same_c3(&decompose(&(m + h))) {
                    return Ok(C3Check {
                        constant: false,
                        coverage: Coverage::Sampled(i + 1),
                    });
                }
            }
            Ok(C3Check {
                constant: true,
                coverage: Coverage::Sampled(C3_SAMPLES),
            })
        }
    }
}

/// How the translation offset of the interval map is derived from `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OffsetRule {
    /// `m0 + a_alpha(m) * F_{alpha-2}`, where `m0 = sum_{j < alpha} a_j(m) F_j`.
    ///
    /// Equal to `m0` unless `a_alpha(m) = 1`. In that case the offsets that
    /// push the low part past `F_alpha` produce `2 F_alpha = F_{alpha+1} +
    /// F_{alpha-2}`, leaving an extra `F_{alpha-2}` below `alpha`; advancing
    /// the offset by `F_{alpha-2}` keeps it on the `[0, F_alpha)` side.
    #[default]
    CarryAdjusted,
    /// Plain `m0`. Bijective, but the defect can reach `q` when
    /// `a_alpha(m) = 1`.
    Truncated,
}

/// The map `t : [m, m + F_alpha) -> [0, F_alpha)`,
/// `t(m + h) = (offset + h) mod F_alpha`, for a gap-case base point `m`.
#[derive(Debug, Clone)]
pub struct IntervalMap {
    m: BigUint,
    code: ZeckCode,
    params: IntervalParams,
    rule: OffsetRule,
    s3: usize,
    offset: BigUint,
    width: BigUint,
}

impl IntervalMap {
    pub fn new(m: &BigUint, params: &IntervalParams) -> Result<Self> {
        Self::with_rule(m, params, OffsetRule::default())
    }

    pub fn with_rule(m: &BigUint, params: &IntervalParams, rule: OffsetRule) -> Result<Self> {
        check_top_block(m, params)?;
        let code = decompose(m).padded(params.n)?;
        let sp = split(&code, params)?;
        if !has_double_zero(&sp.c2)? {
            return Err(ZeckError::Precondition(format!(
                "C2({m}) = {:?} has no two adjacent zeros",
                sp.c2
            )));
        }
        let alpha = params.alpha;
        let (offset, width) = fib::with_table(|t| {
            t.ensure(alpha);
            let f = t.as_slice();
            let mut offset: BigUint = (1..alpha).filter(|&j| code.get(j)).map(|j| &f[j]).sum();
            if rule == OffsetRule::CarryAdjusted && code.get(alpha) && alpha >= 2 {
                offset += &f[alpha - 2];
            }
            (offset, f[alpha].clone())
        });
        debug_assert!(offset < width);
        Ok(IntervalMap {
            m: m.clone(),
            s3: sp.c3.count_ones(),
            code,
            params: *params,
            rule,
            offset,
            width,
        })
    }

    pub fn params(&self) -> &IntervalParams {
        &self.params
    }

    pub fn rule(&self) -> OffsetRule {
        self.rule
    }

    /// `s3(m)`, the summand count of the (constant) high block.
    pub fn s3(&self) -> usize {
        self.s3
    }

    /// `t(m)`.
    pub fn offset(&self) -> &BigUint {
        &self.offset
    }

    /// `F_alpha`, the interval length.
    pub fn width(&self) -> &BigUint {
        &self.width
    }

    /// Padded code of the base point.
    pub fn base_code(&self) -> &ZeckCode {
        &self.code
    }

    fn check_offset(&self, h: &BigUint) -> Result<()> {
        if h >= &self.width {
            return arg(format!("offset h = {h} must be < F_alpha = {}", self.width));
        }
        Ok(())
    }

    /// `t(m + h)`.
    pub fn t(&self, h: &BigUint) -> Result<BigUint> {
        self.check_offset(h)?;
        let y = &self.offset + h;
        Ok(if y >= self.width { y - &self.width } else { y })
    }

    /// `s(m + h) - s3(m) - s(t(m + h))`.
    pub fn defect(&self, h: &BigUint) -> Result<i64> {
        let t = self.t(h)?;
        let sx = decompose(&(&self.m + h)).summand_count() as i64;
        let st = decompose(&t).summand_count() as i64;
        Ok(sx - self.s3 as i64 - st)
    }

    /// Visits every offset `h = 0, 1, ..., F_alpha - 1` in order with the
    /// codes of `x = m + h` and `t(x)`, advancing both by successor steps.
    pub fn walk<B>(
        &self,
        mut visit: impl FnMut(WalkStep<'_>) -> ControlFlow<B>,
    ) -> Result<Option<B>> {
        let width = self
            .width
            .to_u64()
            .filter(|w| *w <= EXHAUSTIVE_LIMIT)
            .ok_or_else(|| ZeckError::Capability {
                what: format!("exhaustive walk over F_{} offsets", self.params.alpha),
                limit: EXHAUSTIVE_LIMIT.to_string(),
            })?;
        let offset = self.offset.to_u64().expect("offset < width");
        let wrap_at = width - offset;
        let mut x = self.code.clone();
        let mut y = decompose(&self.offset);
        for h in 0..width {
            if h == wrap_at {
                y = ZeckCode::zero();
            }
            let step = WalkStep {
                h,
                x: &x,
                t: &y,
                s3: self.s3,
            };
            if let ControlFlow::Break(b) = visit(step) {
                return Ok(Some(b));
            }
            x.increment();
            y.increment();
        }
        Ok(None)
    }
}

/// One offset of an [`IntervalMap::walk`].
#[derive(Debug, Clone, Copy)]
pub struct WalkStep<'a> {
    pub h: u64,
    /// Code of `m + h`.
    pub x: &'a ZeckCode,
    /// Code of `t(m + h)`.
    pub t: &'a ZeckCode,
    s3: usize,
}

impl WalkStep<'_> {
    pub fn defect(&self) -> i64 {
        self.x.summand_count() as i64 - self.s3 as i64 - self.t.summand_count() as i64
    }
}

/// `t(m + h)` for the gap-case base point `m`.
pub fn bijection_t(m: &BigUint, params: &IntervalParams, h: &BigUint) -> Result<BigUint> {
    IntervalMap::new(m, params)?.t(h)
}

/// `s(m + h) - s3(m) - s(t(m + h))`, which lies in `[0, q)`.
pub fn shift_defect(m: &BigUint, params: &IntervalParams, h: &BigUint) -> Result<i64> {
    IntervalMap::new(m, params)?.defect(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn params(n: usize, a: usize, q: usize) -> IntervalParams {
        IntervalParams::new(n, a, q).unwrap()
    }

    fn bits(v: &[u8]) -> Coeffs {
        Coeffs::from_bits(&v.iter().map(|&b| b == 1).collect::<Vec<_>>())
    }

    #[test]
    fn params_validation() {
        assert!(IntervalParams::new(8, 3, 4).is_ok());
        assert!(IntervalParams::new(8, 3, 3)
            .unwrap_err()
            .to_string()
            .contains("even"));
        assert!(IntervalParams::new(8, 4, 4)
            .unwrap_err()
            .to_string()
            .contains("alpha + q < n"));
        assert!(IntervalParams::new(8, 0, 2).is_err());
        assert!(IntervalParams::new(8, 3, 0).is_err());
        // C3 of length one is allowed
        assert_eq!(params(8, 5, 2).c3_len(), 1);
    }

    #[test]
    fn split_examples() {
        let p = params(8, 3, 4);
        let sp = split(&decompose(&big(34)), &p).unwrap();
        assert_eq!(sp.c1, bits(&[0, 0, 0]));
        assert_eq!(sp.c2, bits(&[0, 0, 0, 0]));
        assert_eq!(sp.c3, bits(&[1]));

        let sp = split(&decompose(&big(42)), &p).unwrap();
        assert_eq!(sp.c1, bits(&[0, 0, 0]));
        assert_eq!(sp.c2, bits(&[0, 1, 0, 0]));
        assert_eq!(sp.c3, bits(&[1]));

        let sp = split(&ZeckCode::zero(), &p).unwrap();
        assert_eq!(
            sp.c1.count_ones() + sp.c2.count_ones() + sp.c3.count_ones(),
            0
        );
        assert_eq!((sp.c1.len(), sp.c2.len(), sp.c3.len()), (3, 4, 1));

        // a code above the top index cannot be split
        assert!(split(&decompose(&big(55)), &p).is_err());
    }

    #[test]
    fn count_examples() {
        let p = params(8, 3, 4);
        let c = |m| counts(&decompose(&big(m)), &p).unwrap();
        assert_eq!(
            c(42),
            SummandCounts {
                s: 2,
                s1: 0,
                s2: 1,
                s3: 1
            }
        );
        assert_eq!(
            c(34),
            SummandCounts {
                s: 1,
                s1: 0,
                s2: 0,
                s3: 1
            }
        );
        assert_eq!(
            c(0),
            SummandCounts {
                s: 0,
                s1: 0,
                s2: 0,
                s3: 0
            }
        );
    }

    #[test]
    fn double_zero_examples() {
        assert!(has_double_zero(&bits(&[0, 1, 0, 0])).unwrap());
        assert!(!has_double_zero(&bits(&[1, 0, 1, 0])).unwrap());
        assert!(!has_double_zero(&bits(&[0, 1, 0, 1])).unwrap());
        assert!(has_double_zero(&bits(&[0, 0])).unwrap());
        assert!(has_double_zero(&bits(&[0])).is_err());
    }

    #[test]
    fn c3_constant_examples() {
        let p = params(8, 3, 4);
        let r = c3_is_constant(&big(42), &p).unwrap();
        assert!(r.constant);
        assert_eq!(r.coverage, Coverage::Exhaustive(3));
        assert!(c3_is_constant(&big(34), &p).unwrap().constant);
        assert!(c3_is_constant(&big(100), &p).is_err());
    }

    #[test]
    fn smallest_c3_failure_lacks_a_gap() {
        // Enumerate upward for the first (n, alpha, q, m) where C3 changes.
        let mut found = None;
        'outer: for n in 4..=12 {
            for p in IntervalParams::all_for(n) {
                let lo = fib::fib(n as i64).unwrap().to_u64().unwrap();
                let hi = fib::fib(n as i64 + 1).unwrap().to_u64().unwrap();
                for m in lo..hi {
                    if !c3_is_constant(&big(m), &p).unwrap().constant {
                        found = Some((p, m));
                        break 'outer;
                    }
                }
            }
        }
        let (p, m) = found.expect("some interval must carry into C3");
        assert!(!gap_found(&big(m), &p).unwrap());
        let c2 = split(&decompose(&big(m)), &p).unwrap().c2;
        assert!(c2 == bits(&[1, 0]) || c2 == bits(&[0, 1]));
    }

    #[test]
    fn sampled_c3_check_for_wide_intervals() {
        // F_31 > 2^20: the check samples
        let p = params(60, 31, 6);
        let m = fib::fib(60).unwrap();
        let r = c3_is_constant(&m, &p).unwrap();
        assert!(r.constant);
        assert_eq!(r.coverage, Coverage::Sampled(C3_SAMPLES));
    }

    #[test]
    fn bijection_examples() {
        let p = params(8, 3, 4);
        for (h, want) in [(0u64, 0u64), (1, 1), (2, 2)] {
            assert_eq!(bijection_t(&big(34), &p, &big(h)).unwrap(), big(want));
        }
        assert_eq!(bijection_t(&big(42), &p, &big(2)).unwrap(), big(2));

        // m0 = 2 (a_2 = 1), alpha = 3: 2 + 2 - 3 = 1
        let m = big(34 + 2);
        let map = IntervalMap::new(&m, &p).unwrap();
        assert_eq!(map.offset(), &big(2));
        assert_eq!(map.t(&big(2)).unwrap(), big(1));

        assert!(bijection_t(&big(34), &p, &big(3)).is_err());
    }

    #[test]
    fn bijection_requires_a_gap() {
        // n = 8, alpha = 1, q = 6: C2 = a_2..a_7; 34 + 21 is out of block, use
        // 34 + 13 + 5 + 2 = 54 with C2 = (1,0,1,0,1,0).
        let p = params(8, 1, 6);
        let m = big(54);
        assert!(!gap_found(&m, &p).unwrap());
        assert!(matches!(
            IntervalMap::new(&m, &p),
            Err(ZeckError::Precondition(_))
        ));
    }

    #[test]
    fn defect_examples() {
        let p = params(8, 3, 4);
        assert_eq!(shift_defect(&big(34), &p, &big(2)).unwrap(), 0);
        assert_eq!(shift_defect(&big(42), &p, &big(2)).unwrap(), 1);
        assert_eq!(shift_defect(&big(34), &p, &big(0)).unwrap(), 0);
    }

    #[test]
    fn truncated_offset_overshoots() {
        // m = 17 = F_6 + F_3 + F_1, alpha = 3 holds a_3 = 1.
        let p = params(6, 3, 2);
        let m = big(17);
        let literal = IntervalMap::with_rule(&m, &p, OffsetRule::Truncated).unwrap();
        assert_eq!(literal.offset(), &big(1));
        assert_eq!(literal.t(&big(2)).unwrap(), big(0));
        assert_eq!(literal.defect(&big(2)).unwrap(), 2);

        let fixed = IntervalMap::new(&m, &p).unwrap();
        assert_eq!(fixed.offset(), &big(2));
        for h in 0..3u64 {
            let d = fixed.defect(&big(h)).unwrap();
            assert!((0..2).contains(&d), "h = {h}: defect {d}");
        }
    }

    #[test]
    fn walk_matches_pointwise_evaluation() {
        let p = params(14, 5, 4);
        let lo = fib::fib(14).unwrap().to_u64().unwrap();
        let hi = fib::fib(15).unwrap().to_u64().unwrap();
        for m in (lo..hi).step_by(7) {
            let Ok(map) = IntervalMap::new(&big(m), &p) else {
                continue;
            };
            map.walk(|step| {
                let h = big(step.h);
                assert_eq!(step.x.value(), big(m) + &h);
                assert_eq!(step.t.value(), map.t(&h).unwrap());
                assert_eq!(step.defect(), map.defect(&h).unwrap());
                ControlFlow::<()>::Continue(())
            })
            .unwrap();
        }
    }

    #[test]
    fn walk_refuses_huge_intervals() {
        let p = params(80, 40, 6);
        let m = fib::fib(80).unwrap();
        let map = IntervalMap::new(&m, &p).unwrap();
        let err = map.walk(|_| ControlFlow::<()>::Continue(())).unwrap_err();
        assert!(matches!(err, ZeckError::Capability { .. }));
    }
}
