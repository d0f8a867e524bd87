//! Seeded randomness: per-worker ChaCha streams and exact uniform sampling of
//! arbitrary-precision integers.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{arg, Result};

/// The random stream for substream `stream` of master seed `seed`.
///
/// Streams are independent ChaCha8 streams, so results do not depend on
/// which worker runs which substream.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A uniform integer in `[0, bound)`, by rejection from the smallest
/// power-of-two envelope containing the range.
pub fn uniform_below<R: RngCore + ?Sized>(bound: &BigUint, rng: &mut R) -> Result<BigUint> {
    if bound.is_zero() {
        return arg("cannot sample from an empty range");
    }
    if bound.is_one() {
        return Ok(BigUint::zero());
    }
    let bits = (bound - 1u32).bits() as usize;
    let nbytes = bits.div_ceil(8);
    let top_mask = match bits % 8 {
        0 => 0xff,
        r => (1u8 << r) - 1,
    };
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[nbytes - 1] &= top_mask;
        let candidate = BigUint::from_bytes_le(&buf);
        if &candidate < bound {
            return Ok(candidate);
        }
    }
}

/// A uniform integer in `[lo, hi)`.
pub fn uniform_in_range<R: RngCore + ?Sized>(
    lo: &BigUint,
    hi: &BigUint,
    rng: &mut R,
) -> Result<BigUint> {
    if lo >= hi {
        return arg(format!("empty range [{lo}, {hi})"));
    }
    Ok(lo + uniform_below(&(hi - lo), rng)?)
}

/// A uniform `u64` in `[0, bound)`; `bound` must be positive.
pub fn uniform_u64<R: RngCore + ?Sized>(bound: u64, rng: &mut R) -> u64 {
    assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn singleton_range() {
        let mut rng = stream_rng(1, 0);
        for _ in 0..20 {
            let v = uniform_in_range(&BigUint::from(5u32), &BigUint::from(6u32), &mut rng).unwrap();
            assert_eq!(v, BigUint::from(5u32));
        }
    }

    #[test]
    fn empty_range_rejected() {
        let mut rng = stream_rng(1, 0);
        let five = BigUint::from(5u32);
        assert!(uniform_in_range(&five, &five, &mut rng).is_err());
        assert!(uniform_in_range(&five, &BigUint::from(4u32), &mut rng).is_err());
    }

    #[test]
    fn seeded_draws_are_reproducible() {
        let draw = |seed, stream| {
            let mut rng = stream_rng(seed, stream);
            (0..10)
                .map(|_| {
                    uniform_in_range(&BigUint::zero(), &BigUint::from(8u32), &mut rng).unwrap()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(42, 3), draw(42, 3));
        assert_ne!(draw(42, 3), draw(42, 4));
    }

    #[test]
    fn frequencies_within_binomial_bounds() {
        let draws = 100_000u32;
        let mut counts = [0u32; 13];
        let mut rng = stream_rng(2024, 0);
        let hi = BigUint::from(13u32);
        for _ in 0..draws {
            let v = uniform_below(&hi, &mut rng).unwrap();
            counts[v.to_usize().unwrap()] += 1;
        }
        let p = 1.0 / 13.0;
        let mean = draws as f64 * p;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for (v, &c) in counts.iter().enumerate() {
            assert!((c as f64 - mean).abs() < 5.0 * sd, "value {v}: {c}");
        }
    }

    #[test]
    fn wide_ranges_stay_in_bounds() {
        let mut rng = stream_rng(9, 0);
        let lo = BigUint::one() << 200;
        let hi = &lo + (BigUint::one() << 130) + 17u32;
        for _ in 0..200 {
            let v = uniform_in_range(&lo, &hi, &mut rng).unwrap();
            assert!(v >= lo && v < hi);
        }
    }

    #[test]
    fn u64_sampler_in_bounds() {
        let mut rng = stream_rng(3, 1);
        for bound in [1u64, 2, 3, 13, 75025, u64::MAX] {
            for _ in 0..100 {
                assert!(uniform_u64(bound, &mut rng) < bound);
            }
        }
    }
}
