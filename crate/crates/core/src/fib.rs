//! Fibonacci numbers under the numeration normalization `F_1 = 1, F_2 = 2`.
//!
//! The table also stores `F_0 = 1`, which the recurrence forces, so counting
//! formulas of the form `F_{n-a-q-1}` stay valid down to the smallest tails.

use std::cell::RefCell;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{arg, Result};

/// Cached Fibonacci numbers `F_0, F_1, F_2, ...` as exact integers.
///
/// Extension is amortized by doubling. A table is plain data: share a
/// pre-sized table by reference across workers, or use the per-thread cache
/// behind [`fib`] and [`index_of`].
#[derive(Debug, Clone)]
pub struct FibTable {
    values: Vec<BigUint>,
}

impl Default for FibTable {
    fn default() -> Self {
        Self::new()
    }
}

impl FibTable {
    pub fn new() -> Self {
        FibTable {
            values: vec![BigUint::one(), BigUint::one(), BigUint::from(2u32)],
        }
    }

    /// A table holding at least `F_0..=F_max_index`.
    pub fn with_max_index(max_index: usize) -> Self {
        let mut table = Self::new();
        table.ensure(max_index);
        table
    }

    /// Largest index currently stored.
    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    /// Grows the table so that `F_index` is available.
    pub fn ensure(&mut self, index: usize) {
        if index < self.values.len() {
            return;
        }
        let target = (index + 1).max(2 * self.values.len());
        self.values.reserve(target - self.values.len());
        while self.values.len() < target {
            let k = self.values.len();
            let next = &self.values[k - 1] + &self.values[k - 2];
            self.values.push(next);
        }
    }

    /// `F_index` if it is already tabled.
    pub fn get(&self, index: usize) -> Option<&BigUint> {
        self.values.get(index)
    }

    /// `F_index`, extending the table when needed.
    pub fn fib(&mut self, index: usize) -> &BigUint {
        self.ensure(index);
        &self.values[index]
    }

    /// The unique `n >= 1` with `F_n <= m < F_{n+1}`.
    pub fn index_of(&mut self, m: &BigUint) -> Result<usize> {
        if m.bits() == 0 {
            return arg("index_of requires m >= 1");
        }
        // F_k >= 2^((k-1)/2), so this index is always large enough.
        let bound = 2 * m.bits() as usize + 2;
        while self.values.last().is_some_and(|last| last <= m) {
            self.ensure(bound.max(self.values.len()));
        }
        // values[1..] is strictly increasing
        let above = self.values[1..].partition_point(|f| f <= m);
        Ok(above)
    }

    /// Read-only view of `F_0..=F_max_index`.
    pub fn as_slice(&self) -> &[BigUint] {
        &self.values
    }
}

thread_local! {
    static TABLE: RefCell<FibTable> = RefCell::new(FibTable::with_max_index(128));
}

/// Runs `f` against this thread's Fibonacci cache.
pub fn with_table<R>(f: impl FnOnce(&mut FibTable) -> R) -> R {
    TABLE.with(|t| f(&mut t.borrow_mut()))
}

/// `F_k` for a signed index; negative indices are rejected.
pub fn fib(k: i64) -> Result<BigUint> {
    if k < 0 {
        return arg(format!("Fibonacci index must be >= 0, got {k}"));
    }
    Ok(with_table(|t| t.fib(k as usize).clone()))
}

/// `F_k` as `u64`, when it fits. `F_92` is the largest that does.
pub fn fib_u64(k: usize) -> Option<u64> {
    if k > 92 {
        return None;
    }
    let (mut a, mut b) = (1u128, 1u128);
    for _ in 0..k {
        (a, b) = (b, a + b);
    }
    u64::try_from(a).ok()
}

/// The unique `n` with `F_n <= m < F_{n+1}`; `m` must be positive.
pub fn index_of(m: &BigUint) -> Result<usize> {
    with_table(|t| t.index_of(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn small_values() {
        assert_eq!(fib(0).unwrap(), big(1));
        assert_eq!(fib(1).unwrap(), big(1));
        assert_eq!(fib(2).unwrap(), big(2));
        assert_eq!(fib(6).unwrap(), big(13));
        assert_eq!(fib(12).unwrap(), big(233));
    }

    #[test]
    fn negative_index_rejected() {
        assert!(matches!(fib(-1), Err(crate::ZeckError::Argument(_))));
    }

    #[test]
    fn index_search() {
        assert_eq!(index_of(&big(1)).unwrap(), 1);
        assert_eq!(index_of(&big(12)).unwrap(), 5);
        assert_eq!(index_of(&big(13)).unwrap(), 6);
        assert!(index_of(&big(0)).is_err());
        for n in 1..=60usize {
            let f = fib(n as i64).unwrap();
            let next = fib(n as i64 + 1).unwrap();
            assert_eq!(index_of(&f).unwrap(), n);
            assert_eq!(index_of(&(next - 1u32)).unwrap(), n);
        }
    }

    #[test]
    fn index_search_extends_the_table() {
        let mut t = FibTable::new();
        let huge = FibTable::with_max_index(700).get(700).unwrap().clone();
        assert_eq!(t.index_of(&huge).unwrap(), 700);
        assert_eq!(t.index_of(&(huge - 1u32)).unwrap(), 699);
    }

    #[test]
    fn recurrence_and_monotonicity() {
        let t = FibTable::with_max_index(300);
        let v = t.as_slice();
        for k in 2..v.len() {
            assert_eq!(v[k], &v[k - 1] + &v[k - 2]);
            assert!(v[k] > v[k - 1]);
        }
    }

    #[test]
    fn ratio_approaches_golden_mean() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        for k in 40..120i64 {
            let a = fib(k).unwrap().to_string().parse::<f64>().unwrap();
            let b = fib(k + 1).unwrap().to_string().parse::<f64>().unwrap();
            assert!((b / a - phi).abs() < 1e-6, "k = {k}");
        }
    }

    #[test]
    fn even_index_sum_identity() {
        for k in 1..=30i64 {
            let sum: BigUint = (1..=k).map(|i| fib(2 * i).unwrap()).sum();
            assert_eq!(sum, fib(2 * k + 1).unwrap() - 1u32);
        }
    }

    #[test]
    fn u64_fast_path_agrees() {
        for k in 0..=92 {
            assert_eq!(big(fib_u64(k).unwrap()), fib(k as i64).unwrap());
        }
        assert_eq!(fib_u64(93), None);
    }
}
