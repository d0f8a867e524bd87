//! Zeckendorf coefficient vectors and conversions to and from integers.
//!
//! Coefficients are packed least-index-first: `a_1` is bit 0 of word 0.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Result, ZeckError};
use crate::fib;

/// A raw 0/1 coefficient vector `a_1..a_len`, not necessarily legal.
///
/// Bits at positions `>= len` are always zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Coeffs {
    words: Vec<u64>,
    len: usize,
}

impl Coeffs {
    pub fn zeros(len: usize) -> Self {
        Coeffs {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Builds from `a_1, a_2, ...` in that order.
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut c = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                c.words[i / 64] |= 1 << (i % 64);
            }
        }
        c
    }

    /// Builds a vector of length `len` with ones at the given 1-based indices.
    pub fn from_indices(indices: &[usize], len: usize) -> Result<Self> {
        let mut c = Self::zeros(len);
        for &j in indices {
            if j == 0 || j > len {
                return Err(ZeckError::Argument(format!("index {j} outside 1..={len}")));
            }
            c.set(j, true);
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `a_j` for a 1-based index; zero beyond the length.
    pub fn get(&self, j: usize) -> bool {
        if j == 0 || j > self.len {
            return false;
        }
        let i = j - 1;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Sets `a_j`, growing the vector when `j > len`.
    pub fn set(&mut self, j: usize, value: bool) {
        assert!(j >= 1, "coefficient indices start at 1");
        if j > self.len {
            self.resize(j);
        }
        let i = j - 1;
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Truncates or zero-extends to `len` coefficients.
    pub fn resize(&mut self, len: usize) {
        self.words.resize(len.div_ceil(64), 0);
        self.len = len;
        let rem = len % 64;
        if rem != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << rem) - 1;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Highest index holding a one, or 0 for an all-zero vector.
    pub fn top_index(&self) -> usize {
        for (i, w) in self.words.iter().enumerate().rev() {
            if *w != 0 {
                return i * 64 + 64 - w.leading_zeros() as usize;
            }
        }
        0
    }

    /// The coefficients `a_lo..=a_hi` as a new vector of length `hi - lo + 1`.
    /// An empty range (`hi < lo`) yields an empty vector.
    pub fn slice(&self, lo: usize, hi: usize) -> Coeffs {
        assert!(lo >= 1, "coefficient indices start at 1");
        if hi < lo {
            return Coeffs::default();
        }
        let len = hi - lo + 1;
        let mut out = Coeffs::zeros(len);
        let shift = (lo - 1) % 64;
        let base = (lo - 1) / 64;
        for (k, word) in out.words.iter_mut().enumerate() {
            let w0 = self.words.get(base + k).copied().unwrap_or(0);
            let w1 = self.words.get(base + k + 1).copied().unwrap_or(0);
            *word = if shift == 0 {
                w0
            } else {
                (w0 >> shift) | (w1 << (64 - shift))
            };
        }
        out.resize(len);
        out
    }

    /// `self ‖ upper`: the coefficients of `upper` are placed above ours.
    pub fn concat(&self, upper: &Coeffs) -> Coeffs {
        let mut out = self.clone();
        out.resize(self.len + upper.len);
        for j in upper.ones() {
            out.set(self.len + j, true);
        }
        out
    }

    /// 1-based indices of the ones, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b + 1)
            })
        })
    }

    /// `a_1, a_2, ..., a_len`.
    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (1..=self.len).map(|j| self.get(j))
    }

    /// True iff no two adjacent coefficients are both 1.
    pub fn is_legal(&self) -> bool {
        let mut carry = 0u64;
        for &w in &self.words {
            if w & (w >> 1) != 0 || (carry & w & 1) != 0 {
                return false;
            }
            carry = w >> 63;
        }
        true
    }

    /// True iff some adjacent pair of coefficients are both 0.
    pub fn has_adjacent_zeros(&self) -> bool {
        (1..self.len).any(|j| !self.get(j) && !self.get(j + 1))
    }

    /// Upper 64-bit word view, used by the successor walk.
    fn word(&self, i: usize) -> u64 {
        self.words.get(i).copied().unwrap_or(0)
    }
}

impl fmt::Debug for Coeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coeffs(")?;
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

/// True iff no adjacent pair of ones appears in `a_1, a_2, ...`.
pub fn is_legal(bits: &[bool]) -> bool {
    bits.windows(2).all(|w| !(w[0] && w[1]))
}

/// A legal Zeckendorf coefficient vector.
///
/// A canonical code has `len == top_index`; a padded code carries extra
/// leading zeros so it can be sliced against a larger top index.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ZeckCode {
    coeffs: Coeffs,
}

impl ZeckCode {
    /// The empty code of the integer 0.
    pub fn zero() -> Self {
        ZeckCode::default()
    }

    pub fn from_coeffs(coeffs: Coeffs) -> Result<Self> {
        if !coeffs.is_legal() {
            return Err(ZeckError::Validation(format!(
                "adjacent ones in {:?}",
                coeffs
            )));
        }
        Ok(ZeckCode { coeffs })
    }

    /// Canonical code with ones at the given 1-based indices (any order).
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let len = indices.iter().copied().max().unwrap_or(0);
        Self::from_coeffs(Coeffs::from_indices(indices, len)?)
    }

    pub fn coeffs(&self) -> &Coeffs {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Coeffs {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Top index `n` (`a_n = 1`), or 0 for the zero code.
    pub fn top_index(&self) -> usize {
        self.coeffs.top_index()
    }

    pub fn is_canonical(&self) -> bool {
        self.len() == self.top_index()
    }

    pub fn get(&self, j: usize) -> bool {
        self.coeffs.get(j)
    }

    /// The same integer with leading zeros up to length `n`.
    pub fn padded(&self, n: usize) -> Result<Self> {
        if self.top_index() > n {
            return Err(ZeckError::Argument(format!(
                "code with top index {} cannot be padded to {n}",
                self.top_index()
            )));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n);
        Ok(ZeckCode { coeffs })
    }

    /// Drops leading zeros.
    pub fn canonical(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(self.top_index());
        ZeckCode { coeffs }
    }

    /// Summand indices, descending.
    pub fn indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.coeffs.ones().collect();
        v.reverse();
        v
    }

    /// Number of summands `s(m)`.
    pub fn summand_count(&self) -> usize {
        self.coeffs.count_ones()
    }

    /// `sum a_j F_j`.
    pub fn value(&self) -> BigUint {
        fib::with_table(|t| {
            t.ensure(self.len());
            self.coeffs.ones().map(|j| t.as_slice()[j].clone()).sum()
        })
    }

    /// Replaces the code by that of its successor `value + 1`.
    ///
    /// Sets the lowest position `i` with `a_i = a_{i+1} = 0` and clears
    /// everything below it; amortized O(1) over a run of increments. The
    /// length grows only when the successor needs a new top index.
    pub fn increment(&mut self) {
        let nw = self.coeffs.words.len();
        for wi in 0..=nw {
            let w = self.coeffs.word(wi);
            let upper = (w >> 1) | (self.coeffs.word(wi + 1) << 63);
            let free = !w & !upper;
            if free == 0 {
                continue;
            }
            let b = free.trailing_zeros() as usize;
            let pos = wi * 64 + b + 1;
            if pos > self.coeffs.len {
                self.coeffs.resize(pos);
            }
            for low in &mut self.coeffs.words[..wi] {
                *low = 0;
            }
            let word = &mut self.coeffs.words[wi];
            *word &= !((1u64 << b) - 1);
            *word |= 1 << b;
            return;
        }
        unreachable!("a zero word above the code always has a free pair");
    }

    /// Bit string `a_n ... a_1`, empty for the zero code.
    pub fn to_bit_string(&self) -> String {
        (1..=self.len())
            .rev()
            .map(|j| if self.get(j) { '1' } else { '0' })
            .collect()
    }

    /// Parses a bit string `a_n ... a_1`.
    pub fn from_bit_string(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .rev()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ZeckError::Argument(format!(
                    "bit strings contain only 0 and 1, found {other:?}"
                ))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Self::from_coeffs(Coeffs::from_bits(&bits))
    }
}

/// `indices: j1,j2,...` with indices descending.
impl fmt::Display for ZeckCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(|j| j.to_string()).collect();
        write!(f, "indices: {}", parts.join(","))
    }
}

impl fmt::Debug for ZeckCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZeckCode({})", self)
    }
}

impl FromStr for ZeckCode {
    type Err = ZeckError;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix("indices:")
            .ok_or_else(|| ZeckError::Argument(format!("expected \"indices: ...\", got {s:?}")))?
            .trim();
        if body.is_empty() {
            return Ok(ZeckCode::zero());
        }
        let indices = body
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| ZeckError::Argument(format!("bad index {p:?}: {e}")))
            })
            .collect::<Result<Vec<usize>>>()?;
        if indices.windows(2).any(|w| w[0] <= w[1]) {
            return Err(ZeckError::Argument(
                "indices must be strictly descending".into(),
            ));
        }
        Self::from_indices(&indices)
    }
}

static FIB_U128: std::sync::LazyLock<Vec<u128>> = std::sync::LazyLock::new(|| {
    let mut v = vec![1u128, 1];
    while let Some(next) = v[v.len() - 1].checked_add(v[v.len() - 2]) {
        v.push(next);
    }
    v
});

/// Greedy Zeckendorf decomposition: repeatedly remove the largest `F_k` not
/// exceeding the remainder. `0` maps to the empty code.
pub fn decompose(m: &BigUint) -> ZeckCode {
    if m.is_zero() {
        return ZeckCode::zero();
    }
    if let Some(small) = m.to_u128() {
        return decompose_u128(small);
    }
    let n = fib::index_of(m).expect("m is positive");
    fib::with_table(|t| {
        let f = t.as_slice();
        let mut coeffs = Coeffs::zeros(n);
        let mut rest = m.clone();
        let mut k = n;
        while !rest.is_zero() {
            if f[k] <= rest {
                rest -= &f[k];
                coeffs.set(k, true);
                k = k.saturating_sub(2);
            } else {
                k -= 1;
            }
        }
        ZeckCode { coeffs }
    })
}

/// [`decompose`] for native integers.
pub fn decompose_u128(m: u128) -> ZeckCode {
    if m == 0 {
        return ZeckCode::zero();
    }
    let f = &*FIB_U128;
    let n = f[1..].partition_point(|&x| x <= m);
    let mut coeffs = Coeffs::zeros(n);
    let mut rest = m;
    let mut k = n;
    while rest != 0 {
        if f[k] <= rest {
            rest -= f[k];
            coeffs.set(k, true);
            k = k.saturating_sub(2);
        } else {
            k -= 1;
        }
    }
    ZeckCode { coeffs }
}

/// `sum a_j F_j` for a raw vector; rejects illegal vectors.
pub fn recompose(coeffs: &Coeffs) -> Result<BigUint> {
    Ok(ZeckCode::from_coeffs(coeffs.clone())?.value())
}

/// `s(m)`, the number of summands in the decomposition of `m`.
pub fn summand_count(m: &BigUint) -> usize {
    decompose(m).summand_count()
}
