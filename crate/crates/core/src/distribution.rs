use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{arg, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    /// Weights are exact counts of integers.
    Exact,
    /// Weights are sample counts.
    Empirical,
}

/// Histogram of summand counts: weight of each count `j`.
///
/// Zero weights are not stored; the total is always positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummandDistribution {
    weights: BTreeMap<usize, BigUint>,
    total: BigUint,
    kind: DistributionKind,
}

impl SummandDistribution {
    pub fn from_weights(
        kind: DistributionKind,
        weights: impl IntoIterator<Item = (usize, BigUint)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<usize, BigUint> = BTreeMap::new();
        for (j, w) in weights {
            if !w.is_zero() {
                *map.entry(j).or_default() += w;
            }
        }
        let total: BigUint = map.values().sum();
        if total.is_zero() {
            return arg("a distribution needs positive total weight");
        }
        Ok(SummandDistribution {
            weights: map,
            total,
            kind,
        })
    }

    /// From a dense histogram `counts[j]`.
    pub fn from_counts(kind: DistributionKind, counts: &[u64]) -> Result<Self> {
        Self::from_weights(
            kind,
            counts
                .iter()
                .enumerate()
                .map(|(j, &c)| (j, BigUint::from(c))),
        )
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn weights(&self) -> &BTreeMap<usize, BigUint> {
        &self.weights
    }

    pub fn weight(&self, j: usize) -> BigUint {
        self.weights.get(&j).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn support_min(&self) -> usize {
        *self.weights.keys().next().expect("nonempty")
    }

    pub fn support_max(&self) -> usize {
        *self.weights.keys().next_back().expect("nonempty")
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// Cumulative weight of counts `<= j`.
    pub fn cumulative(&self, j: i64) -> BigUint {
        if j < 0 {
            return BigUint::zero();
        }
        self.weights.range(..=j as usize).map(|(_, w)| w).sum()
    }

    /// The distribution of `s - by`; `by` must not exceed the minimum.
    pub fn shifted_down(&self, by: usize) -> Result<Self> {
        if by > self.support_min() {
            return arg(format!(
                "cannot shift by {by} below the support minimum {}",
                self.support_min()
            ));
        }
        Self::from_weights(
            self.kind,
            self.weights.iter().map(|(&j, w)| (j - by, w.clone())),
        )
    }

    fn moment(&self, power: u32) -> BigRational {
        let sum: BigUint = self
            .weights
            .iter()
            .map(|(&j, w)| BigUint::from(j).pow(power) * w)
            .sum();
        BigRational::new(BigInt::from(sum), BigInt::from(self.total.clone()))
    }

    pub fn mean(&self) -> BigRational {
        self.moment(1)
    }

    pub fn variance(&self) -> BigRational {
        let mu = self.mean();
        self.moment(2) - &mu * &mu
    }

    pub fn mean_f64(&self) -> f64 {
        ratio_to_f64(&self.mean())
    }

    pub fn variance_f64(&self) -> f64 {
        ratio_to_f64(&self.variance())
    }

    /// Weight of `j` as a fraction of the total.
    pub fn probability(&self, j: usize) -> f64 {
        ratio_to_f64(&BigRational::new(
            BigInt::from(self.weight(j)),
            BigInt::from(self.total.clone()),
        ))
    }
}

#[derive(Serialize)]
struct WeightRow<'a> {
    summands: usize,
    #[serde(serialize_with = "crate::report::decimal")]
    weight: &'a BigUint,
}

/// `{kind, total, weights: [{summands, weight}]}` with weights ascending in
/// the summand count and big integers as decimal strings.
impl Serialize for SummandDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<WeightRow<'_>> = self
            .weights
            .iter()
            .map(|(&summands, weight)| WeightRow { summands, weight })
            .collect();
        let mut st = s.serialize_struct("SummandDistribution", 3)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("total", &self.total.to_string())?;
        st.serialize_field("weights", &rows)?;
        st.end()
    }
}

/// Nearest `f64` to an exact rational.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
