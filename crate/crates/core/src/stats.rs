//! Standardization, distance to the standard normal, and the CDF sandwich
//! between an interval and `[0, F_alpha)`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::distribution::{ratio_to_f64, SummandDistribution};
use crate::error::{arg, Result, ZeckError};

/// A distribution recentered and rescaled to `(s - mu) / sigma`.
#[derive(Debug, Clone)]
pub struct StandardizedDistribution {
    base: SummandDistribution,
    mu: f64,
    sigma: f64,
    /// `(z, P(Z < z), P(Z <= z))` in increasing `z`.
    points: Vec<(f64, f64, f64)>,
}

impl StandardizedDistribution {
    pub fn base(&self) -> &SummandDistribution {
        &self.base
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Standardized support points with the CDF just below and at each.
    pub fn points(&self) -> &[(f64, f64, f64)] {
        &self.points
    }

    /// Mean and variance of the standardized points.
    pub fn moments(&self) -> (f64, f64) {
        let mut prev = 0.0;
        let (mut m1, mut m2) = (0.0, 0.0);
        for &(z, _, cum) in &self.points {
            let p = cum - prev;
            prev = cum;
            m1 += p * z;
            m2 += p * z * z;
        }
        (m1, m2 - m1 * m1)
    }

    /// Standardizes the already standardized points by their own moments.
    pub fn restandardize(&self) -> StandardizedDistribution {
        let (m, v) = self.moments();
        let s = v.sqrt();
        StandardizedDistribution {
            base: self.base.clone(),
            mu: self.mu + m * self.sigma,
            sigma: self.sigma * s,
            points: self
                .points
                .iter()
                .map(|&(z, below, at)| ((z - m) / s, below, at))
                .collect(),
        }
    }
}

/// Centers by the exact mean and scales by the exact standard deviation.
pub fn standardize(dist: &SummandDistribution) -> Result<StandardizedDistribution> {
    if dist.support_len() < 2 {
        return Err(ZeckError::Degenerate(format!(
            "single support point {} has zero variance",
            dist.support_min()
        )));
    }
    let mu = dist.mean_f64();
    let sigma = dist.variance_f64().sqrt();
    let total = BigInt::from(dist.total().clone());
    let mut running = BigUint::default();
    let mut below = 0.0;
    let points = dist
        .weights()
        .iter()
        .map(|(&j, w)| {
            running += w;
            let at = ratio_to_f64(&BigRational::new(
                BigInt::from(running.clone()),
                total.clone(),
            ));
            let point = ((j as f64 - mu) / sigma, below, at);
            below = at;
            point
        })
        .collect();
    Ok(StandardizedDistribution {
        base: dist.clone(),
        mu,
        sigma,
        points,
    })
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    /// `sup_x |F(x) - Phi(x)|`.
    pub statistic: f64,
    /// Support size of the distribution.
    pub n_effective: usize,
    /// Standardized point attaining the supremum.
    pub location: f64,
}

/// Kolmogorov-Smirnov distance to the standard normal.
///
/// The empirical CDF is a step function, so the supremum is attained at a
/// support point on one side of its jump; both sides are evaluated.
pub fn ks_to_normal(sd: &StandardizedDistribution) -> KsReport {
    let mut best = KsReport {
        statistic: 0.0,
        n_effective: sd.points.len(),
        location: f64::NAN,
    };
    for &(z, below, at) in &sd.points {
        let phi = normal_cdf(z);
        let d = (at - phi).abs().max((below - phi).abs());
        if d > best.statistic || best.location.is_nan() {
            best.statistic = d;
            best.location = z;
        }
    }
    best
}

/// `{mean, variance, sigma, ks, ks_location, support_min, support_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub mean: f64,
    pub variance: f64,
    pub sigma: f64,
    pub ks: f64,
    pub ks_location: f64,
    pub support_min: usize,
    pub support_max: usize,
}

pub fn summarize(dist: &SummandDistribution) -> Result<DistributionSummary> {
    let sd = standardize(dist)?;
    let ks = ks_to_normal(&sd);
    Ok(DistributionSummary {
        mean: sd.mu,
        variance: dist.variance_f64(),
        sigma: sd.sigma,
        ks: ks.statistic,
        ks_location: ks.location,
        support_min: dist.support_min(),
        support_max: dist.support_max(),
    })
}

/// Checks `G(j - q + 1) <= F(j) <= G(j)` for every integer `j`, where `F` is
/// the CDF of `s(x) - shift` over the interval and `G` the CDF of `s(y)` over
/// `[0, F_alpha)`. This is what `0 <= defect < q` and a bijection imply.
///
/// `q = 1` forces `F = G`.
pub fn cdf_sandwich_check(
    interval: &SummandDistribution,
    below: &SummandDistribution,
    shift: usize,
    q: usize,
) -> Result<bool> {
    if interval.total() != below.total() {
        return arg(format!(
            "distributions cover different interval lengths ({} vs {})",
            interval.total(),
            below.total()
        ));
    }
    if q == 0 {
        return arg("q must be positive");
    }
    if shift > interval.support_min() {
        return Ok(false);
    }
    let f = interval.shifted_down(shift)?;
    let hi = f.support_max().max(below.support_max()) as i64 + q as i64;
    let q = q as i64;
    Ok((0..=hi).all(|j| {
        let fj = f.cumulative(j);
        below.cumulative(j - q + 1) <= fj && fj <= below.cumulative(j)
    }))
}
