//! Streaming, mergeable summaries of a criterion over many matrices.

use std::collections::{BTreeMap, BTreeSet};

use partdist_core::{ratio_to_f64, Rational};
use serde::Serialize;

/// Sample points kept for quantiles when the stream is longer.
pub const RESERVOIR_CAPACITY: usize = 16_384;

/// Histogram layout: bins `[k / scale, (k + 1) / scale)`.
///
/// With `points` set the scale is the sample size and each bin holds the
/// single support point `k / scale`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Binning {
    pub scale: u64,
    pub points: bool,
}

impl Binning {
    pub fn support(n: u64) -> Self {
        Self { scale: n, points: true }
    }

    pub fn width(per_unit: u64) -> Self {
        Self { scale: per_unit, points: false }
    }

    fn key(&self, value: &Rational) -> i64 {
        let scaled = value * Rational::from_integer(self.scale as i128);
        scaled.floor().to_integer() as i64
    }
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Content hash of a slice of counts.
pub fn hash_counts(counts: &[u64]) -> u64 {
    counts.iter().fold(0x1234_5678_9abc_def0, |h, &c| splitmix64(h ^ c))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.carry);
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ExactMoments {
    denominator: u64,
    sum: i128,
    sum_sq: i128,
}

/// Keeps the `capacity` items with the smallest hashes. Hashes come from
/// item keys, so the kept set does not depend on arrival order.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Reservoir {
    capacity: usize,
    heap: BTreeSet<(u64, u64, Rational)>,
}

impl Reservoir {
    fn new(capacity: usize) -> Self {
        Self { capacity, heap: BTreeSet::new() }
    }

    fn offer(&mut self, item: (u64, u64, Rational)) {
        if self.heap.len() < self.capacity {
            self.heap.insert(item);
        } else if let Some(top) = self.heap.last() {
            if (item.0, item.1) < (top.0, top.1) {
                self.heap.pop_last();
                self.heap.insert(item);
            }
        }
    }

    fn merge(&mut self, other: Reservoir) {
        for item in other.heap {
            self.offer(item);
        }
    }

    fn sorted_values(&self) -> Vec<Rational> {
        let mut values: Vec<Rational> = self.heap.iter().map(|(_, _, v)| *v).collect();
        values.sort();
        values
    }
}

/// Single-pass accumulator for one criterion.
///
/// Moments are exact when every value is a multiple of `1 / denominator`;
/// a compensated floating sum is kept alongside for the general case.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    name: String,
    binning: Binning,
    count: u64,
    exact: Option<ExactMoments>,
    sum: Compensated,
    sum_sq: Compensated,
    min: Option<Rational>,
    max: Option<Rational>,
    histogram: BTreeMap<i64, u64>,
    reservoir: Reservoir,
}

impl Accumulator {
    pub fn new(name: &str, binning: Binning, denominator: Option<u64>) -> Self {
        Self {
            name: name.to_string(),
            binning,
            count: 0,
            exact: denominator.filter(|&d| d > 0).map(|denominator| ExactMoments { denominator, sum: 0, sum_sq: 0 }),
            sum: Compensated::default(),
            sum_sq: Compensated::default(),
            min: None,
            max: None,
            histogram: BTreeMap::new(),
            reservoir: Reservoir::new(RESERVOIR_CAPACITY),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn min(&self) -> Option<Rational> {
        self.min
    }

    pub fn max(&self) -> Option<Rational> {
        self.max
    }

    pub fn histogram(&self) -> &BTreeMap<i64, u64> {
        &self.histogram
    }

    /// Adds `value`; `key` identifies the item for quantile sampling.
    pub fn observe(&mut self, value: Rational, key: u64) {
        self.count += 1;
        if let Some(exact) = &mut self.exact {
            let d = exact.denominator as i128;
            let step = if d % value.denom() == 0 { Some(d / value.denom()) } else { None };
            let updated = step.and_then(|step| {
                let x = value.numer().checked_mul(step)?;
                Some((exact.sum.checked_add(x)?, exact.sum_sq.checked_add(x.checked_mul(x)?)?))
            });
            match updated {
                Some((sum, sum_sq)) => {
                    exact.sum = sum;
                    exact.sum_sq = sum_sq;
                }
                None => self.exact = None,
            }
        }
        let x = ratio_to_f64(&value);
        self.sum.add(x);
        self.sum_sq.add(x * x);
        if self.min.is_none_or(|m| value < m) {
            self.min = Some(value);
        }
        if self.max.is_none_or(|m| value > m) {
            self.max = Some(value);
        }
        *self.histogram.entry(self.binning.key(&value)).or_insert(0) += 1;
        self.reservoir.offer((splitmix64(key), key, value));
    }

    /// Folds `other` into `self`. The result does not depend on how the
    /// stream was split; floating sums can differ in the last bits.
    pub fn merge(&mut self, other: Accumulator) {
        self.count += other.count;
        self.exact = match (self.exact.take(), other.exact) {
            (Some(a), Some(b)) if a.denominator == b.denominator => a
                .sum
                .checked_add(b.sum)
                .zip(a.sum_sq.checked_add(b.sum_sq))
                .map(|(sum, sum_sq)| ExactMoments { denominator: a.denominator, sum, sum_sq }),
            _ => None,
        };
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
        self.min = match (self.min, other.min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.max = match (self.max, other.max) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        for (k, c) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += c;
        }
        self.reservoir.merge(other.reservoir);
    }

    pub fn exact_mean(&self) -> Option<Rational> {
        let exact = self.exact.as_ref()?;
        if self.count == 0 {
            return None;
        }
        let denominator = (self.count as i128).checked_mul(exact.denominator as i128)?;
        Some(Rational::new(exact.sum, denominator))
    }

    pub fn exact_variance(&self) -> Option<Rational> {
        let exact = self.exact.as_ref()?;
        if self.count < 2 {
            return None;
        }
        let k = self.count as i128;
        let d = exact.denominator as i128;
        let numerator = k.checked_mul(exact.sum_sq)?.checked_sub(exact.sum.checked_mul(exact.sum)?)?;
        let denominator = k.checked_mul(k - 1)?.checked_mul(d.checked_mul(d)?)?;
        Some(Rational::new(numerator, denominator))
    }

    pub fn mean(&self) -> f64 {
        match self.exact_mean() {
            Some(m) => ratio_to_f64(&m),
            None if self.count > 0 => self.sum.value() / self.count as f64,
            None => f64::NAN,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        match self.exact_variance() {
            Some(v) => ratio_to_f64(&v),
            None => {
                let k = self.count as f64;
                let s = self.sum.value();
                ((self.sum_sq.value() - s * s / k) / (k - 1.0)).max(0.0)
            }
        }
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn summary(&self) -> DistributionSummary {
        let sample = self.reservoir.sorted_values();
        let floats: Vec<f64> = sample.iter().map(ratio_to_f64).collect();
        let q = |p: f64| quantile(&floats, p);
        let (p25, p50, p75) = (q(0.25), q(0.5), q(0.75));
        let iqr = p75 - p25;
        let (lo, hi) = (p25 - 1.5 * iqr, p75 + 1.5 * iqr);
        let lower_whisker = floats.iter().copied().find(|&x| x >= lo).unwrap_or(f64::NAN);
        let upper_whisker = floats.iter().rev().copied().find(|&x| x <= hi).unwrap_or(f64::NAN);
        let scale = self.binning.scale as i128;
        let histogram = self
            .histogram
            .iter()
            .map(|(&k, &count)| {
                let lower = Rational::new(k as i128, scale);
                let upper = Rational::new(k as i128 + 1, scale);
                HistogramBin {
                    lower: ratio_to_f64(&lower),
                    upper: if self.binning.points { ratio_to_f64(&lower) } else { ratio_to_f64(&upper) },
                    label: if self.binning.points { format!("{k}/{scale}") } else { lower.to_string() },
                    count,
                }
            })
            .collect();
        DistributionSummary {
            name: self.name.clone(),
            count: self.count,
            mean: self.mean(),
            mean_exact: self.exact_mean().map(|m| m.to_string()),
            sd: self.sd(),
            variance_exact: self.exact_variance().map(|v| v.to_string()),
            min: self.min.as_ref().map(ratio_to_f64).unwrap_or(f64::NAN),
            min_exact: self.min.map(|m| m.to_string()),
            max: self.max.as_ref().map(ratio_to_f64).unwrap_or(f64::NAN),
            max_exact: self.max.map(|m| m.to_string()),
            p25,
            p50,
            p75,
            lower_whisker,
            upper_whisker,
            quantiles_exact: self.count as usize <= RESERVOIR_CAPACITY,
            histogram,
        }
    }
}

/// Linear interpolation between order statistics of a sorted sample.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub label: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub name: String,
    pub count: u64,
    pub mean: f64,
    pub mean_exact: Option<String>,
    pub sd: f64,
    pub variance_exact: Option<String>,
    pub min: f64,
    pub min_exact: Option<String>,
    pub max: f64,
    pub max_exact: Option<String>,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub lower_whisker: f64,
    pub upper_whisker: f64,
    /// Whether quantiles use every observation rather than a hash sample.
    pub quantiles_exact: bool,
    pub histogram: Vec<HistogramBin>,
}
