//! Worst-case values of the MED and RD for fixed `(r, s, n)`, the
//! normalizations built on them, closed forms for perfectly independent
//! clusterings, the 2 x 2 analysis, and brute-force checks of the conjectured
//! maximizer shapes.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::assignment::MedSolver;
use crate::combinatorics::{count_confusion_matrices, EnumerationCursor};
use crate::metrics::{ard_from_pairs, pair_counts, PairCounts};
use crate::rational::binomial2;
use crate::{ard, med, ConfusionMatrix, Error, Rational, Result};

/// Dimensions with the quotient/remainder split used by the RD maximizer.
///
/// Always oriented so that `r <= s`. `k` and `l` are the quotient and
/// remainder of `n - 2(r - 1)` divided by `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtremeSpec {
    pub r: usize,
    pub s: usize,
    pub n: u64,
    pub q: usize,
    pub k: u64,
    pub l: u64,
}

impl ExtremeSpec {
    pub fn new(r: usize, s: usize, n: u64) -> Result<Self> {
        let (r, s) = (r.min(s), r.max(s));
        if r == 0 {
            return Err(Error::InvalidDimensions { r, s, n, reason: "cluster counts must be positive" });
        }
        let floor = 2 * (r as u64 - 1) + s as u64;
        if n < floor.max(2) {
            return Err(Error::InvalidDimensions { r, s, n, reason: "need n >= 2(r - 1) + s" });
        }
        let rest = n - 2 * (r as u64 - 1);
        Ok(Self { r, s, n, q: s, k: rest / s as u64, l: rest % s as u64 })
    }

    /// `(q_1, ..., q_s)`: first row of the RD maximizer.
    pub fn witness_top_row(&self) -> Vec<u64> {
        let mut row = vec![self.k; self.s];
        row[0] = self.k + self.r as u64 - 1;
        for q in row.iter_mut().skip(1).take(self.l as usize) {
            *q += 1;
        }
        row
    }

    /// `n(n-1) max RD = (n-r+1)^2 + (r-1)(2r-3) - s k^2 - l(2k+1)`.
    pub fn max_rd_scaled(&self) -> i128 {
        let (n, r, s, k, l) = (self.n as i128, self.r as i128, self.s as i128, self.k as i128, self.l as i128);
        (n - r + 1).pow(2) + (r - 1) * (2 * r - 3) - s * k * k - l * (2 * k + 1)
    }
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Upper bound `1 - ceil(n/q)/n` of the MED, `q = max(r, s)`.
pub fn max_med(r: usize, s: usize, n: u64) -> Result<Rational> {
    let q = r.max(s) as u64;
    if q > n || n == 0 {
        return Err(Error::InvalidDimensions { r, s, n, reason: "more clusters than objects" });
    }
    Ok(Rational::new((n - ceil_div(n, q)) as i128, n as i128))
}

/// `NMED = n / (n - ceil(n/q)) * MED`.
pub fn nmed(m: &ConfusionMatrix) -> Result<Rational> {
    nmed_from_matched(m.rows(), m.cols(), m.total(), med(m)?.matched)
}

/// NMED from the matched count returned by the MED solver.
pub fn nmed_from_matched(r: usize, s: usize, n: u64, matched: u64) -> Result<Rational> {
    let q = r.max(s) as u64;
    if n == 0 || q > n {
        return Err(Error::InvalidDimensions { r, s, n, reason: "more clusters than objects" });
    }
    let span = n - ceil_div(n, q);
    if span == 0 {
        return Err(Error::DegenerateNormalization);
    }
    Ok(Rational::new((n - matched) as i128, span as i128))
}

/// Largest Rand distance over `N(r, s, n)`, from the closed form.
pub fn max_rd(r: usize, s: usize, n: u64) -> Result<Rational> {
    let spec = ExtremeSpec::new(r, s, n)?;
    Ok(Rational::new(spec.max_rd_scaled(), (n as i128) * (n as i128 - 1)))
}

/// The matrix with first row `q_1..q_s`, ones down the rest of the first
/// column and zeros elsewhere. Returned as `r x s` in the requested
/// orientation.
pub fn argmax_rd_witness(r: usize, s: usize, n: u64) -> Result<ConfusionMatrix> {
    let spec = ExtremeSpec::new(r, s, n)?;
    let mut counts = vec![0u64; spec.r * spec.s];
    counts[..spec.s].copy_from_slice(&spec.witness_top_row());
    for i in 1..spec.r {
        counts[i * spec.s] = 1;
    }
    let witness = ConfusionMatrix::new(spec.r, spec.s, counts)?;
    Ok(if r > s { witness.transpose() } else { witness })
}

/// `NRD = RD / max RD`.
pub fn nrd(m: &ConfusionMatrix) -> Result<Rational> {
    nrd_from_pairs(m.rows(), m.cols(), &pair_counts(m)?)
}

/// NRD of a matrix with dimensions `r x s` and pair counts `p`.
pub fn nrd_from_pairs(r: usize, s: usize, p: &PairCounts) -> Result<Rational> {
    let spec = ExtremeSpec::new(r, s, p.n)?;
    let scaled = spec.max_rd_scaled();
    if scaled == 0 {
        return Err(Error::DegenerateNormalization);
    }
    // RD * n(n-1) = 2(b + c)
    Ok(Rational::new(2 * p.discordant() as i128, scaled))
}

fn require_multiple(r: usize, s: usize, n: u64) -> Result<()> {
    let rs = (r * s) as u64;
    if r == 0 || s == 0 || n < 2 || n % rs != 0 {
        return Err(Error::NotMultiple { n, rs });
    }
    Ok(())
}

/// RD of the all-equal matrix `n/(rs)`: `n(r+s-2) / {(n-1) rs}`.
pub fn independent_rd(r: usize, s: usize, n: u64) -> Result<Rational> {
    require_multiple(r, s, n)?;
    let (r, s, n) = (r as i128, s as i128, n as i128);
    Ok(Rational::new(n * (r + s - 2), (n - 1) * r * s))
}

/// ARD of the all-equal matrix: `(n-1) / {n - (2rs-r-s)/(r+s-2)}`.
pub fn independent_ard(r: usize, s: usize, n: u64) -> Result<Rational> {
    require_multiple(r, s, n)?;
    if r + s <= 2 {
        return Err(Error::DegenerateBaseline);
    }
    let (r, s, n) = (r as i128, s as i128, n as i128);
    let offset = Rational::new(2 * r * s - r - s, r + s - 2);
    let denominator = Rational::from_integer(n) - offset;
    if denominator == Rational::from_integer(0) {
        return Err(Error::DegenerateBaseline);
    }
    Ok(Rational::from_integer(n - 1) / denominator)
}

/// Diagonal and anti-diagonal sums of a 2 x 2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoByTwoSummary {
    pub d1: u64,
    pub d2: u64,
}

impl TwoByTwoSummary {
    pub fn of(m: &ConfusionMatrix) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::Precondition("matrix must be 2 x 2"));
        }
        Ok(Self { d1: m.get(0, 0) + m.get(1, 1), d2: m.get(0, 1) + m.get(1, 0) })
    }

    /// `min(d1, d2) / n`.
    pub fn med(&self) -> Rational {
        Rational::new(self.d1.min(self.d2) as i128, (self.d1 + self.d2) as i128)
    }

    /// `d1 d2 / C(n, 2)`.
    pub fn rd(&self) -> Rational {
        Rational::new((self.d1 * self.d2) as i128, binomial2(self.d1 + self.d2))
    }
}

/// One row of the 2 x 2 profile: closed-form MED and RD for the diagonal
/// sum `d1`, and every ARD reachable by a canonical matrix with that sum.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoByTwoRow {
    pub d1: u64,
    pub d2: u64,
    pub med: Rational,
    pub rd: Rational,
    /// Distinct ARD values in increasing order.
    pub ard_values: Vec<Rational>,
    /// A matrix attaining the largest ARD of the row (lexicographically last).
    pub ard_argmax: Option<ConfusionMatrix>,
}

/// MED, RD and the possible ARD values as functions of `d1` for 2 x 2 tables.
pub fn two_by_two_profile(n: u64) -> Result<Vec<TwoByTwoRow>> {
    if n < 2 {
        return Err(Error::TooFewObjects { n });
    }
    let mut rows = Vec::with_capacity(n as usize + 1);
    for d1 in 0..=n {
        let d2 = n - d1;
        let summary = TwoByTwoSummary { d1, d2 };
        let mut values = Vec::new();
        let mut best: Option<(Rational, ConfusionMatrix)> = None;
        for n11 in 0..=d1 {
            for n12 in 0..=d2 {
                let m = ConfusionMatrix::new(2, 2, vec![n11, n12, d2 - n12, d1 - n11])?;
                if !m.is_canonical() {
                    continue;
                }
                let Ok(value) = ard(&m) else { continue };
                values.push(value);
                if best.as_ref().is_none_or(|(b, w)| value > *b || (value == *b && m.counts() > w.counts())) {
                    best = Some((value, m));
                }
            }
        }
        values.sort();
        values.dedup();
        rows.push(TwoByTwoRow {
            d1,
            d2,
            med: summary.med(),
            rd: summary.rd(),
            ard_values: values,
            ard_argmax: best.map(|(_, m)| m),
        });
    }
    Ok(rows)
}

/// Largest ARD over all canonical 2 x 2 tables of total `n`, with the
/// lexicographically last matrix attaining it.
pub fn two_by_two_max_ard(n: u64) -> Result<(Rational, ConfusionMatrix)> {
    let mut best: Option<(Rational, ConfusionMatrix)> = None;
    for row in two_by_two_profile(n)? {
        if let (Some(&value), Some(m)) = (row.ard_values.last(), row.ard_argmax) {
            let better = match &best {
                None => true,
                Some((b, bm)) => value > *b || (value == *b && m.counts() > bm.counts()),
            };
            if better {
                best = Some((value, m));
            }
        }
    }
    best.ok_or(Error::Precondition("no 2 x 2 table has a defined ARD"))
}

/// `alpha_n(d1) = 4n(n-1)d1 / [(d1+n){d1^2 + n(n-2)}]`, the ARD of the
/// conjectured maximizer for a given `d1 >= d2 >= 2`.
pub fn alpha_n(n: u64, d1: u64) -> Result<Rational> {
    if d1 > n {
        return Err(Error::Precondition("d1 cannot exceed n"));
    }
    let d2 = n - d1;
    if d2 < 2 {
        return Err(Error::Precondition("alpha_n needs d2 >= 2; use [[n-2, 0], [1, 1]] for d2 = 1"));
    }
    if d1 < d2 {
        return Err(Error::Precondition("alpha_n needs d1 >= d2"));
    }
    let (n, d1) = (n as i128, d1 as i128);
    Ok(Rational::new(4 * n * (n - 1) * d1, (d1 + n) * (d1 * d1 + n * (n - 2))))
}

/// Conjectured ARD-maximizing 2 x 2 table for a given `d1 >= d2`.
pub fn max_ard_two_by_two_witness(n: u64, d1: u64) -> Result<ConfusionMatrix> {
    if d1 > n || d1 < n - d1 {
        return Err(Error::Precondition("need d2 <= d1 <= n"));
    }
    let d2 = n - d1;
    match d2 {
        0 => Err(Error::Precondition("d2 = 0 has no canonical witness with an off-diagonal")),
        1 => ConfusionMatrix::from_rows(&[[n - 2, 0], [1, 1]]),
        _ if d2 % 2 == 0 => ConfusionMatrix::from_rows(&[[d1, d2 / 2], [d2 / 2, 0]]),
        _ => ConfusionMatrix::from_rows(&[[d1, (d2 - 1) / 2], [(d2 + 1) / 2, 0]]),
    }
}

/// First-order approximation `2(n12 + n21)/(n - 1)` of the RD of a 2 x 2
/// table close to diagonal.
pub fn taylor_rd_small(n: u64, n12: u64, n21: u64) -> Result<Rational> {
    if n < 2 {
        return Err(Error::TooFewObjects { n });
    }
    Ok(Rational::new(2 * (n12 + n21) as i128, n as i128 - 1))
}

/// Nonzero entries only on the first row and column, with a
/// `q_1 >= ... >= q_s` first row and ones below the corner.
pub fn has_argmax_rd_shape(m: &ConfusionMatrix) -> bool {
    let top = m.row(0);
    top.windows(2).all(|w| w[0] >= w[1])
        && (1..m.rows()).all(|i| m.get(i, 0) == 1 && m.row(i)[1..].iter().all(|&x| x == 0))
}

/// Arrowhead shape conjectured for the ARD maximizer: nonzeros only on the
/// first row and column, `p_1 >= p_2 >= ... >= p_r` down the first column,
/// `p_1 >= q_2 >= ... >= q_s` along the first row, and, when `r = s`, equal
/// tails.
pub fn has_arrowhead_shape(m: &ConfusionMatrix) -> bool {
    let (r, s) = (m.rows(), m.cols());
    if (1..r).any(|i| m.row(i)[1..].iter().any(|&x| x != 0)) {
        return false;
    }
    let column: Vec<u64> = (0..r).map(|i| m.get(i, 0)).collect();
    let top = m.row(0);
    let descending = |xs: &[u64]| xs.windows(2).all(|w| w[0] >= w[1]);
    descending(&column) && descending(top) && (r != s || column[1..] == top[1..])
}

/// Running maxima over a stream of matrices from `N(r, s, n)`.
///
/// Tallies are merged associatively; ties keep the lexicographically
/// largest witness, so any partition of the stream gives the same result.
#[derive(Debug, Clone)]
pub struct ConjectureTally {
    pub r: usize,
    pub s: usize,
    pub n: u64,
    pub count: u64,
    min_matched: Option<(u64, ConfusionMatrix)>,
    max_discordant: Option<(u64, ConfusionMatrix)>,
    rd_shape_attained: bool,
    max_ard: Option<(Rational, ConfusionMatrix)>,
    ard_shape_attained: bool,
}

// ties go to the lexicographically largest matrix
fn preferred(a: &ConfusionMatrix, b: &ConfusionMatrix) -> bool {
    a.counts() > b.counts()
}

impl ConjectureTally {
    pub fn new(r: usize, s: usize, n: u64) -> Self {
        Self {
            r,
            s,
            n,
            count: 0,
            min_matched: None,
            max_discordant: None,
            rd_shape_attained: false,
            max_ard: None,
            ard_shape_attained: false,
        }
    }

    /// Records one matrix given its matched MED count and pair counts.
    pub fn observe(&mut self, m: &ConfusionMatrix, matched: u64, pairs: &PairCounts) {
        self.count += 1;
        match &mut self.min_matched {
            Some((best, w)) if matched > *best || (matched == *best && !preferred(m, w)) => {}
            slot => *slot = Some((matched, m.clone())),
        }

        let discordant = pairs.discordant();
        let rd_shape = has_argmax_rd_shape(m);
        match &mut self.max_discordant {
            Some((best, _)) if discordant < *best => {}
            Some((best, w)) if discordant == *best => {
                self.rd_shape_attained |= rd_shape;
                if preferred(m, w) {
                    *w = m.clone();
                }
            }
            slot => {
                *slot = Some((discordant, m.clone()));
                self.rd_shape_attained = rd_shape;
            }
        }

        if let Ok(value) = ard_from_pairs(pairs) {
            let shape = has_arrowhead_shape(m);
            match &mut self.max_ard {
                Some((best, _)) if value < *best => {}
                Some((best, w)) if value == *best => {
                    self.ard_shape_attained |= shape;
                    if preferred(m, w) {
                        *w = m.clone();
                    }
                }
                slot => {
                    *slot = Some((value, m.clone()));
                    self.ard_shape_attained = shape;
                }
            }
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.count += other.count;
        self.min_matched = match (self.min_matched, other.min_matched) {
            (Some(a), Some(b)) => Some(if b.0 < a.0 || (b.0 == a.0 && preferred(&b.1, &a.1)) { b } else { a }),
            (a, b) => a.or(b),
        };
        (self.max_discordant, self.rd_shape_attained) = merge_max(
            self.max_discordant,
            self.rd_shape_attained,
            other.max_discordant,
            other.rd_shape_attained,
        );
        (self.max_ard, self.ard_shape_attained) =
            merge_max(self.max_ard, self.ard_shape_attained, other.max_ard, other.ard_shape_attained);
        self
    }

    pub fn finish(self) -> Result<ConjectureReport> {
        let (r, s, n) = (self.r, self.s, self.n);
        let (min_matched, med_maximizer) = self.min_matched.ok_or(Error::EmptySet { r, s, n })?;
        let (discordant, rd_maximizer) = self.max_discordant.ok_or(Error::EmptySet { r, s, n })?;
        let max_med_observed = Rational::new((n - min_matched) as i128, n as i128);
        let max_rd_observed = Rational::new(discordant as i128, binomial2(n));
        let med_bound = if r.max(s) >= 2 { max_med(r, s, n).ok() } else { None };
        let rd_formula = max_rd(r, s, n).ok();
        let witness_rd = argmax_rd_witness(r, s, n).ok().and_then(|w| crate::rand_distance(&w).ok());

        let mut counterexamples = Vec::new();
        if let Some(bound) = med_bound {
            if bound != max_med_observed {
                counterexamples.push(format!(
                    "max MED over N({r},{s},{n}) is {max_med_observed} (at {med_maximizer}), bound gives {bound}"
                ));
            }
        }
        if let Some(formula) = rd_formula {
            if formula != max_rd_observed {
                counterexamples.push(format!(
                    "max RD over N({r},{s},{n}) is {max_rd_observed} (at {rd_maximizer}), closed form gives {formula}"
                ));
            }
            if !self.rd_shape_attained {
                counterexamples.push(format!(
                    "no RD maximizer of N({r},{s},{n}) has the first-row/first-column form; e.g. {rd_maximizer}"
                ));
            }
            if witness_rd != Some(max_rd_observed) {
                counterexamples.push(format!("closed-form witness for N({r},{s},{n}) does not attain the maximum RD"));
            }
        }
        if let Some((value, w)) = &self.max_ard {
            if !self.ard_shape_attained {
                counterexamples.push(format!(
                    "no ARD maximizer of N({r},{s},{n}) has the arrowhead form; max {value} at {w}"
                ));
            }
        }
        Ok(ConjectureReport {
            r,
            s,
            n,
            count: self.count,
            max_med: max_med_observed,
            med_maximizer,
            max_med_bound: med_bound,
            max_rd: max_rd_observed,
            rd_maximizer,
            max_rd_formula: rd_formula,
            rd_shape_attained: self.rd_shape_attained,
            witness_attains_max_rd: rd_formula.map(|_| witness_rd == Some(max_rd_observed)),
            max_ard: self.max_ard.as_ref().map(|(v, _)| *v),
            ard_maximizer: self.max_ard.map(|(_, m)| m),
            ard_shape_attained: self.ard_shape_attained,
            counterexamples,
        })
    }
}

type Best<V> = Option<(V, ConfusionMatrix)>;

fn merge_max<V: Ord + Copy>(a: Best<V>, a_flag: bool, b: Best<V>, b_flag: bool) -> (Best<V>, bool) {
    match (a, b) {
        (Some(a), Some(b)) => match a.0.cmp(&b.0) {
            core::cmp::Ordering::Greater => (Some(a), a_flag),
            core::cmp::Ordering::Less => (Some(b), b_flag),
            core::cmp::Ordering::Equal => {
                let w = if preferred(&b.1, &a.1) { b } else { a };
                (Some(w), a_flag || b_flag)
            }
        },
        (Some(a), None) => (Some(a), a_flag),
        (None, Some(b)) => (Some(b), b_flag),
        (None, None) => (None, false),
    }
}

/// Outcome of an exhaustive scan of `N(r, s, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureReport {
    pub r: usize,
    pub s: usize,
    pub n: u64,
    pub count: u64,
    pub max_med: Rational,
    pub med_maximizer: ConfusionMatrix,
    pub max_med_bound: Option<Rational>,
    pub max_rd: Rational,
    pub rd_maximizer: ConfusionMatrix,
    /// `None` when `n < 2(r-1) + s`, where the closed form does not apply.
    pub max_rd_formula: Option<Rational>,
    pub rd_shape_attained: bool,
    pub witness_attains_max_rd: Option<bool>,
    pub max_ard: Option<Rational>,
    pub ard_maximizer: Option<ConfusionMatrix>,
    pub ard_shape_attained: bool,
    /// Human-readable descriptions of every failed check; empty when all hold.
    pub counterexamples: Vec<String>,
}

/// Default ceiling on `|N(r, s, n)|` for exhaustive scans.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 10_000_000;

/// Tallies one enumeration partition (or the whole set when `first_row` is `None`).
pub fn tally_partition(r: usize, s: usize, n: u64, first_row: Option<&[u64]>) -> ConjectureTally {
    let mut tally = ConjectureTally::new(r, s, n);
    let mut cursor = match first_row {
        Some(row) => EnumerationCursor::with_first_row(r, s, n, row),
        None => EnumerationCursor::new(r, s, n),
    };
    let mut solver = MedSolver::new();
    while let Some(m) = cursor.advance() {
        let matched = solver.matched(m);
        let pairs = pair_counts(m).expect("n >= 2 inside N(r, s, n)");
        tally.observe(m, matched, &pairs);
    }
    tally
}

/// Exhaustively checks the MED bound, the RD closed form and witness shape,
/// and the arrowhead shape of the ARD maximizer on `N(r, s, n)`, with
/// `r <= s` after orientation.
pub fn verify_maximizer_conjectures(r: usize, s: usize, n: u64, limit: u64) -> Result<ConjectureReport> {
    let (r, s) = (r.min(s), r.max(s));
    if r == 0 || n < 2 {
        return Err(Error::InvalidDimensions { r, s, n, reason: "need r >= 1 and n >= 2" });
    }
    check_enumeration_limit(r, s, n, limit)?;
    tally_partition(r, s, n, None).finish()
}

pub(crate) fn check_enumeration_limit(r: usize, s: usize, n: u64, limit: u64) -> Result<u64> {
    let count = count_confusion_matrices(r, s, n);
    match u64::try_from(&count) {
        Ok(c) if c <= limit => Ok(c),
        _ => Err(Error::EnumerationTooLarge { r, s, n, count: format!("{count}"), limit }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rand_distance, ratio_to_f64};

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn max_med_values() {
        assert_eq!(max_med(2, 2, 20).unwrap(), q(1, 2));
        assert_eq!(max_med(3, 3, 20).unwrap(), q(13, 20));
        assert_eq!(max_med(5, 5, 100).unwrap(), q(4, 5));
        assert_eq!(max_med(2, 2, 21).unwrap(), q(10, 21));
        assert!(max_med(5, 5, 4).is_err());
    }

    #[test]
    fn nmed_values() {
        // 2 x 2, n = 10, MED = 0.4
        let m = ConfusionMatrix::from_rows(&[[3u64, 2], [2, 3]]).unwrap();
        assert_eq!(nmed(&m).unwrap(), q(4, 5));
        let at_max = ConfusionMatrix::from_rows(&[[5u64, 5], [5, 5]]).unwrap();
        assert_eq!(nmed(&at_max).unwrap(), q(1, 1));
        // 3 x 3 with n = 20 and MED = 1/2: 0.5 / 0.65
        let half = ConfusionMatrix::from_rows(&[[4u64, 3, 0], [3, 3, 0], [0, 4, 3]]).unwrap();
        assert_eq!(crate::med(&half).unwrap().value, q(1, 2));
        assert_eq!(nmed(&half).unwrap(), q(10, 13));
        let single = ConfusionMatrix::from_rows(&[[5u64]]).unwrap();
        assert_eq!(nmed(&single), Err(Error::DegenerateNormalization));
    }

    #[test]
    fn max_rd_values() {
        assert_eq!(max_rd(2, 2, 20).unwrap(), q(10, 19));
        assert_eq!(max_rd(2, 2, 21).unwrap(), q(22, 42));
        assert_eq!(max_rd(3, 3, 20).unwrap(), q(244, 380));
        for n in 4..40u64 {
            let expected = if n % 2 == 0 { q(n as i128, 2 * (n as i128 - 1)) } else { q(n as i128 + 1, 2 * n as i128) };
            assert_eq!(max_rd(2, 2, n).unwrap(), expected, "n = {n}");
        }
        assert!(max_rd(3, 3, 6).is_err());
    }

    #[test]
    fn witness_values() {
        let w = argmax_rd_witness(5, 5, 100).unwrap();
        assert_eq!(w.row(0), &[22, 19, 19, 18, 18]);
        assert_eq!(argmax_rd_witness(2, 2, 20).unwrap().to_rows(), vec![vec![10, 9], vec![1, 0]]);
        let w = argmax_rd_witness(3, 3, 20).unwrap();
        assert!(w.is_canonical());
        assert_eq!(rand_distance(&w).unwrap(), q(244, 380));
        let t = argmax_rd_witness(4, 2, 12).unwrap();
        assert_eq!((t.rows(), t.cols()), (4, 2));
        assert_eq!(rand_distance(&t).unwrap(), max_rd(4, 2, 12).unwrap());
    }

    #[test]
    fn nrd_values() {
        let independent = ConfusionMatrix::from_rows(&[[5u64, 5], [5, 5]]).unwrap();
        assert_eq!(nrd(&independent).unwrap(), q(1, 1));
        let fours = ConfusionMatrix::new(5, 5, vec![4; 25]).unwrap();
        assert!((ratio_to_f64(&nrd(&fours).unwrap()) - 0.42).abs() < 5e-3);
        assert_eq!(nrd(&argmax_rd_witness(4, 4, 31).unwrap()).unwrap(), q(1, 1));
    }

    #[test]
    fn independence_values() {
        assert_eq!(independent_rd(2, 2, 20).unwrap(), max_rd(2, 2, 20).unwrap());
        assert_eq!(independent_rd(5, 5, 100).unwrap(), q(800, 99 * 25));
        assert_eq!(independent_rd(2, 2, 4).unwrap(), q(2, 3));
        assert!((ratio_to_f64(&independent_ard(2, 3, 24).unwrap()) - 1.062).abs() < 5e-4);
        assert!((ratio_to_f64(&independent_ard(3, 3, 27).unwrap()) - 1.083).abs() < 5e-4);
        let fours = ConfusionMatrix::new(2, 3, vec![4; 6]).unwrap();
        assert_eq!(independent_ard(2, 3, 24).unwrap(), crate::ard(&fours).unwrap());
        assert_eq!(independent_rd(2, 3, 25), Err(Error::NotMultiple { n: 25, rs: 6 }));
    }

    #[test]
    fn independent_rd_decreases_in_clusters() {
        for r in 2..7usize {
            for s in 2..7usize {
                let n = (r * s * (r + 1) * (s + 1)) as u64;
                let scaled = |r: usize, s: usize| independent_rd(r, s, n).unwrap() * q(n as i128 - 1, n as i128);
                assert_eq!(scaled(r, s), q((r + s - 2) as i128, (r * s) as i128));
                assert!(scaled(r + 1, s) < scaled(r, s) || (s == 2 && scaled(r + 1, s) == scaled(r, s)));
                assert!(scaled(r, s + 1) < scaled(r, s) || (r == 2 && scaled(r, s + 1) == scaled(r, s)));
            }
        }
    }

    #[test]
    fn profile_examples() {
        let rows = two_by_two_profile(20).unwrap();
        let row16 = &rows[16];
        assert_eq!(row16.med, q(1, 5));
        assert!((ratio_to_f64(&row16.rd) - 0.337).abs() < 5e-4);
        let n1 = crate::ard(&ConfusionMatrix::from_rows(&[[16u64, 2], [2, 0]]).unwrap()).unwrap();
        let n2 = crate::ard(&ConfusionMatrix::from_rows(&[[11u64, 0], [4, 5]]).unwrap()).unwrap();
        assert!(row16.ard_values.contains(&n1) && row16.ard_values.contains(&n2));
        assert_eq!((rows[20].med, rows[20].rd), (q(0, 1), q(0, 1)));
        assert_eq!((rows[10].med, rows[10].rd), (q(1, 2), q(10, 19)));
        let (best, at) = two_by_two_max_ard(20).unwrap();
        assert_eq!(best, q(95, 84));
        assert_eq!(at.to_rows(), vec![vec![12, 4], vec![4, 0]]);
    }

    #[test]
    fn alpha_n_values() {
        assert_eq!(alpha_n(20, 12).unwrap(), q(95, 84));
        let n1 = crate::ard(&ConfusionMatrix::from_rows(&[[16u64, 2], [2, 0]]).unwrap()).unwrap();
        assert_eq!(alpha_n(20, 16).unwrap(), n1);
        let rows = two_by_two_profile(20).unwrap();
        assert_eq!(alpha_n(20, 10).unwrap(), *rows[10].ard_values.last().unwrap());
        assert!(alpha_n(20, 19).is_err());
        assert!(alpha_n(20, 8).is_err());
    }

    #[test]
    fn alpha_n_matches_even_witness() {
        for n in 4..40u64 {
            for d1 in (n / 2 + n % 2)..=n - 2 {
                if (n - d1) % 2 == 0 {
                    let w = max_ard_two_by_two_witness(n, d1).unwrap();
                    assert_eq!(crate::ard(&w).unwrap(), alpha_n(n, d1).unwrap());
                }
            }
        }
    }

    #[test]
    fn taylor_values() {
        assert_eq!(taylor_rd_small(100, 6, 4).unwrap(), q(20, 99));
        let exact = rand_distance(&ConfusionMatrix::from_rows(&[[55u64, 6], [4, 35]]).unwrap()).unwrap();
        assert!((ratio_to_f64(&exact) - 0.182).abs() < 5e-4);
        assert_eq!(taylor_rd_small(50, 0, 0).unwrap(), q(0, 1));
        let approx = taylor_rd_small(1000, 1, 1).unwrap();
        assert_eq!(approx, q(4, 999));
        let exact = rand_distance(&ConfusionMatrix::from_rows(&[[990u64, 1], [1, 8]]).unwrap()).unwrap();
        let gap = if exact > approx { exact - approx } else { approx - exact };
        assert!(gap * q(100, 1) <= approx);
    }

    #[test]
    fn shape_predicates() {
        let arrow = ConfusionMatrix::from_rows(&[[15u64, 5, 1], [5, 0, 0], [1, 0, 0]]).unwrap();
        assert!(has_arrowhead_shape(&arrow));
        let lopsided = ConfusionMatrix::from_rows(&[[15u64, 5, 1], [4, 0, 0], [1, 0, 0]]).unwrap();
        assert!(!has_arrowhead_shape(&lopsided));
        assert!(has_argmax_rd_shape(&argmax_rd_witness(3, 4, 20).unwrap()));
    }

    #[test]
    fn conjectures_on_small_sets() {
        let report = verify_maximizer_conjectures(2, 2, 20, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(report.count, 1691);
        assert_eq!(report.max_rd, q(10, 19));
        assert_eq!(report.max_ard, Some(q(95, 84)));
        assert_eq!(report.ard_maximizer.unwrap().to_rows(), vec![vec![12, 4], vec![4, 0]]);
        assert!(report.counterexamples.is_empty(), "{:?}", report.counterexamples);

        let report = verify_maximizer_conjectures(2, 3, 12, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert!(report.counterexamples.is_empty(), "{:?}", report.counterexamples);
    }

    #[test]
    fn enumeration_limit_is_enforced() {
        let err = verify_maximizer_conjectures(3, 3, 20, 1000).unwrap_err();
        assert!(matches!(err, Error::EnumerationTooLarge { .. }));
    }
}
