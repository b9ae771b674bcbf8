use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::{ConfusionMatrix, Result};

/// `C(a, b)` as a big integer.
fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// Number of compositions of `n` into `k` nonnegative parts, `C(n+k-1, n)`.
/// With `k = 0` there is one (empty) composition of zero and none otherwise.
pub fn count_compositions(n: u64, k: u64) -> BigUint {
    if k == 0 {
        return if n == 0 { BigUint::one() } else { BigUint::zero() };
    }
    binomial(n + k - 1, n)
}

/// `|N(r, s, n)|` by inclusion-exclusion over rows and columns forced empty.
pub fn count_confusion_matrices(r: usize, s: usize, n: u64) -> BigUint {
    let mut total = BigInt::zero();
    for i in 0..=r as u64 {
        for j in 0..=s as u64 {
            let cells = (r as u64 - i) * (s as u64 - j);
            let term = BigInt::from(binomial(r as u64, i) * binomial(s as u64, j) * count_compositions(n, cells));
            if (i + j) % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
    }
    total.to_biguint().unwrap_or_default()
}

/// Walks `N(r, s, n)` in row-major lexicographic order of the entries.
///
/// The cursor owns one matrix and rewrites it in place on each
/// [`advance`](Self::advance); the [`Iterator`] impl clones it instead. A
/// cursor built with [`with_first_row`](Self::with_first_row) covers only the
/// matrices whose first row is fixed, which partitions the full order into
/// contiguous blocks.
#[derive(Debug, Clone)]
pub struct EnumerationCursor {
    r: usize,
    s: usize,
    n: u64,
    prefix: Vec<u64>,
    tail: Vec<u64>,
    tail_total: u64,
    matrix: ConfusionMatrix,
    started: bool,
    exhausted: bool,
}

impl EnumerationCursor {
    pub fn new(r: usize, s: usize, n: u64) -> Self {
        Self::build(r, s, n, Vec::new())
    }

    /// Only matrices whose first row equals `first_row`.
    pub fn with_first_row(r: usize, s: usize, n: u64, first_row: &[u64]) -> Self {
        assert_eq!(first_row.len(), s, "first row must have s entries");
        Self::build(r, s, n, first_row.to_vec())
    }

    fn build(r: usize, s: usize, n: u64, prefix: Vec<u64>) -> Self {
        let cells = r * s;
        let used: u64 = prefix.iter().sum();
        let exhausted = r == 0 || s == 0 || used > n;
        let tail_len = cells.saturating_sub(prefix.len());
        let tail_total = n.saturating_sub(used);
        let mut tail = vec![0; tail_len];
        if let Some(last) = tail.last_mut() {
            *last = tail_total;
        }
        let exhausted = exhausted || (tail_len == 0 && tail_total != 0);
        Self {
            r,
            s,
            n,
            prefix,
            tail,
            tail_total,
            matrix: ConfusionMatrix::zeros(r.max(1), s.max(1)),
            started: false,
            exhausted,
        }
    }

    pub fn dims(&self) -> (usize, usize, u64) {
        (self.r, self.s, self.n)
    }

    /// Lexicographic successor of the tail composition; false when done.
    fn step(&mut self) -> bool {
        let k = self.tail.len();
        if k <= 1 {
            return false;
        }
        let last = k - 1;
        if self.tail[last] > 0 {
            self.tail[last - 1] += 1;
            self.tail[last] -= 1;
            return true;
        }
        let Some(j) = (0..last).rev().find(|&j| self.tail[j] > 0) else {
            return false;
        };
        if j == 0 {
            return false;
        }
        self.tail[j - 1] += 1;
        self.tail[last] = self.tail[j] - 1;
        self.tail[j] = 0;
        true
    }

    /// Next canonical matrix, borrowed from the cursor.
    pub fn advance(&mut self) -> Option<&ConfusionMatrix> {
        if self.exhausted {
            return None;
        }
        loop {
            if self.started {
                if !self.step() {
                    self.exhausted = true;
                    return None;
                }
            } else {
                self.started = true;
                debug_assert_eq!(self.tail.iter().sum::<u64>(), self.tail_total);
            }
            let counts = self.matrix.counts_mut();
            let p = self.prefix.len();
            counts[..p].copy_from_slice(&self.prefix);
            counts[p..].copy_from_slice(&self.tail);
            self.matrix.refresh_margins();
            if self.matrix.is_canonical() {
                return Some(&self.matrix);
            }
        }
    }

    /// Number of matrices left, consuming the cursor.
    pub fn count_remaining(mut self) -> u64 {
        let mut count = 0;
        while self.advance().is_some() {
            count += 1;
        }
        count
    }
}

impl Iterator for EnumerationCursor {
    type Item = ConfusionMatrix;

    fn next(&mut self) -> Option<ConfusionMatrix> {
        self.advance().cloned()
    }
}

/// Every vector of `s` nonnegative integers with positive sum at most
/// `n - (r - 1)`, in lexicographic order: the first rows that can start a
/// member of `N(r, s, n)`, one per enumeration partition.
pub fn first_rows(r: usize, s: usize, n: u64) -> Vec<Vec<u64>> {
    let budget = n.saturating_sub(r.saturating_sub(1) as u64);
    let mut out = Vec::new();
    if s == 0 || r == 0 {
        return out;
    }
    // Compositions of `budget` into s + 1 parts; the last part is slack.
    let mut slack = EnumerationCursor::new(1, s + 1, budget);
    loop {
        if slack.started {
            if !slack.step() {
                break;
            }
        } else {
            slack.started = true;
        }
        let row = &slack.tail[..s];
        if row.iter().any(|&x| x > 0) {
            out.push(row.to_vec());
        }
    }
    out
}

/// Cursor over `N(r, s, n)` after checking its exact size against `limit`.
pub fn enumerate_confusion_matrices(r: usize, s: usize, n: u64, limit: u64) -> Result<EnumerationCursor> {
    crate::extremes::check_enumeration_limit(r, s, n, limit)?;
    Ok(EnumerationCursor::new(r, s, n))
}
