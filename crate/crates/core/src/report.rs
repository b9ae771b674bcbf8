//! All criteria of one confusion matrix in a single record.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::assignment::med;
use crate::extremes::{nmed_from_matched, nrd_from_pairs};
use crate::metrics::{ard_from_pairs, rd_from_pairs};
use crate::{hamming_empirical, pair_counts, ratio_to_f64, ConfusionMatrix, Error, Rational};

/// Reason a criterion has no value for a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Undefined {
    pub error: Error,
    pub reason: String,
}

impl From<Error> for Undefined {
    fn from(error: Error) -> Self {
        Self { reason: error.to_string(), error }
    }
}

/// One criterion value: exact with its floating rendering, or undefined.
#[derive(Debug, Clone, PartialEq)]
pub enum Criterion {
    Exact { value: Rational, approx: f64 },
    Undefined(Undefined),
}

impl Criterion {
    fn from_result(result: crate::Result<Rational>) -> Self {
        match result {
            Ok(value) => Criterion::Exact { value, approx: ratio_to_f64(&value) },
            Err(e) => Criterion::Undefined(e.into()),
        }
    }

    pub fn value(&self) -> Option<Rational> {
        match self {
            Criterion::Exact { value, .. } => Some(*value),
            Criterion::Undefined(_) => None,
        }
    }

    pub fn approx(&self) -> Option<f64> {
        match self {
            Criterion::Exact { approx, .. } => Some(*approx),
            Criterion::Undefined(_) => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Criterion::Exact { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriteriaReport {
    pub r: usize,
    pub s: usize,
    pub n: u64,
    pub med: Criterion,
    pub nmed: Criterion,
    pub rd: Criterion,
    pub nrd: Criterion,
    pub ri: Criterion,
    pub ari: Criterion,
    pub ard: Criterion,
    pub hamming: Criterion,
    pub expected_rd: Criterion,
    /// `(row, col)` cells of one optimal matching in the input orientation.
    /// Other matchings with the same MED may exist.
    pub matching: Vec<(usize, usize)>,
}

fn complement(c: &Criterion) -> Criterion {
    match c {
        Criterion::Exact { value, .. } => {
            let value = Rational::from_integer(1) - value;
            Criterion::Exact { value, approx: ratio_to_f64(&value) }
        }
        other => other.clone(),
    }
}

/// Computes every criterion of `m`. Failures are recorded per field.
pub fn criteria_report(m: &ConfusionMatrix) -> CriteriaReport {
    let (r, s, n) = (m.rows(), m.cols(), m.total());
    let med_result = med(m);
    let (med_value, nmed_value, matching) = match &med_result {
        Ok(result) => {
            let transposed = result.transposed;
            let (short, long) = if transposed { (s, r) } else { (r, s) };
            let mut matching: Vec<(usize, usize)> = result.assignment.permutation[..short]
                .iter()
                .enumerate()
                .filter(|&(_, &j)| j < long)
                .map(|(i, &j)| if transposed { (j, i) } else { (i, j) })
                .collect();
            matching.sort_unstable();
            (Ok(result.value), nmed_from_matched(r, s, n, result.matched), matching)
        }
        Err(e) => (Err(e.clone()), Err(e.clone()), Vec::new()),
    };
    let pairs = pair_counts(m);
    let with_pairs = |f: &dyn Fn(&crate::PairCounts) -> crate::Result<Rational>| match &pairs {
        Ok(p) => f(p),
        Err(e) => Err(e.clone()),
    };
    let rd = Criterion::from_result(with_pairs(&|p| Ok(rd_from_pairs(p))));
    let ard = Criterion::from_result(with_pairs(&ard_from_pairs));
    let nrd = Criterion::from_result(with_pairs(&|p| nrd_from_pairs(r, s, p)));
    let expected_rd = Criterion::from_result(with_pairs(&|p| {
        let pairs = p.pairs() as i128;
        Ok(Rational::new(p.baseline_numerator()?, crate::rational::checked_mul(pairs, pairs)?))
    }));
    CriteriaReport {
        r,
        s,
        n,
        med: Criterion::from_result(med_value),
        nmed: Criterion::from_result(nmed_value),
        ri: complement(&rd),
        ari: complement(&ard),
        rd,
        nrd,
        ard,
        hamming: Criterion::from_result(hamming_empirical(m)),
        expected_rd,
        matching,
    }
}
