//! Distributional studies over random and exhaustive sets of matrices.

use std::collections::BTreeMap;

use partdist_core::assignment::MedSolver;
use partdist_core::combinatorics::{
    enumerate_confusion_matrices, first_rows, null_labels, sample_confusion_matrix, CardinalityEstimate,
    DegreeOfOverlapState, EnumerationCursor, SamplerConfig,
};
use partdist_core::extremes::{
    independent_rd, max_med, max_rd, nmed_from_matched, nrd_from_pairs, two_by_two_profile, ExtremeSpec, TwoByTwoRow,
};
use partdist_core::{binomial2, crosstab, pair_counts, ConfusionMatrix, Error, Rational, Result};
use rayon::prelude::*;

use crate::summary::{hash_counts, Accumulator, Binning};

const NULL_CHUNK: u64 = 256;
const SAMPLE_CHUNK: u64 = 8192;

/// Criteria of the null-case study in output order.
pub const NULL_CRITERIA: [&str; 5] = ["MED", "NMED", "RD", "NRD", "ARD"];

#[derive(Debug, Clone, PartialEq)]
pub struct NullStudy {
    pub r: usize,
    pub s: usize,
    pub n: u64,
    pub reps: u64,
    pub sampler: SamplerConfig,
    /// One accumulator per entry of [`NULL_CRITERIA`].
    pub criteria: Vec<Accumulator>,
    /// Undefined values per criterion name.
    pub undefined: BTreeMap<String, u64>,
    pub max_med_bound: Rational,
    /// Replicates whose MED exceeds `max_med_bound`.
    pub med_above_bound: u64,
    /// Replicates in which some label was never drawn.
    pub collapsed: u64,
}

impl NullStudy {
    fn empty(r: usize, s: usize, n: u64, reps: u64, sampler: SamplerConfig) -> Result<Self> {
        let q = r.max(s) as u64;
        let nmed_span = n.checked_sub(n.div_ceil(q.max(1))).filter(|&d| d > 0);
        let nrd_scale = ExtremeSpec::new(r, s, n).ok().map(|e| e.max_rd_scaled()).filter(|&d| d > 0);
        let pairs = u64::try_from(binomial2(n)).map_err(|_| Error::Overflow)?;
        let criteria = vec![
            Accumulator::new("MED", Binning::support(n), Some(n)),
            Accumulator::new("NMED", Binning::width(100), nmed_span),
            Accumulator::new("RD", Binning::width(100), Some(pairs)),
            Accumulator::new("NRD", Binning::width(100), nrd_scale.and_then(|d| u64::try_from(d).ok())),
            Accumulator::new("ARD", Binning::width(100), None),
        ];
        Ok(Self {
            r,
            s,
            n,
            reps,
            sampler,
            criteria,
            undefined: BTreeMap::new(),
            max_med_bound: max_med(r, s, n)?,
            med_above_bound: 0,
            collapsed: 0,
        })
    }

    pub fn criterion(&self, name: &str) -> Option<&Accumulator> {
        self.criteria.iter().find(|a| a.name() == name)
    }

    fn record(&mut self, index: usize, value: Result<Rational>, key: u64) {
        match value {
            Ok(v) => self.criteria[index].observe(v, key),
            Err(_) => *self.undefined.entry(NULL_CRITERIA[index].to_string()).or_insert(0) += 1,
        }
    }

    fn merge(&mut self, other: NullStudy) {
        for (mine, theirs) in self.criteria.iter_mut().zip(other.criteria) {
            mine.merge(theirs);
        }
        for (k, v) in other.undefined {
            *self.undefined.entry(k).or_insert(0) += v;
        }
        self.med_above_bound += other.med_above_bound;
        self.collapsed += other.collapsed;
    }
}

/// Draws `reps` pairs of independent uniform labelings of `n` objects into
/// `r` and `s` labels and accumulates every criterion.
///
/// Normalized criteria use the number of clusters actually present in each
/// replicate. Replicate chunks use sub-streams of `sampler`, so the result
/// does not depend on the number of worker threads.
pub fn null_case_study(r: usize, s: usize, n: u64, reps: u64, sampler: SamplerConfig) -> Result<NullStudy> {
    if reps == 0 {
        return Err(Error::Precondition("need at least one replicate"));
    }
    if r == 0 || s == 0 || (r.max(s) as u64) > n || n < 2 {
        return Err(Error::InvalidDimensions { r, s, n, reason: "null study needs 1 <= r, s <= n and n >= 2" });
    }
    let chunks = reps.div_ceil(NULL_CHUNK);
    let parts: Vec<NullStudy> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut study = NullStudy::empty(r, s, n, reps, sampler)?;
            let mut rng = sampler.substream(chunk).rng();
            let mut solver = MedSolver::new();
            let end = ((chunk + 1) * NULL_CHUNK).min(reps);
            for rep in chunk * NULL_CHUNK..end {
                let left = null_labels(n as usize, r as u32, &mut rng)?;
                let right = null_labels(n as usize, s as u32, &mut rng)?;
                let m = crosstab(&left, &right)?;
                if m.rows() < r || m.cols() < s {
                    study.collapsed += 1;
                }
                let matched = solver.matched(&m);
                let med = Rational::new((n - matched) as i128, n as i128);
                if med > study.max_med_bound {
                    study.med_above_bound += 1;
                }
                study.record(0, Ok(med), rep);
                study.record(1, nmed_from_matched(m.rows(), m.cols(), n, matched), rep);
                let pairs = pair_counts(&m)?;
                study.record(2, Ok(pairs.rand_distance()), rep);
                study.record(3, nrd_from_pairs(m.rows(), m.cols(), &pairs), rep);
                study.record(4, pairs.ard(), rep);
            }
            Ok(study)
        })
        .collect::<Result<_>>()?;
    let mut total = NullStudy::empty(r, s, n, reps, sampler)?;
    for part in parts {
        total.merge(part);
    }
    Ok(total)
}

/// The 2 x 2 profile of MED, RD and the reachable ARD values for each `d1`.
pub fn two_by_two_figure(n: u64) -> Result<Vec<TwoByTwoRow>> {
    two_by_two_profile(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NrdPoint {
    pub r: usize,
    pub s: usize,
    pub n: u64,
    pub independent_rd: Rational,
    pub max_rd: Rational,
    pub nrd: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedPoint {
    pub r: usize,
    pub s: usize,
    pub n: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NrdCurve {
    pub points: Vec<NrdPoint>,
    pub skipped: Vec<SkippedPoint>,
}

/// NRD of perfectly independent clusterings for each dimension pair and
/// sample size. Sizes that are not multiples of `rs` are listed as skipped.
pub fn nrd_independent_curve(pairs: &[(usize, usize)], n_values: &[u64]) -> NrdCurve {
    let mut curve = NrdCurve::default();
    for &(r, s) in pairs {
        for &n in n_values {
            let point = independent_rd(r, s, n).and_then(|i| {
                let m = max_rd(r, s, n)?;
                Ok(NrdPoint { r, s, n, independent_rd: i, max_rd: m, nrd: i / m })
            });
            match point {
                Ok(p) => curve.points.push(p),
                Err(e) => curve.skipped.push(SkippedPoint { r, s, n, reason: e.to_string() }),
            }
        }
    }
    curve
}

/// RD and ARD among the matrices sharing one MED value.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalCell {
    pub count: u64,
    pub rd: Accumulator,
    pub ard: Accumulator,
    pub ard_undefined: u64,
}

/// An extreme value with the matrix attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Extreme {
    pub value: Rational,
    /// `n * MED` of the witness.
    pub med_key: u64,
    pub witness: ConfusionMatrix,
}

fn keep_extreme(slot: &mut Option<Extreme>, candidate: Extreme, larger: bool) {
    let better = match slot {
        None => true,
        Some(current) => {
            let ord = candidate.value.cmp(&current.value);
            let ord = if larger { ord } else { ord.reverse() };
            ord.is_gt() || (ord.is_eq() && candidate.witness.counts() > current.witness.counts())
        }
    };
    if better {
        *slot = Some(candidate);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMode {
    Exhaustive,
    Sampled { samples: u64, sampler: SamplerConfig },
}

/// Distributions of RD and ARD given the MED, keyed by `n * MED`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    pub r: usize,
    pub s: usize,
    pub n: u64,
    pub mode: TableMode,
    pub total: u64,
    pub cells: BTreeMap<u64, ConditionalCell>,
    /// MED over every processed matrix.
    pub med: Accumulator,
    pub max_rd: Option<Extreme>,
    pub max_ard: Option<Extreme>,
    pub min_ard: Option<Extreme>,
    /// Compositions drawn in sampled mode, including rejected ones.
    pub attempts: u64,
}

impl ConditionalTable {
    fn empty(r: usize, s: usize, n: u64, mode: TableMode) -> Self {
        Self {
            r,
            s,
            n,
            mode,
            total: 0,
            cells: BTreeMap::new(),
            med: Accumulator::new("MED", Binning::support(n), Some(n)),
            max_rd: None,
            max_ard: None,
            min_ard: None,
            attempts: 0,
        }
    }

    fn observe(&mut self, m: &ConfusionMatrix, solver: &mut MedSolver, key: u64) -> Result<()> {
        let n = self.n;
        let med_key = n - solver.matched(m);
        let pairs = pair_counts(m)?;
        let rd = pairs.rand_distance();
        let rd_denominator = u64::try_from(binomial2(n)).map_err(|_| Error::Overflow)?;
        self.total += 1;
        self.med.observe(Rational::new(med_key as i128, n as i128), key);
        let cell = self.cells.entry(med_key).or_insert_with(|| ConditionalCell {
            count: 0,
            rd: Accumulator::new("RD", Binning::width(100), Some(rd_denominator)),
            ard: Accumulator::new("ARD", Binning::width(100), None),
            ard_undefined: 0,
        });
        cell.count += 1;
        cell.rd.observe(rd, key);
        let ard = pairs.ard();
        match ard {
            Ok(v) => cell.ard.observe(v, key),
            Err(_) => cell.ard_undefined += 1,
        }
        let candidate = |value| Extreme { value, med_key, witness: m.clone() };
        if self.max_rd.as_ref().is_none_or(|e| rd >= e.value) {
            keep_extreme(&mut self.max_rd, candidate(rd), true);
        }
        if let Ok(v) = ard {
            if self.max_ard.as_ref().is_none_or(|e| v >= e.value) {
                keep_extreme(&mut self.max_ard, candidate(v), true);
            }
            if self.min_ard.as_ref().is_none_or(|e| v <= e.value) {
                keep_extreme(&mut self.min_ard, candidate(v), false);
            }
        }
        Ok(())
    }

    fn merge(&mut self, other: ConditionalTable) {
        self.total += other.total;
        self.attempts += other.attempts;
        self.med.merge(other.med);
        for (k, cell) in other.cells {
            match self.cells.get_mut(&k) {
                Some(mine) => {
                    mine.count += cell.count;
                    mine.ard_undefined += cell.ard_undefined;
                    mine.rd.merge(cell.rd);
                    mine.ard.merge(cell.ard);
                }
                None => {
                    self.cells.insert(k, cell);
                }
            }
        }
        if let Some(e) = other.max_rd {
            keep_extreme(&mut self.max_rd, e, true);
        }
        if let Some(e) = other.max_ard {
            keep_extreme(&mut self.max_ard, e, true);
        }
        if let Some(e) = other.min_ard {
            keep_extreme(&mut self.min_ard, e, false);
        }
    }

    pub fn med_value(&self, key: u64) -> Rational {
        Rational::new(key as i128, self.n as i128)
    }

    /// Fraction of processed matrices with `n * MED = key`.
    pub fn probability(&self, key: u64) -> Rational {
        let count = self.cells.get(&key).map_or(0, |c| c.count);
        Rational::new(count as i128, self.total as i128)
    }

    /// MED key with the largest conditional mean ARD among keys with at
    /// least `min_count` matrices.
    pub fn argmax_mean_ard(&self, min_count: u64) -> Option<u64> {
        self.cells
            .iter()
            .filter(|(_, c)| c.ard.count() >= min_count.max(1))
            .max_by(|a, b| a.1.ard.mean().total_cmp(&b.1.ard.mean()))
            .map(|(&k, _)| k)
    }
}

/// Single pass over all of `N(r, s, n)`, split by first row across workers.
pub fn conditional_given_med_exhaustive(r: usize, s: usize, n: u64, limit: u64) -> Result<ConditionalTable> {
    enumerate_confusion_matrices(r, s, n, limit)?;
    let rows = first_rows(r, s, n);
    let parts: Vec<ConditionalTable> = rows
        .par_iter()
        .map(|row| {
            let mut table = ConditionalTable::empty(r, s, n, TableMode::Exhaustive);
            let mut solver = MedSolver::new();
            let mut cursor = EnumerationCursor::with_first_row(r, s, n, row);
            while let Some(m) = cursor.advance() {
                table.observe(m, &mut solver, hash_counts(m.counts()))?;
            }
            Ok(table)
        })
        .collect::<Result<_>>()?;
    let mut table = ConditionalTable::empty(r, s, n, TableMode::Exhaustive);
    for part in parts {
        table.merge(part);
    }
    if table.total == 0 {
        return Err(Error::EmptySet { r, s, n });
    }
    Ok(table)
}

/// The same accumulation over `samples` uniform draws from `N(r, s, n)`.
pub fn conditional_given_med_sampled(
    r: usize,
    s: usize,
    n: u64,
    samples: u64,
    sampler: SamplerConfig,
) -> Result<(ConditionalTable, CardinalityEstimate)> {
    if samples == 0 {
        return Err(Error::Precondition("need at least one sample"));
    }
    let mode = TableMode::Sampled { samples, sampler };
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let parts: Vec<ConditionalTable> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut table = ConditionalTable::empty(r, s, n, mode);
            let mut rng = sampler.substream(chunk).rng();
            let mut solver = MedSolver::new();
            let end = ((chunk + 1) * SAMPLE_CHUNK).min(samples);
            for draw in chunk * SAMPLE_CHUNK..end {
                let (m, attempts) = sample_confusion_matrix(r, s, n, &mut rng)?;
                table.attempts += attempts;
                table.observe(&m, &mut solver, draw)?;
            }
            Ok(table)
        })
        .collect::<Result<_>>()?;
    let mut table = ConditionalTable::empty(r, s, n, mode);
    for part in parts {
        table.merge(part);
    }
    let estimate = CardinalityEstimate::from_counts(r, s, n, table.total, table.attempts);
    Ok((table, estimate))
}

/// Marginal distribution of the MED over all of `N(r, s, n)`.
pub fn med_marginal(r: usize, s: usize, n: u64, limit: u64) -> Result<Accumulator> {
    Ok(conditional_given_med_exhaustive(r, s, n, limit)?.med)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbStep {
    pub moves: u64,
    pub degree_of_overlap: Rational,
    pub med: Accumulator,
    /// Runs in which the MED is strictly below the degree of overlap.
    pub below_overlap: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationStudy {
    pub sizes: Vec<u64>,
    pub reps: u64,
    pub sampler: SamplerConfig,
    pub max_med: Rational,
    pub steps: Vec<PerturbStep>,
}

/// Moves objects off `diag(sizes)` one at a time, `steps` times, in `reps`
/// independent runs, and tracks the MED after each move.
pub fn perturbation_sweep(sizes: &[u64], steps: u64, reps: u64, sampler: SamplerConfig) -> Result<PerturbationStudy> {
    let base = ConfusionMatrix::diagonal(sizes)?;
    let n = base.total();
    let fresh = || -> Vec<PerturbStep> {
        (0..=steps)
            .map(|moves| PerturbStep {
                moves,
                degree_of_overlap: Rational::new(moves as i128, n as i128),
                med: Accumulator::new("MED", Binning::support(n), Some(n)),
                below_overlap: 0,
            })
            .collect()
    };
    let runs: Vec<Vec<PerturbStep>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = sampler.substream(rep).rng();
            let mut state = DegreeOfOverlapState::new(base.clone())?;
            let mut out = fresh();
            for step in out.iter_mut() {
                if step.moves > 0 {
                    state.perturb(1, &mut rng)?;
                }
                let med = state.med();
                step.med.observe(med, rep);
                if med < step.degree_of_overlap {
                    step.below_overlap += 1;
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut steps_total = fresh();
    for run in runs {
        for (total, step) in steps_total.iter_mut().zip(run) {
            total.med.merge(step.med);
            total.below_overlap += step.below_overlap;
        }
    }
    Ok(PerturbationStudy {
        sizes: sizes.to_vec(),
        reps,
        sampler,
        max_med: max_med(sizes.len(), sizes.len(), n)?,
        steps: steps_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i128, b: i128) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn exhaustive_two_by_two_twenty() {
        let t = conditional_given_med_exhaustive(2, 2, 20, 10_000_000).unwrap();
        assert_eq!(t.total, 1691);
        assert_eq!(t.cells.values().map(|c| c.count).sum::<u64>(), 1691);
        assert_eq!(t.max_ard.as_ref().unwrap().value, q(95, 84));
        assert_eq!(t.max_ard.as_ref().unwrap().witness.to_rows(), vec![vec![12, 4], vec![4, 0]]);
        assert!(t.cells.keys().all(|&k| k <= 10));
        // RD is a function of the MED for 2 x 2 tables
        for cell in t.cells.values() {
            assert_eq!(cell.rd.min(), cell.rd.max());
        }
    }

    #[test]
    fn marginal_of_tiny_set() {
        let m = med_marginal(2, 2, 2, 100).unwrap();
        assert_eq!(m.count(), 2);
        assert_eq!(m.histogram().iter().map(|(&k, &c)| (k, c)).collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn sampled_table_is_reproducible() {
        let cfg = SamplerConfig::with_stream(9, 1);
        let (a, ea) = conditional_given_med_sampled(3, 3, 12, 20_000, cfg).unwrap();
        let (b, eb) = conditional_given_med_sampled(3, 3, 12, 20_000, cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ea, eb);
        assert_eq!(a.total, 20_000);
        assert!(a.attempts >= a.total);
        let max = max_med(3, 3, 12).unwrap();
        assert!(a.cells.keys().all(|&k| a.med_value(k) <= max));
    }

    #[test]
    fn null_study_small() {
        let study = null_case_study(2, 2, 50, 600, SamplerConfig::new(3)).unwrap();
        let med = study.criterion("MED").unwrap();
        assert_eq!(med.count(), 600);
        assert_eq!(study.med_above_bound, 0);
        assert!(med.exact_mean().is_some());
        assert_eq!(study.criterion("RD").unwrap().count() + study.undefined.get("RD").copied().unwrap_or(0), 600);
        let again = null_case_study(2, 2, 50, 600, SamplerConfig::new(3)).unwrap();
        assert_eq!(study, again);
    }

    #[test]
    fn nrd_curve_values() {
        let curve = nrd_independent_curve(&[(2, 2), (5, 5)], &[20, 25, 100]);
        assert!(curve.points.iter().filter(|p| p.r == 2).all(|p| p.nrd == q(1, 1)));
        let five = curve.points.iter().find(|p| p.r == 5 && p.n == 100).unwrap();
        assert!((partdist_core::ratio_to_f64(&five.nrd) - 0.42).abs() < 5e-3);
        assert_eq!(curve.skipped.len(), 2);
    }

    #[test]
    fn perturbation_runs() {
        let study = perturbation_sweep(&[8, 6, 6], 18, 50, SamplerConfig::new(4)).unwrap();
        assert_eq!(study.steps.len(), 19);
        assert_eq!(study.steps[0].med.max(), Some(q(0, 1)));
        assert_eq!(study.steps[13].degree_of_overlap, q(13, 20));
        assert!(study.steps.iter().all(|s| s.med.max().unwrap() <= study.max_med));
        assert!(study.steps[18].below_overlap == 50);
        assert!(perturbation_sweep(&[2, 2], 5, 1, SamplerConfig::new(4)).is_err());
    }
}
