//! Exact linear sum assignment and the misclassification error distance.
//!
//! With `r <= s` (transposing otherwise) and the confusion matrix padded
//! with zero rows up to `s x s`, the MED is `min_sigma sum_i m_{i,sigma(i)}
//! / (2n)` where `m_ij = n_i+ + n_+j - 2 n_ij`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{ConfusionMatrix, Error, Rational, Result};

/// Square integer cost matrix for the assignment problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    size: usize,
    costs: Vec<i64>,
    original: (usize, usize),
}

impl CostMatrix {
    /// Row-major `size x size` costs.
    pub fn new(size: usize, costs: Vec<i64>) -> Result<Self> {
        if costs.len() != size * size {
            return Err(Error::NotSquare { rows: size, cols: costs.len().checked_div(size).unwrap_or(0) });
        }
        Ok(Self { size, costs, original: (size, size) })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let size = rows.len();
        let mut costs = Vec::with_capacity(size * size);
        for row in rows {
            let row = row.as_ref();
            if row.len() != size {
                return Err(Error::NotSquare { rows: size, cols: row.len() });
            }
            costs.extend_from_slice(row);
        }
        Self::new(size, costs)
    }

    /// `m_ij = n_i+ + n_+j - 2 n_ij` over the oriented, zero-padded matrix.
    pub fn from_confusion(m: &ConfusionMatrix) -> Self {
        let mut costs = Vec::new();
        let size = fill_med_costs(m, &mut costs);
        Self { size, costs, original: (m.rows(), m.cols()) }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Dimensions of the confusion matrix this was built from (or the size twice).
    pub fn original_dims(&self) -> (usize, usize) {
        self.original
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.costs[i * self.size + j]
    }

    pub fn costs(&self) -> &[i64] {
        &self.costs
    }
}

/// Writes the MED cost matrix into `out` and returns its side `s`.
fn fill_med_costs(m: &ConfusionMatrix, out: &mut Vec<i64>) -> usize {
    let transposed = m.rows() > m.cols();
    let (r, s) = m.oriented_dims();
    let (rows, cols) = if transposed {
        (m.col_margins(), m.row_margins())
    } else {
        (m.row_margins(), m.col_margins())
    };
    out.clear();
    out.reserve(s * s);
    for i in 0..s {
        for j in 0..s {
            let (row_margin, cell) = if i < r {
                let cell = if transposed { m.get(j, i) } else { m.get(i, j) };
                (rows[i], cell)
            } else {
                (0, 0)
            };
            out.push(row_margin as i64 + cols[j] as i64 - 2 * cell as i64);
        }
    }
    s
}

/// An optimal permutation with its cost and a dual certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    /// `permutation[i]` is the column assigned to row `i`.
    pub permutation: Vec<usize>,
    pub total_cost: i64,
    /// Row potentials `u` with `u_i + v_j <= c_ij`.
    pub row_potentials: Vec<i64>,
    /// Column potentials `v`.
    pub col_potentials: Vec<i64>,
}

impl Assignment {
    /// Checks that the stored potentials prove optimality for `costs`:
    /// they are dual feasible, tight on the permutation, and `sum u + sum v`
    /// equals the total cost.
    pub fn is_certified(&self, costs: &CostMatrix) -> bool {
        let n = costs.size();
        if self.permutation.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &j in &self.permutation {
            if j >= n || core::mem::replace(&mut seen[j], true) {
                return false;
            }
        }
        let feasible = (0..n).all(|i| {
            (0..n).all(|j| self.row_potentials[i] + self.col_potentials[j] <= costs.get(i, j))
        });
        let tight = (0..n)
            .all(|i| self.row_potentials[i] + self.col_potentials[self.permutation[i]] == costs.get(i, self.permutation[i]));
        let primal: i64 = (0..n).map(|i| costs.get(i, self.permutation[i])).sum();
        let dual: i64 = self.row_potentials.iter().sum::<i64>() + self.col_potentials.iter().sum::<i64>();
        feasible && tight && primal == self.total_cost && dual == primal
    }
}

/// Reusable scratch space for the shortest-augmenting-path solver.
///
/// Rows are inserted one at a time; each insertion runs a Dijkstra-like
/// search over reduced costs and augments along the cheapest path, so the
/// whole solve is `O(s^3)`. Among equally cheap columns the lowest index is
/// taken, which makes the output deterministic.
#[derive(Debug, Default, Clone)]
pub struct LsapSolver {
    u: Vec<i64>,
    v: Vec<i64>,
    matched_row: Vec<usize>,
    way: Vec<usize>,
    min_reduced: Vec<i64>,
    used: Vec<bool>,
    size: usize,
}

const INF: i64 = i64::MAX / 4;

impl LsapSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Solves the problem for row-major `costs` of side `n` and returns the
    /// optimal total cost. The permutation is available via [`Self::column_of`].
    pub fn solve(&mut self, costs: &[i64], n: usize) -> i64 {
        debug_assert_eq!(costs.len(), n * n);
        self.size = n;
        // Index 0 is a virtual column/row used as the search root.
        for buf in [&mut self.u, &mut self.v, &mut self.min_reduced] {
            buf.clear();
            buf.resize(n + 1, 0);
        }
        for buf in [&mut self.matched_row, &mut self.way] {
            buf.clear();
            buf.resize(n + 1, 0);
        }
        self.used.clear();
        self.used.resize(n + 1, false);

        for row in 1..=n {
            self.matched_row[0] = row;
            let mut col0 = 0usize;
            self.min_reduced.iter_mut().for_each(|x| *x = INF);
            self.used.iter_mut().for_each(|x| *x = false);
            loop {
                self.used[col0] = true;
                let i0 = self.matched_row[col0];
                let mut delta = INF;
                let mut col1 = 0usize;
                let cost_row = &costs[(i0 - 1) * n..i0 * n];
                for col in 1..=n {
                    if self.used[col] {
                        continue;
                    }
                    let reduced = cost_row[col - 1] - self.u[i0] - self.v[col];
                    if reduced < self.min_reduced[col] {
                        self.min_reduced[col] = reduced;
                        self.way[col] = col0;
                    }
                    if self.min_reduced[col] < delta {
                        delta = self.min_reduced[col];
                        col1 = col;
                    }
                }
                for col in 0..=n {
                    if self.used[col] {
                        self.u[self.matched_row[col]] += delta;
                        self.v[col] -= delta;
                    } else {
                        self.min_reduced[col] -= delta;
                    }
                }
                col0 = col1;
                if self.matched_row[col0] == 0 {
                    break;
                }
            }
            loop {
                let col1 = self.way[col0];
                self.matched_row[col0] = self.matched_row[col1];
                col0 = col1;
                if col0 == 0 {
                    break;
                }
            }
        }
        -self.v[0]
    }

    /// Column assigned to row `i` by the last solve.
    pub fn column_of(&self, i: usize) -> usize {
        (1..=self.size)
            .find(|&j| self.matched_row[j] == i + 1)
            .map(|j| j - 1)
            .expect("solver state holds a perfect matching")
    }

    fn assignment(&self, costs: &[i64]) -> Assignment {
        let n = self.size;
        let mut permutation = vec![0; n];
        for j in 1..=n {
            permutation[self.matched_row[j] - 1] = j - 1;
        }
        let total_cost = (0..n).map(|i| costs[i * n + permutation[i]]).sum();
        Assignment {
            permutation,
            total_cost,
            row_potentials: self.u[1..].to_vec(),
            col_potentials: self.v[1..].to_vec(),
        }
    }
}

/// Solves the linear sum assignment problem exactly.
pub fn solve_lsap(costs: &CostMatrix) -> Assignment {
    let mut solver = LsapSolver::new();
    solver.solve(costs.costs(), costs.size());
    solver.assignment(costs.costs())
}

/// Misclassification error distance with the optimal matching behind it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Med {
    /// `1 - matched / n`.
    pub value: Rational,
    /// Objects on the matched cells, `max_sigma sum_i n_{i,sigma(i)}`.
    pub matched: u64,
    /// Optimal assignment on the oriented, padded cost matrix. One of
    /// possibly several optima.
    pub assignment: Assignment,
    /// Whether the input was transposed to get `r <= s`.
    pub transposed: bool,
}

/// MED of a confusion matrix, solved through the assignment problem.
pub fn med(m: &ConfusionMatrix) -> Result<Med> {
    let n = m.total();
    if n == 0 {
        return Err(Error::Empty);
    }
    let costs = CostMatrix::from_confusion(m);
    let assignment = solve_lsap(&costs);
    let matched = n - (assignment.total_cost as u64) / 2;
    Ok(Med {
        value: Rational::new((n - matched) as i128, n as i128),
        matched,
        assignment,
        transposed: m.rows() > m.cols(),
    })
}

/// MED solver that keeps its buffers between calls, for enumeration loops.
#[derive(Debug, Default, Clone)]
pub struct MedSolver {
    lsap: LsapSolver,
    costs: Vec<i64>,
}

impl MedSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// `max_sigma sum_i n_{i,sigma(i)}`; the MED is `1 - matched / n`.
    pub fn matched(&mut self, m: &ConfusionMatrix) -> u64 {
        let s = fill_med_costs(m, &mut self.costs);
        let cost = self.lsap.solve(&self.costs, s);
        m.total() - (cost as u64) / 2
    }

    pub fn med(&mut self, m: &ConfusionMatrix) -> Rational {
        let n = m.total();
        Rational::new((n - self.matched(m)) as i128, n as i128)
    }
}

/// Largest side accepted by [`brute_force_med`].
pub const BRUTE_FORCE_MAX_DIM: usize = 8;

/// MED by scanning all `s!` column permutations; a test oracle.
pub fn brute_force_med(m: &ConfusionMatrix) -> Result<Rational> {
    let (r, s) = m.oriented_dims();
    if s > BRUTE_FORCE_MAX_DIM {
        return Err(Error::TooLargeForBruteForce { dim: s, max: BRUTE_FORCE_MAX_DIM });
    }
    let n = m.total();
    if n == 0 {
        return Err(Error::Empty);
    }
    let oriented = if m.rows() > m.cols() { m.transpose() } else { m.clone() };
    let mut perm: Vec<usize> = (0..s).collect();
    let score = |perm: &[usize]| -> u64 { (0..r).map(|i| oriented.get(i, perm[i])).sum() };
    let mut best = score(&perm);
    // Heap's algorithm, iterative form.
    let mut c = vec![0usize; s];
    let mut i = 0;
    while i < s {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.max(score(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(Rational::new((n - best) as i128, n as i128))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m<const C: usize>(rows: &[[u64; C]]) -> ConfusionMatrix {
        ConfusionMatrix::from_rows(rows).unwrap()
    }

    fn steinley() -> ConfusionMatrix {
        m(&[[1, 0, 1, 1, 0], [0, 1, 0, 0, 1], [1, 0, 1, 0, 1], [0, 1, 0, 1, 0], [1, 0, 1, 0, 1]])
    }

    fn all_permutation_minimum(c: &CostMatrix) -> i64 {
        fn rec(c: &CostMatrix, row: usize, used: &mut Vec<bool>) -> i64 {
            if row == c.size() {
                return 0;
            }
            let mut best = i64::MAX;
            for j in 0..c.size() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(c.get(row, j) + rec(c, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        rec(c, 0, &mut vec![false; c.size()])
    }

    #[test]
    fn zero_diagonal_gives_identity() {
        let c = CostMatrix::from_rows(&[[0, 3, 4], [2, 0, 9], [5, 1, 0]]).unwrap();
        let a = solve_lsap(&c);
        assert_eq!(a.permutation, vec![0, 1, 2]);
        assert_eq!(a.total_cost, 0);
        assert!(a.is_certified(&c));
    }

    #[test]
    fn steinley_cost_and_identity_optimum() {
        let c = CostMatrix::from_confusion(&steinley());
        let a = solve_lsap(&c);
        assert_eq!(a.total_cost, 16);
        let identity_cost: i64 = (0..5).map(|i| c.get(i, i)).sum();
        assert_eq!(identity_cost, 16);
        assert!(a.is_certified(&c));
    }

    #[test]
    fn four_by_four_matches_exhaustive() {
        // fixed pseudo-random entries
        let mut x: u64 = 0x9e37_79b9_7f4a_7c15;
        for _ in 0..200 {
            let costs: Vec<i64> = (0..16)
                .map(|_| {
                    x ^= x << 13;
                    x ^= x >> 7;
                    x ^= x << 17;
                    (x % 50) as i64
                })
                .collect();
            let c = CostMatrix::new(4, costs).unwrap();
            let a = solve_lsap(&c);
            assert_eq!(a.total_cost, all_permutation_minimum(&c));
            assert!(a.is_certified(&c));
        }
    }

    #[test]
    fn non_square_rows_are_rejected() {
        let err = CostMatrix::from_rows(&[vec![1, 2], vec![3]]).unwrap_err();
        assert!(matches!(err, Error::NotSquare { .. }));
    }

    #[test]
    fn med_worked_examples() {
        let iris = m(&[[50, 0, 0], [0, 48, 2], [0, 1, 49]]);
        assert_eq!(med(&iris).unwrap().value, Rational::new(3, 150));
        let entmerge = m(&[
            [16, 7, 0, 14, 214],
            [0, 146, 929, 417, 69],
            [0, 1191, 81, 63, 159],
            [0, 0, 0, 0, 62],
            [4809, 0, 0, 1, 5],
        ]);
        assert_eq!(med(&entmerge).unwrap().value, Rational::new(1040, 8183));
        assert_eq!(med(&m(&[[0, 7], [5, 0]])).unwrap().value, Rational::from_integer(0));
    }

    #[test]
    fn med_cost_identity() {
        let modclust = m(&[[47, 197, 7], [0, 1408, 153], [0, 278, 1216], [0, 62, 0], [4813, 2, 0]]);
        let result = med(&modclust).unwrap();
        assert!(result.transposed);
        assert_eq!(result.value, Rational::new(746, 8183));
        assert_eq!(result.value, Rational::new(result.assignment.total_cost as i128, 2 * 8183));
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_med(&steinley()).unwrap(), Rational::new(8, 13));
        // column permutation (45123) keeps the same MED
        let permuted = steinley().permuted(&[0, 1, 2, 3, 4], &[3, 4, 0, 1, 2]);
        assert_eq!(brute_force_med(&permuted).unwrap(), Rational::new(8, 13));
        assert_eq!(med(&permuted).unwrap().value, Rational::new(8, 13));
        assert_eq!(brute_force_med(&m(&[[5, 5], [5, 5]])).unwrap(), Rational::new(1, 2));
        let three = m(&[[3, 1, 4], [1, 5, 9], [2, 6, 5]]);
        assert_eq!(brute_force_med(&three).unwrap(), med(&three).unwrap().value);
    }

    #[test]
    fn brute_force_size_guard() {
        let big = ConfusionMatrix::diagonal(&[1; 9]).unwrap();
        assert_eq!(brute_force_med(&big), Err(Error::TooLargeForBruteForce { dim: 9, max: 8 }));
    }

    #[test]
    fn reusable_solver_agrees() {
        let mut solver = MedSolver::new();
        for rows in [[[3u64, 1], [2, 7]], [[0, 4], [4, 0]], [[1, 1], [1, 1]]] {
            let x = m(&rows);
            assert_eq!(solver.med(&x), med(&x).unwrap().value);
        }
    }
}
