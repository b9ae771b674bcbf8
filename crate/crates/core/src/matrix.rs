use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Labeling, Result};

/// An `r x s` cross-tabulation of two clusterings with cached margins.
///
/// Counts are stored row-major. The matrix is *canonical*, i.e. a member of
/// `N(r, s, n)`, when every row and column margin is positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfusionMatrix {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    row_margins: Vec<u64>,
    col_margins: Vec<u64>,
    total: u64,
}

impl ConfusionMatrix {
    /// Builds a matrix from row-major counts.
    pub fn new(rows: usize, cols: usize, counts: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if counts.len() != rows * cols {
            return Err(Error::Ragged { row: 0, found: counts.len(), expected: rows * cols });
        }
        let mut matrix = Self {
            rows,
            cols,
            counts,
            row_margins: vec![0; rows],
            col_margins: vec![0; cols],
            total: 0,
        };
        matrix.refresh_margins();
        Ok(matrix)
    }

    pub fn from_rows<R: AsRef<[u64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty)?.as_ref().len();
        let mut counts = Vec::with_capacity(rows.len() * first);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != first {
                return Err(Error::Ragged { row: i, found: row.len(), expected: first });
            }
            counts.extend_from_slice(row);
        }
        Self::new(rows.len(), first, counts)
    }

    /// Square diagonal matrix with the given cluster sizes.
    pub fn diagonal(sizes: &[u64]) -> Result<Self> {
        let k = sizes.len();
        let mut counts = vec![0; k * k];
        for (i, &size) in sizes.iter().enumerate() {
            counts[i * k + i] = size;
        }
        Self::new(k, k, counts)
    }

    pub(crate) fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            counts: vec![0; rows * cols],
            row_margins: vec![0; rows],
            col_margins: vec![0; cols],
            total: 0,
        }
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [u64] {
        &mut self.counts
    }

    pub(crate) fn refresh_margins(&mut self) {
        self.row_margins.iter_mut().for_each(|m| *m = 0);
        self.col_margins.iter_mut().for_each(|m| *m = 0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.counts[i * self.cols + j];
                self.row_margins[i] += x;
                self.col_margins[j] += x;
            }
        }
        self.total = self.row_margins.iter().sum();
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Total number of objects `n`.
    pub fn total(&self) -> u64 {
        self.total
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.counts[i * self.cols..(i + 1) * self.cols]
    }

    /// Row-major entries.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn row_margins(&self) -> &[u64] {
        &self.row_margins
    }

    pub fn col_margins(&self) -> &[u64] {
        &self.col_margins
    }

    /// Membership in `N(r, s, n)`: every margin positive.
    pub fn is_canonical(&self) -> bool {
        self.row_margins.iter().all(|&m| m > 0) && self.col_margins.iter().all(|&m| m > 0)
    }

    pub fn transpose(&self) -> Self {
        let mut counts = Vec::with_capacity(self.counts.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                counts.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            counts,
            row_margins: self.col_margins.clone(),
            col_margins: self.row_margins.clone(),
            total: self.total,
        }
    }

    /// Rows and columns reordered: entry `(i, j)` of the result is
    /// `self[row_order[i], col_order[j]]`.
    pub fn permuted(&self, row_order: &[usize], col_order: &[usize]) -> Self {
        assert_eq!(row_order.len(), self.rows);
        assert_eq!(col_order.len(), self.cols);
        let mut counts = Vec::with_capacity(self.counts.len());
        for &i in row_order {
            for &j in col_order {
                counts.push(self.get(i, j));
            }
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            counts,
            row_margins: row_order.iter().map(|&i| self.row_margins[i]).collect(),
            col_margins: col_order.iter().map(|&j| self.col_margins[j]).collect(),
            total: self.total,
        }
    }

    /// `(min(r, s), max(r, s))`.
    pub fn oriented_dims(&self) -> (usize, usize) {
        (self.rows.min(self.cols), self.rows.max(self.cols))
    }

    pub fn is_square_diagonal(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j) == 0))
    }

    /// Row-major rows as owned vectors.
    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl fmt::Debug for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(";")?;
            }
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

/// Cross-tabulates two labelings of the same objects.
///
/// The result has one row per distinct token of `left` and one column per
/// distinct token of `right`, both in first-occurrence order, so it is
/// always canonical.
pub fn crosstab<A, B>(left: &Labeling<A>, right: &Labeling<B>) -> Result<ConfusionMatrix> {
    if left.len() != right.len() {
        return Err(Error::LengthMismatch { left: left.len(), right: right.len() });
    }
    if left.is_empty() {
        return Err(Error::Empty);
    }
    let (r, s) = (left.cluster_count(), right.cluster_count());
    let mut matrix = ConfusionMatrix::zeros(r, s);
    for (&i, &j) in left.indices().iter().zip(right.indices()) {
        matrix.counts[i * s + j] += 1;
    }
    matrix.refresh_margins();
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_labelings_give_diagonal() {
        let l = Labeling::new(["A", "A", "B", "B"]).unwrap();
        let m = crosstab(&l, &l).unwrap();
        assert_eq!(m.to_rows(), vec![vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn hand_counted_crosstab() {
        let l1 = Labeling::new(["A", "A", "B", "B"]).unwrap();
        let l2 = Labeling::new(["X", "Y", "Y", "Y"]).unwrap();
        let m = crosstab(&l1, &l2).unwrap();
        assert_eq!(m.to_rows(), vec![vec![1, 1], vec![0, 2]]);
        assert_eq!(m.total(), 4);
        assert_eq!(m.row_margins(), &[2, 2]);
        assert_eq!(m.col_margins(), &[1, 3]);
        assert!(m.is_canonical());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let l1 = Labeling::new([1, 2, 3]).unwrap();
        let l2 = Labeling::new([1, 2]).unwrap();
        assert_eq!(crosstab(&l1, &l2), Err(Error::LengthMismatch { left: 3, right: 2 }));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = ConfusionMatrix::from_rows(&[vec![1, 2], vec![3]]).unwrap_err();
        assert_eq!(err, Error::Ragged { row: 1, found: 1, expected: 2 });
    }

    #[test]
    fn transpose_swaps_margins() {
        let m = ConfusionMatrix::from_rows(&[[1u64, 2, 3], [4, 5, 6]]).unwrap();
        let t = m.transpose();
        assert_eq!(t.to_rows(), vec![vec![1, 4], vec![2, 5], vec![3, 6]]);
        assert_eq!(t.row_margins(), m.col_margins());
        assert_eq!(t.transpose(), m);
    }

    #[test]
    fn display_is_compact() {
        let m = ConfusionMatrix::from_rows(&[[12u64, 4], [4, 0]]).unwrap();
        assert_eq!(alloc::format!("{m}"), "12,4;4,0");
    }
}
