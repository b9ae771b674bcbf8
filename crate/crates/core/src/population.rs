//! Population distances for finitely supported joint laws of two
//! clusterings: distance in measure and Hamming distance.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Zero};

use crate::assignment::{solve_lsap, CostMatrix};
use crate::{ConfusionMatrix, Error, Rational, Result};

/// Joint masses `p_ij = P(C_i and D_j)` on an `r x s` grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassMatrix {
    rows: usize,
    cols: usize,
    masses: Vec<Rational>,
    row_masses: Vec<Rational>,
    col_masses: Vec<Rational>,
}

fn add(a: &Rational, b: &Rational) -> Result<Rational> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn mul(a: &Rational, b: &Rational) -> Result<Rational> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

impl MassMatrix {
    /// Validates nonnegativity and total mass one.
    pub fn new(rows: usize, cols: usize, masses: Vec<Rational>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if masses.len() != rows * cols {
            return Err(Error::Ragged { row: 0, found: masses.len(), expected: rows * cols });
        }
        let mut row_masses = alloc::vec![Rational::zero(); rows];
        let mut col_masses = alloc::vec![Rational::zero(); cols];
        let mut total = Rational::zero();
        for i in 0..rows {
            for j in 0..cols {
                let p = &masses[i * cols + j];
                if *p < Rational::zero() {
                    return Err(Error::NegativeMass { row: i, col: j });
                }
                row_masses[i] = add(&row_masses[i], p)?;
                col_masses[j] = add(&col_masses[j], p)?;
                total = add(&total, p)?;
            }
        }
        if total != Rational::from_integer(1) {
            return Err(Error::MassNotNormalized { sum: total.to_string() });
        }
        Ok(Self { rows, cols, masses, row_masses, col_masses })
    }

    /// Empirical masses `n_ij / n`.
    pub fn empirical(m: &ConfusionMatrix) -> Result<Self> {
        let n = m.total() as i128;
        if n == 0 {
            return Err(Error::Empty);
        }
        let masses = m.counts().iter().map(|&x| Rational::new(x as i128, n)).collect();
        Self::new(m.rows(), m.cols(), masses)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.masses[i * self.cols + j]
    }

    pub fn row_masses(&self) -> &[Rational] {
        &self.row_masses
    }

    pub fn col_masses(&self) -> &[Rational] {
        &self.col_masses
    }
}

/// Distance in measure, `1/2 min_sigma sum_i P(C_i sym-diff D_sigma(i))`,
/// solved as an integer assignment problem after scaling all masses by the
/// lcm of their denominators.
pub fn population_dm(m: &MassMatrix) -> Result<Rational> {
    let transposed = m.rows > m.cols;
    let (r, s) = (m.rows.min(m.cols), m.rows.max(m.cols));
    let cell = |i: usize, j: usize| if transposed { m.get(j, i) } else { m.get(i, j) };
    let (row_masses, col_masses) = if transposed {
        (&m.col_masses, &m.row_masses)
    } else {
        (&m.row_masses, &m.col_masses)
    };

    let mut scale: i128 = 1;
    for p in &m.masses {
        scale = scale.lcm(p.denom());
        if scale > (i64::MAX / 8) as i128 {
            return Err(Error::Overflow);
        }
    }
    let scaled = |p: Rational| -> Result<i64> {
        let x = i128::checked_mul(*p.numer(), scale / p.denom()).ok_or(Error::Overflow)?;
        i64::try_from(x).map_err(|_| Error::Overflow)
    };

    let mut costs = Vec::with_capacity(s * s);
    for i in 0..s {
        for j in 0..s {
            let symmetric_difference = if i < r {
                row_masses[i]
                    .checked_add(&col_masses[j])
                    .and_then(|x| x.checked_sub(&(cell(i, j) * 2)))
                    .ok_or(Error::Overflow)?
            } else {
                col_masses[j]
            };
            costs.push(scaled(symmetric_difference)?);
        }
    }
    let assignment = solve_lsap(&CostMatrix::new(s, costs)?);
    Ok(Rational::new(assignment.total_cost as i128, 2 * scale))
}

/// Hamming distance `sum P(C_i)^2 + sum P(D_j)^2 - 2 sum P(C_i and D_j)^2`.
pub fn population_dh(m: &MassMatrix) -> Result<Rational> {
    let mut acc = Rational::zero();
    for p in m.row_masses.iter().chain(&m.col_masses) {
        acc = add(&acc, &mul(p, p)?)?;
    }
    for p in &m.masses {
        let twice = mul(&mul(p, p)?, &Rational::from_integer(2))?;
        acc = acc.checked_sub(&twice).ok_or(Error::Overflow)?;
    }
    Ok(acc)
}
