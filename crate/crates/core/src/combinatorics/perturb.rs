use rand::Rng;

use crate::extremes::max_med;
use crate::{med, ConfusionMatrix, Error, Rational, Result};

/// A diagonal confusion matrix progressively perturbed by moving objects off
/// the diagonal.
///
/// Each move picks one object uniformly among those still on the diagonal
/// and relocates it to one of the other cells of its row, chosen uniformly.
/// The degree of overlap `DO = moved / n` counts moves, while the MED of the
/// perturbed matrix is computed independently and can be smaller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeOfOverlapState {
    base: ConfusionMatrix,
    current: ConfusionMatrix,
    moved: u64,
}

impl DegreeOfOverlapState {
    pub fn new(diagonal: ConfusionMatrix) -> Result<Self> {
        if !diagonal.is_square_diagonal() {
            return Err(Error::NotDiagonal);
        }
        if diagonal.total() == 0 {
            return Err(Error::Empty);
        }
        Ok(Self { current: diagonal.clone(), base: diagonal, moved: 0 })
    }

    pub fn base(&self) -> &ConfusionMatrix {
        &self.base
    }

    pub fn current(&self) -> &ConfusionMatrix {
        &self.current
    }

    pub fn moved(&self) -> u64 {
        self.moved
    }

    pub fn degree_of_overlap(&self) -> Rational {
        Rational::new(self.moved as i128, self.base.total() as i128)
    }

    pub fn med(&self) -> Rational {
        med(&self.current).expect("total is positive").value
    }

    /// Upper bound of the MED for the matrix dimensions.
    pub fn max_med(&self) -> Result<Rational> {
        max_med(self.current.rows(), self.current.cols(), self.current.total())
    }

    fn diagonal_mass(&self) -> u64 {
        (0..self.current.rows()).map(|i| self.current.get(i, i)).sum()
    }

    /// Moves `moves` further objects off the diagonal.
    pub fn perturb<R: Rng + ?Sized>(&mut self, moves: u64, rng: &mut R) -> Result<()> {
        let k = self.current.rows();
        let available = if k < 2 { 0 } else { self.diagonal_mass() };
        if moves > available {
            return Err(Error::TooManyMoves { requested: moves, available });
        }
        for _ in 0..moves {
            let mut pick = rng.random_range(0..self.diagonal_mass());
            let row = (0..k)
                .find(|&i| {
                    let here = self.current.get(i, i);
                    if pick < here {
                        true
                    } else {
                        pick -= here;
                        false
                    }
                })
                .expect("pick is below the diagonal mass");
            let mut col = rng.random_range(0..k as u64 - 1) as usize;
            if col >= row {
                col += 1;
            }
            let counts = self.current.counts_mut();
            counts[row * k + row] -= 1;
            counts[row * k + col] += 1;
        }
        self.current.refresh_margins();
        self.moved += moves;
        Ok(())
    }
}

/// Perturbs a diagonal matrix by `moves` objects.
pub fn perturb_from_diagonal<R: Rng + ?Sized>(
    diagonal: &ConfusionMatrix,
    moves: u64,
    rng: &mut R,
) -> Result<DegreeOfOverlapState> {
    let mut state = DegreeOfOverlapState::new(diagonal.clone())?;
    state.perturb(moves, rng)?;
    Ok(state)
}
