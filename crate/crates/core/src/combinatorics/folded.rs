use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::{BigRational, Error, Result};

fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

/// Law of `n * MED = min(d1, n - d1)` for the 2 x 2 null model, where
/// `d1 ~ Binomial(n, 1/2)`. Entry `m` is `P(n * MED = m)` for `m = 0..=n/2`.
pub fn folded_binomial_pmf(n: u64) -> Result<Vec<BigRational>> {
    if n == 0 {
        return Err(Error::Precondition("folded binomial needs n >= 1"));
    }
    let row = binomial_row(n);
    let scale = BigInt::one() << n as usize;
    let mut pmf = Vec::with_capacity(n as usize / 2 + 1);
    for m in 0..=n / 2 {
        let mut mass = row[m as usize].clone();
        if 2 * m != n {
            mass += &row[(n - m) as usize];
        }
        pmf.push(BigRational::new(mass, scale.clone()));
    }
    debug_assert_eq!(pmf.iter().fold(BigRational::zero(), |a, p| a + p), BigRational::one());
    Ok(pmf)
}

/// Probability that the 2 x 2 null MED reaches its maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldedMax {
    pub probability: BigRational,
    /// Set for odd `n`, where the maximum `(n-1)/(2n)` is reached at
    /// `d1 = (n-1)/2` and `d1 = (n+1)/2`; the probability covers both.
    pub odd_extension: bool,
}

/// `P(d1 = n/2) = C(n, n/2) / 2^n` for even `n`; for odd `n`,
/// `2 C(n, (n-1)/2) / 2^n` with [`FoldedMax::odd_extension`] set.
pub fn folded_binomial_max_prob(n: u64) -> Result<FoldedMax> {
    if n < 2 {
        return Err(Error::Precondition("folded binomial maximum needs n >= 2"));
    }
    let probability = folded_binomial_pmf(n)?.pop().expect("pmf is nonempty");
    Ok(FoldedMax { probability, odd_extension: n % 2 == 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn n_two() {
        let pmf = folded_binomial_pmf(2).unwrap();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        assert_eq!(pmf, alloc::vec![half.clone(), half.clone()]);
        assert_eq!(folded_binomial_max_prob(2).unwrap().probability, half);
    }

    #[test]
    fn sums_to_one_and_matches_max() {
        for n in 1..60u64 {
            let pmf = folded_binomial_pmf(n).unwrap();
            assert_eq!(pmf.iter().fold(BigRational::zero(), |a, p| a + p), BigRational::one());
            if n >= 2 {
                let max = folded_binomial_max_prob(n).unwrap();
                assert_eq!(max.probability, *pmf.last().unwrap());
                assert_eq!(max.odd_extension, n % 2 == 1);
            }
        }
    }

    #[test]
    fn n_hundred() {
        let p = folded_binomial_max_prob(100).unwrap().probability.to_f64().unwrap();
        assert!((p - 0.0796).abs() < 5e-5);
    }
}
