//! Pair-counting criteria: Rand distance, Rand index, adjusted Rand
//! distance and the empirical Hamming distance.

use crate::rational::{binomial2, checked_mul};
use crate::{ConfusionMatrix, Error, Rational, Result};

/// Agreement counts over the `C(n, 2)` unordered object pairs.
///
/// `a`: together in both; `b`: together only in the column clustering;
/// `c`: together only in the row clustering; `d`: apart in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairCounts {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub n: u64,
}

impl PairCounts {
    /// `C(n, 2)`.
    pub fn pairs(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    /// Discordant pairs `b + c`.
    pub fn discordant(&self) -> u64 {
        self.b + self.c
    }

    /// `(a+b)(b+d) + (a+c)(c+d)`, the numerator of `E(RD)` over `C(n,2)^2`.
    pub fn baseline_numerator(&self) -> Result<i128> {
        let (a, b, c, d) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128);
        let left = checked_mul(a + b, b + d)?;
        let right = checked_mul(a + c, c + d)?;
        left.checked_add(right).ok_or(Error::Overflow)
    }

    pub fn rand_distance(&self) -> Rational {
        rd_from_pairs(self)
    }

    pub fn ard(&self) -> Result<Rational> {
        ard_from_pairs(self)
    }
}

fn require_pairs(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewObjects { n });
    }
    Ok(())
}

pub fn pair_counts(m: &ConfusionMatrix) -> Result<PairCounts> {
    let n = m.total();
    require_pairs(n)?;
    let a: i128 = m.counts().iter().map(|&x| binomial2(x)).sum();
    let rows: i128 = m.row_margins().iter().map(|&x| binomial2(x)).sum();
    let cols: i128 = m.col_margins().iter().map(|&x| binomial2(x)).sum();
    let b = cols - a;
    let c = rows - a;
    let d = binomial2(n) - a - b - c;
    let to_u64 = |x: i128| u64::try_from(x).map_err(|_| Error::Overflow);
    Ok(PairCounts { a: to_u64(a)?, b: to_u64(b)?, c: to_u64(c)?, d: to_u64(d)?, n })
}

/// `RD = (b + c) / C(n, 2)`.
pub fn rand_distance(m: &ConfusionMatrix) -> Result<Rational> {
    let p = pair_counts(m)?;
    Ok(rd_from_pairs(&p))
}

pub(crate) fn rd_from_pairs(p: &PairCounts) -> Rational {
    Rational::new(p.discordant() as i128, binomial2(p.n))
}

/// `RI = 1 - RD`.
pub fn rand_index(m: &ConfusionMatrix) -> Result<Rational> {
    Ok(Rational::from_integer(1) - rand_distance(m)?)
}

/// Plug-in Hamming distance, which also counts the `n` pairs `(x, x)`:
/// `n^-2 (sum n_i+^2 + sum n_+j^2 - 2 sum n_ij^2)`.
pub fn hamming_empirical(m: &ConfusionMatrix) -> Result<Rational> {
    let n = m.total() as i128;
    if n == 0 {
        return Err(Error::Empty);
    }
    let sq = |x: &u64| -> Result<i128> { checked_mul(*x as i128, *x as i128) };
    let mut acc: i128 = 0;
    for x in m.row_margins().iter().chain(m.col_margins()) {
        acc = acc.checked_add(sq(x)?).ok_or(Error::Overflow)?;
    }
    for x in m.counts() {
        acc = acc.checked_sub(2 * sq(x)?).ok_or(Error::Overflow)?;
    }
    Ok(Rational::new(acc, checked_mul(n, n)?))
}

/// `E(RD) = C(n,2)^-2 {(a+b)(b+d) + (a+c)(c+d)}` under the permutation model.
pub fn expected_rd(m: &ConfusionMatrix) -> Result<Rational> {
    let p = pair_counts(m)?;
    let pairs = binomial2(p.n);
    Ok(Rational::new(p.baseline_numerator()?, checked_mul(pairs, pairs)?))
}

/// `ARD = RD / E(RD) = C(n,2)(b+c) / {(a+b)(b+d) + (a+c)(c+d)}`.
///
/// Fails with [`Error::DegenerateBaseline`] when `E(RD) = 0`, which happens
/// when both clusterings are all-singletons or both are a single cluster.
pub fn ard(m: &ConfusionMatrix) -> Result<Rational> {
    ard_from_pairs(&pair_counts(m)?)
}

pub(crate) fn ard_from_pairs(p: &PairCounts) -> Result<Rational> {
    let denominator = p.baseline_numerator()?;
    if denominator == 0 {
        return Err(Error::DegenerateBaseline);
    }
    let numerator = checked_mul(binomial2(p.n), p.discordant() as i128)?;
    Ok(Rational::new(numerator, denominator))
}

/// `ARI = 1 - ARD`.
pub fn ari(m: &ConfusionMatrix) -> Result<Rational> {
    Ok(Rational::from_integer(1) - ard(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m<const C: usize>(rows: &[[u64; C]]) -> ConfusionMatrix {
        ConfusionMatrix::from_rows(rows).unwrap()
    }

    fn iris() -> ConfusionMatrix {
        m(&[[50, 0, 0], [0, 48, 2], [0, 1, 49]])
    }

    fn steinley() -> ConfusionMatrix {
        m(&[[1, 0, 1, 1, 0], [0, 1, 0, 0, 1], [1, 0, 1, 0, 1], [0, 1, 0, 1, 0], [1, 0, 1, 0, 1]])
    }

    #[test]
    fn iris_pair_counts() {
        let p = pair_counts(&iris()).unwrap();
        // C(50,2) + C(48,2) + C(2,2) + C(1,2) + C(49,2)
        assert_eq!(p.a, 1225 + 1128 + 1 + 0 + 1176);
        assert_eq!(p.b + p.c, 291);
        assert_eq!(p.pairs(), 11175);
    }

    #[test]
    fn diagonal_has_no_discordant_pairs() {
        let p = pair_counts(&m(&[[7, 0], [0, 7]])).unwrap();
        assert_eq!((p.b, p.c), (0, 0));
        assert_eq!(rand_distance(&m(&[[7, 0], [0, 7]])).unwrap(), Rational::from_integer(0));
    }

    #[test]
    fn rand_distance_worked_examples() {
        assert_eq!(rand_distance(&iris()).unwrap(), Rational::new(291, 11175));
        assert_eq!(rand_distance(&steinley()).unwrap(), Rational::new(22, 78));
    }

    #[test]
    fn hamming_matches_rd_relation() {
        assert_eq!(hamming_empirical(&m(&[[10, 0], [0, 10]])).unwrap(), Rational::from_integer(0));
        assert_eq!(
            hamming_empirical(&iris()).unwrap(),
            Rational::new(149, 150) * Rational::new(291, 11175)
        );
        assert_eq!(
            hamming_empirical(&steinley()).unwrap(),
            Rational::new(12, 13) * Rational::new(22, 78)
        );
    }

    #[test]
    fn expected_rd_cases() {
        assert!(expected_rd(&m(&[[3, 0], [0, 3]])).unwrap() > Rational::from_integer(0));
        let identity = m(&[[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        assert_eq!(expected_rd(&identity).unwrap(), Rational::from_integer(0));
        let ratio = rand_distance(&steinley()).unwrap() / expected_rd(&steinley()).unwrap();
        assert_eq!(ratio, ard(&steinley()).unwrap());
        assert!((ratio_to_f64(&ratio) - 1.164).abs() < 5e-4);
    }

    #[test]
    fn ard_worked_examples() {
        let f = |x: [[u64; 2]; 2]| ratio_to_f64(&ard(&m(&x)).unwrap());
        assert!((f([[16, 2], [2, 0]]) - 1.097).abs() < 5e-4);
        assert!((f([[11, 0], [4, 5]]) - 0.668).abs() < 5e-4);
        assert!((ratio_to_f64(&ard(&iris()).unwrap()) - 0.059).abs() < 5e-4);
        assert_eq!(ard(&m(&[[12, 4], [4, 0]])).unwrap(), Rational::new(95, 84));
    }

    #[test]
    fn degenerate_baseline_is_flagged() {
        let identity = m(&[[1, 0], [0, 1]]);
        assert_eq!(ard(&identity), Err(Error::DegenerateBaseline));
        assert_eq!(ard(&m(&[[5]])), Err(Error::DegenerateBaseline));
    }

    #[test]
    fn single_object_has_no_pairs() {
        assert_eq!(pair_counts(&m(&[[1]])), Err(Error::TooFewObjects { n: 1 }));
        assert_eq!(hamming_empirical(&m(&[[1]])).unwrap(), Rational::from_integer(0));
    }

    #[test]
    fn index_identities() {
        let one = Rational::from_integer(1);
        assert_eq!(rand_index(&iris()).unwrap() + rand_distance(&iris()).unwrap(), one);
        assert_eq!(ari(&iris()).unwrap() + ard(&iris()).unwrap(), one);
    }

    use crate::ratio_to_f64;
}
