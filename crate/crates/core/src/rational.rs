use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::ToPrimitive;

/// Exact reduced fraction used for every criterion.
pub type Rational = Ratio<i128>;

/// Arbitrary-precision fraction, used where powers of two outgrow `i128`.
pub type BigRational = Ratio<BigInt>;

/// `C(x, 2)` as `i128`.
#[inline]
pub fn binomial2(x: u64) -> i128 {
    let x = x as i128;
    x * (x - 1) / 2
}

/// Nearest `f64` to an exact rational.
pub fn ratio_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn checked_mul(a: i128, b: i128) -> crate::Result<i128> {
    a.checked_mul(b).ok_or(crate::Error::Overflow)
}
