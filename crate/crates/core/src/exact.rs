//! Exact evaluation of `ceil(f * count)` and `floor(f * count)` for fractions
//! given as `f64`.
//!
//! Naive floating-point evaluation over- or under-shoots whenever the product
//! is integer-valued but the fraction has no exact binary representation:
//! `(1.0 - 0.1) * 100.0` is `90.000000000000003`, so a plain `ceil` would
//! return 91 where the decimal intent is exactly 90. These helpers evaluate
//! the product in exact rational arithmetic on the fraction's binary value
//! and additionally absorb the drift between that binary value and its
//! decimal intent with a guard of `count * 2^-50`. The guard is far larger
//! than the half-ulp representation error (at most `count * 2^-53`) and far
//! smaller than the fractional resolution of any humanly specified level, so
//! results are exact for fractions with up to about eight decimal digits and
//! counts up to about 10^9.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

fn guard(count: u64) -> BigRational {
    BigRational::new(BigInt::from(count), BigInt::from(1u64 << 50))
}

fn to_rational(fraction: f64) -> BigRational {
    BigRational::from_float(fraction).expect("fraction must be finite")
}

/// Smallest integer `k` with `k >= (1 - fraction) * count`, never below zero.
///
/// The complement is formed in rational arithmetic; forming it in `f64` first
/// would round `1.0 - 0.1` straight back to the binary neighbour of `0.9` and
/// reintroduce the boundary error this module exists to remove.
pub(crate) fn ceil_one_minus_times(fraction: f64, count: u64) -> u64 {
    let x = (BigRational::one() - to_rational(fraction))
        * BigRational::from_integer(BigInt::from(count));
    let k = (x - guard(count)).ceil();
    if k.is_negative() {
        0
    } else {
        k.to_integer().to_u64().expect("result fits in u64")
    }
}

/// Largest integer `k` with `k <= fraction * count`, never below zero.
pub(crate) fn floor_times(fraction: f64, count: u64) -> u64 {
    let x = to_rational(fraction) * BigRational::from_integer(BigInt::from(count)) + guard(count);
    let k = x.floor();
    if k.is_negative() {
        0
    } else {
        k.to_integer().to_u64().expect("result fits in u64")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_valued_products_are_not_over_ceiled() {
        // (1 - 0.1) * 100 == 90 exactly in decimal; f64 evaluates above 90.
        assert_eq!(ceil_one_minus_times(0.1, 100), 90);
        // (1 - 0.15) * 20 == 17 exactly; the f64 value of 0.15 sits below the
        // decimal 0.15, so the raw rational product lands just above 17.
        assert_eq!(ceil_one_minus_times(0.15, 20), 17);
        assert_eq!(ceil_one_minus_times(0.25, 4), 3);
        assert_eq!(ceil_one_minus_times(0.1, 1000), 900);
    }

    #[test]
    fn non_integer_products_round_up() {
        assert_eq!(ceil_one_minus_times(0.1, 20), 18); // 18.0 from 17.99..
        assert_eq!(ceil_one_minus_times(0.05, 10), 10); // 9.5 -> 10
        assert_eq!(ceil_one_minus_times(0.2, 11), 9); // 8.8 -> 9
        assert_eq!(ceil_one_minus_times(0.10001, 100), 90); // 89.999 -> 90
    }

    #[test]
    fn floor_honours_decimal_intent() {
        // 0.7 * 10 == 7 in decimal; f64 evaluates just below 7.
        assert_eq!(floor_times(0.7, 10), 7);
        assert_eq!(floor_times(0.8, 20433), 16346); // 16346.4
        assert_eq!(floor_times(0.1, 20433), 2043); // 2043.3
        assert_eq!(floor_times(0.5, 10), 5);
        assert_eq!(floor_times(0.25, 10), 2); // 2.5 -> 2
    }

    #[test]
    fn extremes_clamp_to_zero() {
        assert_eq!(ceil_one_minus_times(1.0, 100), 0);
        assert_eq!(floor_times(0.0, 100), 0);
    }
}
