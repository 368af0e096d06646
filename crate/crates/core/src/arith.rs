//! Exact integer and rational scalars plus the handful of helpers every
//! other module leans on (integer square roots, floor/fractional parts,
//! decimal parsing).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

/// Arbitrary-precision signed integer.
pub type Int = BigInt;

/// Exact rational, always reduced with a positive denominator.
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

pub fn rat_from_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

/// Largest `r` with `r^2 <= n`. Panics on negative input.
pub fn isqrt_floor(n: &Int) -> Int {
    assert!(!n.is_negative(), "square root of a negative integer");
    n.sqrt()
}

/// Smallest `r` with `r^2 >= n`.
pub fn isqrt_ceil(n: &Int) -> Int {
    let r = isqrt_floor(n);
    if &(&r * &r) == n {
        r
    } else {
        r + 1
    }
}

pub fn floor(r: &Rat) -> Int {
    r.floor().to_integer()
}

/// `r - floor(r)`, in `[0, 1)`.
pub fn frac(r: &Rat) -> Rat {
    r - r.floor()
}

/// Euclidean remainder in `[0, |m|)`.
pub fn modulo(a: &Int, m: &Int) -> Int {
    a.mod_floor(&m.abs())
}

/// gcd of all values; 0 for an empty or all-zero input.
pub fn gcd_all<'a, I: IntoIterator<Item = &'a Int>>(values: I) -> Int {
    values
        .into_iter()
        .fold(Int::zero(), |acc, v| acc.gcd(v))
}

pub fn pow(base: &Int, exp: usize) -> Int {
    num_traits::pow(base.clone(), exp)
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(v: &[Int]) -> Int {
    v.iter().map(|x| x * x).sum()
}

pub fn is_one(v: &Int) -> bool {
    v.is_one()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal integer {0:?}")]
pub struct ParseIntError(pub String);

/// Parses a decimal integer with an optional `+`/`-` sign. Nothing else
/// (whitespace, underscores, exponents) is accepted.
pub fn parse_int(s: &str) -> Result<Int, ParseIntError> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseIntError(s.to_string()));
    }
    Int::from_str(s).map_err(|_| ParseIntError(s.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_square_roots_bracket() {
        for n in 0..2000i64 {
            let n = int(n);
            let lo = isqrt_floor(&n);
            let hi = isqrt_ceil(&n);
            assert!(&lo * &lo <= n && (&lo + 1) * (&lo + 1) > n);
            assert!(&hi * &hi >= n);
            assert!(hi.is_zero() || (&hi - 1) * (&hi - 1) < n);
        }
    }

    #[test]
    fn floor_and_frac_of_negative_rationals() {
        let r = rat(-7, 3);
        assert_eq!(floor(&r), int(-3));
        assert_eq!(frac(&r), rat(2, 3));
    }

    #[test]
    fn parse_accepts_signs_only() {
        assert_eq!(parse_int("+17").unwrap(), int(17));
        assert_eq!(parse_int("-0").unwrap(), int(0));
        assert!(parse_int("").is_err());
        assert!(parse_int("1e3").is_err());
        assert!(parse_int(" 4").is_err());
        assert!(parse_int("-").is_err());
    }

    #[test]
    fn zero_has_no_sign() {
        let z = parse_int("-0").unwrap();
        assert!(!z.is_negative());
        assert_eq!(z.to_string(), "0");
    }
}
