//! Exact rational parameters. All verdict-affecting arithmetic is done over
//! `BigRational`; flags accept "a/b" or plain integers.

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

pub fn parse_ratio(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let num: BigInt = num
        .trim()
        .parse()
        .map_err(|_| format!("invalid numerator in {s:?}"))?;
    let den: BigInt = den
        .trim()
        .parse()
        .map_err(|_| format!("invalid denominator in {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

/// Renders as "a/b" (or "a" for integers), the form the verdict files use.
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio_int(v: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio_usize(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// n^e as a rational.
pub fn ratio_pow(base: usize, exp: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(base).pow(exp))
}

/// r^e for possibly negative e (r must be nonzero when e < 0).
pub fn ratio_powi(r: &BigRational, exp: i64) -> BigRational {
    r.pow(exp as i32)
}

pub fn in_open_unit_interval(r: &BigRational) -> bool {
    r.is_positive() && *r < BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(format_ratio(&parse_ratio("2/3").unwrap()), "2/3");
        assert_eq!(format_ratio(&parse_ratio("4/6").unwrap()), "2/3");
        assert_eq!(format_ratio(&parse_ratio("5").unwrap()), "5");
        assert_eq!(format_ratio(&parse_ratio("-1/2").unwrap()), "-1/2");
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn negative_pow() {
        let r = parse_ratio("2/3").unwrap();
        assert_eq!(ratio_powi(&r, -2), parse_ratio("9/4").unwrap());
    }
}
