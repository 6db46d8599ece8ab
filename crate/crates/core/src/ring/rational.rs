use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar, always kept in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer power, negative exponents allowed for nonzero bases.
pub fn pow_i(base: &Rational, e: i64) -> Result<Rational> {
    if e >= 0 {
        return Ok(num_traits::pow(base.clone(), e as usize));
    }
    if base.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(num_traits::pow(base.recip(), e.unsigned_abs() as usize))
}

/// Parses `p`, `-p`, `p/r` with decimal integers. No decimal points.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::BadParameter(format!("`{s}` is not a rational of the form p/r"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational::new(num, den))
}

/// Inverse of [`parse_rational`]: `p` for integers, `p/r` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Clears denominators: returns the row scaled by the lcm of its denominators.
pub fn clear_denominators(row: &[Rational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    row.iter()
        .map(|r| r.numer() * (&lcm / r.denom()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("2/4").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-3").unwrap(), rat(-3));
        assert_eq!(format_rational(&ratio(-6, 4)), "-3/2");
        assert_eq!(format_rational(&rat(7)), "7");
        assert!(parse_rational("0.5").is_err());
        assert_eq!(parse_rational("1/0"), Err(Error::DivisionByZero));
    }

    #[test]
    fn zero_is_canonical() {
        let z = ratio(0, 5);
        assert_eq!(z.denom(), &BigInt::one());
    }

    #[test]
    fn negative_powers() {
        assert_eq!(pow_i(&ratio(2, 3), -2).unwrap(), ratio(9, 4));
        assert!(pow_i(&rat(0), -1).is_err());
    }

    #[test]
    fn clearing() {
        let row = vec![ratio(1, 2), ratio(-1, 3), rat(0)];
        let ints: Vec<BigInt> = clear_denominators(&row);
        assert_eq!(ints, vec![BigInt::from(3), BigInt::from(-2), BigInt::from(0)]);
    }
}
