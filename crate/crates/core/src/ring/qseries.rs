//! Truncated Laurent series in the deformation parameter `q`.
//!
//! A [`QSeries`] stores the coefficients of `q^lo, ..., q^{lo+len-1}` and knows
//! that every coefficient below `hi` is exact. Coefficients between the last
//! stored one and `hi` are zero; nothing is known at or above `hi`.
//! Series that are exact to all orders carry `hi == EXACT`.

use std::fmt;

use num_traits::{One, Zero};

use super::rational::{format_rational, pow_i, Rational};
use crate::error::{Error, Result};

/// Ceiling used for series known to all orders.
pub const EXACT: i64 = 1 << 60;

/// Collapses anything that drifted far past the finite range back to `EXACT`,
/// so that shifting an exact series keeps it exact.
pub(crate) fn norm_hi(h: i64) -> i64 {
    if h >= EXACT / 2 {
        EXACT
    } else {
        h
    }
}

pub(crate) fn add_hi(a: i64, b: i64) -> i64 {
    if a >= EXACT / 2 || b >= EXACT / 2 {
        EXACT
    } else {
        a + b
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    lo: i64,
    hi: i64,
    coeffs: Vec<Rational>,
}

impl QSeries {
    /// Zero known below `hi`.
    pub fn zero(hi: i64) -> Self {
        let hi = norm_hi(hi);
        QSeries {
            lo: hi,
            hi,
            coeffs: Vec::new(),
        }
    }

    pub fn exact_zero() -> Self {
        Self::zero(EXACT)
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// An exact constant.
    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// The exact series `c q^e`.
    pub fn monomial(c: Rational, e: i64) -> Self {
        Self::from_coeffs(e, vec![c], EXACT)
    }

    /// Builds from coefficients of `q^lo, q^{lo+1}, ...`, dropping anything at
    /// or above `hi` and normalizing leading/trailing zeros.
    pub fn from_coeffs(lo: i64, coeffs: Vec<Rational>, hi: i64) -> Self {
        let hi = norm_hi(hi);
        let mut s = QSeries { lo, hi, coeffs };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if self.lo < self.hi {
            let keep = (self.hi - self.lo).min(self.coeffs.len() as i64) as usize;
            self.coeffs.truncate(keep);
        } else {
            self.coeffs.clear();
        }
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.lo = self.hi;
        } else {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
    }

    /// Lowest exponent with a nonzero coefficient, or `hi` for zero.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Exclusive ceiling of the certified window.
    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.hi == EXACT
    }

    /// Canonical zero: no nonzero coefficient below `hi`.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.lo)
    }

    /// Coefficient of `q^e`. Only meaningful for `e < hi`.
    pub fn coeff(&self, e: i64) -> Rational {
        if e < self.lo || e >= self.lo + self.coeffs.len() as i64 {
            Rational::zero()
        } else {
            self.coeffs[(e - self.lo) as usize].clone()
        }
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.lo + i as i64, c))
    }

    /// Drops everything at or above `hi` (never raises the ceiling).
    pub fn truncate(&self, hi: i64) -> Self {
        Self::from_coeffs(self.lo, self.coeffs.clone(), self.hi.min(hi))
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_exact() {
            QSeries {
                lo: if self.is_zero() { EXACT } else { self.lo + k },
                hi: EXACT,
                coeffs: self.coeffs.clone(),
            }
        } else {
            QSeries {
                lo: self.lo + k,
                hi: self.hi + k,
                coeffs: self.coeffs.clone(),
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.hi);
        }
        QSeries {
            lo: self.lo,
            hi: self.hi,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        QSeries {
            lo: self.lo,
            hi: self.hi,
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let hi = self.hi.min(other.hi);
        if other.is_zero() {
            return self.truncate(hi);
        }
        if self.is_zero() {
            return other.truncate(hi);
        }
        let lo = self.lo.min(other.lo);
        let top = (self.lo + self.coeffs.len() as i64)
            .max(other.lo + other.coeffs.len() as i64)
            .min(hi);
        if top <= lo {
            return Self::zero(hi);
        }
        let coeffs = (lo..top)
            .map(|e| self.coeff(e) + other.coeff(e))
            .collect();
        Self::from_coeffs(lo, coeffs, hi)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product on the window `[a.lo + b.lo, min(a.lo + b.hi, b.lo + a.hi))`.
    pub fn mul(&self, other: &Self) -> Self {
        let hi = add_hi(self.lo, other.hi).min(add_hi(other.lo, self.hi));
        if self.is_zero() || other.is_zero() {
            return Self::zero(hi);
        }
        let lo = self.lo + other.lo;
        let len = (self.coeffs.len() + other.coeffs.len() - 1) as i64;
        let len = len.min(hi.saturating_sub(lo)).max(0) as usize;
        let mut out = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(lo, out, hi)
    }

    /// Multiplicative inverse, certified on `[-v, min(hi, cap) - 2v)` where `v`
    /// is the valuation. `cap` bounds the work for exact inputs.
    pub fn inverse(&self, cap: i64) -> Result<Self> {
        let v = self.valuation().ok_or(Error::DivisionByZero)?;
        if self.coeffs.len() == 1 && self.is_exact() {
            return Ok(Self::monomial(self.coeffs[0].recip(), -v));
        }
        let rel = self.hi.min(cap) - v;
        if rel <= 0 {
            return Ok(Self::zero(-v));
        }
        let rel = rel as usize;
        let a0_inv = self.coeffs[0].recip();
        let mut inv: Vec<Rational> = Vec::with_capacity(rel);
        inv.push(a0_inv.clone());
        for m in 1..rel {
            let mut acc = Rational::zero();
            for i in 1..=m.min(self.coeffs.len() - 1) {
                acc += &self.coeffs[i] * &inv[m - i];
            }
            inv.push(-acc * &a0_inv);
        }
        Ok(Self::from_coeffs(-v, inv, rel as i64 - v))
    }

    /// Evaluates the stored part at a rational point.
    pub fn eval(&self, q: &Rational) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (e, c) in self.iter() {
            acc += c * pow_i(q, e)?;
        }
        Ok(acc)
    }

    /// Evaluates after truncating at `qorder`; exact series are used in full.
    pub fn eval_truncated(&self, q: &Rational, qorder: i64) -> Result<Rational> {
        if self.is_exact() {
            self.eval(q)
        } else {
            self.truncate(qorder).eval(q)
        }
    }

    /// Equality on the overlap of the two windows.
    pub fn eq_on_overlap(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "({})q", format_rational(c))?,
                _ => write!(f, "({})q^{e}", format_rational(c))?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if !self.is_exact() {
            write!(f, " + O(q^{})", self.hi)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rational::{rat, ratio};

    fn series(lo: i64, cs: &[i64], hi: i64) -> QSeries {
        QSeries::from_coeffs(lo, cs.iter().map(|&c| rat(c)).collect(), hi)
    }

    #[test]
    fn difference_of_squares() {
        let a = series(0, &[1, 1], 3);
        let b = series(0, &[1, -1], 3);
        let p = a.mul(&b);
        assert_eq!(p, series(0, &[1, 0, -1], 3));
        assert_eq!((p.lo(), p.hi()), (0, 3));
    }

    #[test]
    fn window_shifts_add() {
        let a = series(-1, &[1], 2);
        let b = series(1, &[1], 4);
        let p = a.mul(&b);
        assert_eq!(p, series(0, &[1], 3));
        assert_eq!(p.hi(), 3);
    }

    #[test]
    fn identity_and_zero() {
        let s = series(-2, &[3, 0, 5], 6);
        assert_eq!(s.mul(&QSeries::one()), s);
        let z = QSeries::zero(5);
        assert!(z.is_zero());
        assert_eq!(z.lo(), z.hi());
        assert!(s.mul(&z).is_zero());
    }

    #[test]
    fn normalization_strips_zeros() {
        let s = series(0, &[0, 0, 2, 0], 10);
        assert_eq!(s.lo(), 2);
        assert_eq!(s.coeff(2), rat(2));
        let t = series(0, &[1, 2, 3, 4], 2);
        assert_eq!(t, series(0, &[1, 2], 2));
    }

    #[test]
    fn overlap_equality() {
        let a = series(0, &[1, 1, 7], 3);
        let b = series(0, &[1, 1], 2);
        assert!(a.eq_on_overlap(&b));
        assert!(!a.eq_on_overlap(&series(0, &[1, 2], 2)));
    }

    #[test]
    fn inverse_of_one_minus_q() {
        let s = series(0, &[1, -1], EXACT);
        let inv = s.inverse(6).unwrap();
        assert_eq!(inv, series(0, &[1, 1, 1, 1, 1, 1], 6));
        let shifted = s.shift(2).inverse(6).unwrap();
        assert_eq!(shifted.lo(), -2);
        assert_eq!(shifted.hi(), 2);
    }

    #[test]
    fn evaluation() {
        let s = series(-1, &[1, 0, 2], EXACT);
        assert_eq!(s.eval(&ratio(1, 2)).unwrap(), rat(3));
        let t = series(0, &[1, 1, 1], 10);
        assert_eq!(t.eval_truncated(&ratio(1, 2), 2).unwrap(), ratio(3, 2));
    }

    #[test]
    fn exact_shift_stays_exact() {
        let s = QSeries::monomial(rat(1), 3).shift(-10);
        assert!(s.is_exact());
        assert_eq!(s.lo(), -7);
    }
}
