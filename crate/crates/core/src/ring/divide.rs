//! Exact division by series whose lowest q-order part is `c (1 - w)`.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::laurent::{ExpVec, LaurentPoly};
use super::qseries::EXACT;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Default distance below the lowest degree of the numerator at which long
/// division gives up.
pub const DEFAULT_FLOOR_MARGIN: i64 = 64;

/// Upper bound on long-division steps per q-order (guards degree-zero `w`).
const MAX_STEPS: usize = 1 << 20;

type Slice = BTreeMap<ExpVec, Rational>;

fn slice_mul(a: &Slice, b: &Slice) -> Slice {
    let mut out: Slice = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea.add(eb);
            let entry = out.entry(e).or_insert_with(Rational::zero);
            *entry += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn slice_axpy(acc: &mut Slice, k: &Rational, x: &Slice) {
    for (e, c) in x {
        let entry = acc.entry(e.clone()).or_insert_with(Rational::zero);
        *entry += k * c;
        if entry.is_zero() {
            acc.remove(e);
        }
    }
}

/// Solves `c (1 - w) P = r` for a Laurent polynomial `P`, dividing from the
/// top of the graded order down.
fn divide_one_minus_w(r: &Slice, c: &Rational, w: &ExpVec, floor: i64) -> Result<Slice> {
    let zero = ExpVec::zeros(w.len());
    let w_below_one = w.graded_key() < zero.graded_key();
    let neg_w = w.scale(-1);
    let mut quot: Slice = BTreeMap::new();
    // Keyed by graded order so the top term is always the last entry.
    let mut ordered: BTreeMap<(i64, ExpVec), Rational> = r
        .iter()
        .map(|(e, x)| ((e.degree(), e.clone()), x / c))
        .collect();
    let mut steps = 0usize;
    while let Some(((deg, top), t)) = ordered.pop_last() {
        if deg < floor {
            return Err(Error::NotDivisible(format!(
                "remainder term {top} fell below degree floor {floor}"
            )));
        }
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::NotDivisible("step budget exhausted".into()));
        }
        // Quotient term p with (1 - w) p having `t z^top` as its leading term.
        let (pe, pc) = if w_below_one {
            (top.clone(), t.clone())
        } else {
            (top.add(&neg_w), -t.clone())
        };
        // rem -= p (1 - w) = rem - p + p w; the top term cancels by construction.
        let other = if w_below_one { pe.add(w) } else { pe.clone() };
        let other_coeff = if w_below_one { t.clone() } else { -pc.clone() };
        let key = (other.degree(), other);
        let entry = ordered.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += other_coeff;
        if entry.is_zero() {
            ordered.remove(&key);
        }
        let q = quot.entry(pe.clone()).or_insert_with(Rational::zero);
        *q += pc;
        if q.is_zero() {
            quot.remove(&pe);
        }
    }
    Ok(quot)
}

/// Exact quotient `num / den`, computed order by order in `q`.
///
/// The lowest q-order part of `den` must be `c (1 - w)` with `w` a nontrivial
/// Laurent monomial. `floor` bounds the total z-degree reached by long
/// division; `None` uses the lowest degree of `num` minus
/// [`DEFAULT_FLOOR_MARGIN`].
pub fn divide_exact(num: &LaurentPoly, den: &LaurentPoly, floor: Option<i64>) -> Result<LaurentPoly> {
    if num.arity() != den.arity() {
        return Err(Error::ArityMismatch {
            left: num.arity(),
            right: den.arity(),
        });
    }
    let arity = num.arity();
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let v = den.q_valuation();
    let d0 = den.q_slice(v);
    let zero = ExpVec::zeros(arity);
    let (c, w) = match (d0.len(), d0.get(&zero)) {
        (2, Some(c)) => {
            let (w, cw) = d0.iter().find(|(e, _)| **e != zero).expect("two terms");
            if *cw != -c.clone() {
                return Err(Error::NotDivisible(format!(
                    "leading part of divisor is not c(1 - w): coefficients {c} and {cw}"
                )));
            }
            (c.clone(), w.clone())
        }
        _ => {
            return Err(Error::NotDivisible(
                "leading part of divisor is not of the form c(1 - w)".into(),
            ))
        }
    };
    let floor = floor.unwrap_or_else(|| {
        num.terms().map(|(e, _)| e.degree()).min().unwrap_or(0) - DEFAULT_FLOOR_MARGIN
    });

    let num_val = num.q_valuation();
    let m0 = num_val - v;
    let num_hi = num.certified_hi();
    let den_hi = den.certified_hi();
    let mut hi = (num_hi - v).min(den_hi - v + m0);
    if num.is_zero() {
        return Ok(LaurentPoly::zero(arity, hi));
    }
    // Both sides exact: the quotient must be a finite series, verified below.
    let exact = hi >= EXACT / 2;
    if exact {
        let top = num.terms().map(|(_, c)| c.lo() + c.iter().count() as i64).max().unwrap_or(0);
        let top = num
            .terms()
            .flat_map(|(_, c)| c.iter().map(|(e, _)| e).collect::<Vec<_>>())
            .max()
            .unwrap_or(top);
        hi = top - v + 1;
    }

    let den_slices: Vec<Slice> = (v..den_hi.min(v + (hi - m0).max(0)))
        .map(|m| den.q_slice(m))
        .collect();
    let mut quot: Vec<(i64, Slice)> = Vec::new();
    for m in m0..hi {
        let mut r = num.q_slice(m + v);
        for i in 1..=(m - m0) as usize {
            if i >= den_slices.len() || den_slices[i].is_empty() {
                continue;
            }
            let prev = &quot[(m - m0) as usize - i].1;
            if prev.is_empty() {
                continue;
            }
            let prod = slice_mul(&den_slices[i], prev);
            slice_axpy(&mut r, &Rational::from_integer((-1).into()), &prod);
        }
        let qm = divide_one_minus_w(&r, &c, &w, floor)?;
        quot.push((m, qm));
    }
    if exact {
        let q = LaurentPoly::from_slices(arity, quot, EXACT);
        if q.mul(den)? != *num {
            return Err(Error::NotDivisible(
                "exact quotient is not a finite series in q".into(),
            ));
        }
        return Ok(q);
    }
    Ok(LaurentPoly::from_slices(arity, quot, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::laurent::poly;
    use crate::ring::qseries::QSeries;
    use crate::ring::rational::rat;

    #[test]
    fn one_minus_w_squared() {
        let num = poly(1, &[(1, &[0]), (-1, &[-2])]);
        let den = poly(1, &[(1, &[0]), (-1, &[-1])]);
        let q = divide_exact(&num, &den, None).unwrap();
        assert_eq!(q, poly(1, &[(1, &[0]), (1, &[-1])]));
    }

    #[test]
    fn w_above_one_in_order() {
        // (1 - z^3) / (1 - z) = 1 + z + z^2
        let num = poly(1, &[(1, &[0]), (-1, &[3])]);
        let den = poly(1, &[(1, &[0]), (-1, &[1])]);
        let q = divide_exact(&num, &den, None).unwrap();
        assert_eq!(q, poly(1, &[(1, &[0]), (1, &[1]), (1, &[2])]));
    }

    #[test]
    fn degree_zero_w() {
        // (1 - (z1/z2)^2) / (1 - z1/z2) = 1 + z1/z2
        let num = poly(2, &[(1, &[0, 0]), (-1, &[2, -2])]);
        let den = poly(2, &[(1, &[0, 0]), (-1, &[1, -1])]);
        let q = divide_exact(&num, &den, None).unwrap();
        assert_eq!(q, poly(2, &[(1, &[0, 0]), (1, &[1, -1])]));
    }

    #[test]
    fn not_divisible_hits_floor() {
        let num = poly(1, &[(1, &[0])]);
        let den = poly(1, &[(1, &[0]), (-1, &[1])]);
        assert!(matches!(
            divide_exact(&num, &den, Some(-10)),
            Err(Error::NotDivisible(_))
        ));
    }

    #[test]
    fn bad_leading_part() {
        let num = poly(1, &[(1, &[0])]);
        let den = poly(1, &[(1, &[0]), (1, &[1])]);
        assert!(divide_exact(&num, &den, None).is_err());
    }

    #[test]
    fn scaled_divisor_and_q_orders() {
        // den = 2(1 - z) + q z^2 (exact), num = den * (z + q)
        let den = poly(1, &[(2, &[0]), (-2, &[1])])
            .add(&LaurentPoly::monomial(ExpVec(vec![2]), QSeries::monomial(rat(1), 1)))
            .unwrap();
        let quot = poly(1, &[(1, &[1])])
            .add(&LaurentPoly::monomial(ExpVec(vec![0]), QSeries::monomial(rat(1), 1)))
            .unwrap();
        let num = den.mul(&quot).unwrap().truncate(6);
        let got = divide_exact(&num, &den, None).unwrap();
        assert_eq!(got.certified_hi(), 6);
        assert_eq!(got, quot.truncate(6));
    }
}
