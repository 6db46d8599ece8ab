//! Sparse multivariate Laurent polynomials in `z_1, ..., z_arity` with
//! [`QSeries`] coefficients.
//!
//! Besides the per-term windows, a polynomial carries a global ceiling `hi`:
//! every exponent vector that is *not* stored has coefficient zero below `hi`.
//! The certified window of the whole polynomial is the minimum of `hi` and all
//! term ceilings.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_traits::Zero;

use super::qseries::{add_hi, norm_hi, QSeries, EXACT};
use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

/// Exponent vector of a Laurent monomial `z_1^{e_1} ... z_n^{e_n}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpVec(pub Vec<i64>);

impl ExpVec {
    pub fn zeros(n: usize) -> Self {
        ExpVec(vec![0; n])
    }

    /// `z_var` as an exponent vector of length `n`.
    pub fn unit(n: usize, var: usize) -> Self {
        let mut v = vec![0; n];
        v[var] = 1;
        ExpVec(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        ExpVec(self.0.iter().map(|a| a * k).collect())
    }

    /// Graded order key: total degree first, then lexicographic.
    pub(crate) fn graded_key(&self) -> (i64, &[i64]) {
        (self.degree(), &self.0)
    }
}

impl fmt::Display for ExpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

/// Image of a variable under [`LaurentPoly::subst`]: `z_var -> sign * q^qshift * z^exps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarImage {
    pub sign: i64,
    pub qshift: i64,
    pub exps: ExpVec,
}

impl VarImage {
    pub fn identity(arity: usize, var: usize) -> Self {
        VarImage {
            sign: 1,
            qshift: 0,
            exps: ExpVec::unit(arity, var),
        }
    }

    /// `z_var -> 1`.
    pub fn one(arity: usize) -> Self {
        VarImage {
            sign: 1,
            qshift: 0,
            exps: ExpVec::zeros(arity),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    arity: usize,
    terms: BTreeMap<ExpVec, QSeries>,
    hi: i64,
}

impl LaurentPoly {
    /// Zero, known below `hi`.
    pub fn zero(arity: usize, hi: i64) -> Self {
        LaurentPoly {
            arity,
            terms: BTreeMap::new(),
            hi: norm_hi(hi),
        }
    }

    pub fn exact_zero(arity: usize) -> Self {
        Self::zero(arity, EXACT)
    }

    pub fn one(arity: usize) -> Self {
        Self::monomial(ExpVec::zeros(arity), QSeries::one())
    }

    /// A single exact-support term. The global ceiling is exact: only `exps`
    /// can ever be nonzero.
    pub fn monomial(exps: ExpVec, coeff: QSeries) -> Self {
        let arity = exps.len();
        let mut p = Self::exact_zero(arity);
        p.add_term(exps, coeff);
        p
    }

    /// Builds from terms with a shared global ceiling. Every term is clipped to
    /// `hi`.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (ExpVec, QSeries)>, hi: i64) -> Self {
        let mut p = Self::zero(arity, hi);
        for (e, c) in terms {
            assert_eq!(e.len(), arity, "exponent vector length must equal arity");
            p.add_term(e, c.truncate(p.hi));
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Global ceiling for absent terms.
    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.hi == EXACT && self.terms.values().all(QSeries::is_exact)
    }

    /// Ceiling below which every coefficient of every exponent is known.
    pub fn certified_hi(&self) -> i64 {
        self.terms
            .values()
            .map(QSeries::hi)
            .fold(self.hi, i64::min)
    }

    /// Lowest q-exponent among stored terms (or the global ceiling).
    pub fn q_valuation(&self) -> i64 {
        self.terms.values().map(QSeries::lo).fold(self.hi, i64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &QSeries)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &ExpVec) -> QSeries {
        self.terms
            .get(e)
            .cloned()
            .unwrap_or_else(|| QSeries::zero(self.hi))
    }

    /// Adds `c z^e` in place, dropping the term when it cancels.
    pub fn add_term(&mut self, e: ExpVec, c: QSeries) {
        debug_assert_eq!(e.len(), self.arity);
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Lowers the global ceiling and clips every term to it.
    pub fn truncate(&self, hi: i64) -> Self {
        let hi = self.hi.min(hi);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.truncate(hi)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        LaurentPoly {
            arity: self.arity,
            terms,
            hi,
        }
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let hi = self.hi.min(other.hi);
        let mut out = Self::zero(self.arity, hi);
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out.truncate(hi))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(QSeries::neg)
    }

    pub fn scale(&self, c: &QSeries) -> Self {
        let hi = if c.is_zero() {
            add_hi(self.q_valuation(), c.hi())
        } else {
            add_hi(self.hi, c.lo()).min(add_hi(self.q_valuation(), c.hi()))
        };
        let mut out = Self::zero(self.arity, hi);
        for (e, t) in &self.terms {
            out.add_term(e.clone(), t.mul(c));
        }
        out.truncate(hi)
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.scale(&QSeries::constant(c.clone()))
    }

    fn map_coeffs(&self, f: impl Fn(&QSeries) -> QSeries) -> Self {
        LaurentPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            hi: self.hi,
        }
    }

    /// Multiplies by the monomial `z^e` (exact, no q-shift).
    pub fn shift_exps(&self, e: &ExpVec) -> Self {
        LaurentPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.add(e), c.clone()))
                .collect(),
            hi: self.hi,
        }
    }

    /// Ring product. Term windows follow [`QSeries::mul`]; the global ceiling
    /// accounts for unknown tails of either factor meeting stored terms of the
    /// other.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let hi = add_hi(self.hi, other.q_valuation())
            .min(add_hi(other.hi, self.q_valuation()));
        let mut acc: BTreeMap<ExpVec, QSeries> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let prod = ca.mul(cb);
                let e = ea.add(eb);
                match acc.entry(e) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let s = o.get().add(&prod);
                        *o.get_mut() = s;
                    }
                }
            }
        }
        let mut out = Self::zero(self.arity, hi);
        for (e, c) in acc {
            if !c.is_zero() {
                out.terms.insert(e, c);
            }
        }
        Ok(out.truncate(hi))
    }

    /// Product truncated at `hi` after every partial sum, to keep work bounded.
    pub fn mul_trunc(&self, other: &Self, hi: i64) -> Result<Self> {
        Ok(self.truncate(hi).mul(&other.truncate(hi))?.truncate(hi))
    }

    /// Substitutes `z_var -> sign * q^qshift * z^exps`.
    ///
    /// Stored terms are transported exactly. For the unknown tail the new
    /// global ceiling assumes the tail's `z_var`-exponents lie outside the
    /// stored range extended by one step on each side, which holds for the
    /// theta-type series built here (their q-order grows with |exponent|).
    pub fn subst(&self, var: usize, image: &VarImage) -> Result<Self> {
        if image.exps.len() != self.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: image.exps.len(),
            });
        }
        let hi = if image.qshift == 0 || self.hi == EXACT {
            self.hi
        } else {
            let (lo_e, hi_e) = self
                .terms
                .keys()
                .map(|e| e.0[var])
                .minmax()
                .into_option()
                .unwrap_or((0, 0));
            let worst = (image.qshift * (lo_e - 1)).min(image.qshift * (hi_e + 1)).min(0);
            self.hi + worst
        };
        let mut out = Self::zero(self.arity, hi);
        for (e, c) in &self.terms {
            let p = e.0[var];
            let mut ne = e.clone();
            ne.0[var] = 0;
            let ne = ne.add(&image.exps.scale(p));
            let mut nc = c.shift(image.qshift * p);
            if image.sign < 0 && p.rem_euclid(2) == 1 {
                nc = nc.neg();
            }
            out.add_term(ne, nc);
        }
        Ok(out.truncate(hi))
    }

    /// Renames variables: variable `j` of `self` becomes variable `map[j]` of
    /// a polynomial of arity `new_arity`.
    pub fn embed(&self, new_arity: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.arity);
        LaurentPoly {
            arity: new_arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut v = vec![0; new_arity];
                    for (j, &x) in e.0.iter().enumerate() {
                        v[map[j]] += x;
                    }
                    (ExpVec(v), c.clone())
                })
                .collect(),
            hi: self.hi,
        }
    }

    /// Removes variable `var`, which must not occur in any term.
    pub fn drop_var(&self, var: usize) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e.0[var] != 0 {
                return Err(Error::BadParameter(format!(
                    "variable z{} still occurs in {e}",
                    var + 1
                )));
            }
            let mut v = e.0.clone();
            v.remove(var);
            terms.insert(ExpVec(v), c.clone());
        }
        Ok(LaurentPoly {
            arity: self.arity - 1,
            terms,
            hi: self.hi,
        })
    }

    /// Sets `z_var = 1` and removes the variable.
    pub fn eval_var_at_one(&self, var: usize) -> Result<Self> {
        self.subst(var, &VarImage::one(self.arity))?.drop_var(var)
    }

    /// Sum of `p` over all coordinate permutations, signed if requested.
    pub fn symmetrize(&self, signed: bool) -> Self {
        let mut out = Self::zero(self.arity, self.hi);
        for perm in (0..self.arity).permutations(self.arity) {
            let sgn = if signed { permutation_sign(&perm) } else { 1 };
            for (e, c) in &self.terms {
                let mut v = vec![0; self.arity];
                for (j, &x) in e.0.iter().enumerate() {
                    v[perm[j]] = x;
                }
                out.add_term(ExpVec(v), if sgn < 0 { c.neg() } else { c.clone() });
            }
        }
        out.truncate(self.hi)
    }

    /// Coordinate permutation: variable `j` moves to position `perm[j]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        self.embed(self.arity, perm)
    }

    /// Coefficients of `q^m` as an exact sparse polynomial in `z`.
    pub fn q_slice(&self, m: i64) -> BTreeMap<ExpVec, Rational> {
        self.terms
            .iter()
            .filter_map(|(e, c)| {
                let x = c.coeff(m);
                (!x.is_zero()).then(|| (e.clone(), x))
            })
            .collect()
    }

    /// Reassembles a polynomial from q-slices `[(m, slice)]` with ceiling `hi`.
    pub fn from_slices(arity: usize, slices: impl IntoIterator<Item = (i64, BTreeMap<ExpVec, Rational>)>, hi: i64) -> Self {
        let mut per_term: BTreeMap<ExpVec, BTreeMap<i64, Rational>> = BTreeMap::new();
        for (m, slice) in slices {
            for (e, c) in slice {
                per_term.entry(e).or_default().insert(m, c);
            }
        }
        let mut out = Self::zero(arity, hi);
        for (e, cs) in per_term {
            let lo = *cs.keys().next().expect("nonempty");
            let top = *cs.keys().next_back().expect("nonempty");
            let mut v = vec![Rational::zero(); (top - lo + 1) as usize];
            for (m, c) in cs {
                v[(m - lo) as usize] = c;
            }
            let s = QSeries::from_coeffs(lo, v, hi);
            if !s.is_zero() {
                out.terms.insert(e, s);
            }
        }
        out
    }

    /// Lowest-order nonzero coefficient: smallest q-exponent, ties broken by
    /// exponent vector.
    pub fn first_term(&self) -> Option<(i64, ExpVec, Rational)> {
        self.terms
            .iter()
            .filter_map(|(e, c)| c.valuation().map(|v| (v, e)))
            .min()
            .map(|(v, e)| (v, e.clone(), self.terms[e].coeff(v)))
    }

    /// Total z-degrees present in the support.
    pub fn degrees(&self) -> std::collections::BTreeSet<i64> {
        self.terms.keys().map(ExpVec::degree).collect()
    }

    /// Evaluates every `z_j = 1`, leaving a q-series.
    pub fn eval_all_ones(&self) -> QSeries {
        self.terms
            .values()
            .fold(QSeries::zero(self.hi), |acc, c| acc.add(c))
    }

    /// Specializes `q` to a rational, truncating inexact coefficients at `qorder`.
    pub fn eval_q(&self, q: &Rational, qorder: i64) -> Result<BTreeMap<ExpVec, Rational>> {
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let x = c.eval_truncated(q, qorder)?;
            if !x.is_zero() {
                out.insert(e.clone(), x);
            }
        }
        Ok(out)
    }
}

/// Sign of a permutation given as an image vector.
pub fn permutation_sign(perm: &[usize]) -> i64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mono = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(j, &x)| if x == 1 { format!("z{}", j + 1) } else { format!("z{}^{x}", j + 1) })
                .join("*");
            let coeff = if c.is_exact() && c.lo() == 0 && c.iter().count() == 1 {
                format_rational(&c.coeff(0))
            } else {
                format!("[{c}]")
            };
            if mono.is_empty() {
                write!(f, "{coeff}")?;
            } else if coeff == "1" {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{coeff}*{mono}")?;
            }
        }
        if self.hi != EXACT {
            write!(f, " + O(q^{})", self.hi)?;
        }
        Ok(())
    }
}

/// Convenience: an exact polynomial with rational coefficients from
/// `(coefficient, exponents)` pairs.
pub fn poly(arity: usize, terms: &[(i64, &[i64])]) -> LaurentPoly {
    let mut p = LaurentPoly::exact_zero(arity);
    for (c, e) in terms {
        p.add_term(ExpVec(e.to_vec()), QSeries::constant(Rational::from_integer((*c).into())));
    }
    p
}
