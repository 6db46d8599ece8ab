//! Functional realization: graded algebra elements as (anti)symmetric Laurent
//! polynomials, and the shuffle product that mirrors the algebra product.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::{permutation_sign, rat, ExpVec, LaurentPoly, QSeries, Rational, EXACT};

/// Commuting generators `x_i` or anticommuting `xi_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Bosonic,
    Fermionic,
}

impl Kind {
    pub fn signed(self) -> bool {
        self == Kind::Fermionic
    }
}

/// A monomial `x_{i_1}^{a_1} ... x_{i_m}^{a_m}` with strictly increasing indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(i64, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    /// From a multiset of indices in any order.
    pub fn from_indices(indices: &[i64]) -> Self {
        let mut v = indices.to_vec();
        v.sort_unstable();
        Monomial(
            v.into_iter()
                .chunk_by(|&i| i)
                .into_iter()
                .map(|(i, g)| (i, g.count() as u32))
                .collect(),
        )
    }

    pub fn factors(&self) -> &[(i64, u32)] {
        &self.0
    }

    /// Indices with repetition, nondecreasing.
    pub fn indices(&self) -> Vec<i64> {
        self.0
            .iter()
            .flat_map(|&(i, a)| std::iter::repeat_n(i, a as usize))
            .collect()
    }

    /// Weight `l = sum a_j`.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|&(_, a)| a as usize).sum()
    }

    /// Weighted degree `n = sum a_j i_j`.
    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&(i, a)| i * a as i64).sum()
    }

    pub fn is_squarefree(&self) -> bool {
        self.0.iter().all(|&(_, a)| a == 1)
    }

    /// Order of the stabilizer of the exponent vector: `prod a_j!`.
    pub fn stabilizer_order(&self) -> u64 {
        self.0
            .iter()
            .map(|&(_, a)| (1..=a as u64).product::<u64>())
            .product()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.0.first().map(|&(i, _)| i)
    }

    pub fn max_index(&self) -> Option<i64> {
        self.0.last().map(|&(i, _)| i)
    }

    /// Adds `k` to every index.
    pub fn shift(&self, k: i64) -> Self {
        Monomial(self.0.iter().map(|&(i, a)| (i + k, a)).collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let s = self
            .0
            .iter()
            .map(|&(i, a)| if a == 1 { format!("x{i}") } else { format!("x{i}^{a}") })
            .join("*");
        write!(f, "{s}")
    }
}

/// Product of two monomials of the given kind: `None` if a fermionic square
/// appears, otherwise the product and the sign of reordering `m1 m2` into
/// increasing index order.
pub fn monomial_product(kind: Kind, m1: &Monomial, m2: &Monomial) -> Option<(Monomial, i64)> {
    match kind {
        Kind::Bosonic => {
            let mut all = m1.indices();
            all.extend(m2.indices());
            Some((Monomial::from_indices(&all), 1))
        }
        Kind::Fermionic => {
            if !m1.is_squarefree() || !m2.is_squarefree() {
                return None;
            }
            let a = m1.indices();
            let b = m2.indices();
            // Inversions between the two sorted blocks.
            let mut inversions = 0usize;
            for x in &a {
                for y in &b {
                    match x.cmp(y) {
                        std::cmp::Ordering::Equal => return None,
                        std::cmp::Ordering::Greater => inversions += 1,
                        std::cmp::Ordering::Less => {}
                    }
                }
            }
            let mut all = a;
            all.extend(b);
            Some((
                Monomial::from_indices(&all),
                if inversions.is_multiple_of(2) { 1 } else { -1 },
            ))
        }
    }
}

/// A homogeneous element of the graded algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    kind: Kind,
    terms: BTreeMap<Monomial, QSeries>,
    grade: (i64, usize),
}

impl AlgebraElement {
    pub fn zero(kind: Kind, grade: (i64, usize)) -> Self {
        AlgebraElement {
            kind,
            terms: BTreeMap::new(),
            grade,
        }
    }

    /// Builds from terms, checking homogeneity (and squarefreeness for
    /// fermionic elements).
    pub fn new(kind: Kind, terms: impl IntoIterator<Item = (Monomial, QSeries)>) -> Result<Self> {
        let mut out: Option<AlgebraElement> = None;
        for (m, c) in terms {
            if kind == Kind::Fermionic && !m.is_squarefree() {
                return Err(Error::BadParameter(format!("fermionic monomial {m} has a square")));
            }
            let g = (m.degree(), m.weight());
            let e = out.get_or_insert_with(|| AlgebraElement::zero(kind, g));
            if e.grade != g {
                return Err(Error::NotHomogeneous(format!(
                    "{m} has grade {g:?}, expected {:?}",
                    e.grade
                )));
            }
            e.add_term(m, c);
        }
        out.ok_or_else(|| Error::BadParameter("empty element needs an explicit grade".into()))
    }

    pub fn monomial(kind: Kind, m: Monomial) -> Result<Self> {
        Self::new(kind, [(m, QSeries::one())])
    }

    fn add_term(&mut self, m: Monomial, c: QSeries) {
        let e = self.terms.entry(m.clone()).or_insert_with(QSeries::exact_zero);
        *e = e.add(&c);
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn grade(&self) -> (i64, usize) {
        self.grade
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QSeries)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Algebra product with fermionic reordering signs.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.kind != other.kind {
            return Err(Error::BadParameter("cannot multiply bosonic and fermionic elements".into()));
        }
        let grade = (self.grade.0 + other.grade.0, self.grade.1 + other.grade.1);
        let mut out = AlgebraElement::zero(self.kind, grade);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((m, s)) = monomial_product(self.kind, m1, m2) {
                    out.add_term(m, c1.mul(c2).scale(&rat(s)));
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let s = self.terms.iter().map(|(m, c)| format!("[{c}]*{m}")).join(" + ");
        write!(f, "{s}")
    }
}

/// `psi_l`: the (signed) orbit sum of `z_1^{i_1} ... z_l^{i_l}` for every monomial.
pub fn psi(e: &AlgebraElement) -> LaurentPoly {
    let l = e.grade.1;
    let mut out = LaurentPoly::exact_zero(l);
    for (m, c) in &e.terms {
        let base = LaurentPoly::monomial(ExpVec(m.indices()), c.clone());
        let orbit = base.symmetrize(e.kind.signed());
        out = out.add(&orbit).expect("same arity");
    }
    out
}

fn check_symmetry(p: &LaurentPoly, kind: Kind) -> Result<()> {
    let l = p.arity();
    if l < 2 {
        return Ok(());
    }
    // S_l is generated by (0 1) and the cycle (0 1 .. l-1).
    let mut swap: Vec<usize> = (0..l).collect();
    swap.swap(0, 1);
    let cycle: Vec<usize> = (0..l).map(|j| (j + 1) % l).collect();
    for perm in [swap, cycle] {
        let image = p.permute(&perm);
        let expected = if kind.signed() && permutation_sign(&perm) < 0 {
            p.neg()
        } else {
            p.clone()
        };
        if image != expected {
            let bad = image.sub(&expected)?.first_term();
            let detail = bad.map_or_else(String::new, |(v, e, _)| format!("at q^{v} z^{e}"));
            return Err(match kind {
                Kind::Bosonic => Error::NotSymmetric(detail),
                Kind::Fermionic => Error::NotAntisymmetric(detail),
            });
        }
    }
    Ok(())
}

/// Inverse of [`psi`] on (anti)symmetric polynomials.
pub fn psi_inverse(p: &LaurentPoly, kind: Kind) -> Result<AlgebraElement> {
    check_symmetry(p, kind)?;
    let l = p.arity();
    let mut terms = Vec::new();
    for (e, c) in p.terms() {
        if !e.0.windows(2).all(|w| w[0] <= w[1]) {
            continue;
        }
        let m = Monomial::from_indices(&e.0);
        match kind {
            Kind::Bosonic => {
                let s = Rational::from_integer((m.stabilizer_order() as i64).into());
                terms.push((m, c.scale(&s.recip())));
            }
            Kind::Fermionic => {
                if !m.is_squarefree() {
                    return Err(Error::NotAntisymmetric(format!(
                        "nonzero coefficient on the diagonal at z^{e}"
                    )));
                }
                terms.push((m, c.clone()));
            }
        }
    }
    if terms.is_empty() {
        return Ok(AlgebraElement::zero(kind, (0, l)));
    }
    AlgebraElement::new(kind, terms)
}

/// The product of realizations: sum over `(a, b)`-shuffles of
/// `f(z_S) g(z_{S^c})`, signed by the shuffle in the fermionic case.
pub fn product_fr1(f: &LaurentPoly, g: &LaurentPoly, kind: Kind) -> Result<LaurentPoly> {
    let (a, b) = (f.arity(), g.arity());
    let n = a + b;
    let mut out = LaurentPoly::exact_zero(n);
    for s in (0..n).combinations(a) {
        let rest: Vec<usize> = (0..n).filter(|j| !s.contains(j)).collect();
        let fe = f.embed(n, &s);
        let ge = g.embed(n, &rest);
        let mut term = fe.mul(&ge)?;
        if kind.signed() {
            let perm: Vec<usize> = s.iter().chain(&rest).copied().collect();
            if permutation_sign(&perm) < 0 {
                term = term.neg();
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// `f_a(z_1, z_2) = z_1^{k_a} + z_2^{k_a} + sum_j u_{a,j} (z_1^{-j} z_2^{k_a+j} + z_1^{k_a+j} z_2^{-j})`.
///
/// `u` is keyed by `(a, j)` with `a` indexing `shifts`.
pub fn generator_genfun(u: &BTreeMap<(usize, i64), QSeries>, shifts: &[i64]) -> Vec<LaurentPoly> {
    shifts
        .iter()
        .enumerate()
        .map(|(a, &k)| {
            let mut p = LaurentPoly::exact_zero(2);
            p.add_term(ExpVec(vec![k, 0]), QSeries::one());
            p.add_term(ExpVec(vec![0, k]), QSeries::one());
            for (&(_, j), c) in u.range((a, i64::MIN)..=(a, i64::MAX)) {
                if c.is_zero() {
                    continue;
                }
                p.add_term(ExpVec(vec![-j, k + j]), c.clone());
                p.add_term(ExpVec(vec![k + j, -j]), c.clone());
            }
            let hi = u
                .range((a, i64::MIN)..=(a, i64::MAX))
                .map(|(_, c)| c.hi())
                .fold(EXACT, i64::min);
            p.truncate(hi)
        })
        .collect()
}

/// Helper for tests and families: `sum_i c_i * monomial_i` over rationals.
pub fn element_from_pairs(kind: Kind, pairs: &[(i64, &[i64])]) -> Result<AlgebraElement> {
    AlgebraElement::new(
        kind,
        pairs
            .iter()
            .filter(|(c, _)| *c != 0)
            .map(|(c, idx)| (Monomial::from_indices(idx), QSeries::constant(rat(*c)))),
    )
}
