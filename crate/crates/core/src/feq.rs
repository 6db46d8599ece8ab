//! Functional equations for relations between relations.
//!
//! A relation `sum_u v_u x_{m_u} y_{a_u, i_u} = 0` is checked in its
//! functional realization: the product of `z^{m}` with the realization of
//! `y_{a,i}` is formed with [`product_fr1`], which gives the cyclic sums of
//! (fa)/(fah) in the bosonic case and their signed analogs in the fermionic
//! case. Two index patterns are supported:
//!
//! - quadratic, label `j`: `x_{s - 2j - k_a} y_{a,j}` (Eq. (rel1) at `i = 0`);
//! - higher degree `k`, label `beta`: `x_{k beta} y_{1 - beta}` (Eq. (relh1) at `j = 0`).
//!
//! The realization of `y_{a,i}` is `(z_1 ... z_d)^i F_a` with `F_a` the
//! realization of `y_{a,0}`.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::algebra::{CutoffAlgebra, IdealFamily};
use crate::error::{Error, Result};
use crate::funcreal::{monomial_product, psi, AlgebraElement, Kind, Monomial};
use crate::linalg;
use crate::report::{residual_record, CheckRecord};
use crate::ring::{ExpVec, LaurentPoly, QSeries, Rational};

/// Coefficients `v_{a,j}` (or `b_beta`, with `a = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct RelationVector {
    pub s: i64,
    pub entries: BTreeMap<(usize, i64), QSeries>,
}

impl RelationVector {
    pub fn new(s: i64) -> Self {
        RelationVector {
            s,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a vector from `(a, j, coefficient)` triples, dropping zeros.
    pub fn from_entries(s: i64, entries: impl IntoIterator<Item = ((usize, i64), QSeries)>) -> Self {
        RelationVector {
            s,
            entries: entries.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// `b_beta = (-1)^beta q^{beta(beta-1)/2}` for `|beta| <= window`, cut at `qorder`.
    pub fn theta(s: i64, window: i64, qorder: i64) -> Self {
        Self::from_entries(
            s,
            (-window..=window).map(|b| {
                let sign = if b % 2 == 0 { 1 } else { -1 };
                ((0, b), QSeries::monomial(crate::ring::rat(sign), b * (b - 1) / 2).truncate(qorder))
            }),
        )
    }

    pub fn get(&self, a: usize, j: i64) -> QSeries {
        self.entries.get(&(a, j)).cloned().unwrap_or_else(QSeries::exact_zero)
    }

    /// Entries specialized at `q` (inexact series truncated at `qorder`).
    pub fn eval(&self, q: &Rational, qorder: i64) -> Result<BTreeMap<(usize, i64), Rational>> {
        self.entries
            .iter()
            .map(|(k, c)| Ok((*k, c.eval_truncated(q, qorder)?)))
            .collect()
    }
}

/// Which relation shape the unknowns follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// `x_{s - 2j - k_a} y_{a,j}`.
    Quadratic { s: i64 },
    /// `x_{k beta} y_{1 - beta}` for generators of degree `k`.
    Higher { k: usize },
}

/// Generators as realizations, with the relation pattern to solve for.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub kind: Kind,
    /// `k_a` for quadratic families; `[k(k-1)/2]` for degree `k`.
    pub shifts: Vec<i64>,
    /// Realizations of `y_{a,0}`.
    pub f_list: Vec<LaurentPoly>,
    pub pattern: Pattern,
    /// Coefficients are known on every monomial of exponent spread `<= S`
    /// (zero ones included); terms beyond it were not materialized.
    pub known_spread: i64,
    /// Coefficients are exact series, so `q` may be specialized. Otherwise
    /// they are truncated and only a formal-q solve is sound.
    pub exact: bool,
}

fn exps_spread(e: &[i64]) -> i64 {
    e.iter().max().unwrap_or(&0) - e.iter().min().unwrap_or(&0)
}

fn check_symmetry(f: &LaurentPoly, kind: Kind) -> Result<()> {
    let n = f.arity();
    for a in 0..n.saturating_sub(1) {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(a, a + 1);
        let g = f.permute(&perm);
        let want = if kind.signed() { f.neg() } else { f.clone() };
        if !g.sub(&want)?.is_zero() {
            return Err(match kind {
                Kind::Bosonic => Error::NotSymmetric(format!("swapping z{} and z{}", a + 1, a + 2)),
                Kind::Fermionic => Error::NotAntisymmetric(format!("swapping z{} and z{}", a + 1, a + 2)),
            });
        }
    }
    Ok(())
}

fn check_degree(f: &LaurentPoly, deg: i64) -> Result<()> {
    match f.terms().find(|(e, _)| e.degree() != deg) {
        Some((e, _)) => Err(Error::NotHomogeneous(format!("z^{e} has degree {} != {deg}", e.degree()))),
        None => Ok(()),
    }
}

impl FamilySpec {
    /// Quadratic generators `f_a(z_1, z_2)` as in Eq. (f1).
    pub fn quadratic(kind: Kind, shifts: Vec<i64>, f_list: Vec<LaurentPoly>, s: i64) -> Result<Self> {
        if shifts.len() != f_list.len() {
            return Err(Error::ArityMismatch {
                left: shifts.len(),
                right: f_list.len(),
            });
        }
        for (f, &k) in f_list.iter().zip(&shifts) {
            if f.arity() != 2 {
                return Err(Error::ArityMismatch {
                    left: 2,
                    right: f.arity(),
                });
            }
            check_symmetry(f, kind)?;
            check_degree(f, k)?;
        }
        let exact = f_list.iter().all(LaurentPoly::is_exact);
        Ok(FamilySpec {
            kind,
            shifts,
            f_list,
            pattern: Pattern::Quadratic { s },
            known_spread: i64::MAX,
            exact,
        })
    }

    /// One generator of degree `k` given by its realization `F = psi(y_0)`.
    pub fn higher(kind: Kind, k: usize, realization: LaurentPoly) -> Result<Self> {
        if realization.arity() != k {
            return Err(Error::ArityMismatch {
                left: k,
                right: realization.arity(),
            });
        }
        check_symmetry(&realization, kind)?;
        let deg = (k * (k - 1) / 2) as i64;
        check_degree(&realization, deg)?;
        let exact = realization.is_exact();
        Ok(FamilySpec {
            kind,
            shifts: vec![deg],
            f_list: vec![realization],
            pattern: Pattern::Higher { k },
            known_spread: i64::MAX,
            exact,
        })
    }

    /// From `f` in the convention of Eq. (fh1): `F = (z_1 ... z_k)^{-1} f`.
    pub fn from_fh1(k: usize, f: &LaurentPoly) -> Result<Self> {
        Self::higher(Kind::Bosonic, k, f.shift_exps(&ExpVec(vec![-1; k])))
    }

    /// Realizations of a built-in family's generators, materialized up to
    /// offset spread `spread`. Degree-2 families use the quadratic pattern
    /// with label `s`; higher degrees use the (relh1) pattern.
    pub fn from_family(fam: &IdealFamily, s: i64, spread: i64) -> Result<Self> {
        let templates = fam.templates(spread)?;
        let mut shifts = Vec::new();
        let mut f_list = Vec::new();
        for t in &templates {
            let elem = AlgebraElement::new(
                fam.kind(),
                t.iter().map(|(c, o)| (Monomial::from_indices(o), c.clone())),
            )?;
            let mut f = psi(&elem);
            if let Some(m) = fam.truncation() {
                f = f.truncate(m);
            }
            shifts.push(t.first().map_or(0, |(_, o)| o.iter().sum::<i64>()));
            f_list.push(f);
        }
        let d = fam.degree();
        let pattern = if d == 2 {
            Pattern::Quadratic { s }
        } else {
            if templates.len() != 1 {
                return Err(Error::BadParameter("higher-degree pattern needs one generator".into()));
            }
            Pattern::Higher { k: d }
        };
        Ok(FamilySpec {
            kind: fam.kind(),
            shifts,
            f_list,
            pattern,
            known_spread: spread,
            exact: fam.truncation().is_none(),
        })
    }

    fn degree(&self) -> usize {
        match self.pattern {
            Pattern::Quadratic { .. } => 2,
            Pattern::Higher { k } => k,
        }
    }

    pub fn s(&self) -> i64 {
        match self.pattern {
            Pattern::Quadratic { s } => s,
            Pattern::Higher { .. } => 0,
        }
    }

    /// Index of the `x` factor for unknown `(a, label)`.
    pub fn x_index(&self, a: usize, label: i64) -> i64 {
        match self.pattern {
            Pattern::Quadratic { s } => s - 2 * label - self.shifts[a],
            Pattern::Higher { k } => k as i64 * label,
        }
    }

    /// Index of the `y` factor for unknown `(a, label)`.
    pub fn y_index(&self, label: i64) -> i64 {
        match self.pattern {
            Pattern::Quadratic { .. } => label,
            Pattern::Higher { .. } => 1 - label,
        }
    }

    /// The label whose `x` factor is `x_m`, if any.
    fn label_for_x(&self, a: usize, m: i64) -> Option<i64> {
        let (num, den) = match self.pattern {
            Pattern::Quadratic { s } => (s - self.shifts[a] - m, 2),
            Pattern::Higher { k } => (m, k as i64),
        };
        (num.rem_euclid(den) == 0).then_some(num.div_euclid(den))
    }

    /// Realization of `x_{m} y_{a,i}` for unknown `(a, label)`.
    pub fn term(&self, a: usize, label: i64, qorder: i64) -> Result<LaurentPoly> {
        let d = self.degree();
        let x = LaurentPoly::monomial(ExpVec(vec![self.x_index(a, label)]), QSeries::one());
        let y = self.f_list[a].shift_exps(&ExpVec(vec![self.y_index(label); d]));
        let p = crate::funcreal::product_fr1(&x, &y, self.kind)?;
        Ok(if p.is_exact() && self.exact {
            p
        } else {
            p.truncate(qorder)
        })
    }

    fn is_empty(&self) -> bool {
        self.f_list.iter().all(LaurentPoly::is_zero)
    }
}

/// The residual `sum_u v_u psi(x_{m_u} y_{a_u, i_u})`, cut at `qorder`.
pub fn residual(fam: &FamilySpec, v: &RelationVector, qorder: i64) -> Result<LaurentPoly> {
    let mut acc = LaurentPoly::zero(fam.degree() + 1, qorder);
    for (&(a, j), c) in &v.entries {
        if a >= fam.f_list.len() {
            return Err(Error::BadParameter(format!("relation entry for generator {a}")));
        }
        let t = fam.term(a, j, qorder)?.truncate(qorder);
        acc = acc.add(&t.scale(c).truncate(qorder))?;
    }
    Ok(acc.truncate(qorder))
}

/// Checks Eq. (fa1) (or its signed analog) for the given `g_{a,s}`.
pub fn check_fa1(fam: &FamilySpec, g: &RelationVector, qorder: i64) -> Result<CheckRecord> {
    if !matches!(fam.pattern, Pattern::Quadratic { .. }) {
        return Err(Error::BadParameter("check_fa1 needs a quadratic family".into()));
    }
    let r = residual(fam, g, qorder)?;
    Ok(residual_record(&format!("(fa1) s={}", fam.s()), &r, 0)?.detail("terms", g.entries.len()))
}

/// Checks Eq. (fah1) for `f` in the convention of Eq. (fh1) and `g(z) = sum b_beta z^beta`.
pub fn check_fah1(k: usize, f: &LaurentPoly, b: &RelationVector, qorder: i64) -> Result<CheckRecord> {
    let deg = (k * (k + 1) / 2) as i64;
    if f.arity() != k {
        return Err(Error::ArityMismatch {
            left: k,
            right: f.arity(),
        });
    }
    check_symmetry(f, Kind::Bosonic)?;
    check_degree(f, deg)?;
    let fam = FamilySpec::from_fh1(k, f)?;
    let r = residual(&fam, b, qorder)?;
    Ok(residual_record(&format!("(fah1) k={k}"), &r, 0)?.detail("terms", b.entries.len()))
}

/// How a relation space was solved.
#[derive(Clone, Debug, PartialEq)]
pub enum SolveMode {
    /// Exact coefficients specialized at `q`.
    Specialized { q: Rational },
    /// Truncated coefficients; kernel over `Q((q))` modulo `q^precision`.
    FormalQ { precision: i64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationSpace {
    pub dimension: usize,
    pub basis: Vec<RelationVector>,
    pub mode: SolveMode,
    pub unknowns: usize,
    pub equations: usize,
}

/// Solves for all relations with labels `|j| <= jwindow`.
///
/// One equation per monomial produced by some unknown. An equation is kept
/// only if every unknown that could contribute to it lies in the window and
/// every generator coefficient it involves was materialized.
/// Families with truncated coefficients are solved over formal `q`.
pub fn solve_relation_space(fam: &FamilySpec, jwindow: i64, q: &Rational, qorder: i64) -> Result<RelationSpace> {
    if fam.is_empty() {
        return Err(Error::EmptySystem("every generator is zero".into()));
    }
    let d = fam.degree();
    let unknowns: Vec<(usize, i64)> = (0..fam.f_list.len())
        .flat_map(|a| (-jwindow..=jwindow).map(move |j| (a, j)))
        .collect();
    let terms: Vec<LaurentPoly> = unknowns
        .iter()
        .map(|&(a, j)| fam.term(a, j, qorder))
        .collect::<Result<_>>()?;
    let mut monomials: BTreeMap<ExpVec, ()> = BTreeMap::new();
    for t in &terms {
        for (e, c) in t.terms() {
            if !c.is_zero() {
                monomials.insert(e.clone(), ());
            }
        }
    }
    let keep = |e: &ExpVec| -> bool {
        (0..=d).all(|c| {
            (0..fam.f_list.len()).all(|a| match fam.label_for_x(a, e.0[c]) {
                None => true,
                Some(l) if l.abs() > jwindow => false,
                Some(_) => {
                    let rest: Vec<i64> = e.0.iter().enumerate().filter(|(i, _)| *i != c).map(|(_, &x)| x).collect();
                    exps_spread(&rest) <= fam.known_spread
                }
            })
        })
    };
    let rows_keys: Vec<ExpVec> = monomials.into_keys().filter(keep).collect();
    let index: HashMap<&ExpVec, usize> = rows_keys.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let n = unknowns.len();
    let s = fam.s();
    let to_vector = |v: Vec<QSeries>| {
        RelationVector::from_entries(s, unknowns.iter().copied().zip(v))
    };
    match fam.exact {
        true => {
            let mut rows = vec![vec![Rational::zero(); n]; rows_keys.len()];
            for (u, t) in terms.iter().enumerate() {
                for (e, c) in t.terms() {
                    if let Some(&r) = index.get(e) {
                        rows[r][u] = c.eval_truncated(q, qorder)?;
                    }
                }
            }
            let kernel = linalg::kernel(&rows, n);
            Ok(RelationSpace {
                dimension: kernel.len(),
                basis: kernel
                    .into_iter()
                    .map(|v| to_vector(v.into_iter().map(QSeries::constant).collect()))
                    .collect(),
                mode: SolveMode::Specialized { q: q.clone() },
                unknowns: n,
                equations: rows_keys.len(),
            })
        }
        false => {
            let mut rows = vec![vec![QSeries::zero(qorder); n]; rows_keys.len()];
            for (u, t) in terms.iter().enumerate() {
                for (e, c) in t.terms() {
                    if let Some(&r) = index.get(e) {
                        rows[r][u] = c.truncate(qorder);
                    }
                }
            }
            let k = linalg::series_kernel(&rows, n)?;
            Ok(RelationSpace {
                dimension: k.basis.len(),
                basis: k.basis.into_iter().map(to_vector).collect(),
                mode: SolveMode::FormalQ { precision: k.precision },
                unknowns: n,
                equations: rows_keys.len(),
            })
        }
    }
}

/// `D_s` for the monomial ideal generated by `x_i x_{i + k_a}`.
pub fn ds_monomial(shifts: &[i64], s: i64, jwindow: i64) -> Result<usize> {
    let mut sorted = shifts.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != shifts.len() || shifts.iter().any(|&k| k < 0) {
        return Err(Error::BadParameter("shifts must be distinct and nonnegative".into()));
    }
    let f_list = shifts
        .iter()
        .map(|&k| {
            let mut p = LaurentPoly::exact_zero(2);
            p.add_term(ExpVec(vec![k, 0]), QSeries::one());
            p.add_term(ExpVec(vec![0, k]), QSeries::one());
            p
        })
        .collect();
    let fam = FamilySpec::quadratic(Kind::Bosonic, shifts.to_vec(), f_list, s)?;
    Ok(solve_relation_space(&fam, jwindow, &Rational::zero(), 1)?.dimension)
}

/// The algebra-side combination `sum v x_{i + m} y_{a, i + i_u}` in the
/// cutoff algebra, specialized at `q`. Zero entries are omitted.
pub fn algebra_side(
    alg: &CutoffAlgebra,
    fam: &IdealFamily,
    spec: &FamilySpec,
    v: &RelationVector,
    i: i64,
    q: &Rational,
    qorder: i64,
) -> Result<BTreeMap<Monomial, Rational>> {
    let templates = fam.templates(2 * alg.n)?;
    let mut out: BTreeMap<Monomial, Rational> = BTreeMap::new();
    for (&(a, j), c) in &v.entries {
        let c = c.eval_truncated(q, qorder)?;
        let m = i + spec.x_index(a, j);
        if m.abs() > alg.n {
            continue;
        }
        let x = Monomial::from_indices(&[m]);
        let base = i + spec.y_index(j);
        for (coef, offs) in &templates[a] {
            let idx: Vec<i64> = offs.iter().map(|o| o + base).collect();
            if idx.iter().any(|t| t.abs() > alg.n) {
                continue;
            }
            let g = Monomial::from_indices(&idx);
            if alg.kind == Kind::Fermionic && !g.is_squarefree() {
                continue;
            }
            if let Some((p, sign)) = monomial_product(alg.kind, &x, &g) {
                let val = &c * coef.eval_truncated(q, qorder)? * Rational::from_integer(sign.into());
                let e = out.entry(p).or_insert_with(Rational::zero);
                *e += val;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{poly, rat, ratio};
    use crate::theta;

    fn z1_plus_z2() -> LaurentPoly {
        poly(2, &[(1, &[1, 0]), (1, &[0, 1])])
    }

    #[test]
    fn ds_examples() {
        assert_eq!(ds_monomial(&[1], 3, 6).unwrap(), 1);
        assert_eq!(ds_monomial(&[1], 2, 6).unwrap(), 0);
        for s in 1..=3 {
            assert_eq!(ds_monomial(&[0, 1], s, 6).unwrap(), 1, "s={s}");
        }
        assert!(ds_monomial(&[1, 1], 3, 6).is_err());
    }

    #[test]
    fn monomial_relation_vector() {
        let fam = FamilySpec::quadratic(Kind::Bosonic, vec![1], vec![z1_plus_z2()], 3).unwrap();
        let g = RelationVector::from_entries(3, [((0, 0), QSeries::constant(rat(-1))), ((0, 1), QSeries::one())]);
        assert!(!check_fa1(&fam, &g, 8).unwrap().status.is_fail());
        let space = solve_relation_space(&fam, 6, &rat(0), 1).unwrap();
        assert_eq!(space.dimension, 1);
        let v = &space.basis[0];
        assert!(linalg::proportional(
            &[v.get(0, 0).coeff(0), v.get(0, 1).coeff(0)],
            &[rat(-1), rat(1)]
        ));
        assert_eq!(v.entries.len(), 2);
    }

    #[test]
    fn lemma_5_2() {
        let f = theta::f1_series(8);
        let fam = FamilySpec::quadratic(Kind::Bosonic, vec![1], vec![f.clone()], 3).unwrap();
        let g = RelationVector::theta(3, 8, 8);
        let rec = check_fa1(&fam, &g, 8).unwrap();
        assert!(!rec.status.is_fail(), "{rec:?}");
        // A perturbed coefficient is detected.
        let mut bad = f.clone();
        bad.add_term(ExpVec(vec![3, -2]), QSeries::monomial(rat(1), 1));
        bad.add_term(ExpVec(vec![-2, 3]), QSeries::monomial(rat(1), 1));
        let fam = FamilySpec::quadratic(Kind::Bosonic, vec![1], vec![bad], 3).unwrap();
        assert!(check_fa1(&fam, &g, 8).unwrap().status.is_fail());
    }

    #[test]
    fn fah1_examples() {
        let b = RelationVector::theta(0, 8, 6);
        let f11 = poly(1, &[(1, &[1])]);
        assert!(!check_fah1(1, &f11, &b, 8).unwrap().status.is_fail());
        let f22 = theta::fnk_series(theta::FnkSpec::new(2, 2, 6).unwrap()).unwrap();
        let rec = check_fah1(2, &f22, &b, 6).unwrap();
        assert!(!rec.status.is_fail(), "{rec:?}");
    }

    #[test]
    fn theta_relation_space() {
        let fam = crate::algebra::builtin_family("theta-k1", &[]).unwrap();
        let spec = FamilySpec::from_family(&fam, 3, 60).unwrap();
        let q = ratio(1, 3);
        let space = solve_relation_space(&spec, 6, &q, 8).unwrap();
        assert_eq!(space.dimension, 1);
        let v = &space.basis[0];
        let got: Vec<Rational> = (-6..=6).map(|j| v.get(0, j).coeff(0)).collect();
        let want: Vec<Rational> = (-6..=6)
            .map(|b: i64| {
                let sign = if b % 2 == 0 { 1 } else { -1 };
                rat(sign) * crate::ring::pow_i(&q, b * (b - 1) / 2).unwrap()
            })
            .collect();
        assert!(linalg::proportional(&got, &want));
    }
}
