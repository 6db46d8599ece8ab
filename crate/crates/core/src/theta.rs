//! The theta series `g`, the quadratic series `f_1`, the family `f_{n,k}` and
//! the conjectural coefficient functions.
//!
//! `g(w) = sum_k (-1)^k w^k q^{k(k-1)/2}` for a Laurent monomial `w`. The family
//! `f_{n,k}` is built from the recurrence
//!
//! ```text
//! f_{n+1,k}(z) = -sum_i g(z_1^-1 .. z_i^k .. z_{n+1}^-1) f_{n,k}(.., ^z_i, ..) / g(z_1^-1 .. z_{n+1}^-1)
//! ```
//!
//! starting from `f_{1,k}(z) = z g(z^k) / g(z)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::report::{compare, residual_record, CheckRecord, Window};
use crate::ring::{
    divide_exact, pow_i, rat, ExpVec, LaurentPoly, QSeries, Rational, VarImage,
};

/// A Laurent monomial used as the argument of `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaArg {
    exps: ExpVec,
}

impl ThetaArg {
    pub fn new(exps: ExpVec) -> Result<Self> {
        if exps.is_empty() || exps.is_zero() {
            return Err(Error::BadParameter(
                "theta argument must be a nontrivial monomial".into(),
            ));
        }
        Ok(ThetaArg { exps })
    }

    /// `z_1^{e_1} ... z_n^{e_n}` from a slice.
    pub fn from_slice(exps: &[i64]) -> Result<Self> {
        Self::new(ExpVec(exps.to_vec()))
    }

    pub fn exps(&self) -> &ExpVec {
        &self.exps
    }

    pub fn arity(&self) -> usize {
        self.exps.len()
    }
}

/// `(n, k, qorder)` for [`fnk_series`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FnkSpec {
    pub n: usize,
    pub k: usize,
    pub qorder: i64,
}

impl FnkSpec {
    pub fn new(n: usize, k: usize, qorder: i64) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::BadParameter("n and k must be positive".into()));
        }
        if n > k + 1 {
            return Err(Error::BadParameter(format!(
                "f_{{{n},{k}}} vanishes identically for n > k + 1"
            )));
        }
        if qorder < 1 {
            return Err(Error::BadParameter("qorder must be at least 1".into()));
        }
        Ok(FnkSpec { n, k, qorder })
    }
}

fn check_qorder(qorder: i64) -> Result<()> {
    if qorder < 1 {
        return Err(Error::BadParameter("qorder must be at least 1".into()));
    }
    Ok(())
}

/// Integers `j` with `j(j-1)/2 < qorder`, i.e. the indices of `g` that survive
/// truncation.
pub fn theta_indices(qorder: i64) -> impl Iterator<Item = i64> {
    let mut r = 0i64;
    while (r + 1) * r / 2 < qorder {
        r += 1;
    }
    (-r..=r + 1).filter(move |j| j * (j - 1) / 2 < qorder)
}

/// The coefficient `b_j = (-1)^j q^{j(j-1)/2}` of `w^j` in `g(w)`.
pub fn theta_coefficient(j: i64) -> QSeries {
    let sign = if j.rem_euclid(2) == 0 { 1 } else { -1 };
    QSeries::monomial(rat(sign), j * (j - 1) / 2)
}

/// `g(w)` from the sum form, certified on `[0, qorder)`.
pub fn theta_g(arg: &ThetaArg, qorder: i64) -> LaurentPoly {
    let n = arg.arity();
    LaurentPoly::from_terms(
        n,
        theta_indices(qorder).map(|j| (arg.exps.scale(j), theta_coefficient(j))),
        qorder,
    )
}

/// `g(w)` from the triple product `(1-w) prod_i (1-q^i)(1-q^i w)(1-q^i/w)`.
pub fn theta_g_product(arg: &ThetaArg, qorder: i64) -> LaurentPoly {
    let n = arg.arity();
    let one = ExpVec::zeros(n);
    let w = arg.exps.clone();
    let w_inv = w.scale(-1);
    let factor = |e: &ExpVec, i: i64| {
        LaurentPoly::from_terms(
            n,
            [
                (one.clone(), QSeries::one()),
                (e.clone(), QSeries::monomial(rat(-1), i)),
            ],
            crate::ring::EXACT,
        )
    };
    let mut acc = factor(&w, 0).truncate(qorder);
    for i in 1..qorder {
        for e in [&one, &w, &w_inv] {
            acc = acc.mul_trunc(&factor(e, i), qorder).expect("same arity");
        }
    }
    acc
}

/// `f_1(z_1, z_2) = sum_i (-1)^i q^{i(3i-1)/2} (z_1^{3i} z_2^{1-3i} + z_1^{1-3i} z_2^{3i})`.
pub fn f1_series(qorder: i64) -> LaurentPoly {
    let mut p = LaurentPoly::zero(2, qorder);
    let mut i = 0i64;
    loop {
        let mut any = false;
        for j in if i == 0 { vec![0] } else { vec![i, -i] } {
            let e = j * (3 * j - 1) / 2;
            if e >= qorder {
                continue;
            }
            any = true;
            let c = QSeries::monomial(rat(if j % 2 == 0 { 1 } else { -1 }), e);
            p.add_term(ExpVec(vec![3 * j, 1 - 3 * j]), c.clone());
            p.add_term(ExpVec(vec![1 - 3 * j, 3 * j]), c);
        }
        if !any {
            break;
        }
        i += 1;
    }
    p.truncate(qorder)
}

type FnkMemo = Mutex<HashMap<(usize, usize), LaurentPoly>>;

fn memo() -> &'static FnkMemo {
    static MEMO: OnceLock<FnkMemo> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached `f_{n,k}` at the deepest order computed so far, truncated on the way out.
fn memo_get(n: usize, k: usize, qorder: i64) -> Option<LaurentPoly> {
    let m = memo().lock().unwrap_or_else(|e| e.into_inner());
    m.get(&(n, k))
        .filter(|p| p.certified_hi() >= qorder)
        .map(|p| p.truncate(qorder))
}

fn memo_put(n: usize, k: usize, p: &LaurentPoly) {
    let mut m = memo().lock().unwrap_or_else(|e| e.into_inner());
    let deeper = m
        .get(&(n, k))
        .is_none_or(|old| old.certified_hi() < p.certified_hi());
    if deeper {
        m.insert((n, k), p.clone());
    }
}

fn g_of(exps: Vec<i64>, qorder: i64) -> LaurentPoly {
    theta_g(&ThetaArg { exps: ExpVec(exps) }, qorder)
}

/// Numerator of the recurrence: `-sum_i g(z_1^-1 .. z_i^k .. z_{n+1}^-1) f_{n,k}(.., ^z_i, ..)`,
/// a polynomial in `n + 1` variables.
pub fn req_numerator(n: usize, k: usize, qorder: i64) -> Result<LaurentPoly> {
    let f = fnk_series(FnkSpec::new(n, k, qorder)?)?;
    let m = n + 1;
    let mut acc = LaurentPoly::zero(m, qorder);
    for i in 0..m {
        let mut exps = vec![-1; m];
        exps[i] = k as i64;
        let map: Vec<usize> = (0..m).filter(|&j| j != i).collect();
        let term = g_of(exps, qorder).mul_trunc(&f.embed(m, &map), qorder)?;
        acc = acc.sub(&term)?;
    }
    Ok(acc)
}

/// `f_{n,k}` truncated at `spec.qorder`.
pub fn fnk_series(spec: FnkSpec) -> Result<LaurentPoly> {
    let FnkSpec { n, k, qorder } = spec;
    if let Some(p) = memo_get(n, k, qorder) {
        return Ok(p);
    }
    let p = if n == 1 {
        let num = g_of(vec![k as i64], qorder).shift_exps(&ExpVec(vec![1]));
        divide_exact(&num, &g_of(vec![1], qorder), None)?
    } else {
        let num = req_numerator(n - 1, k, qorder)?;
        if num.is_zero() {
            LaurentPoly::zero(n, num.certified_hi())
        } else {
            divide_exact(&num, &g_of(vec![-1; n], qorder), None)?
        }
    };
    let p = p.truncate(qorder);
    memo_put(n, k, &p);
    Ok(p)
}

fn theta_z(qorder: i64) -> LaurentPoly {
    g_of(vec![1], qorder)
}

/// Identities of `g`: `g(1/z) = -z^{-1} g(z)`, `g(1) = 0`, `g(qz) = -z^{-1} g(z)`
/// and the triple product.
pub fn check_theta_identities(qorder: i64) -> Result<Vec<CheckRecord>> {
    if qorder < 2 {
        return Err(Error::BadParameter("qorder must be at least 2".into()));
    }
    // z -> qz costs one q-order per unit of |exponent|; build deeper until
    // every identity is certified through `qorder`.
    let mut build = qorder;
    loop {
        let recs = check_theta_identities_of(&theta_z(build), build)?;
        let done = recs
            .iter()
            .all(|r| r.status.is_fail() || r.window.is_some_and(|w| w.reaches(qorder)));
        if done || build >= 4 * qorder {
            return Ok(recs
                .into_iter()
                .map(|r| r.detail("build_qorder", build))
                .collect());
        }
        build += 1;
    }
}

/// The identity checks run against a caller-supplied `g` (used to confirm that
/// perturbations are caught).
pub fn check_theta_identities_of(g: &LaurentPoly, qorder: i64) -> Result<Vec<CheckRecord>> {
    let minus_zinv_g = g.shift_exps(&ExpVec(vec![-1])).neg();
    let inv = g.subst(
        0,
        &VarImage {
            sign: 1,
            qshift: 0,
            exps: ExpVec(vec![-1]),
        },
    )?;
    let at_one = g.subst(0, &VarImage::one(1))?;
    let shifted = g.subst(
        0,
        &VarImage {
            sign: 1,
            qshift: 1,
            exps: ExpVec(vec![1]),
        },
    )?;
    let product = theta_g_product(&ThetaArg { exps: ExpVec(vec![1]) }, qorder);
    Ok(vec![
        compare("g(1/z) = -g(z)/z", &inv, &minus_zinv_g)?,
        residual_record("g(1) = 0", &at_one, 0)?,
        compare("g(qz) = -g(z)/z", &shifted, &minus_zinv_g)?,
        compare("g = triple product", g, &product)?,
    ])
}

/// Quasi-periodicity of `f_{n,k}` under `z_1 -> q z_1`, checked
/// coefficientwise.
///
/// With `f` known below `q^M`, the coefficient of `z^e` in `f(q z_1, ..)` is
/// known below `q^{M + e_1}` and the one on the right below `q^{M + c}`,
/// `c = -(k+1)(k-2)/2`. Every exponent vector in either support is compared on
/// its own window, so nothing about the unknown tail is assumed. The record's
/// window ceiling is the smallest per-term ceiling over the support of `f`;
/// it shrinks as `e_1` becomes very negative, so `build_qorder` is reported too.
pub fn check_fpr(n: usize, k: usize, qorder: i64) -> Result<CheckRecord> {
    let f = fnk_series(FnkSpec::new(n, k, qorder)?)?;
    let ki = k as i64;
    let mut shift = vec![ki + 1; n];
    shift[0] = 1 - ki * ki;
    let shift = ExpVec(shift);
    let sign = rat(if (ki - 1) % 2 == 0 { 1 } else { -1 });
    let c = -(ki + 1) * (ki - 2) / 2;
    let name = format!("fpr n={n} k={k}");

    let support: std::collections::BTreeSet<ExpVec> = f
        .terms()
        .flat_map(|(e, _)| [e.clone(), e.add(&shift)])
        .collect();
    let mut lo = 0i64;
    let mut first_bad: Option<(i64, ExpVec, Rational)> = None;
    for e in &support {
        let lhs = f.coeff(e).shift(e.0[0]);
        let rhs = f.coeff(&e.sub(&shift)).shift(c).scale(&sign);
        lo = lo.min(lhs.lo().min(rhs.lo()));
        let d = lhs.sub(&rhs);
        if let Some(v) = d.valuation() {
            let cand = (v, e.clone(), d.coeff(v));
            if first_bad.as_ref().is_none_or(|b| (cand.0, &cand.1) < (b.0, &b.1)) {
                first_bad = Some(cand);
            }
        }
    }
    let uniform = f
        .terms()
        .map(|(e, t)| t.hi() + e.0[0].min(c))
        .fold(f.hi() + c, i64::min);
    let rec = match first_bad {
        None => CheckRecord::pass(name),
        Some((v, e, x)) => CheckRecord::fail(name, crate::report::describe_term(v, &e, &x)),
    };
    Ok(rec
        .with_window(Window::new(lo, uniform))
        .detail("build_qorder", qorder)
        .detail("per_term_ceiling", format!("{qorder} + min(e_1, {c})")))
}

/// `f_{1,k}(1) = k`.
pub fn check_rest1(k: usize, qorder: i64) -> Result<CheckRecord> {
    let f = fnk_series(FnkSpec::new(1, k, qorder)?)?;
    let val = f.eval_all_ones();
    let diff = val.sub(&QSeries::constant(rat(k as i64)));
    let name = format!("rest1 f_{{1,{k}}}(1) = {k}");
    let rec = match diff.valuation() {
        None => CheckRecord::pass(name),
        Some(v) => CheckRecord::fail(
            name,
            format!("q^{v}: {}", crate::ring::format_rational(&diff.coeff(v))),
        ),
    };
    Ok(rec.with_window(Window::new(0, diff.hi())))
}

/// `f_{n+1,k}(z_1, .., z_n, 1) = (k - n) f_{n,k}(z_1, .., z_n)`.
pub fn check_rest2(n: usize, k: usize, qorder: i64) -> Result<CheckRecord> {
    let big = fnk_series(FnkSpec::new(n + 1, k, qorder)?)?;
    let small = fnk_series(FnkSpec::new(n, k, qorder)?)?;
    let lhs = big.eval_var_at_one(n)?;
    let rhs = small.scale_rational(&rat(k as i64 - n as i64));
    Ok(compare(&format!("rest2 n={n} k={k}"), &lhs, &rhs)?.detail("qorder", qorder))
}

/// The recurrence numerator for `f_{k+1,k}` vanishes.
pub fn check_vanishing(k: usize, qorder: i64) -> Result<CheckRecord> {
    if k == 0 {
        return Err(Error::BadParameter("k must be positive".into()));
    }
    let num = req_numerator(k, k, qorder)?;
    Ok(residual_record(&format!("f_{{{},{k}}} = 0", k + 1), &num, 0)?.detail("qorder", qorder))
}

/// `f(t) = sum_i (-1)^i (t^{6i+1} + t^{-6i-1}) q^{i(3i+1)/2}` (univariate).
pub fn conj51_f(qorder: i64) -> LaurentPoly {
    let mut p = LaurentPoly::zero(1, qorder);
    for (i, e) in conj51_indices(qorder) {
        let c = QSeries::monomial(rat(if i % 2 == 0 { 1 } else { -1 }), e);
        p.add_term(ExpVec(vec![6 * i + 1]), c.clone());
        p.add_term(ExpVec(vec![-6 * i - 1]), c);
    }
    p.truncate(qorder)
}

fn conj51_indices(qorder: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut r = 0;
    loop {
        let cand: Vec<i64> = if r == 0 { vec![0] } else { vec![-r, r] };
        let live: Vec<(i64, i64)> = cand
            .into_iter()
            .map(|i| (i, i * (3 * i + 1) / 2))
            .filter(|&(_, e)| e < qorder)
            .collect();
        if live.is_empty() {
            break;
        }
        out.extend(live);
        r += 1;
    }
    out
}

/// `f(x)` for a rational `x`, as a q-series certified on `[0, qorder)`.
pub fn conj51_eval(x: &Rational, qorder: i64) -> Result<QSeries> {
    let mut acc = QSeries::zero(qorder);
    for (i, e) in conj51_indices(qorder) {
        let v = pow_i(x, 6 * i + 1)? + pow_i(x, -6 * i - 1)?;
        let v = if i % 2 == 0 { v } else { -v };
        acc = acc.add(&QSeries::monomial(v, e));
    }
    Ok(acc.truncate(qorder))
}

/// Coefficients of the two conjectural families:
/// `k -> f(t^{2k}) qt^{k^2}` and `k -> f(t^{2k+1}) qt^{k^2+k}` for `|k| <= range`.
pub fn conj51_coeffs(
    t: &Rational,
    qt: &Rational,
    range: i64,
    qorder: i64,
) -> Result<(BTreeMap<i64, QSeries>, BTreeMap<i64, QSeries>)> {
    use num_traits::Zero;
    if t.is_zero() {
        return Err(Error::DivisionByZero);
    }
    check_qorder(qorder)?;
    let mut y1 = BTreeMap::new();
    let mut y2 = BTreeMap::new();
    for k in -range..=range {
        let c1 = pow_i(qt, k * k)?;
        let c2 = pow_i(qt, k * k + k)?;
        let a = conj51_eval(&pow_i(t, 2 * k)?, qorder)?.scale(&c1);
        let b = conj51_eval(&pow_i(t, 2 * k + 1)?, qorder)?.scale(&c2);
        if !a.is_zero() {
            y1.insert(k, a);
        }
        if !b.is_zero() {
            y2.insert(k, b);
        }
    }
    Ok((y1, y2))
}

/// `z_2 z_3^2 ... z_k^{k-1} prod_{a<b} g(z_a / z_b)`.
pub fn fermionic_generator(k: usize, qorder: i64) -> Result<LaurentPoly> {
    if k < 2 {
        return Err(Error::BadParameter("fermionic generator needs k >= 2".into()));
    }
    check_qorder(qorder)?;
    let stair = ExpVec((0..k as i64).collect());
    let mut acc = LaurentPoly::monomial(stair, QSeries::one()).truncate(qorder);
    for a in 0..k {
        for b in a + 1..k {
            let mut e = vec![0; k];
            e[a] = 1;
            e[b] = -1;
            acc = acc.mul_trunc(&g_of(e, qorder), qorder)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::poly;

    fn z() -> ThetaArg {
        ThetaArg::from_slice(&[1]).unwrap()
    }

    fn qterm(c: i64, q: i64, e: &[i64]) -> LaurentPoly {
        LaurentPoly::monomial(ExpVec(e.to_vec()), QSeries::monomial(rat(c), q))
    }

    fn sum(parts: &[LaurentPoly], hi: i64) -> LaurentPoly {
        parts
            .iter()
            .fold(LaurentPoly::exact_zero(parts[0].arity()), |a, b| a.add(b).unwrap())
            .truncate(hi)
    }

    #[test]
    fn g_low_orders() {
        let mut parts = vec![poly(1, &[(1, &[0]), (-1, &[1])]), qterm(-1, 1, &[-1]), qterm(1, 1, &[2])];
        assert_eq!(theta_g(&z(), 2), sum(&parts, 2));
        parts.extend([qterm(1, 3, &[-2]), qterm(-1, 3, &[3])]);
        assert_eq!(theta_g(&z(), 4), sum(&parts, 4));
        let w = ThetaArg::from_slice(&[-2, 1, 1]).unwrap();
        assert_eq!(
            theta_g(&w, 1),
            poly(3, &[(1, &[0, 0, 0]), (-1, &[-2, 1, 1])]).truncate(1)
        );
    }

    #[test]
    fn triple_product_matches() {
        assert_eq!(theta_g_product(&z(), 1), poly(1, &[(1, &[0]), (-1, &[1])]).truncate(1));
        for m in [2, 5, 12] {
            assert_eq!(theta_g_product(&z(), m), theta_g(&z(), m), "qorder {m}");
        }
    }

    #[test]
    fn f1_low_orders() {
        assert_eq!(f1_series(1), poly(2, &[(1, &[1, 0]), (1, &[0, 1])]).truncate(1));
        let mut parts = vec![
            poly(2, &[(1, &[1, 0]), (1, &[0, 1])]),
            qterm(-1, 1, &[3, -2]),
            qterm(-1, 1, &[-2, 3]),
        ];
        assert_eq!(f1_series(2), sum(&parts, 2));
        parts.extend([qterm(-1, 2, &[-3, 4]), qterm(-1, 2, &[4, -3])]);
        assert_eq!(f1_series(3), sum(&parts, 3));
    }

    #[test]
    fn f11_is_z() {
        let f = fnk_series(FnkSpec::new(1, 1, 8).unwrap()).unwrap();
        assert_eq!(f, poly(1, &[(1, &[1])]).truncate(8));
    }

    #[test]
    fn f22_limit() {
        let f = fnk_series(FnkSpec::new(2, 2, 1).unwrap()).unwrap();
        assert_eq!(f, poly(2, &[(1, &[1, 2]), (1, &[2, 1])]).truncate(1));
    }

    #[test]
    fn identities_hold() {
        let recs = check_theta_identities(12).unwrap();
        assert_eq!(recs.len(), 4);
        for r in &recs {
            assert_eq!(r.status, crate::report::Status::Pass, "{r:?}");
        }
    }

    #[test]
    fn perturbed_g_is_caught() {
        let g = theta_z(6).add(&poly(1, &[(1, &[2])])).unwrap();
        let recs = check_theta_identities_of(&g, 6).unwrap();
        assert!(recs.iter().any(|r| r.status.is_fail()));
    }

    #[test]
    fn conj51_low_orders() {
        assert_eq!(conj51_f(1), poly(1, &[(1, &[1]), (1, &[-1])]).truncate(1));
        let mut parts = vec![poly(1, &[(1, &[1]), (1, &[-1])]), qterm(-1, 1, &[5]), qterm(-1, 1, &[-5])];
        assert_eq!(conj51_f(2), sum(&parts, 2));
        parts.extend([qterm(-1, 2, &[7]), qterm(-1, 2, &[-7])]);
        assert_eq!(conj51_f(3), sum(&parts, 3));
    }

    #[test]
    fn conj51_coefficients() {
        let (y1, y2) = conj51_coeffs(&crate::ring::ratio(2, 3), &rat(1), 2, 3).unwrap();
        assert_eq!(y1[&0].coeff(0), rat(2));
        assert_eq!(y1[&0].coeff(1), rat(-2));
        assert_eq!(y1[&0].coeff(2), rat(-2));
        assert_eq!(y2[&0].coeff(0), crate::ring::ratio(13, 6));
        let (y1, _) = conj51_coeffs(&crate::ring::ratio(2, 3), &rat(0), 2, 3).unwrap();
        assert_eq!(y1.keys().copied().collect::<Vec<_>>(), vec![0]);
        assert!(conj51_coeffs(&rat(0), &rat(1), 1, 3).is_err());
    }

    #[test]
    fn fermionic_low_order() {
        let f = fermionic_generator(2, 1).unwrap();
        assert_eq!(f, poly(2, &[(1, &[0, 1]), (-1, &[1, 0])]).truncate(1));
        let f3 = fermionic_generator(3, 1).unwrap();
        let expect = poly(3, &[(1, &[0, 1, 2])])
            .mul(&poly(3, &[(1, &[0, 0, 0]), (-1, &[1, -1, 0])]))
            .unwrap()
            .mul(&poly(3, &[(1, &[0, 0, 0]), (-1, &[1, 0, -1])]))
            .unwrap()
            .mul(&poly(3, &[(1, &[0, 0, 0]), (-1, &[0, 1, -1])]))
            .unwrap()
            .truncate(1);
        assert_eq!(f3, expect);
    }
}
