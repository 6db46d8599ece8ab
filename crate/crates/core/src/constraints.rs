//! Two-route reduction of `x_i x_{i+1} x_{i+2}` under the generic quadratic
//! deformation `x_j x_{j+1} + a_1 x_{j-1} x_{j+2} + a_2 x_{j-2} x_{j+3} + ...`.
//!
//! Both routes rewrite adjacent pairs until only gap-monomials remain (or
//! the a-degree passes the cap). Their coefficient-wise differences are
//! polynomials in the unknowns `a_m` that must vanish for flatness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::report::{CheckRecord, Window};
use crate::ring::{format_rational, rat, QSeries, Rational};

/// Default number of unknowns.
pub const DEFAULT_W: usize = 6;
/// Default a-degree cap.
pub const DEFAULT_ADEG_CAP: u32 = 3;
/// Default half-width of the index window around the probe.
pub const DEFAULT_INDEX_MARGIN: i64 = 24;

/// Polynomial in `a_1..a_W` with rational coefficients, truncated above
/// total degree `cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct APoly {
    w: usize,
    cap: u32,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl APoly {
    pub fn zero(w: usize, cap: u32) -> Self {
        APoly {
            w,
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(w: usize, cap: u32) -> Self {
        let mut p = Self::zero(w, cap);
        p.terms.insert(vec![0; w], Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Lowest total degree present.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    /// Coefficient of a multi-exponent (missing entries are zero).
    pub fn coeff(&self, exps: &[u32]) -> Rational {
        let mut key = exps.to_vec();
        key.resize(self.w, 0);
        self.terms.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if e.iter().sum::<u32>() > self.cap {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add_assign(&mut self, other: &APoly) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &APoly) -> APoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    /// `c * a_m * self` for `m` in `1..=W`, dropping terms over the cap.
    pub fn times_a(&self, m: usize, c: &Rational) -> APoly {
        let mut out = APoly::zero(self.w, self.cap);
        for (e, v) in &self.terms {
            let mut e = e.clone();
            e[m - 1] += 1;
            out.add_term(e, v * c);
        }
        out
    }

    /// Substitutes `a_m -> values[m]`; unknowns without a value are zero.
    pub fn eval(&self, values: &BTreeMap<usize, QSeries>, qorder: i64) -> QSeries {
        let mut total = QSeries::zero(qorder);
        for (e, c) in &self.terms {
            let mut t = QSeries::constant(c.clone());
            for (m, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let Some(v) = values.get(&(m + 1)) else {
                    t = QSeries::exact_zero();
                    break;
                };
                for _ in 0..k {
                    t = t.mul(v).truncate(qorder);
                }
            }
            total = total.add(&t).truncate(qorder);
        }
        total
    }
}

impl fmt::Display for APoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let vars: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(m, &k)| if k == 1 { format!("a{}", m + 1) } else { format!("a{}^{k}", m + 1) })
                    .collect();
                if vars.is_empty() {
                    format_rational(c)
                } else {
                    format!("{}*{}", format_rational(c), vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Sorted index multiset of a monomial in `x`.
pub type XMonomial = Vec<i64>;

/// Whether sorted indices avoid every adjacent pair `x_j x_{j+1}`.
pub fn is_gap_monomial(m: &[i64]) -> bool {
    m.windows(2).all(|p| p[1] - p[0] != 1)
}

fn first_adjacent(m: &[i64]) -> Option<usize> {
    m.windows(2).position(|p| p[1] - p[0] == 1)
}

/// A fully reduced expansion: gap-monomial -> coefficient, plus the
/// a-exponents of the terms that were pushed past the cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedExpansion {
    pub terms: BTreeMap<XMonomial, APoly>,
    pub frontier: BTreeSet<Vec<u32>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexWindow {
    pub lo: i64,
    pub hi: i64,
}

impl IndexWindow {
    pub fn around(i: i64, margin: i64) -> Self {
        IndexWindow {
            lo: i - margin,
            hi: i + margin,
        }
    }
}

/// Replaces the pair at positions `(p, p+1)` (indices `j, j+1`) by
/// `-sum_m a_m x_{j-m} x_{j+1+m}`.
fn substitute(
    m: &[i64],
    p: usize,
    coef: &APoly,
    w: usize,
    window: IndexWindow,
    out: &mut BTreeMap<XMonomial, APoly>,
) -> Result<()> {
    let j = m[p];
    debug_assert_eq!(m[p + 1], j + 1);
    let minus = -Rational::one();
    for a in 1..=w {
        let (l, r) = (j - a as i64, j + 1 + a as i64);
        if l < window.lo || r > window.hi {
            return Err(Error::WindowEscape {
                lo: window.lo,
                hi: window.hi,
            });
        }
        let term = coef.times_a(a, &minus);
        if term.is_zero() {
            continue;
        }
        debug_assert!(term.min_degree() > coef.min_degree());
        let mut next: Vec<i64> = m.iter().enumerate().filter(|&(t, _)| t != p && t != p + 1).map(|(_, &v)| v).collect();
        next.push(l);
        next.push(r);
        next.sort_unstable();
        out.entry(next).or_insert_with(|| APoly::zero(coef.w, coef.cap)).add_assign(&term);
    }
    Ok(())
}

/// Rewrites `start` to gap-monomials: the first substitution acts at
/// position `first`, later ones at the leftmost adjacent pair. Every term of
/// level `d` has a-degree exactly `d`; level `cap + 1` becomes the frontier.
fn reduce_route(start: &[i64], first: usize, w: usize, cap: u32, window: IndexWindow) -> Result<ReducedExpansion> {
    let mut done: BTreeMap<XMonomial, APoly> = BTreeMap::new();
    let mut level: BTreeMap<XMonomial, APoly> = BTreeMap::new();
    substitute(start, first, &APoly::one(w, cap + 1), w, window, &mut level)?;
    let mut degree = 1;
    while !level.is_empty() && degree <= cap {
        let mut next = BTreeMap::new();
        for (m, c) in level {
            if c.is_zero() {
                continue;
            }
            match first_adjacent(&m) {
                None => done.entry(m).or_insert_with(|| APoly::zero(w, cap)).add_assign(&c),
                Some(p) => substitute(&m, p, &c, w, window, &mut next)?,
            }
        }
        level = next;
        degree += 1;
    }
    done.retain(|_, c| !c.is_zero());
    let frontier = level.values().flat_map(|c| c.terms.keys().cloned()).collect();
    Ok(ReducedExpansion { terms: done, frontier })
}

fn check_args(w: usize, cap: u32) -> Result<()> {
    if w < 1 {
        return Err(Error::BadParameter("W must be at least 1".into()));
    }
    if cap < 1 {
        return Err(Error::BadParameter("adegCap must be at least 1".into()));
    }
    Ok(())
}

/// Route 1 starts at `x_i x_{i+1}`, route 2 at `x_{i+1} x_{i+2}`.
pub fn reduce_two_ways(i: i64, w: usize, cap: u32, window: IndexWindow) -> Result<(ReducedExpansion, ReducedExpansion)> {
    check_args(w, cap)?;
    let probe = [i, i + 1, i + 2];
    Ok((reduce_route(&probe, 0, w, cap, window)?, reduce_route(&probe, 1, w, cap, window)?))
}

/// One flatness constraint: the coefficient difference at one gap-monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub monomial: XMonomial,
    pub poly: APoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSet {
    pub probe: i64,
    pub w: usize,
    pub cap: u32,
    pub constraints: Vec<Constraint>,
    /// a-exponents (degree `cap + 1`) of terms dropped by either route.
    pub frontier: BTreeSet<Vec<u32>>,
}

/// Nonzero coefficient differences of the two routes, ordered by monomial.
pub fn derive_constraints(i: i64, w: usize, cap: u32, window: IndexWindow) -> Result<ConstraintSet> {
    let (r1, r2) = reduce_two_ways(i, w, cap, window)?;
    let mut keys: Vec<&XMonomial> = r1.terms.keys().chain(r2.terms.keys()).collect();
    keys.sort();
    keys.dedup();
    let zero = APoly::zero(w, cap);
    let constraints = keys
        .into_iter()
        .filter_map(|m| {
            let a = r1.terms.get(m).unwrap_or(&zero);
            let b = r2.terms.get(m).unwrap_or(&zero);
            let d = a.sub(b);
            (!d.is_zero()).then(|| Constraint {
                monomial: m.clone(),
                poly: d,
            })
        })
        .collect();
    Ok(ConstraintSet {
        probe: i,
        w,
        cap,
        constraints,
        frontier: r1.frontier.union(&r2.frontier).cloned().collect(),
    })
}

/// The candidate read off from the theta relation:
/// `a_{3b-1} = (-1)^b q^{b(3b-1)/2}`, `a_{3b} = (-1)^b q^{b(3b+1)/2}`.
pub fn theta_candidate(w: usize) -> BTreeMap<usize, QSeries> {
    let mut out = BTreeMap::new();
    for b in 1i64.. {
        let sign = if b % 2 == 0 { rat(1) } else { rat(-1) };
        let lo = (3 * b - 1) as usize;
        if lo > w {
            break;
        }
        out.insert(lo, QSeries::monomial(sign.clone(), b * (3 * b - 1) / 2));
        if lo < w {
            out.insert(lo + 1, QSeries::monomial(sign, b * (3 * b + 1) / 2));
        }
    }
    out
}

/// Last q-exponent at which the truncated constraints are exact for the
/// candidate, or `None` if nothing was dropped.
///
/// A dropped term with a-exponent `e` only ever gets multiplied by further
/// unknowns, so with positive valuations its contributions start at
/// `sum_m e_m v(a_m)`; unknowns the candidate sets to zero kill the term.
/// Unknowns past `W` enter at `omitted_valuation`.
pub fn certified_order(set: &ConstraintSet, candidate: &BTreeMap<usize, QSeries>, omitted_valuation: Option<i64>) -> Option<i64> {
    let vals: BTreeMap<usize, i64> = candidate.iter().filter_map(|(&m, v)| Some((m, v.valuation()?))).collect();
    let positive = vals.values().all(|&v| v > 0);
    let mut best: Option<i64> = omitted_valuation.map(|v| v - 1);
    for e in &set.frontier {
        let mut total = Some(0i64);
        for (m, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            match vals.get(&(m + 1)) {
                Some(v) => total = total.map(|t| t + v * k as i64),
                None => total = None,
            }
        }
        if let Some(t) = total {
            let t = if positive { t - 1 } else { -1 };
            best = Some(best.map_or(t, |b| b.min(t)));
        }
    }
    best
}

/// Substitutes the candidate into every constraint and asks for vanishing
/// through `q^qorder`. The window names what was actually certified, which
/// is capped by [`certified_order`].
pub fn check_candidate(
    candidate: &BTreeMap<usize, QSeries>,
    set: &ConstraintSet,
    qorder: i64,
    omitted_valuation: Option<i64>,
) -> CheckRecord {
    let name = format!("constraints candidate (probe {})", set.probe);
    let hi = qorder + 1;
    let mut first_bad: Option<(i64, String)> = None;
    for c in &set.constraints {
        let v = c.poly.eval(candidate, hi);
        if let Some(e) = v.valuation() {
            if first_bad.as_ref().is_none_or(|(b, _)| e < *b) {
                let mono: Vec<String> = c.monomial.iter().map(|i| format!("x{i}")).collect();
                first_bad = Some((e, format!("{}: q^{e} coefficient {}", mono.join("*"), format_rational(&v.coeff(e)))));
            }
        }
    }
    let cert = certified_order(set, candidate, omitted_valuation);
    let rec = match (&first_bad, cert) {
        (Some((e, msg)), _) => CheckRecord::fail(name, msg.clone()).with_window(Window::new(0, *e)),
        (None, Some(t)) if t < qorder => CheckRecord::fail(
            name,
            format!("truncated constraints vanish through q^{qorder}, but a-degree cap {} only certifies through q^{t}", set.cap),
        )
        .with_window(Window::new(0, t + 1)),
        (None, _) => CheckRecord::pass(name).with_window(Window::new(0, hi)),
    };
    let rec = rec
        .detail("constraints", set.constraints.len())
        .detail("W", set.w)
        .detail("adeg_cap", set.cap)
        .detail("qorder", qorder);
    match cert {
        Some(t) => rec.detail("certified_through", t),
        None => rec,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window() -> IndexWindow {
        IndexWindow::around(0, 24)
    }

    #[test]
    fn first_steps_match_hand_expansion() {
        // cap 1: only the first substitution survives.
        let (r1, r2) = reduce_two_ways(0, 3, 1, window()).unwrap();
        let a = |m: usize| {
            let mut e = vec![0u32; 3];
            e[m - 1] = 1;
            e
        };
        assert_eq!(r1.terms[&vec![-1, 2, 2]].coeff(&a(1)), rat(-1));
        assert_eq!(r2.terms[&vec![0, 0, 3]].coeff(&a(1)), rat(-1));
        assert_eq!(r2.terms[&vec![-2, 0, 5]].coeff(&a(3)), rat(-1));
        // x_{-2} x_2 x_3 and x_{-1} x_0 x_4 still have a pair, so they are
        // pushed past the cap.
        assert!(!r1.terms.contains_key(&vec![-2, 2, 3]));
        assert!(!r2.terms.contains_key(&vec![-1, 0, 4]));
        assert!(r1.frontier.contains(&vec![0, 2, 0]));
    }

    #[test]
    fn no_degree_zero_part() {
        for c in derive_constraints(0, 4, 2, window()).unwrap().constraints {
            assert!(c.poly.min_degree().unwrap() >= 1);
            assert!(is_gap_monomial(&c.monomial));
        }
    }

    #[test]
    fn candidate_values() {
        let t = theta_candidate(6);
        assert_eq!(t[&2], QSeries::monomial(rat(-1), 1));
        assert_eq!(t[&3], QSeries::monomial(rat(-1), 2));
        assert_eq!(t[&5], QSeries::monomial(rat(1), 5));
        assert_eq!(t[&6], QSeries::monomial(rat(1), 7));
        assert!(!t.contains_key(&1) && !t.contains_key(&4));
    }

    #[test]
    fn window_escape() {
        assert!(matches!(
            reduce_two_ways(0, 6, 3, IndexWindow::around(0, 3)),
            Err(Error::WindowEscape { .. })
        ));
    }
}
