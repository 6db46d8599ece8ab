//! Cutoff graded algebras `P^(N)` (or their exterior analog), ideal families,
//! and graded dimensions of quotients.
//!
//! Generators `x_{-N}..x_N` have grade `(i, 1)`. A component `(n, l)` is spanned
//! by monomials of weight `l` and weighted degree `n`. An [`IdealFamily`]
//! describes generators `y_{a,i} = sum c * x_{i + o_1} ... x_{i + o_d}` by
//! templates of offsets; the ideal's `(n, l)` component is spanned by products
//! `m * y_{a,i}` with every index inside the cutoff.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcreal::{monomial_product, psi_inverse, Kind, Monomial};
use crate::linalg;
use crate::report::{CheckRecord, Status};
use crate::ring::{format_rational, parse_rational, rat, QSeries, Rational};
use crate::theta;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CutoffAlgebra {
    pub kind: Kind,
    /// Generators are `x_{-n}, ..., x_n`.
    pub n: i64,
}

impl CutoffAlgebra {
    pub fn new(kind: Kind, n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::BadParameter("cutoff N must be at least 1".into()));
        }
        Ok(CutoffAlgebra { kind, n })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GradedKey {
    pub n: i64,
    pub l: usize,
}

impl GradedKey {
    pub fn new(n: i64, l: usize) -> Self {
        GradedKey { n, l }
    }
}

/// All monomials of grade `key` with indices in `[-N, N]`, in increasing order.
pub fn enumerate_monomials(alg: &CutoffAlgebra, key: GradedKey) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(key.l);
    let strict = alg.kind == Kind::Fermionic;
    fn rec(
        cur: &mut Vec<i64>,
        left: usize,
        sum_left: i64,
        lo: i64,
        hi: i64,
        strict: bool,
        out: &mut Vec<Monomial>,
    ) {
        if left == 0 {
            if sum_left == 0 {
                out.push(Monomial::from_indices(cur));
            }
            return;
        }
        let l = left as i64;
        for i in lo..=hi {
            // Remaining entries are >= i (or > i) and <= hi.
            let step = if strict { 1 } else { 0 };
            let min_rest = (0..l).map(|j| i + j * step).sum::<i64>();
            let max_rest = i + (l - 1) * hi - if strict { (l - 1) * (l - 2) / 2 } else { 0 };
            if sum_left < min_rest {
                break;
            }
            if sum_left > max_rest {
                continue;
            }
            cur.push(i);
            rec(cur, left - 1, sum_left - i, i + step, hi, strict, out);
            cur.pop();
        }
    }
    if key.l == 0 {
        if key.n == 0 {
            out.push(Monomial::one());
        }
        return out;
    }
    rec(&mut cur, key.l, key.n, -alg.n, alg.n, strict, &mut out);
    out
}

/// Counts monomials of grade `key` whose index support has no `w` consecutive
/// integers (the standard basis of the quotient by the `w`-run ideal).
pub fn enumerate_quotient_basis(alg: &CutoffAlgebra, w: usize, key: GradedKey) -> usize {
    enumerate_monomials(alg, key)
        .into_iter()
        .filter(|m| !has_run(m, w))
        .count()
}

fn has_run(m: &Monomial, w: usize) -> bool {
    let idx: Vec<i64> = m.factors().iter().map(|&(i, _)| i).collect();
    let mut run = 1usize;
    for pair in idx.windows(2) {
        run = if pair[1] == pair[0] + 1 { run + 1 } else { 1 };
        if run >= w {
            return true;
        }
    }
    w <= 1 && !idx.is_empty()
}

/// Terms `(coefficient, offsets)` of one generator template; offsets sorted.
pub type Template = Vec<(QSeries, Vec<i64>)>;

type TemplateBuilder = dyn Fn(i64) -> Result<Vec<Template>> + Send + Sync;

/// A shift-indexed family of homogeneous generators.
#[derive(Clone)]
pub struct IdealFamily {
    name: String,
    kind: Kind,
    degree: usize,
    params: Vec<(String, String)>,
    /// Templates restricted to offset spread `<= s`.
    builder: Arc<TemplateBuilder>,
    /// Offsets of the undeformed monomial generators.
    reference: Vec<Vec<i64>>,
    /// q-order at which series coefficients were cut, if any.
    truncation: Option<i64>,
    conjecture: bool,
}

impl fmt::Debug for IdealFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdealFamily")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("degree", &self.degree)
            .field("params", &self.params)
            .finish()
    }
}

fn spread(offs: &[i64]) -> i64 {
    offs.iter().max().unwrap_or(&0) - offs.iter().min().unwrap_or(&0)
}

impl IdealFamily {
    /// A family with finitely many template terms.
    pub fn from_templates(
        name: impl Into<String>,
        kind: Kind,
        templates: Vec<Template>,
        reference: Vec<Vec<i64>>,
    ) -> Result<Self> {
        let degree = templates
            .first()
            .and_then(|t| t.first())
            .map(|(_, o)| o.len())
            .ok_or_else(|| Error::BadParameter("family needs at least one term".into()))?;
        for t in &templates {
            let s0 = t.first().map(|(_, o)| o.iter().sum::<i64>());
            for (_, o) in t {
                if o.len() != degree {
                    return Err(Error::NotHomogeneous("generator weights differ".into()));
                }
                if Some(o.iter().sum::<i64>()) != s0 {
                    return Err(Error::NotHomogeneous(format!(
                        "offsets {o:?} have a different degree"
                    )));
                }
            }
        }
        let templates = Arc::new(templates);
        Ok(IdealFamily {
            name: name.into(),
            kind,
            degree,
            params: Vec::new(),
            builder: Arc::new(move |s| {
                Ok(templates
                    .iter()
                    .map(|t| t.iter().filter(|(_, o)| spread(o) <= s).cloned().collect())
                    .collect())
            }),
            reference,
            truncation: None,
            conjecture: false,
        })
    }

    /// The monomial family generated by `x_{i+o_1} ... x_{i+o_d}` for each offset list.
    pub fn monomial(name: impl Into<String>, kind: Kind, offsets: Vec<Vec<i64>>) -> Result<Self> {
        let templates = offsets
            .iter()
            .map(|o| vec![(QSeries::one(), o.clone())])
            .collect();
        Self::from_templates(name, kind, templates, offsets)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn params(&self) -> &[(String, String)] {
        &self.params
    }

    pub fn truncation(&self) -> Option<i64> {
        self.truncation
    }

    pub fn is_conjecture(&self) -> bool {
        self.conjecture
    }

    /// Display name with parameters, e.g. `theta-fkk:k=2`.
    pub fn spec(&self) -> String {
        if self.params.is_empty() {
            self.name.clone()
        } else {
            let p: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{}:{}", self.name, p.join(","))
        }
    }

    /// Generator templates with offset spread at most `max_spread`.
    pub fn templates(&self, max_spread: i64) -> Result<Vec<Template>> {
        (self.builder)(max_spread)
    }

    pub fn reference_offsets(&self) -> &[Vec<i64>] {
        &self.reference
    }

    /// The undeformed monomial family.
    pub fn reference_family(&self) -> Result<IdealFamily> {
        IdealFamily::monomial(format!("{}-reference", self.name), self.kind, self.reference.clone())
    }

    /// Largest offset spread among the undeformed generators.
    pub fn reference_spread(&self) -> i64 {
        self.reference.iter().map(|o| spread(o)).max().unwrap_or(0)
    }

    /// Replaces the coefficient of the term with the given offsets in
    /// generator `a` (used to build broken deformations).
    pub fn with_coefficient(&self, a: usize, offsets: Vec<i64>, c: QSeries) -> IdealFamily {
        let inner = self.builder.clone();
        let mut out = self.clone();
        out.name = format!("{}-modified", self.name);
        out.builder = Arc::new(move |s| {
            let mut ts = inner(s)?;
            if let Some(t) = ts.get_mut(a) {
                for (coef, o) in t.iter_mut() {
                    if *o == offsets {
                        *coef = c.clone();
                    }
                }
            }
            Ok(ts)
        });
        out
    }
}

fn sign_q(sign: i64, e: i64) -> QSeries {
    QSeries::monomial(rat(sign), e)
}

fn sorted(mut v: Vec<i64>) -> Vec<i64> {
    v.sort_unstable();
    v
}

fn param<'a>(params: &'a [(String, String)], key: &str) -> Option<&'a str> {
    params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn param_usize(params: &[(String, String)], key: &str, default: Option<usize>) -> Result<usize> {
    match param(params, key) {
        None => default.ok_or_else(|| Error::BadParameter(format!("missing parameter `{key}`"))),
        Some(v) => v
            .parse()
            .map_err(|_| Error::BadParameter(format!("`{key}={v}` is not a nonnegative integer"))),
    }
}

fn param_rational(params: &[(String, String)], key: &str, default: Option<Rational>) -> Result<Rational> {
    match param(params, key) {
        None => default.ok_or_else(|| Error::BadParameter(format!("missing parameter `{key}`"))),
        Some(v) => parse_rational(v),
    }
}

fn check_keys(name: &str, params: &[(String, String)], allowed: &[&str]) -> Result<()> {
    for (k, _) in params {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::BadParameter(format!("family `{name}` has no parameter `{k}`")));
        }
    }
    Ok(())
}

/// Default truncation order for series-coefficient families.
pub const DEFAULT_FAMILY_QORDER: i64 = 8;

/// Names accepted by [`builtin_family`].
pub const FAMILY_NAMES: &[&str] = &[
    "monomial-run",
    "monomial-pairs",
    "theta-k1",
    "theta-fkk",
    "conj51",
    "fermi-theta",
    "fermi-fkk",
];

/// Materializes a named family.
///
/// | name | parameters |
/// |------|------------|
/// | `monomial-run` | `w` (run length, default 2), `kind` (`bosonic`/`fermionic`) |
/// | `monomial-pairs` | `shifts` (`;`-separated, default `0;1`) |
/// | `theta-k1` | `a1` (coefficient of the `alpha = 1` term over `q`, default `-1`) |
/// | `theta-fkk` | `k`, `qorder` (default 8) |
/// | `conj51` | `t`, `qt`, `qorder` (default 8) |
/// | `fermi-theta` | none |
/// | `fermi-fkk` | `k`, `qorder` (default 8) |
pub fn builtin_family(name: &str, params: &[(String, String)]) -> Result<IdealFamily> {
    let mut fam = match name {
        "monomial-run" => {
            check_keys(name, params, &["w", "kind"])?;
            let w = param_usize(params, "w", Some(2))?;
            if w < 1 {
                return Err(Error::BadParameter("w must be at least 1".into()));
            }
            let kind = match param(params, "kind").unwrap_or("bosonic") {
                "bosonic" => Kind::Bosonic,
                "fermionic" => Kind::Fermionic,
                other => return Err(Error::BadParameter(format!("unknown kind `{other}`"))),
            };
            IdealFamily::monomial(name, kind, vec![(0..w as i64).collect()])?
        }
        "monomial-pairs" => {
            check_keys(name, params, &["shifts"])?;
            let shifts = param(params, "shifts").unwrap_or("0;1");
            let offsets = shifts
                .split(';')
                .map(|s| {
                    s.trim()
                        .parse::<i64>()
                        .ok()
                        .filter(|&k| k >= 0)
                        .map(|k| vec![0, k])
                        .ok_or_else(|| Error::BadParameter(format!("bad shift `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            IdealFamily::monomial(name, Kind::Bosonic, offsets)?
        }
        "theta-k1" => {
            check_keys(name, params, &["a1"])?;
            let a1 = param_rational(params, "a1", Some(rat(-1)))?;
            theta_k1(a1)
        }
        "theta-fkk" => {
            check_keys(name, params, &["k", "qorder"])?;
            let k = param_usize(params, "k", None)?;
            let m = param_usize(params, "qorder", Some(DEFAULT_FAMILY_QORDER as usize))? as i64;
            fkk_family(name, Kind::Bosonic, k, m)?
        }
        "conj51" => {
            check_keys(name, params, &["t", "qt", "qorder"])?;
            let t = param_rational(params, "t", None)?;
            let qt = param_rational(params, "qt", None)?;
            let m = param_usize(params, "qorder", Some(DEFAULT_FAMILY_QORDER as usize))? as i64;
            conj51_family(t, qt, m)?
        }
        "fermi-theta" => {
            check_keys(name, params, &[])?;
            fermi_theta()
        }
        "fermi-fkk" => {
            check_keys(name, params, &["k", "qorder"])?;
            let k = param_usize(params, "k", None)?;
            let m = param_usize(params, "qorder", Some(DEFAULT_FAMILY_QORDER as usize))? as i64;
            fkk_family(name, Kind::Fermionic, k, m)?
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    fam.name = name.to_string();
    fam.params = params.to_vec();
    Ok(fam)
}

/// `y_i = sum_alpha (-1)^alpha q^{alpha(3 alpha - 1)/2} x_{i+3 alpha} x_{i+1-3 alpha}`;
/// the `alpha = 1` coefficient is `a1 * q` (the theorem has `a1 = -1`).
fn theta_k1(a1: Rational) -> IdealFamily {
    let builder = move |s: i64| -> Result<Vec<Template>> {
        let mut t = Vec::new();
        let mut alpha = 0i64;
        // Spread of the alpha term is |6 alpha - 1|.
        while (6 * alpha - 1).abs() <= s || (6 * -alpha - 1).abs() <= s {
            for a in if alpha == 0 { vec![0] } else { vec![alpha, -alpha] } {
                if (6 * a - 1).abs() > s {
                    continue;
                }
                let sign = if a % 2 == 0 { 1 } else { -1 };
                let mut c = sign_q(sign, a * (3 * a - 1) / 2);
                if a == 1 {
                    c = QSeries::monomial(a1.clone(), 1);
                }
                t.push((c, sorted(vec![3 * a, 1 - 3 * a])));
            }
            alpha += 1;
        }
        Ok(vec![t])
    };
    IdealFamily {
        name: "theta-k1".into(),
        kind: Kind::Bosonic,
        degree: 2,
        params: Vec::new(),
        builder: Arc::new(builder),
        reference: vec![vec![0, 1]],
        truncation: None,
        conjecture: false,
    }
}

/// `y_i = sum_{k >= 0} (-1)^k q^{k(k+1)/2} xi_{i-k} xi_{i+k+1}`.
fn fermi_theta() -> IdealFamily {
    let builder = |s: i64| -> Result<Vec<Template>> {
        let t = (0..)
            .take_while(|k| 2 * k < s)
            .map(|k: i64| {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                (sign_q(sign, k * (k + 1) / 2), vec![-k, k + 1])
            })
            .collect();
        Ok(vec![t])
    };
    IdealFamily {
        name: "fermi-theta".into(),
        kind: Kind::Fermionic,
        degree: 2,
        params: Vec::new(),
        builder: Arc::new(builder),
        reference: vec![vec![0, 1]],
        truncation: None,
        conjecture: true,
    }
}

/// Generators whose realization is `f_{k,k}` (bosonic) or the fermionic
/// generator, normalized so that the undeformed monomial has coefficient 1.
fn fkk_family(name: &str, kind: Kind, k: usize, qorder: i64) -> Result<IdealFamily> {
    if k < 2 {
        return Err(Error::BadParameter(format!("{name} needs k >= 2")));
    }
    if qorder < 1 {
        return Err(Error::BadParameter("qorder must be at least 1".into()));
    }
    let (poly, shift) = match kind {
        Kind::Bosonic => (theta::fnk_series(theta::FnkSpec::new(k, k, qorder)?)?, 1),
        Kind::Fermionic => (theta::fermionic_generator(k, qorder)?, 0),
    };
    let elem = psi_inverse(&poly, kind)?;
    let base: Vec<i64> = (0..k as i64).collect();
    let mut terms: Template = elem
        .terms()
        .map(|(m, c)| {
            let offs: Vec<i64> = m.indices().into_iter().map(|i| i - shift).collect();
            (c.clone(), offs)
        })
        .collect();
    let lead = terms
        .iter()
        .find(|(_, o)| *o == base)
        .map(|(c, _)| c.clone())
        .ok_or_else(|| Error::BadParameter(format!("{name}: undeformed monomial missing")))?;
    let inv = lead.inverse(qorder)?;
    for (c, _) in terms.iter_mut() {
        *c = c.mul(&inv).truncate(qorder);
    }
    terms.retain(|(c, _)| !c.is_zero());
    let mut fam = IdealFamily::from_templates(name, kind, vec![terms], vec![base])?;
    fam.truncation = Some(qorder);
    fam.conjecture = kind == Kind::Fermionic;
    Ok(fam)
}

/// The two generator families of the conjecture with `t`, `qt` fixed and the
/// series in `q` truncated at `qorder`.
fn conj51_family(t: Rational, qt: Rational, qorder: i64) -> Result<IdealFamily> {
    if t.is_zero() {
        return Err(Error::BadParameter("conj51 needs t != 0".into()));
    }
    if qorder < 1 {
        return Err(Error::BadParameter("qorder must be at least 1".into()));
    }
    let builder = move |s: i64| -> Result<Vec<Template>> {
        let range = s / 2 + 1;
        let (y1, y2) = theta::conj51_coeffs(&t, &qt, range, qorder)?;
        // Terms k and -k (resp. -k-1) give the same monomial; add them up.
        let mut t1: BTreeMap<Vec<i64>, QSeries> = BTreeMap::new();
        for (k, c) in y1 {
            let o = sorted(vec![-k, k]);
            if spread(&o) <= s {
                let e = t1.entry(o).or_insert_with(|| QSeries::zero(qorder));
                *e = e.add(&c);
            }
        }
        let mut t2: BTreeMap<Vec<i64>, QSeries> = BTreeMap::new();
        for (k, c) in y2 {
            let o = sorted(vec![-k, k + 1]);
            if spread(&o) <= s {
                let e = t2.entry(o).or_insert_with(|| QSeries::zero(qorder));
                *e = e.add(&c);
            }
        }
        let into = |m: BTreeMap<Vec<i64>, QSeries>| -> Template {
            m.into_iter().filter(|(_, c)| !c.is_zero()).map(|(o, c)| (c, o)).collect()
        };
        Ok(vec![into(t1), into(t2)])
    };
    Ok(IdealFamily {
        name: "conj51".into(),
        kind: Kind::Bosonic,
        degree: 2,
        params: Vec::new(),
        builder: Arc::new(builder),
        reference: vec![vec![0, 0], vec![0, 1]],
        truncation: Some(qorder),
        conjecture: true,
    })
}

/// Rows of the ideal's `(n, l)` component, columns indexed by `columns`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentMatrix<C = Rational> {
    pub columns: Vec<Monomial>,
    pub rows: Vec<Vec<C>>,
}

/// Matrix entries: rationals after specialization, q-series before.
trait Coef: Clone {
    fn coef_is_zero(&self) -> bool;
    fn add_signed(&mut self, c: &Self, sign: i64);
}

impl Coef for Rational {
    fn coef_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_signed(&mut self, c: &Self, sign: i64) {
        if sign > 0 {
            *self += c;
        } else {
            *self -= c;
        }
    }
}

impl Coef for QSeries {
    fn coef_is_zero(&self) -> bool {
        QSeries::is_zero(self)
    }
    fn add_signed(&mut self, c: &Self, sign: i64) {
        *self = if sign > 0 { self.add(c) } else { self.sub(c) };
    }
}

fn build_component<C: Coef>(
    alg: &CutoffAlgebra,
    fam: &IdealFamily,
    key: GradedKey,
    zero: C,
    coef: impl Fn(&QSeries) -> Result<C>,
) -> Result<ComponentMatrix<C>> {
    let columns = enumerate_monomials(alg, key);
    let col_index: HashMap<&Monomial, usize> = columns.iter().enumerate().map(|(j, m)| (m, j)).collect();
    let mut rows = Vec::new();
    let d = fam.degree;
    if key.l < d || columns.is_empty() || fam.kind != alg.kind {
        return Ok(ComponentMatrix { columns, rows });
    }
    let templates = fam.templates(2 * alg.n)?;
    // (offset sum of the first term, evaluated terms) per template.
    type Evaluated<C> = Vec<(i64, Vec<(C, Vec<i64>)>)>;
    let evaluated: Evaluated<C> = templates
        .iter()
        .filter(|t| !t.is_empty())
        .map(|t| {
            let s = t[0].1.iter().sum::<i64>();
            let terms = t
                .iter()
                .map(|(c, o)| Ok((coef(c)?, o.clone())))
                .collect::<Result<Vec<_>>>()?;
            Ok((s, terms.into_iter().filter(|(c, _)| !c.coef_is_zero()).collect()))
        })
        .collect::<Result<_>>()?;
    let lw = key.l - d;
    let lw_i = lw as i64;
    let multipliers: Vec<Monomial> = (-alg.n * lw_i..=alg.n * lw_i)
        .flat_map(|nm| enumerate_monomials(alg, GradedKey::new(nm, lw)))
        .collect();
    for (s, terms) in &evaluated {
        for m in &multipliers {
            let rest = key.n - m.degree() - s;
            if rest.rem_euclid(d as i64) != 0 {
                continue;
            }
            let i = rest / d as i64;
            let mut row = vec![zero.clone(); columns.len()];
            for (c, offs) in terms {
                let idx: Vec<i64> = offs.iter().map(|o| o + i).collect();
                if idx.iter().any(|x| x.abs() > alg.n) {
                    continue;
                }
                let g = Monomial::from_indices(&idx);
                if alg.kind == Kind::Fermionic && !g.is_squarefree() {
                    continue;
                }
                if let Some((prod, sign)) = monomial_product(alg.kind, m, &g) {
                    row[col_index[&prod]].add_signed(c, sign);
                }
            }
            if row.iter().any(|x| !x.coef_is_zero()) {
                rows.push(row);
            }
        }
    }
    Ok(ComponentMatrix { columns, rows })
}

/// Rows `m * y_{a,i}` of the ideal component at grade `key`, with `q`
/// specialized (inexact coefficients truncated at `qorder` first).
pub fn ideal_component(
    alg: &CutoffAlgebra,
    fam: &IdealFamily,
    key: GradedKey,
    q: &Rational,
    qorder: i64,
) -> Result<ComponentMatrix> {
    build_component(alg, fam, key, Rational::zero(), |c| c.eval_truncated(q, qorder))
}

/// The same rows with `q` kept formal, modulo `q^qorder`.
///
/// Every entry, including the zero ones, is only known below `q^qorder`: a
/// truncated generator may have terms of higher q-order anywhere.
pub fn ideal_component_series(
    alg: &CutoffAlgebra,
    fam: &IdealFamily,
    key: GradedKey,
    qorder: i64,
) -> Result<ComponentMatrix<QSeries>> {
    build_component(alg, fam, key, QSeries::zero(qorder), |c| Ok(c.truncate(qorder)))
}

/// `(ambient, rank, quotient)` at one grade.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GradedDim {
    pub ambient: usize,
    pub rank: usize,
    pub quotient: usize,
}

pub fn graded_dim(
    alg: &CutoffAlgebra,
    fam: &IdealFamily,
    key: GradedKey,
    q: &Rational,
    qorder: i64,
) -> Result<GradedDim> {
    let m = ideal_component(alg, fam, key, q, qorder)?;
    let ambient = m.columns.len();
    let rank = linalg::rank(&m.rows);
    Ok(GradedDim {
        ambient,
        rank,
        quotient: ambient - rank,
    })
}

/// Rank over `Q((q))` from coefficients cut at `qorder`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FormalDim {
    pub ambient: usize,
    pub rank: usize,
    pub quotient: usize,
    /// The uneliminated block vanishes below `q^precision`.
    pub precision: i64,
}

pub fn graded_dim_formal(
    alg: &CutoffAlgebra,
    fam: &IdealFamily,
    key: GradedKey,
    qorder: i64,
) -> Result<FormalDim> {
    let m = ideal_component_series(alg, fam, key, qorder)?;
    let ambient = m.columns.len();
    let r = linalg::series_rank(&m.rows)?;
    Ok(FormalDim {
        ambient,
        rank: r.rank,
        quotient: ambient - r.rank,
        precision: r.precision,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Flat,
    Deficient,
    Excess,
    /// Formal rank matches but nothing was certified (precision < 1).
    Uncertified,
}

/// What a verdict was computed from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictBasis {
    /// Exact coefficients specialized at each q sample.
    Specialized,
    /// Truncated series coefficients; q kept formal.
    FormalQ,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleDim {
    pub q: String,
    pub rank: usize,
    pub quotient: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KeyReport {
    pub n: i64,
    pub l: usize,
    pub ambient: usize,
    pub reference: usize,
    pub interior: bool,
    pub samples: Vec<SampleDim>,
    /// Formal-q dimension, for families with truncated coefficients.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formal: Option<FormalDim>,
    /// Present for interior keys only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimReport {
    pub family: String,
    pub kind: Kind,
    pub cutoff: i64,
    pub l_max: usize,
    pub margin: i64,
    pub q_samples: Vec<String>,
    pub qorder: i64,
    /// Set when series coefficients were truncated before specialization.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated_at: Option<i64>,
    pub basis: VerdictBasis,
    pub keys: Vec<KeyReport>,
}

impl DimReport {
    pub fn interior(&self) -> impl Iterator<Item = &KeyReport> {
        self.keys.iter().filter(|k| k.interior)
    }

    pub fn all_flat(&self) -> bool {
        self.interior().all(|k| k.verdict == Some(Verdict::Flat))
    }

    pub fn deficient_keys(&self) -> Vec<GradedKey> {
        self.interior()
            .filter(|k| k.verdict == Some(Verdict::Deficient))
            .map(|k| GradedKey::new(k.n, k.l))
            .collect()
    }

    /// Summary record; conjectural families report `conjecture-support`.
    pub fn to_record(&self, conjecture: bool) -> CheckRecord {
        let name = format!("flatness {}", self.family);
        let interior = self.interior().count();
        let mut rec = match self.interior().find(|k| k.verdict != Some(Verdict::Flat)) {
            None if conjecture => CheckRecord::pass(name).with_status(Status::ConjectureSupport),
            None => CheckRecord::pass(name),
            Some(k) => {
                let got: Vec<String> = k.samples.iter().map(|s| format!("q={}: {}", s.q, s.quotient)).collect();
                CheckRecord::fail(
                    name,
                    format!(
                        "(n={}, l={}): reference {} vs {}",
                        k.n,
                        k.l,
                        k.reference,
                        got.join(", ")
                    ),
                )
            }
        };
        rec = rec.detail("interior_keys", interior).detail("cutoff", self.cutoff);
        if let Some(m) = self.truncated_at {
            rec = rec.detail("at_truncation", m);
        }
        rec
    }
}

/// Whether `(n, l)` is far enough from the cutoff for a verdict:
/// `|n| <= (N - margin) l`.
pub fn is_interior(alg: &CutoffAlgebra, margin: i64, key: GradedKey) -> bool {
    key.n.abs() <= (alg.n - margin) * key.l as i64
}

/// Compares quotient dimensions at each `q` sample with the undeformed family.
///
/// `n_range = None` scans every realizable `n`. Verdicts are given on interior
/// keys only. For exact families a quotient larger than the reference is
/// reported as [`Error::SemicontinuityViolation`].
///
/// Families with truncated series coefficients get their verdict from the
/// formal-q rank instead: specializing a truncated coefficient is a
/// perturbation of the family, and exact rank detects any perturbation. The
/// specialized sample dimensions are still reported.
pub fn flatness_report(
    alg: &CutoffAlgebra,
    fam: &IdealFamily,
    l_max: usize,
    n_range: Option<(i64, i64)>,
    q_samples: &[Rational],
    qorder: i64,
) -> Result<DimReport> {
    if q_samples.is_empty() {
        return Err(Error::BadParameter("at least one q sample is required".into()));
    }
    let reference = fam.reference_family()?;
    let margin = 2 * fam.reference_spread().max(1);
    let mut keys = Vec::new();
    for l in 1..=l_max {
        let lim = alg.n * l as i64;
        let (lo, hi) = n_range.unwrap_or((-lim, lim));
        for n in lo.max(-lim)..=hi.min(lim) {
            keys.push(GradedKey::new(n, l));
        }
    }
    let basis = if fam.truncation.is_some() {
        VerdictBasis::FormalQ
    } else {
        VerdictBasis::Specialized
    };
    let one_key = |key: GradedKey| -> Result<KeyReport> {
        let r = graded_dim(alg, &reference, key, &rat(0), qorder)?;
        let mut samples = Vec::new();
        for q in q_samples {
            let d = graded_dim(alg, fam, key, q, qorder)?;
            samples.push(SampleDim {
                q: format_rational(q),
                rank: d.rank,
                quotient: d.quotient,
            });
        }
        let interior = is_interior(alg, margin, key);
        let formal = match basis {
            VerdictBasis::FormalQ => Some(graded_dim_formal(alg, fam, key, qorder)?),
            VerdictBasis::Specialized => None,
        };
        let verdict = match formal {
            Some(f) => {
                if f.quotient == r.quotient && f.precision >= 1 {
                    Verdict::Flat
                } else if f.quotient == r.quotient {
                    Verdict::Uncertified
                } else if f.quotient < r.quotient {
                    Verdict::Deficient
                } else {
                    Verdict::Excess
                }
            }
            None => {
                if let Some(s) = samples.iter().find(|s| s.quotient > r.quotient) {
                    if interior {
                        return Err(Error::SemicontinuityViolation {
                            n: key.n,
                            l: key.l,
                            quotient: s.quotient,
                            reference: r.quotient,
                        });
                    }
                }
                if samples.iter().all(|s| s.quotient == r.quotient) {
                    Verdict::Flat
                } else if samples.iter().any(|s| s.quotient > r.quotient) {
                    Verdict::Excess
                } else {
                    Verdict::Deficient
                }
            }
        };
        Ok(KeyReport {
            n: key.n,
            l: key.l,
            ambient: r.ambient,
            reference: r.quotient,
            interior,
            samples,
            formal,
            verdict: interior.then_some(verdict),
        })
    };
    let reports = map_keys(&keys, one_key)?;
    Ok(DimReport {
        family: fam.spec(),
        kind: fam.kind,
        cutoff: alg.n,
        l_max,
        margin,
        q_samples: q_samples.iter().map(format_rational).collect(),
        qorder,
        truncated_at: fam.truncation,
        basis,
        keys: reports,
    })
}

#[cfg(feature = "parallel")]
fn map_keys<T: Send>(keys: &[GradedKey], f: impl Fn(GradedKey) -> Result<T> + Sync) -> Result<Vec<T>> {
    use rayon::prelude::*;
    keys.par_iter().map(|&k| f(k)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_keys<T>(keys: &[GradedKey], f: impl Fn(GradedKey) -> Result<T>) -> Result<Vec<T>> {
    keys.iter().map(|&k| f(k)).collect()
}
