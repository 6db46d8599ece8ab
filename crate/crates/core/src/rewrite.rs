//! The monomial rewriting system on `x_i` and `ybar_i`.
//!
//! `ybar_i` stands for the run `x_i x_{i+1} ... x_{i+k}`. Two moves:
//! R1 replaces `x_i ... x_{i+k}` by `ybar_i`; R2 replaces `x_i ybar_{i+1}` by
//! `x_{i+k+1} ybar_i`. Both preserve the image under `phi`, R1 lowers the
//! x-weight and R2 lowers the ybar-index sum, so every strategy terminates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::GradedKey;
use crate::error::{Error, Result};
use crate::funcreal::Monomial;
use crate::report::CheckRecord;

/// A monomial in `x_i` and `ybar_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct XYMonomial {
    k: usize,
    x: BTreeMap<i64, u32>,
    y: BTreeMap<i64, u32>,
}

fn bump(m: &mut BTreeMap<i64, u32>, i: i64, by: i32) {
    let e = m.entry(i).or_insert(0);
    *e = (*e as i32 + by) as u32;
    if *e == 0 {
        m.remove(&i);
    }
}

impl XYMonomial {
    pub fn new(k: usize, xs: &[i64], ys: &[i64]) -> Self {
        assert!(k >= 1, "k must be positive");
        let mut m = XYMonomial {
            k,
            x: BTreeMap::new(),
            y: BTreeMap::new(),
        };
        for &i in xs {
            bump(&mut m.x, i, 1);
        }
        for &i in ys {
            bump(&mut m.y, i, 1);
        }
        m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn xfactors(&self) -> &BTreeMap<i64, u32> {
        &self.x
    }

    pub fn yfactors(&self) -> &BTreeMap<i64, u32> {
        &self.y
    }

    /// Number of x factors (`deg_1`).
    pub fn x_weight(&self) -> u32 {
        self.x.values().sum()
    }

    /// Sum of ybar indices with multiplicity (`deg_2`).
    pub fn y_index_sum(&self) -> i64 {
        self.y.iter().map(|(&i, &e)| i * e as i64).sum()
    }

    /// Total `(degree, weight)` of the `phi` image.
    pub fn grade(&self) -> GradedKey {
        let k = self.k as i64;
        let xd: i64 = self.x.iter().map(|(&i, &e)| i * e as i64).sum();
        let yd: i64 = self.y.iter().map(|(&i, &e)| ((k + 1) * i + k * (k + 1) / 2) * e as i64).sum();
        let yc: u32 = self.y.values().sum();
        GradedKey::new(xd + yd, (self.x_weight() + yc * (self.k as u32 + 1)) as usize)
    }

    pub fn has_y(&self) -> bool {
        !self.y.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        applicable_steps(self).is_empty()
    }

    /// Smallest and largest index touched by the `phi` image.
    pub fn span(&self) -> Option<(i64, i64)> {
        let k = self.k as i64;
        let lo = self.x.keys().chain(self.y.keys()).min()?;
        let hi = self.x.keys().copied().chain(self.y.keys().map(|&i| i + k)).max()?;
        Some((*lo, hi))
    }

    pub fn apply(&self, step: ReductionStep) -> Result<Self> {
        if !applicable_steps(self).contains(&step) {
            return Err(Error::BadParameter(format!("{step:?} does not apply to {self}")));
        }
        let mut m = self.clone();
        let k = self.k as i64;
        match step {
            ReductionStep { rule: Rule::R1, at: i } => {
                for j in i..=i + k {
                    bump(&mut m.x, j, -1);
                }
                bump(&mut m.y, i, 1);
            }
            ReductionStep { rule: Rule::R2, at: i } => {
                bump(&mut m.x, i, -1);
                bump(&mut m.y, i + 1, -1);
                bump(&mut m.x, i + k + 1, 1);
                bump(&mut m.y, i, 1);
            }
        }
        Ok(m)
    }
}

impl fmt::Display for XYMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, m) in [("x", &self.x), ("ybar", &self.y)] {
            for (i, e) in m {
                parts.push(if *e == 1 { format!("{name}{i}") } else { format!("{name}{i}^{e}") });
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    R1,
    R2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReductionStep {
    pub rule: Rule,
    pub at: i64,
}

/// `phi(x_i) = x_i`, `phi(ybar_i) = x_i ... x_{i+k}`.
pub fn phi(m: &XYMonomial) -> Monomial {
    let mut idx = Vec::new();
    for (&i, &e) in &m.x {
        idx.extend(std::iter::repeat_n(i, e as usize));
    }
    for (&i, &e) in &m.y {
        for _ in 0..e {
            idx.extend(i..=i + m.k as i64);
        }
    }
    Monomial::from_indices(&idx)
}

/// Every applicable step, R1 steps first, each in increasing position.
pub fn applicable_steps(m: &XYMonomial) -> Vec<ReductionStep> {
    let k = m.k as i64;
    let mut out: Vec<ReductionStep> = m
        .x
        .keys()
        .filter(|&&i| (i..=i + k).all(|j| m.x.contains_key(&j)))
        .map(|&i| ReductionStep { rule: Rule::R1, at: i })
        .collect();
    out.extend(
        m.x.keys()
            .filter(|&&i| m.y.contains_key(&(i + 1)))
            .map(|&i| ReductionStep { rule: Rule::R2, at: i }),
    );
    out
}

/// How the next step is picked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostR1First,
    LeftmostR2First,
    Rightmost,
    Alternating,
    Random(u64),
}

impl Strategy {
    /// The five strategies used for confluence evidence.
    pub fn all(seed: u64) -> [Strategy; 5] {
        [
            Strategy::LeftmostR1First,
            Strategy::LeftmostR2First,
            Strategy::Rightmost,
            Strategy::Alternating,
            Strategy::Random(seed),
        ]
    }
}

/// Checks the termination metric and `phi` preservation for one step.
fn check_step(before: &XYMonomial, step: ReductionStep, after: &XYMonomial) -> Result<()> {
    let ok_metric = match step.rule {
        Rule::R1 => after.x_weight() < before.x_weight(),
        Rule::R2 => after.x_weight() == before.x_weight() && after.y_index_sum() < before.y_index_sum(),
    };
    if !ok_metric {
        return Err(Error::CheckFailed { check: "termination metric".into(), detail: format!("{step:?} on {before}") });
    }
    if phi(after) != phi(before) {
        return Err(Error::CheckFailed { check: "phi preservation".into(), detail: format!("{step:?} on {before}") });
    }
    Ok(())
}

/// Reduces until no step applies, checking every step. Returns the result
/// and the number of steps taken.
pub fn normal_form_traced(m: &XYMonomial, strategy: Strategy) -> Result<(XYMonomial, usize)> {
    let mut cur = m.clone();
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut n = 0usize;
    loop {
        let steps = applicable_steps(&cur);
        if steps.is_empty() {
            return Ok((cur, n));
        }
        let pick = |rule: Rule| steps.iter().copied().find(|s| s.rule == rule);
        let step = match strategy {
            Strategy::LeftmostR1First => pick(Rule::R1).or(pick(Rule::R2)),
            Strategy::LeftmostR2First => pick(Rule::R2).or(pick(Rule::R1)),
            Strategy::Rightmost => steps.iter().copied().max_by_key(|s| (s.at, s.rule)),
            Strategy::Alternating => {
                let (prefer, other) = if n.is_multiple_of(2) { (Rule::R1, Rule::R2) } else { (Rule::R2, Rule::R1) };
                pick(prefer).or(pick(other))
            }
            Strategy::Random(_) => steps.choose(rng.as_mut().expect("seeded")).copied(),
        }
        .expect("nonempty");
        let next = cur.apply(step)?;
        check_step(&cur, step, &next)?;
        cur = next;
        n += 1;
    }
}

pub fn normal_form(m: &XYMonomial, strategy: Strategy) -> Result<XYMonomial> {
    Ok(normal_form_traced(m, strategy)?.0)
}

/// All reduced monomials reachable from `m` by any sequence of steps.
pub fn reachable_reduced(m: &XYMonomial) -> Result<BTreeSet<XYMonomial>> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![m.clone()];
    let mut reduced = BTreeSet::new();
    while let Some(u) = stack.pop() {
        if !seen.insert(u.clone()) {
            continue;
        }
        let steps = applicable_steps(&u);
        if steps.is_empty() {
            reduced.insert(u);
            continue;
        }
        for s in steps {
            let v = u.apply(s)?;
            check_step(&u, s, &v)?;
            stack.push(v);
        }
    }
    Ok(reduced)
}

/// A random monomial with `1..=max_weight` factors, indices in `[-window, window]`;
/// roughly one factor in three is a `ybar`.
pub fn random_monomial<R: Rng>(rng: &mut R, k: usize, max_weight: usize, window: i64) -> XYMonomial {
    let w = rng.random_range(1..=max_weight.max(1));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for _ in 0..w {
        let i = rng.random_range(-window..=window);
        if rng.random_ratio(1, 3) {
            ys.push(i);
        } else {
            xs.push(i);
        }
    }
    XYMonomial::new(k, &xs, &ys)
}

fn confluence_one(m: &XYMonomial, seed: u64) -> Result<Option<String>> {
    let forms: Vec<XYMonomial> = Strategy::all(seed)
        .into_iter()
        .map(|s| normal_form(m, s))
        .collect::<Result<_>>()?;
    if forms.iter().all(|f| f == &forms[0]) && forms[0].is_reduced() {
        Ok(None)
    } else {
        let list: Vec<String> = forms.iter().map(ToString::to_string).collect();
        Ok(Some(format!("{m}: {}", list.join(" | "))))
    }
}

/// Normal forms under all five strategies agree on `samples` random monomials.
///
/// Sample `s` draws from the ChaCha stream `s` of `seed`, so results do not
/// depend on scheduling.
pub fn confluence_test(k: usize, samples: usize, seed: u64, max_weight: usize, window: i64) -> Result<CheckRecord> {
    if samples == 0 {
        return Err(Error::BadParameter("samples must be at least 1".into()));
    }
    if k == 0 {
        return Err(Error::BadParameter("k must be positive".into()));
    }
    let run = |s: usize| -> Result<Option<String>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let m = random_monomial(&mut rng, k, max_weight, window);
        confluence_one(&m, seed.wrapping_add(s as u64))
    };
    let results = map_samples(samples, run)?;
    let name = format!("confluence k={k}");
    let rec = match results.into_iter().flatten().next() {
        None => CheckRecord::pass(name),
        Some(bad) => CheckRecord::fail(name, bad),
    };
    Ok(rec
        .detail("samples", samples)
        .detail("seed", seed)
        .detail("max_weight", max_weight)
        .detail("window", window))
}

#[cfg(feature = "parallel")]
fn map_samples<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_samples<T>(n: usize, f: impl Fn(usize) -> Result<T>) -> Result<Vec<T>> {
    (0..n).map(f).collect()
}

/// Every monomial with at most `max_weight` factors over `[-window, window]`.
pub fn all_monomials(k: usize, max_weight: usize, window: i64) -> Vec<XYMonomial> {
    let symbols: Vec<(bool, i64)> = (-window..=window)
        .map(|i| (false, i))
        .chain((-window..=window).map(|i| (true, i)))
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(
        symbols: &[(bool, i64)],
        start: usize,
        left: usize,
        cur: &mut Vec<usize>,
        k: usize,
        out: &mut Vec<XYMonomial>,
    ) {
        if !cur.is_empty() {
            let xs: Vec<i64> = cur.iter().filter(|&&s| !symbols[s].0).map(|&s| symbols[s].1).collect();
            let ys: Vec<i64> = cur.iter().filter(|&&s| symbols[s].0).map(|&s| symbols[s].1).collect();
            out.push(XYMonomial::new(k, &xs, &ys));
        }
        if left == 0 {
            return;
        }
        for s in start..symbols.len() {
            cur.push(s);
            rec(symbols, s, left - 1, cur, k, out);
            cur.pop();
        }
    }
    rec(&symbols, 0, max_weight, &mut cur, k, &mut out);
    out
}

/// Exhaustive uniqueness: every small monomial has exactly one reachable
/// reduced form, and reduced forms with equal `phi` images coincide.
pub fn exhaustive_check(k: usize, max_weight: usize, window: i64) -> Result<CheckRecord> {
    let all = all_monomials(k, max_weight, window);
    let name = format!("exhaustive rewriting k={k}");
    let mut by_phi: BTreeMap<Monomial, XYMonomial> = BTreeMap::new();
    for m in &all {
        let red = reachable_reduced(m)?;
        if red.len() != 1 {
            let list: Vec<String> = red.iter().map(ToString::to_string).collect();
            return Ok(CheckRecord::fail(name, format!("{m} reduces to {}", list.join(" | "))));
        }
        if m.is_reduced() {
            if let Some(other) = by_phi.insert(phi(m), m.clone()) {
                return Ok(CheckRecord::fail(name, format!("{m} and {other} share phi")));
            }
        }
    }
    Ok(CheckRecord::pass(name)
        .detail("monomials", all.len())
        .detail("reduced", by_phi.len())
        .detail("max_weight", max_weight)
        .detail("window", window))
}

/// Reduced monomials of grade `key` whose `phi` image lies in `[-N, N]`,
/// optionally only those with at least one `ybar`.
pub fn count_reduced(k: usize, n: i64, key: GradedKey, require_y: bool) -> usize {
    let kk = k as i64;
    // (is_y, index, weight, degree)
    let symbols: Vec<(bool, i64, usize, i64)> = (-n..=n)
        .map(|i| (false, i, 1, i))
        .chain((-n..=n - kk).map(|i| (true, i, k + 1, (kk + 1) * i + kk * (kk + 1) / 2)))
        .collect();
    let mut count = 0usize;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        symbols: &[(bool, i64, usize, i64)],
        start: usize,
        weight_left: usize,
        deg_left: i64,
        xs: &mut Vec<i64>,
        ys: &mut Vec<i64>,
        k: usize,
        require_y: bool,
        count: &mut usize,
    ) {
        if weight_left == 0 {
            if deg_left == 0 && (!require_y || !ys.is_empty()) && XYMonomial::new(k, xs, ys).is_reduced() {
                *count += 1;
            }
            return;
        }
        for s in start..symbols.len() {
            let (is_y, i, w, d) = symbols[s];
            if w > weight_left {
                continue;
            }
            if is_y {
                ys.push(i);
            } else {
                xs.push(i);
            }
            rec(symbols, s, weight_left - w, deg_left - d, xs, ys, k, require_y, count);
            if is_y {
                ys.pop();
            } else {
                xs.pop();
            }
        }
    }
    rec(&symbols, 0, key.l, key.n, &mut xs, &mut ys, k, require_y, &mut count);
    count
}
