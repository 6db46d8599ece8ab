//! Run configuration, ideal-spec parsing and the JSON report behind the
//! `flatdeform` binary.
//!
//! Everything here is deterministic given the configuration; wall-clock
//! timings live in their own report section and are left out of
//! [`Report::to_json_stable`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::algebra::{builtin_family, flatness_report, CutoffAlgebra, IdealFamily, VerdictBasis};
use crate::constraints::{self, IndexWindow};
use crate::error::{Error, Result};
use crate::feq::{self, FamilySpec, Pattern, RelationVector, SolveMode};
use crate::report::{CheckRecord, Status, Window};
use crate::ring::{format_rational, parse_rational, Rational, EXACT};
use crate::{rewrite, theta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ThetaVerify,
    FeqCheck,
    RelationsSolve,
    Flatness,
    RewriteConfluence,
    ConstraintsDerive,
    ConstraintsCheck,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::ThetaVerify,
        Command::FeqCheck,
        Command::RelationsSolve,
        Command::Flatness,
        Command::RewriteConfluence,
        Command::ConstraintsDerive,
        Command::ConstraintsCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::ThetaVerify => "theta-verify",
            Command::FeqCheck => "feq-check",
            Command::RelationsSolve => "relations-solve",
            Command::Flatness => "flatness",
            Command::RewriteConfluence => "rewrite-confluence",
            Command::ConstraintsDerive => "constraints-derive",
            Command::ConstraintsCheck => "constraints-check",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::BadParameter(format!("unknown command `{s}`")))
    }
}

/// Everything a run needs. Numeric fields are range-checked by [`RunConfig::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub ideal: String,
    pub n: i64,
    pub l_max: usize,
    pub n_range: Option<(i64, i64)>,
    /// Rationals as `p/r` strings, kept verbatim for the parameter echo.
    pub q_samples: Vec<String>,
    pub qorder: i64,
    pub jwindow: i64,
    /// Total-degree label for relation spaces.
    pub s: i64,
    pub seed: u64,
    pub samples: usize,
    pub k: usize,
    /// Number of unknowns `a_1..a_W` in the constraint experiment.
    pub w: usize,
    pub adeg_cap: u32,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            ideal: "theta-k1".into(),
            n: 6,
            l_max: 3,
            n_range: None,
            q_samples: vec!["1/3".into(), "2/5".into()],
            qorder: 8,
            jwindow: 6,
            s: 3,
            seed: 7,
            samples: 10_000,
            k: 1,
            w: constraints::DEFAULT_W,
            adeg_cap: constraints::DEFAULT_ADEG_CAP,
            out: None,
        }
    }

    /// Applies one `key=value` setting (config files and flags share keys).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.trim()
                .parse()
                .map_err(|_| Error::BadParameter(format!("`{key}` expects an integer, got `{v}`")))
        }
        match key {
            "command" => self.command = value.parse()?,
            "ideal" => self.ideal = value.trim().to_string(),
            "N" | "n" => self.n = num(key, value)?,
            "lmax" | "l_max" => self.l_max = num(key, value)?,
            "n-range" | "n_range" => {
                let (lo, hi) = value
                    .split_once("..")
                    .ok_or_else(|| Error::BadParameter(format!("n-range expects `lo..hi`, got `{value}`")))?;
                self.n_range = Some((num(key, lo)?, num(key, hi)?));
            }
            "q" => {
                self.q_samples = value.split(';').map(|s| s.trim().to_string()).collect();
            }
            "qorder" => self.qorder = num(key, value)?,
            "jwindow" => self.jwindow = num(key, value)?,
            "s" => self.s = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "samples" => self.samples = num(key, value)?,
            "k" => self.k = num(key, value)?,
            "W" | "w" => self.w = num(key, value)?,
            "adeg-cap" | "adeg_cap" => self.adeg_cap = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            other => return Err(Error::BadParameter(format!("unknown setting `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        fn within<T: PartialOrd + fmt::Display>(name: &str, v: T, lo: T, hi: T) -> Result<()> {
            if v < lo || v > hi {
                return Err(Error::BadParameter(format!("{name} = {v} is outside [{lo}, {hi}]")));
            }
            Ok(())
        }
        within("N", self.n, 1, 64)?;
        within("lmax", self.l_max, 1, 8)?;
        within("qorder", self.qorder, 1, 64)?;
        within("jwindow", self.jwindow, 1, 64)?;
        within("samples", self.samples, 1, 10_000_000)?;
        within("k", self.k, 1, 8)?;
        within("W", self.w, 1, 16)?;
        within("adeg-cap", self.adeg_cap, 1, 8)?;
        if let Some((lo, hi)) = self.n_range {
            if lo > hi {
                return Err(Error::BadParameter(format!("n-range {lo}..{hi} is empty")));
            }
        }
        let qs = self.q_values()?;
        if qs.is_empty() {
            return Err(Error::BadParameter("at least one q sample is required".into()));
        }
        let deforming = matches!(self.command, Command::Flatness | Command::RelationsSolve);
        if deforming && qs.iter().any(|q| q == &Rational::from_integer(0.into())) {
            return Err(Error::BadParameter("q samples must be nonzero for deformation checks".into()));
        }
        if matches!(self.command, Command::Flatness | Command::RelationsSolve) {
            parse_ideal_spec(&self.ideal)?;
        }
        Ok(())
    }

    pub fn q_values(&self) -> Result<Vec<Rational>> {
        self.q_samples.iter().map(|s| parse_rational(s)).collect()
    }

    /// Parameter echo: only what the command reads, in a fixed order.
    fn echo(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut put = |k: &str, v: Value| {
            m.insert(k.to_string(), v);
        };
        let q: Vec<Value> = self.q_samples.iter().map(|s| Value::from(s.as_str())).collect();
        match self.command {
            Command::ThetaVerify => put("qorder", self.qorder.into()),
            Command::FeqCheck => {
                put("k", self.k.into());
                put("jwindow", self.jwindow.into());
                put("qorder", self.qorder.into());
            }
            Command::RelationsSolve => {
                put("ideal", self.ideal.clone().into());
                put("s", self.s.into());
                put("jwindow", self.jwindow.into());
                put("q", q[0].clone());
                put("qorder", self.qorder.into());
            }
            Command::Flatness => {
                put("ideal", self.ideal.clone().into());
                put("N", self.n.into());
                put("lmax", self.l_max.into());
                if let Some((lo, hi)) = self.n_range {
                    put("n_range", format!("{lo}..{hi}").into());
                }
                put("q", Value::Array(q));
                put("qorder", self.qorder.into());
            }
            Command::RewriteConfluence => {
                put("k", self.k.into());
                put("samples", self.samples.into());
                put("seed", self.seed.into());
            }
            Command::ConstraintsDerive | Command::ConstraintsCheck => {
                put("W", self.w.into());
                put("adeg_cap", self.adeg_cap.into());
                if self.command == Command::ConstraintsCheck {
                    put("qorder", self.qorder.into());
                }
            }
        }
        m
    }
}

/// Reads a config file: one `key=value` per line, `#` starts a comment.
/// Repeated `q` lines accumulate.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in text.lines() {
        let body = line.split('#').next().unwrap_or("").trim();
        if !body.is_empty() {
            let (k, v) = body.split_once('=').ok_or_else(|| Error::Parse {
                pos: offset,
                msg: format!("expected `key=value`, got `{body}`"),
            })?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        offset += line.len() + 1;
    }
    Ok(out)
}

/// Applies config pairs; repeated `q` keys accumulate into one sample list.
pub fn apply_config(cfg: &mut RunConfig, pairs: &[(String, String)]) -> Result<()> {
    let qs: Vec<&str> = pairs.iter().filter(|(k, _)| k == "q").map(|(_, v)| v.as_str()).collect();
    for (k, v) in pairs.iter().filter(|(k, _)| k != "q") {
        cfg.set(k, v)?;
    }
    if !qs.is_empty() {
        cfg.set("q", &qs.join(";"))?;
    }
    Ok(())
}

/// Splits `name(:key=value(,key=value)*)?` into its parts.
pub fn split_ideal_spec(s: &str) -> Result<(String, Vec<(String, String)>)> {
    let err = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.into() };
    let name_ok = |c: char| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-';
    let (name, rest) = match s.find(':') {
        Some(p) => (&s[..p], Some((p + 1, &s[p + 1..]))),
        None => (s, None),
    };
    if name.is_empty() {
        return Err(err(0, "missing family name"));
    }
    if let Some(p) = name.find(|c| !name_ok(c)) {
        return Err(err(p, "family names use lowercase letters, digits and `-`"));
    }
    let mut params = Vec::new();
    if let Some((start, body)) = rest {
        let mut pos = start;
        for item in body.split(',') {
            let Some(eq) = item.find('=') else {
                return Err(err(pos, "expected `key=value`"));
            };
            let (k, v) = (&item[..eq], &item[eq + 1..]);
            if k.is_empty() {
                return Err(err(pos, "empty key"));
            }
            if let Some(p) = k.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
                return Err(err(pos + p, "keys use letters, digits and `_`"));
            }
            if v.is_empty() {
                return Err(err(pos + eq + 1, "empty value"));
            }
            if let Some(p) = v.find(char::is_whitespace) {
                return Err(err(pos + eq + 1 + p, "whitespace in value"));
            }
            if params.iter().any(|(seen, _): &(String, String)| seen == k) {
                return Err(err(pos, "duplicate key"));
            }
            params.push((k.to_string(), v.to_string()));
            pos += item.len() + 1;
        }
    }
    Ok((name.to_string(), params))
}

pub fn parse_ideal_spec(s: &str) -> Result<IdealFamily> {
    let (name, params) = split_ideal_spec(s)?;
    builtin_family(&name, &params)
}

/// Wall clock for the timing section. `std::time::Instant` panics on
/// `wasm32-unknown-unknown`, where timings are reported as zero.
#[derive(Clone, Copy)]
struct Clock(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Clock {
    fn now() -> Self {
        #[cfg(not(target_arch = "wasm32"))]
        return Clock(std::time::Instant::now());
        #[cfg(target_arch = "wasm32")]
        return Clock();
    }

    fn elapsed_ms(self) -> u128 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.0.elapsed().as_millis();
        #[cfg(target_arch = "wasm32")]
        return 0;
    }
}

/// Overall status: any failure wins, then conjecture support.
fn overall(records: &[CheckRecord]) -> Status {
    if records.iter().any(|r| r.status.is_fail()) {
        Status::Fail
    } else if records.iter().any(|r| r.status == Status::ConjectureSupport) {
        Status::ConjectureSupport
    } else {
        Status::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub total_ms: u128,
    /// Milliseconds per record, same order as `records`.
    pub per_record_ms: Vec<u128>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: String,
    pub command: Command,
    pub parameters: Map<String, Value>,
    pub status: Status,
    pub records: Vec<CheckRecord>,
    pub timing: Timing,
}

impl Report {
    /// 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.status.is_fail() {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without the timing section: byte-identical across runs
    /// with the same configuration.
    pub fn to_json_stable(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(m) = &mut v {
            m.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

/// Whether an error means the request itself was malformed (exit code 2).
pub fn is_usage_error(e: &Error) -> bool {
    matches!(e, Error::BadParameter(_) | Error::Parse { .. } | Error::UnknownFamily(_))
}

/// Runs one group of checks. Usage errors propagate; anything else becomes a
/// failed record so the rest of the report is still emitted.
fn guarded(name: &str, f: impl FnOnce() -> Result<Vec<CheckRecord>>) -> Result<Vec<CheckRecord>> {
    match f() {
        Ok(v) => Ok(v),
        Err(e) if is_usage_error(&e) => Err(e),
        Err(e) => Ok(vec![CheckRecord::fail(name, e.to_string())]),
    }
}

/// Validates the configuration and runs the command.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Clock::now();
    let mut records = Vec::new();
    let mut per_record_ms = Vec::new();
    let mut push = |group: Vec<CheckRecord>, t: Clock| {
        let ms = t.elapsed_ms();
        for r in group {
            records.push(r);
            per_record_ms.push(ms);
        }
    };
    let qorder = cfg.qorder;
    match cfg.command {
        Command::ThetaVerify => {
            let t = Clock::now();
            push(guarded("theta identities", || theta::check_theta_identities(qorder))?, t);
        }
        Command::FeqCheck => {
            let t = Clock::now();
            push(guarded("lemma 5.2", || lemma_5_2(cfg.jwindow, qorder))?, t);
            for k in 1..=cfg.k {
                let t = Clock::now();
                push(guarded(&format!("f_{{{k},{k}}} checks"), || fkk_checks(k, cfg.jwindow, qorder))?, t);
            }
        }
        Command::RelationsSolve => {
            let t = Clock::now();
            let q = cfg.q_values()?.remove(0);
            push(guarded("relation space", || relations(cfg, &q).map(|r| vec![r]))?, t);
        }
        Command::Flatness => {
            let t = Clock::now();
            push(guarded("flatness", || flatness(cfg).map(|r| vec![r]))?, t);
        }
        Command::RewriteConfluence => {
            let t = Clock::now();
            push(
                guarded("confluence", || {
                    Ok(vec![rewrite::confluence_test(cfg.k, cfg.samples, cfg.seed, 8, 10)?])
                })?,
                t,
            );
            let t = Clock::now();
            push(guarded("exhaustive rewriting", || Ok(vec![rewrite::exhaustive_check(cfg.k, 4, 4)?]))?, t);
        }
        Command::ConstraintsDerive => {
            let t = Clock::now();
            push(guarded("constraints", || constraints_derive(cfg).map(|r| vec![r]))?, t);
        }
        Command::ConstraintsCheck => {
            let t = Clock::now();
            push(guarded("constraints candidate", || constraints_check(cfg).map(|r| vec![r]))?, t);
        }
    }
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: cfg.command,
        parameters: cfg.echo(),
        status: overall(&records),
        records,
        timing: Timing {
            total_ms: start.elapsed_ms(),
            per_record_ms,
        },
    })
}

fn lemma_5_2(jwindow: i64, qorder: i64) -> Result<Vec<CheckRecord>> {
    let f = theta::f1_series(qorder);
    let fam = FamilySpec::quadratic(crate::funcreal::Kind::Bosonic, vec![1], vec![f], 3)?;
    let g = RelationVector::theta(3, jwindow.max(qorder), qorder);
    let rec = feq::check_fa1(&fam, &g, qorder)?;
    Ok(vec![CheckRecord { name: format!("lemma 5.2: {}", rec.name), ..rec }])
}

fn fkk_checks(k: usize, jwindow: i64, qorder: i64) -> Result<Vec<CheckRecord>> {
    let f = theta::fnk_series(theta::FnkSpec::new(k, k, qorder)?)?;
    let b = RelationVector::theta(0, jwindow.max(qorder), qorder);
    Ok(vec![
        theta::check_fpr(k, k, qorder)?,
        theta::check_rest1(k, qorder)?,
        theta::check_vanishing(k, qorder)?,
        feq::check_fah1(k, &f, &b, qorder)?,
    ])
}

fn relations(cfg: &RunConfig, q: &Rational) -> Result<CheckRecord> {
    let fam = parse_ideal_spec(&cfg.ideal)?;
    let spread = if fam.truncation().is_some() { 4 * cfg.jwindow } else { 10 * cfg.jwindow };
    let spec = FamilySpec::from_family(&fam, cfg.s, spread)?;
    let space = feq::solve_relation_space(&spec, cfg.jwindow, q, cfg.qorder)?;
    let name = format!("relation space {} s={}", fam.spec(), cfg.s);
    // For two-variable generators the monomial reference gives the expected
    // dimension; otherwise a nonzero kernel is what is asked for.
    let expected = match spec.pattern {
        Pattern::Quadratic { .. } => {
            let shifts: Vec<i64> = fam.reference_offsets().iter().map(|o| o[1] - o[0]).collect();
            Some(feq::ds_monomial(&shifts, cfg.s, cfg.jwindow)?)
        }
        Pattern::Higher { .. } => None,
    };
    let ok = match expected {
        Some(d) => space.dimension == d,
        None => space.dimension >= 1,
    };
    let mut rec = if !ok {
        CheckRecord::fail(
            name,
            match expected {
                Some(d) => format!("dimension {} but the monomial reference has {d}", space.dimension),
                None => "no relations found".to_string(),
            },
        )
    } else if fam.is_conjecture() {
        CheckRecord::pass(name).with_status(Status::ConjectureSupport)
    } else {
        CheckRecord::pass(name)
    };
    rec = match &space.mode {
        SolveMode::Specialized { q } => rec
            .with_window(Window::new(0, EXACT))
            .detail("mode", "specialized")
            .detail("q", format_rational(q)),
        SolveMode::FormalQ { precision } => rec
            .with_window(Window::new(0, *precision))
            .detail("mode", "formal-q")
            .detail("precision", *precision),
    };
    if let Some(d) = expected {
        rec = rec.detail("reference_dimension", d);
    }
    Ok(rec
        .detail("dimension", space.dimension)
        .detail("unknowns", space.unknowns)
        .detail("equations", space.equations))
}

fn flatness(cfg: &RunConfig) -> Result<CheckRecord> {
    let fam = parse_ideal_spec(&cfg.ideal)?;
    let alg = CutoffAlgebra::new(fam.kind(), cfg.n)?;
    let qs = cfg.q_values()?;
    let rep = flatness_report(&alg, &fam, cfg.l_max, cfg.n_range, &qs, cfg.qorder)?;
    let window = match rep.basis {
        VerdictBasis::Specialized => Window::new(0, EXACT),
        VerdictBasis::FormalQ => {
            let p = rep.interior().filter_map(|k| k.formal.as_ref().map(|f| f.precision)).min().unwrap_or(0);
            Window::new(0, p)
        }
    };
    let keys = serde_json::to_value(&rep.keys).expect("keys serialize");
    Ok(rep
        .to_record(fam.is_conjecture())
        .with_window(window)
        .detail("basis", serde_json::to_value(rep.basis).expect("basis serializes"))
        .detail("margin", rep.margin)
        .detail("keys", keys))
}

fn constraints_derive(cfg: &RunConfig) -> Result<CheckRecord> {
    let set = constraints::derive_constraints(0, cfg.w, cfg.adeg_cap, IndexWindow::around(0, constraints::DEFAULT_INDEX_MARGIN))?;
    let name = format!("constraints W={} adeg_cap={}", cfg.w, cfg.adeg_cap);
    let degree_zero = set.constraints.iter().find(|c| c.poly.min_degree() == Some(0));
    let rec = match (set.constraints.is_empty(), degree_zero) {
        (true, _) => CheckRecord::fail(name, "no constraints"),
        (false, Some(c)) => CheckRecord::fail(name, format!("a-degree 0 part at {:?}", c.monomial)),
        (false, None) => CheckRecord::pass(name),
    };
    let listed: Map<String, Value> = set
        .constraints
        .iter()
        .map(|c| {
            let mono: Vec<String> = c.monomial.iter().map(|i| format!("x{i}")).collect();
            (mono.join("*"), Value::from(c.poly.to_string()))
        })
        .collect();
    Ok(rec
        .detail("count", set.constraints.len())
        .detail("frontier", set.frontier.len())
        .detail("constraints", Value::Object(listed)))
}

fn constraints_check(cfg: &RunConfig) -> Result<CheckRecord> {
    let set = constraints::derive_constraints(0, cfg.w, cfg.adeg_cap, IndexWindow::around(0, constraints::DEFAULT_INDEX_MARGIN))?;
    let cand = constraints::theta_candidate(cfg.w);
    // The first nonzero theta value past W bounds what W can certify.
    let omitted = constraints::theta_candidate(cfg.w + 3)
        .into_iter()
        .filter(|(m, _)| *m > cfg.w)
        .filter_map(|(_, v)| v.valuation())
        .min();
    Ok(constraints::check_candidate(&cand, &set, cfg.qorder, omitted))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_grammar() {
        assert_eq!(split_ideal_spec("theta-k1").unwrap(), ("theta-k1".to_string(), vec![]));
        let (n, p) = split_ideal_spec("conj51:t=2/3,qt=1").unwrap();
        assert_eq!(n, "conj51");
        assert_eq!(p, vec![("t".into(), "2/3".into()), ("qt".into(), "1".into())]);
        assert!(matches!(split_ideal_spec("theta-fkk:k"), Err(Error::Parse { pos: 10, .. })));
        assert!(matches!(split_ideal_spec("theta-fkk:k=2,=3"), Err(Error::Parse { pos: 14, .. })));
        assert!(matches!(split_ideal_spec("Theta"), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(split_ideal_spec(":k=1"), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_ideal_spec("nope"), Err(Error::UnknownFamily(_))));
        assert_eq!(parse_ideal_spec("theta-fkk:k=2").unwrap().degree(), 2);
    }

    #[test]
    fn config_file() {
        let pairs = parse_config("# flatness run\ncommand = flatness\nideal=conj51:t=2/3,qt=1\nq=1/3\nq=2/5\nN=5\n").unwrap();
        let mut cfg = RunConfig::new(Command::ThetaVerify);
        apply_config(&mut cfg, &pairs).unwrap();
        assert_eq!(cfg.command, Command::Flatness);
        assert_eq!(cfg.ideal, "conj51:t=2/3,qt=1");
        assert_eq!(cfg.q_samples, vec!["1/3", "2/5"]);
        assert_eq!(cfg.n, 5);
        assert!(matches!(parse_config("ok=1\nbroken\n"), Err(Error::Parse { pos: 5, .. })));
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::new(Command::Flatness);
        cfg.q_samples = vec!["0".into()];
        assert!(cfg.validate().is_err());
        cfg.q_samples = vec!["1/3".into()];
        cfg.n = 0;
        assert!(cfg.validate().is_err());
        assert!("bogus".parse::<Command>().is_err());
    }

    #[test]
    fn stable_reports() {
        let mut cfg = RunConfig::new(Command::RewriteConfluence);
        cfg.samples = 50;
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.to_json_stable(), b.to_json_stable());
        assert_eq!(a.exit_code(), 0);
        assert!(!a.to_json_stable().contains("timing"));
        assert!(a.to_json().contains("timing"));
    }
}
