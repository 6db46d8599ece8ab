//! Check records shared by the library checks and the CLI report.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::ring::{format_rational, ExpVec, LaurentPoly, Rational, EXACT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ConjectureSupport,
}

impl Status {
    pub fn is_fail(self) -> bool {
        self == Status::Fail
    }
}

/// Half-open q-exponent window `[lo, hi)`; `hi = None` means exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub lo: i64,
    pub hi: Option<i64>,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Self {
        Window {
            lo,
            hi: (hi < EXACT).then_some(hi),
        }
    }

    /// Whether the window covers every exponent below `qorder` from `lo` on.
    pub fn reaches(&self, qorder: i64) -> bool {
        self.hi.is_none_or(|h| h >= qorder)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub details: Map<String, Value>,
}

impl CheckRecord {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            status: Status::Pass,
            window: None,
            counterexample: None,
            details: Map::new(),
        }
    }

    pub fn fail(name: impl Into<String>, counterexample: impl Into<String>) -> Self {
        CheckRecord {
            status: Status::Fail,
            counterexample: Some(counterexample.into()),
            ..Self::pass(name)
        }
    }

    pub fn with_window(mut self, w: Window) -> Self {
        self.window = Some(w);
        self
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }
}

impl CheckRecord {
    /// Turns a failed record into [`Error::CheckFailed`].
    pub fn into_result(self) -> Result<Self> {
        match self.status {
            Status::Fail => Err(Error::check(
                self.name,
                self.counterexample.unwrap_or_default(),
            )),
            _ => Ok(self),
        }
    }
}

/// First offending coefficient of a residual, formatted for reports.
pub fn describe_term(qexp: i64, e: &ExpVec, coeff: &Rational) -> String {
    format!("q^{qexp} z^{e}: {}", format_rational(coeff))
}

/// Compares two polynomials on their common certified window.
pub fn compare(name: &str, lhs: &LaurentPoly, rhs: &LaurentPoly) -> Result<CheckRecord> {
    let diff = lhs.sub(rhs)?;
    residual_record(name, &diff, lhs.q_valuation().min(rhs.q_valuation()))
}

/// A record asserting that `residual` vanishes on its certified window.
pub fn residual_record(name: &str, residual: &LaurentPoly, lo: i64) -> Result<CheckRecord> {
    let window = Window::new(lo.min(0), residual.certified_hi());
    let rec = match residual.first_term() {
        None => CheckRecord::pass(name),
        Some((v, e, c)) => CheckRecord::fail(name, describe_term(v, &e, &c)),
    };
    Ok(rec.with_window(window))
}
