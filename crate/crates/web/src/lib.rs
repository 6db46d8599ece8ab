//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export returns a JSON string; errors come back as plain messages.

use flatdeform::cli::{run, Command, RunConfig};
use flatdeform::rewrite::{normal_form_traced, phi, Strategy, XYMonomial};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn parse_indices(s: &str) -> Result<Vec<i64>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("`{t}` is not an integer index")))
        .collect()
}

fn report(cfg: &RunConfig) -> Result<String, String> {
    run(cfg).map(|r| r.to_json_stable()).map_err(|e| e.to_string())
}

/// Flatness report for an ideal spec such as `theta-k1` or `theta-fkk:k=2`.
/// `q` holds one or more `p/r` samples separated by `;`.
#[wasm_bindgen]
pub fn flatness(ideal: &str, n: i64, lmax: usize, q: &str) -> Result<String, String> {
    let mut cfg = RunConfig::new(Command::Flatness);
    cfg.set("ideal", ideal).map_err(|e| e.to_string())?;
    cfg.set("q", q).map_err(|e| e.to_string())?;
    cfg.n = n;
    cfg.l_max = lmax;
    report(&cfg)
}

/// Dimension of the cubic relation space at label `s`.
#[wasm_bindgen]
pub fn relation_space(ideal: &str, s: i64, jwindow: i64, q: &str) -> Result<String, String> {
    let mut cfg = RunConfig::new(Command::RelationsSolve);
    cfg.set("ideal", ideal).map_err(|e| e.to_string())?;
    cfg.set("q", q).map_err(|e| e.to_string())?;
    cfg.s = s;
    cfg.jwindow = jwindow;
    report(&cfg)
}

/// Normal form of `prod x_i * prod ybar_j` under every strategy.
#[wasm_bindgen]
pub fn normal_form(k: usize, xs: &str, ys: &str) -> Result<String, String> {
    if !(1..=8).contains(&k) {
        return Err("k must be between 1 and 8".into());
    }
    let (xs, ys) = (parse_indices(xs)?, parse_indices(ys)?);
    if xs.len() + ys.len() > 24 {
        return Err("at most 24 factors".into());
    }
    let m = XYMonomial::new(k, &xs, &ys);
    let mut forms = Vec::new();
    for strategy in Strategy::all(0) {
        let (f, steps) = normal_form_traced(&m, strategy).map_err(|e| e.to_string())?;
        forms.push(json!({
            "strategy": format!("{strategy:?}"),
            "normal_form": f.to_string(),
            "steps": steps,
        }));
    }
    Ok(json!({
        "input": m.to_string(),
        "phi": phi(&m).indices(),
        "forms": forms,
    })
    .to_string())
}
