//! Text form of a model: `name[:key=val[,key=val]*]`.
//!
//! Names are `stable`, `stable_half`, `gamma` and `cpexp`; keys are
//! `alpha`, `s`, `a`, `theta`, `rate`, `eta` and `b`. Missing shape keys
//! default to 1 and a missing drift to 0. `stable_half` is
//! `stable:alpha=0.5,s=√2` and accepts only `b`.

use crate::error::{Error, Result};
use crate::model::SubordinatorSpec;

fn parse_err(pos: usize, expected: impl Into<String>) -> Error {
    Error::Parse { pos, expected: expected.into() }
}

fn allowed_keys(name: &str) -> &'static [&'static str] {
    match name {
        "stable" => &["alpha", "s", "b"],
        "stable_half" => &["b"],
        "gamma" => &["a", "theta", "b"],
        "cpexp" => &["rate", "eta", "b"],
        _ => &[],
    }
}

pub fn parse_model(text: &str) -> Result<SubordinatorSpec> {
    let (name, rest, rest_pos) = match text.find(':') {
        Some(i) => (&text[..i], Some(&text[i + 1..]), i + 1),
        None => (text, None, text.len()),
    };
    let keys = allowed_keys(name);
    if keys.is_empty() {
        return Err(parse_err(0, "model name (stable, stable_half, gamma, cpexp)"));
    }
    let mut values: Vec<(&str, f64)> = Vec::new();
    if let Some(rest) = rest {
        let mut pos = rest_pos;
        for item in rest.split(',') {
            let eq = item.find('=').ok_or_else(|| parse_err(pos + item.len(), "'=' after key"))?;
            let key = &item[..eq];
            if !keys.contains(&key) {
                return Err(parse_err(pos, format!("one of {keys:?} for {name}")));
            }
            if values.iter().any(|(k, _)| *k == key) {
                return Err(parse_err(pos, format!("each key at most once, '{key}' repeated")));
            }
            let raw = &item[eq + 1..];
            let v: f64 = raw.trim().parse().map_err(|_| parse_err(pos + eq + 1, "a number"))?;
            values.push((key, v));
            pos += item.len() + 1;
        }
    }
    let get = |k: &str, default: f64| values.iter().find(|(key, _)| *key == k).map_or(default, |p| p.1);
    let base = match name {
        "stable" => SubordinatorSpec::stable(get("alpha", 1.0 / 2.0), get("s", 1.0))?,
        "stable_half" => SubordinatorSpec::stable_half(),
        "gamma" => SubordinatorSpec::gamma(get("a", 1.0), get("theta", 1.0))?,
        _ => SubordinatorSpec::cp_exp(get("rate", 1.0), get("eta", 1.0))?,
    };
    base.with_drift(get("b", 0.0))
}

/// Canonical text; `parse_model(&render_model(m)) == m`.
pub fn render_model(spec: &SubordinatorSpec) -> String {
    spec.to_string()
}
