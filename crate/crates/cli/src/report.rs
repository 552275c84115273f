//! Reports: JSON documents with a status, results and provenance, and their
//! text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::scenario::Options;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Failed,
    InvalidInput,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::InvalidInput => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub seed: u64,
    pub options: Options,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Command name, or null when the scenario could not be read.
    pub command: Option<String>,
    pub status: Status,
    pub results: Value,
    pub provenance: Provenance,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// One pass/fail line inside a report's results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// "<=" or ">=" against `bound`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= bound,
            value: Some(value),
            relation: Some("<=".into()),
            bound: Some(bound),
            detail: None,
        }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value >= bound,
            value: Some(value),
            relation: Some(">=".into()),
            bound: Some(bound),
            detail: None,
        }
    }

    pub fn holds(name: &str, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            value: None,
            relation: None,
            bound: None,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Results of a command that ran to completion: payload plus checks.
pub struct Outcome {
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn new() -> Self {
        Self {
            results: Map::new(),
            checks: Vec::new(),
        }
    }

    pub fn put(&mut self, key: &str, value: impl Serialize) {
        self.results
            .insert(key.into(), serde_json::to_value(value).expect("results serialize"));
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn status(&self) -> Status {
        if self.checks.iter().all(|c| c.passed) {
            Status::Ok
        } else {
            Status::Failed
        }
    }

    pub fn into_value(mut self) -> Value {
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        if !failed.is_empty() {
            let failed = serde_json::to_value(&failed).expect("names serialize");
            self.results.insert("failed_checks".into(), failed);
        }
        let checks = serde_json::to_value(&self.checks).expect("checks serialize");
        self.results.insert("checks".into(), checks);
        Value::Object(self.results)
    }
}

impl Default for Outcome {
    fn default() -> Self {
        Self::new()
    }
}

/// Residual-style numbers: scientific notation, 3 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

fn as_complex_matrix(v: &Value) -> Option<(usize, usize)> {
    let rows = v.as_array()?;
    let cols = rows.first()?.as_array()?.len();
    let ok = rows.iter().all(|r| {
        r.as_array().is_some_and(|r| {
            r.len() == cols
                && r.iter().all(|z| {
                    z.as_array()
                        .is_some_and(|z| z.len() == 2 && z.iter().all(Value::is_number))
                })
        })
    });
    (ok && cols > 0).then_some((rows.len(), cols))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => sci(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => "-".into(),
        _ => unreachable!("scalars only"),
    }
}

fn render(out: &mut String, path: &str, v: &Value) {
    if let Some((r, c)) = as_complex_matrix(v) {
        let _ = writeln!(out, "  {path}: <{r}x{c} complex matrix>");
        return;
    }
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                render(out, &p, x);
            }
        }
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = xs.iter().map(scalar).collect();
            let _ = writeln!(out, "  {path}: [{}]", items.join(", "));
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                render(out, &format!("{path}[{i}]"), x);
            }
        }
        _ => {
            let _ = writeln!(out, "  {path}: {}", scalar(v));
        }
    }
}

/// Human-readable form. Matrices are summarized by shape; checks get one
/// PASS/FAIL line each.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "command: {}", report.command.as_deref().unwrap_or("-"));
    let status = serde_json::to_value(report.status).expect("status serializes");
    let _ = writeln!(out, "status: {}", scalar(&status));
    if let Some(checks) = report.results.get("checks").and_then(Value::as_array) {
        let _ = writeln!(out, "checks:");
        for c in checks {
            let c: Check = serde_json::from_value(c.clone()).expect("checks round-trip");
            let mark = if c.passed { "PASS" } else { "FAIL" };
            let mut line = format!("  {mark} {}", c.name);
            if let Some(v) = c.value {
                let _ = write!(line, ": {}", sci(v));
                if let (Some(rel), Some(b)) = (&c.relation, c.bound) {
                    let _ = write!(line, " {rel} {}", sci(b));
                }
            }
            if let Some(d) = &c.detail {
                let _ = write!(line, " ({d})");
            }
            let _ = writeln!(out, "{line}");
        }
    }
    let _ = writeln!(out, "results:");
    if let Value::Object(map) = &report.results {
        for (k, v) in map {
            if k != "checks" {
                render(&mut out, k, v);
            }
        }
    }
    let _ = writeln!(out, "provenance:");
    let prov = serde_json::to_value(&report.provenance).expect("provenance serializes");
    render(&mut out, "", &prov);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn three_significant_digits() {
        assert_eq!(sci(1.23456e-9), "1.23e-9");
        assert_eq!(sci(0.0), "0.00e0");
        assert_eq!(sci(-16.0 / 9.0), "-1.78e0");
    }

    #[test]
    fn status_follows_checks() {
        let mut o = Outcome::new();
        o.check(Check::at_most("a", 1e-9, 1e-8));
        assert_eq!(o.status(), Status::Ok);
        o.check(Check::at_least("b", 1e-4, 1e-3));
        assert_eq!(o.status(), Status::Failed);
        let v = o.into_value();
        assert_eq!(v["failed_checks"], json!(["b"]));
    }

    #[test]
    fn text_summarizes_matrices() {
        let report = Report {
            command: Some("evolve".into()),
            status: Status::Ok,
            results: json!({"map": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]], "residual": 1.5e-12}),
            provenance: Provenance {
                version: "0".into(),
                seed: 0,
                options: Options::default(),
            },
        };
        let text = render_text(&report);
        assert!(text.contains("map: <2x2 complex matrix>"));
        assert!(text.contains("residual: 1.50e-12"));
    }
}
