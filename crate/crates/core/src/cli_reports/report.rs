use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Number, Value};

use crate::spin_numerics::{CMatrix, CVector};

/// One named pass/fail comparison with its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `measured ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
        }
    }

    /// Passes when |measured − expected| ≤ tolerance; records the deviation.
    pub fn close(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Check::at_most(name, (measured - expected).abs(), tolerance)
    }

    /// A structural yes/no check (measured 0 on success, 1 on failure).
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            passed: ok,
            measured: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
        }
    }
}

/// Everything a command reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    /// Wall-clock milliseconds; only present when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl ReportDocument {
    pub fn new(command: impl Into<String>, inputs: Value) -> Self {
        ReportDocument {
            command: command.into(),
            inputs,
            results: Value::Object(Map::new()),
            checks: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn set(&mut self, key: &str, value: Value) {
        if let Value::Object(map) = &mut self.results {
            map.insert(key.to_string(), value);
        }
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Pretty JSON with sorted keys and floats at 15 significant digits.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report is serializable");
        let mut text = serde_json::to_string_pretty(&round_floats(value)).expect("valid json");
        text.push('\n');
        text
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let mut lines = Vec::new();
        flatten("", &round_floats(self.inputs.clone()), &mut lines);
        if !lines.is_empty() {
            let _ = writeln!(out, "inputs:");
            for (k, v) in &lines {
                let _ = writeln!(out, "  {k} = {v}");
            }
        }
        lines.clear();
        flatten("", &round_floats(self.results.clone()), &mut lines);
        if !lines.is_empty() {
            let _ = writeln!(out, "results:");
            for (k, v) in &lines {
                let _ = writeln!(out, "  {k} = {v}");
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "checks:");
            for c in &self.checks {
                let _ = writeln!(
                    out,
                    "  [{}] {}  measured={:.3e} tolerance={:.1e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.tolerance
                );
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "summary: {passed}/{} checks passed", self.checks.len());
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(out, "time: {ms:.1} ms");
        }
        out
    }
}

fn is_matrix(map: &Map<String, Value>) -> bool {
    map.len() == 3 && map.contains_key("rows") && map.contains_key("cols") && map.contains_key("data")
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) if is_matrix(map) => {
            out.push((prefix.to_string(), format!("<{} x {} matrix>", map["rows"], map["cols"])));
        }
        Value::Object(map) if map.len() == 1 && map.contains_key("twice") => {
            let t = map["twice"].as_i64().unwrap_or(0);
            let shown = if t % 2 == 0 { format!("{}", t / 2) } else { format!("{t}/2") };
            out.push((prefix.to_string(), shown));
        }
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Rounds every float to 15 significant digits; non-finite values become null.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            round15(x)
                .and_then(Number::from_f64)
                .map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, x)| (k, round_floats(x))).collect()),
        other => other,
    }
}

fn round15(x: f64) -> Option<f64> {
    if !x.is_finite() {
        return None;
    }
    let r: f64 = format!("{x:.14e}").parse().ok()?;
    // avoid a negative zero in the output
    Some(if r == 0.0 { 0.0 } else { r })
}

/// {"rows", "cols", "data"} with data row-major and entries as [re, im].
pub fn matrix_json(m: &CMatrix) -> Value {
    let data: Vec<Value> = (0..m.nrows())
        .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
        .collect();
    json!({ "rows": m.nrows(), "cols": m.ncols(), "data": data })
}

pub fn vector_json(v: &CVector) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}
