//! The JSON report every subcommand produces.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn of(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    /// Normal forms, matrices or counterexamples backing the status.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub witness: Value,
    pub seconds: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Check {
        Check { name: name.into(), status, detail: detail.into(), witness: Value::Null, seconds: 0.0 }
    }

    pub fn with_witness(mut self, w: Value) -> Check {
        self.witness = w;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub status: Status,
    pub checks: Vec<Check>,
    pub result: Value,
    pub seconds: f64,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            command: command.to_string(),
            inputs: Map::new(),
            status: Status::Pass,
            checks: Vec::new(),
            result: Value::Null,
            seconds: 0.0,
        }
    }

    pub fn input(mut self, key: &str, v: impl Into<Value>) -> Report {
        self.inputs.insert(key.to_string(), v.into());
        self
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Fail if any check failed, inconclusive if any was, pass otherwise.
    pub fn settle(&mut self) {
        self.status = if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if self.checks.iter().any(|c| c.status == Status::Inconclusive) {
            Status::Inconclusive
        } else {
            Status::Pass
        };
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Fail => 1,
            _ => 0,
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    /// The report with every timing zeroed, for reproducibility comparisons.
    pub fn untimed(&self) -> Value {
        let mut r = self.clone();
        r.seconds = 0.0;
        for c in &mut r.checks {
            c.seconds = 0.0;
        }
        r.to_json()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {} ({:.2} s)", self.command, self.status.label(), self.seconds);
        for (k, v) in &self.inputs {
            let _ = writeln!(out, "  {k} = {}", plain(v));
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(out, "  {:<12} {:<width$}  {}", c.status.label(), c.name, c.detail);
        }
        match self.result.get("text") {
            Some(Value::String(t)) => {
                let _ = writeln!(out, "{t}");
            }
            _ if !self.result.is_null() && self.checks.is_empty() => {
                let _ = writeln!(out, "{}", pretty(&self.result));
            }
            _ => {}
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn pretty(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => serde_json::to_string_pretty(other).unwrap_or_default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_is_lowercase_in_json() {
        let mut r = Report::new("x");
        r.push(Check::new("a", Status::Inconclusive, ""));
        r.settle();
        let j = r.to_json();
        assert_eq!(j["status"], "inconclusive");
        assert_eq!(j["checks"][0]["status"], "inconclusive");
        assert_eq!(r.exit_code(), 0);
        r.push(Check::new("b", Status::Fail, ""));
        r.settle();
        assert_eq!(r.exit_code(), 1);
    }
}
