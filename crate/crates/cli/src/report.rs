use std::collections::BTreeMap;

use serde_json::{json, Value};

/// Outcome of one command: named checks, emitted files, and a payload.
/// The machine form holds no timing or environment data, so identical
/// inputs give identical bytes.
pub struct Report {
    command: String,
    inputs: BTreeMap<String, String>,
    checks: Vec<(String, bool)>,
    artifacts: Vec<String>,
    data: BTreeMap<String, Value>,
    text: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            checks: Vec::new(),
            artifacts: Vec::new(),
            data: BTreeMap::new(),
            text: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.insert(key.to_string(), value.to_string());
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    pub fn artifact(&mut self, path: &str) {
        self.artifacts.push(path.to_string());
    }

    pub fn data(&mut self, key: &str, value: Value) {
        self.data.insert(key.to_string(), value);
    }

    /// Human-readable line printed before the check summary.
    pub fn say(&mut self, line: impl Into<String>) {
        self.text.push(line.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn to_json(&self) -> String {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|(name, ok)| json!({"name": name, "pass": ok}))
            .collect();
        let doc = json!({
            "command": self.command,
            "inputs": self.inputs,
            "checks": checks,
            "artifacts": self.artifacts,
            "passed": self.passed(),
            "data": self.data,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report is serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in &self.text {
            out.push_str(line);
            out.push('\n');
        }
        for (name, ok) in &self.checks {
            out.push_str(&format!("{} {name}\n", if *ok { "PASS" } else { "FAIL" }));
        }
        for a in &self.artifacts {
            out.push_str(&format!("wrote {a}\n"));
        }
        out.push_str(if self.passed() { "ok\n" } else { "FAILED\n" });
        out
    }
}
