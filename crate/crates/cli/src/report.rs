//! Run reports and their JSON/CSV renderings.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::config::{CliError, ProblemConfig, EXIT_INTERNAL, EXIT_PASS, EXIT_REJECTED};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// Everything but `timings` is a function of the config and seed.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub config: ProblemConfig,
    pub outcome: String,
    pub exit_code: i32,
    pub checks: Vec<Check>,
    pub results: Value,
    /// Wall-clock seconds per step.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(config: &ProblemConfig) -> Self {
        Self {
            command: config.command.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            outcome: "pass".into(),
            exit_code: EXIT_PASS,
            checks: Vec::new(),
            results: Value::Object(Default::default()),
            timings: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> Result<(), CliError> {
        let v = serde_json::to_value(value).map_err(|e| CliError::Internal(e.to_string()))?;
        if let Value::Object(m) = &mut self.results {
            m.insert(key.to_string(), v);
        }
        Ok(())
    }

    pub fn time<T>(&mut self, step: &str, f: impl FnOnce() -> T) -> T {
        let start = std::time::Instant::now();
        let out = f();
        self.timings.insert(step.to_string(), start.elapsed().as_secs_f64());
        out
    }

    /// Any failed check is an identity violation.
    pub fn finish_checks(&mut self) {
        if self.checks.iter().any(|c| !c.pass) {
            self.fail_internal();
        }
    }

    pub fn reject(&mut self) {
        if self.exit_code == EXIT_PASS {
            self.outcome = "rejected".into();
            self.exit_code = EXIT_REJECTED;
        }
    }

    pub fn fail_internal(&mut self) {
        self.outcome = "failed".into();
        self.exit_code = EXIT_INTERNAL;
    }

    pub fn fail_with(&mut self, code: i32, outcome: &str) {
        self.outcome = outcome.into();
        self.exit_code = code;
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Internal(e.to_string()))
    }

    /// Two columns, `key` and `value`, with dotted paths into the JSON form.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let v = serde_json::to_value(self).map_err(|e| CliError::Internal(e.to_string()))?;
        let mut rows = Vec::new();
        flatten("", &v, &mut rows);
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Internal(e.to_string());
        w.write_record(["key", "value"]).map_err(err)?;
        for (k, v) in rows {
            w.write_record([k, v]).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
    }

    pub fn render(&self) -> Result<String, CliError> {
        match self.config.format {
            crate::config::Format::Json => self.to_json().map(|s| s + "\n"),
            crate::config::Format::Csv => self.to_csv(),
        }
    }

    pub fn emit(&self) -> Result<(), CliError> {
        let text = self.render()?;
        match &self.config.out {
            Some(p) => std::fs::write(p, text)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::Internal(e.to_string()))
            }
        }
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, rows);
            }
        }
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}
