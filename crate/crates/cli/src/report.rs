//! Machine-readable reports. Reals carry 12 significant digits so that reports are
//! byte-stable across runs and reload to the same values.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use rmvci::{InterdictionStrategy, VertexSet};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::instance::SupportEntry;
use crate::CliError;

/// Rounds to 12 significant digits; non-finite values become strings.
pub fn real(x: f64) -> Value {
    if x.is_finite() {
        let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
        // avoid "-0.0" in reports
        Value::from(if rounded == 0.0 { 0.0 } else { rounded })
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

pub fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| real(x)).collect())
}

pub fn set(s: &VertexSet) -> Value {
    Value::from(s.to_vec())
}

pub fn strategy(pi: &InterdictionStrategy) -> Vec<SupportEntry> {
    pi.support()
        .iter()
        .map(|(p, s)| SupportEntry {
            p: real(*p).as_f64().unwrap_or(*p),
            set: s.to_vec(),
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance_digest: Option<String>,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub values: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Vec<SupportEntry>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<Map<String, Value>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Map<String, Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<Map<String, Value>>,
}

impl Report {
    pub fn new(command: String, instance_digest: Option<String>) -> Self {
        Report {
            command,
            instance_digest,
            status: "ok",
            values: Map::new(),
            strategy: None,
            table: Vec::new(),
            checks: Vec::new(),
            error: None,
            timings_ms: None,
        }
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.values.insert(key.to_string(), v.into());
        self
    }

    pub fn timing(&mut self, enabled: bool, stage: &str, took: Duration) {
        if enabled {
            self.timings_ms
                .get_or_insert_with(Map::new)
                .insert(stage.to_string(), real(took.as_secs_f64() * 1e3));
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    /// Prints the report, or writes it to `out` through a temporary file and rename.
    pub fn emit(&self, out: Option<&Path>) -> Result<(), CliError> {
        let text = self.to_json();
        match out {
            None => {
                std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
            }
            Some(path) => {
                let mut tmp = path.as_os_str().to_owned();
                tmp.push(".tmp");
                let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
                fs::write(&tmp, text).map_err(io)?;
                fs::rename(&tmp, path).map_err(io)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_keep_twelve_digits() {
        assert_eq!(real(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(real(2.0).to_string(), "2.0");
        assert_eq!(real(-0.0).to_string(), "0.0");
        assert_eq!(real(f64::INFINITY), Value::from("inf"));
        assert_eq!(real(123456789.123456789).to_string(), "123456789.123");
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [0.1, 1.0 / 7.0, 8.0 / 3.0, 1e-13, 12345.678901234] {
            let once = real(x).as_f64().unwrap();
            assert_eq!(real(once).as_f64().unwrap(), once);
        }
    }
}
