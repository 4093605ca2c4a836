//! Tabular run reports shared by the verification suites and the CLI.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// One checked quantity: `ok` records whether `value` met `bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 (hex) over the inputs the run consumed.
    pub inputs: String,
    pub rows: Vec<Row>,
    /// Wall-clock seconds; not part of [`RunReport::canonical_json`].
    pub timing: f64,
}

/// Hex SHA-256 over the given byte strings, each length-prefixed.
pub fn digest<'a>(parts: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

impl RunReport {
    pub fn new(command: impl Into<String>, inputs: String) -> Self {
        RunReport {
            command: command.into(),
            inputs,
            rows: Vec::new(),
            timing: 0.0,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64, bound: f64, ok: bool) {
        self.rows.push(Row {
            name: name.into(),
            value,
            bound,
            ok,
        });
    }

    /// Row with `ok = value ≤ bound`.
    pub fn check_le(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        let ok = value <= bound;
        self.push(name, value, bound, ok);
    }

    /// Row for an exact (boolean) property; value 1 means it held.
    pub fn check(&mut self, name: impl Into<String>, holds: bool) {
        self.push(name, f64::from(u8::from(holds)), 1.0, holds);
    }

    pub fn extend(&mut self, other: RunReport) {
        self.rows.extend(other.rows);
    }

    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    /// Serialization with the timing zeroed, for determinism comparisons.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.timing = 0.0;
        serde_json::to_string(&c).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,value,bound,ok\n");
        for r in &self.rows {
            let name = if r.name.contains([',', '"', '\n']) {
                format!("\"{}\"", r.name.replace('"', "\"\""))
            } else {
                r.name.clone()
            };
            writeln!(out, "{name},{:e},{:e},{}", r.value, r.bound, r.ok).unwrap();
        }
        out
    }

    pub fn to_table(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(4).max(4);
        let mut out = format!("{} [inputs {}]\n", self.command, &self.inputs[..self.inputs.len().min(16)]);
        writeln!(out, "{:<width$}  {:>12}  {:>12}  ok", "name", "value", "bound").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<width$}  {:>12.4e}  {:>12.4e}  {}",
                r.name,
                r.value,
                r.bound,
                if r.ok { "yes" } else { "NO" }
            )
            .unwrap();
        }
        let failed = self.rows.iter().filter(|r| !r.ok).count();
        writeln!(out, "{} rows, {} failed, {:.3}s", self.rows.len(), failed, self.timing).unwrap();
        out
    }
}
