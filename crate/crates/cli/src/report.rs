use serde_json::{json, Value};

use crate::{CliError, Format};

pub struct Table {
    pub header: String,
    pub rows: Vec<String>,
}

/// Everything a command produces. All three output formats render from it.
pub struct Report {
    pub command: Vec<String>,
    pub result: Value,
    pub assertions: Vec<(String, bool)>,
    pub witness: Option<Value>,
    /// Human-readable lines describing `result`.
    pub lines: Vec<String>,
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: &[String], result: Value) -> Self {
        Report {
            command: command.to_vec(),
            result,
            assertions: Vec::new(),
            witness: None,
            lines: Vec::new(),
            table: None,
        }
    }

    pub fn assert(&mut self, name: impl Into<String>, passed: bool) {
        self.assertions.push((name.into(), passed));
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.1)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let assertions: Vec<Value> =
                    self.assertions.iter().map(|(n, p)| json!({"name": n, "passed": p})).collect();
                let doc = json!({
                    "command": self.command,
                    "result": self.result,
                    "assertions": assertions,
                    "passed": self.passed(),
                    "witness": self.witness,
                });
                Ok(serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n")
            }
            Format::Csv => {
                let table = self
                    .table
                    .as_ref()
                    .ok_or_else(|| CliError::Usage("this command has no CSV form; use json or text".into()))?;
                let mut out = table.header.clone() + "\n";
                for row in &table.rows {
                    out.push_str(row);
                    out.push('\n');
                }
                Ok(out)
            }
            Format::Text => {
                let mut out = String::new();
                for line in &self.lines {
                    out.push_str(line);
                    out.push('\n');
                }
                for (name, passed) in &self.assertions {
                    out.push_str(&format!("{} {name}\n", if *passed { "PASS" } else { "FAIL" }));
                }
                if let Some(w) = &self.witness {
                    out.push_str(&format!("witness: {w}\n"));
                }
                if !self.assertions.is_empty() {
                    out.push_str(if self.passed() { "result: pass\n" } else { "result: fail\n" });
                }
                Ok(out)
            }
        }
    }
}
