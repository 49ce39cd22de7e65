//! Output encodings for a [`Report`].

use serde::Serialize;
use serde_json::{Map, Value};

use crate::Format;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        expected: impl ToString,
        computed: impl ToString,
        pass: bool,
    ) -> Self {
        Self {
            name: name.into(),
            expected: expected.to_string(),
            computed: computed.to_string(),
            pass,
        }
    }

    /// A check that passes when the rendered values agree.
    pub fn equal(
        name: impl Into<String>,
        expected: impl ToString,
        computed: impl ToString,
    ) -> Self {
        let (e, c) = (expected.to_string(), computed.to_string());
        let pass = e == c;
        Self::new(name, e, c, pass)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub result: Value,
    pub checks: Vec<Check>,
    /// Header and rows used by the CSV encoding instead of `result`.
    #[serde(skip)]
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

impl Report {
    pub fn new(command: &str, inputs: Value, result: Value) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            result,
            checks: Vec::new(),
            table: None,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self, format: Format) -> Result<String, Box<dyn std::error::Error>> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self)?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.csv(),
            Format::Text => Ok(self.text()),
        }
    }

    /// The table if set, then checks if there are any, otherwise the result: an array of objects
    /// becomes one row per element, an object a single row.
    fn csv(&self) -> Result<String, Box<dyn std::error::Error>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if let Some((header, rows)) = &self.table {
            w.write_record(header)?;
            for row in rows {
                w.write_record(row)?;
            }
        } else if !self.checks.is_empty() {
            w.write_record(["name", "expected", "computed", "pass"])?;
            for c in &self.checks {
                w.write_record([&c.name, &c.expected, &c.computed, &c.pass.to_string()])?;
            }
        } else {
            let rows: Vec<&Map<String, Value>> = match &self.result {
                Value::Array(items) => items.iter().filter_map(Value::as_object).collect(),
                Value::Object(o) => vec![o],
                other => {
                    w.write_record(["value"])?;
                    w.write_record([cell(other)])?;
                    vec![]
                }
            };
            if let Some(first) = rows.first() {
                w.write_record(first.keys())?;
                for row in &rows {
                    w.write_record(
                        first
                            .keys()
                            .map(|k| row.get(k).map(cell).unwrap_or_default()),
                    )?;
                }
            }
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    fn text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{}\n", self.command));
        write_text(&mut out, &self.result, 1);
        for c in &self.checks {
            out.push_str(&format!(
                "{} {}: expected {}, computed {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.expected,
                c.computed
            ));
        }
        out
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => significant(x),
            _ => n.to_string(),
        },
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Shortest decimal that rounds to `x` at 15 significant digits.
pub fn significant(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{x:.14e}")
        .parse::<f64>()
        .map_or_else(|_| x.to_string(), |r| r.to_string())
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            Some(format!(
                "[{}]",
                items.iter().map(cell).collect::<Vec<_>>().join(", ")
            ))
        }
        Value::Array(_) | Value::Object(_) => None,
        other => Some(cell(other)),
    }
}

fn write_text(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(o) => {
            for (k, item) in o {
                match scalar_text(item) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_text(out, item, depth + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar_text(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        write_text(out, item, depth + 1);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", cell(other))),
    }
}
