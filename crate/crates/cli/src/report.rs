//! Report envelope and its JSON / text renderings.

use std::fmt::Write;

use serde_json::{json, Map, Value};

pub const SCHEMA: u64 = 1;

#[derive(Clone, Debug)]
pub struct Report {
    pub verb: String,
    pub inputs_echo: Map<String, Value>,
    pub result: Value,
    pub diagnostics: Vec<String>,
    pub undetermined: bool,
}

impl Report {
    pub fn new(verb: &str) -> Self {
        Report { verb: verb.to_string(), inputs_echo: Map::new(), result: Value::Null, diagnostics: vec![], undetermined: false }
    }

    pub fn echo(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs_echo.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "verb": self.verb,
            "inputs_echo": self.inputs_echo,
            "result": self.result,
            "diagnostics": self.diagnostics,
            "undetermined": self.undetermined,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => text(report),
    }
}

fn text(report: &Report) -> String {
    let mut out = String::new();
    writeln!(out, "{}", report.verb).unwrap();
    if !report.inputs_echo.is_empty() {
        for (k, v) in &report.inputs_echo {
            writeln!(out, "  {k} = {}", scalar(v)).unwrap();
        }
    }
    writeln!(out).unwrap();
    if let Some(rows) = report.result.get("rows").and_then(Value::as_array) {
        census_table(&mut out, rows);
        let mut rest = report.result.clone();
        if let Some(m) = rest.as_object_mut() {
            m.remove("rows");
        }
        block(&mut out, &rest, 0);
    } else {
        block(&mut out, &report.result, 0);
    }
    if report.undetermined {
        writeln!(out, "\nUNDETERMINED within the search bound").unwrap();
    }
    for d in &report.diagnostics {
        writeln!(out, "diagnostic: {d}").unwrap();
    }
    out
}

fn census_table(out: &mut String, rows: &[Value]) {
    writeln!(out, "{:>5}  {:<20}  {:>7}  {:>10}  {:>12}", "det", "form", "classes", "non_moduli", "undetermined").unwrap();
    for r in rows {
        let classes = r.get("classes").and_then(Value::as_array).map_or(0, Vec::len);
        writeln!(
            out,
            "{:>5}  {:<20}  {:>7}  {:>10}  {:>12}",
            scalar(&r["det"]),
            scalar(&r["form"]),
            classes,
            scalar(&r["non_moduli"]),
            scalar(&r["undetermined"])
        )
        .unwrap();
    }
    writeln!(out).unwrap();
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(xs) => xs.iter().all(|x| !x.is_object()),
        _ => true,
    }
}

fn block(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if is_flat(x) {
                    writeln!(out, "{pad}{k}: {}", scalar(x)).unwrap();
                } else {
                    writeln!(out, "{pad}{k}:").unwrap();
                    block(out, x, indent + 2);
                }
            }
        }
        Value::Array(xs) if !is_flat(v) => {
            for (i, x) in xs.iter().enumerate() {
                writeln!(out, "{pad}[{i}]").unwrap();
                block(out, x, indent + 2);
            }
        }
        _ => writeln!(out, "{pad}{}", scalar(v)).unwrap(),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
