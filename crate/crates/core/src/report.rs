//! Machine-readable reports: JSON documents with sorted keys and flat CSV
//! tables, both headed by the resolved configuration.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::interval::Ival;
use crate::number_field::FieldElement;
use crate::rational::{q_to_string, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub result: Value,
    pub table: Option<Table>,
}

pub fn elem(x: &FieldElement) -> Value {
    Value::String(x.to_string())
}

pub fn elems(xs: &[FieldElement]) -> Value {
    Value::Array(xs.iter().map(elem).collect())
}

pub fn rat(x: &Q) -> Value {
    Value::String(q_to_string(x))
}

/// An enclosure as exact dyadic endpoints plus a readable midpoint.
pub fn ival(x: &Ival) -> Value {
    json!({ "lo": q_to_string(&x.lo), "hi": q_to_string(&x.hi), "approx": format!("{:.12e}", x.to_f64()) })
}

pub fn error_document(command: &str, config: &Value, e: &Error) -> Value {
    json!({
        "command": command,
        "config": config,
        "error": { "kind": e.kind(), "message": e.to_string() },
    })
}

/// Render a report; JSON keys come out sorted because serde_json maps are
/// ordered.
pub fn render(r: &Report, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let doc = json!({ "command": r.command, "config": r.config, "result": r.result });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Inconsistent(e.to_string()))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let mut out = Vec::new();
            out.extend_from_slice(format!("# command: {}\n", r.command).as_bytes());
            out.extend_from_slice(format!("# config: {}\n", r.config).as_bytes());
            let table = match &r.table {
                Some(t) => t.clone(),
                None => flat_table(&r.result),
            };
            let mut w = csv::Writer::from_writer(out);
            let io = |e: csv::Error| Error::Inconsistent(e.to_string());
            w.write_record(&table.header).map_err(io)?;
            for row in &table.rows {
                w.write_record(row).map_err(io)?;
            }
            w.into_inner().map_err(|e| Error::Inconsistent(e.to_string()))
        }
    }
}

/// key,value rows for reports without a natural table.
fn flat_table(v: &Value) -> Table {
    let mut t = Table::new(&["key", "value"]);
    fn walk(prefix: &str, v: &Value, t: &mut Table) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, x, t);
                }
            }
            Value::String(s) => t.push(vec![prefix.to_string(), s.clone()]),
            other => t.push(vec![prefix.to_string(), other.to_string()]),
        }
    }
    walk("", v, &mut t);
    t
}
