use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rows with a fixed header.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Table { headers: headers.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

pub enum Output {
    Table(Table),
    Report(Value),
}

/// Booleans, integers and finite floats keep their JSON type; everything else is a string.
fn cell_json(v: &str) -> Value {
    if let Ok(b) = v.parse::<bool>() {
        return Value::Bool(b);
    }
    if let Ok(i) = v.parse::<i64>() {
        return Value::from(i);
    }
    v.parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or_else(|| Value::String(v.to_string()), Value::Number)
}

fn table_json(t: &Table) -> Value {
    Value::Array(
        t.rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = t
                    .headers
                    .iter()
                    .zip(r)
                    .map(|(h, v)| {
                        (h.to_string(), cell_json(v))
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect(),
    )
}

fn render(out: &Output, format: Format) -> Result<Vec<u8>> {
    match (out, format) {
        (Output::Table(t), Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.headers)?;
            for r in &t.rows {
                w.write_record(r)?;
            }
            Ok(w.into_inner().context("flushing csv")?)
        }
        (Output::Table(t), Format::Json) => {
            let mut v = serde_json::to_vec_pretty(&table_json(t))?;
            v.push(b'\n');
            Ok(v)
        }
        (Output::Report(r), Format::Json) => {
            let mut v = serde_json::to_vec_pretty(r)?;
            v.push(b'\n');
            Ok(v)
        }
        (Output::Report(r), Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"])?;
            if let Value::Object(map) = r {
                for (k, v) in map {
                    let cell = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    w.write_record([k.as_str(), cell.as_str()])?;
                }
            }
            Ok(w.into_inner().context("flushing csv")?)
        }
    }
}

pub fn emit(out: &Output, format: Format, path: Option<&Path>) -> Result<()> {
    let bytes = render(out, format)?;
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}
