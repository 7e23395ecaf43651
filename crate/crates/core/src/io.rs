//! Plain-text exports. CSV floats are written with 17 significant digits and
//! JSON floats in shortest round-trip form, so identical runs give identical
//! bytes. Every file starts with (CSV) or contains (JSON) the resolved config.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

/// CSV table with `# key: {json}` metadata lines above the header row.
pub struct CsvTable<'a> {
    pub meta: Vec<(&'a str, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl<'a> CsvTable<'a> {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta<T: Serialize>(mut self, key: &'a str, value: &T) -> Result<Self> {
        self.meta.push((key, to_value(value)?));
        Ok(self)
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Pretty JSON object `{"config": ..., <key>: <value>, ...}`.
pub fn write_json<W, C, K>(out: &mut W, config: &C, fields: impl IntoIterator<Item = (K, Value)>) -> Result<()>
where
    W: Write,
    C: Serialize,
    K: Into<String>,
{
    let mut map = serde_json::Map::new();
    map.insert("config".into(), to_value(config)?);
    for (k, v) in fields {
        map.insert(k.into(), v);
    }
    serde_json::to_writer_pretty(&mut *out, &Value::Object(map)).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Serialize anything into a JSON value for [`write_json`].
pub fn json<T: Serialize>(v: &T) -> Result<Value> {
    to_value(v)
}

/// Metadata pairs, column names and numeric rows.
pub type ParsedCsv = (Vec<(String, Value)>, Vec<String>, Vec<Vec<f64>>);

/// Read back a CSV written by [`CsvTable`].
pub fn read_csv(text: &str) -> Result<ParsedCsv> {
    let mut meta = Vec::new();
    let mut lines = text.lines();
    let mut header = None;
    for line in lines.by_ref() {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest
                .split_once(": ")
                .ok_or_else(|| Error::Io(format!("bad metadata line `{line}`")))?;
            meta.push((k.to_string(), serde_json::from_str(v).map_err(|e| Error::Io(e.to_string()))?));
        } else {
            header = Some(line.split(',').map(String::from).collect::<Vec<_>>());
            break;
        }
    }
    let header = header.ok_or_else(|| Error::Io("missing CSV header".into()))?;
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|v| v.parse::<f64>().map_err(|e| Error::Io(format!("`{v}`: {e}"))))
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok((meta, header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn table_round_trip() {
        let mut t = CsvTable::new(["x", "y"]).meta("config", &serde_json::json!({"b": 0.5})).unwrap();
        t.push(vec![0.1, 0.2]);
        t.push(vec![1e-17, -3.0]);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        let (meta, cols, rows) = read_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(meta[0].1["b"], 0.5);
        assert_eq!(cols, ["x", "y"]);
        assert_eq!(rows, t.rows);
    }
}
