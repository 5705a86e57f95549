//! Flat output records and their serialization.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::config::Format;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Text(String),
    Null,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    fn csv_field(&self) -> String {
        match self {
            Value::Float(x) => format_float(*x),
            Value::Int(i) => i.to_string(),
            Value::Text(s) => s.clone(),
            Value::Null => String::new(),
        }
    }

    fn json_value(&self) -> String {
        match self {
            Value::Float(x) if x.is_finite() => format_float(*x),
            Value::Float(_) | Value::Null => "null".into(),
            Value::Int(i) => i.to_string(),
            Value::Text(s) => serde_json::to_string(s).expect("string serializes"),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Value::Null, Value::Float)
    }
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Inputs, outputs and residuals, each kept in alphabetical key order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record {
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    pub residuals: BTreeMap<String, Value>,
    pub wall_time_seconds: Option<f64>,
}

impl Record {
    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.into(), value.into());
        self
    }

    pub fn output(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.outputs.insert(key.into(), value.into());
        self
    }

    pub fn residual(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.residuals.insert(key.into(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.inputs.get(key).or_else(|| self.outputs.get(key)).or_else(|| self.residuals.get(key))
    }

    /// Largest populated residual.
    pub fn max_residual(&self) -> Option<f64> {
        self.residuals.values().filter_map(Value::as_f64).reduce(f64::max)
    }
}

/// A header and rows of equal width.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn from_records(records: &[Record]) -> Result<Self, String> {
        let first = records.first().ok_or("no records to emit")?;
        let header: Vec<String> = column_names(first);
        let rows = records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                if column_names(r) != header {
                    return Err(format!("record {i} has different columns from record 0"));
                }
                let mut row: Vec<Value> = r
                    .inputs
                    .values()
                    .chain(r.outputs.values())
                    .chain(r.residuals.values())
                    .cloned()
                    .collect();
                if let Some(t) = r.wall_time_seconds {
                    row.push(Value::Float(t));
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(Self { header, rows })
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, String> {
        if self.rows.is_empty() {
            return Err("no records to emit".into());
        }
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => Ok(self.render_json()),
        }
    }

    fn render_csv(&self) -> Result<Vec<u8>, String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| e.to_string())?;
        for row in &self.rows {
            w.write_record(row.iter().map(Value::csv_field)).map_err(|e| e.to_string())?;
        }
        w.into_inner().map_err(|e| e.to_string())
    }

    fn render_json(&self) -> Vec<u8> {
        let keys: Vec<String> =
            self.header.iter().map(|k| serde_json::to_string(k).expect("string serializes")).collect();
        let mut out = String::from("[\n");
        for (i, row) in self.rows.iter().enumerate() {
            let fields: Vec<String> =
                keys.iter().zip(row).map(|(k, v)| format!("{k}: {}", v.json_value())).collect();
            out.push_str("  {");
            out.push_str(&fields.join(", "));
            out.push('}');
            if i + 1 < self.rows.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("]\n");
        out.into_bytes()
    }
}

fn column_names(r: &Record) -> Vec<String> {
    let mut names: Vec<String> =
        r.inputs.keys().chain(r.outputs.keys()).chain(r.residuals.keys()).cloned().collect();
    if r.wall_time_seconds.is_some() {
        names.push("wall_time_seconds".into());
    }
    names
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(x: f64) -> Record {
        let mut r = Record::default();
        r.input("steps", Value::Int(4))
            .input("mode", Value::Text("spin-free".into()))
            .output("survival_probability", x)
            .output("beta", Value::Null)
            .residual("residual_state", 1e-17);
        r
    }

    #[test]
    fn csv_layout() {
        let t = Table::from_records(&[sample(0.0625)]).unwrap();
        let text = String::from_utf8(t.render(Format::Csv).unwrap()).unwrap();
        assert_eq!(
            text,
            "mode,steps,beta,survival_probability,residual_state\n\
             spin-free,4,,6.2500000000000000e-2,1.0000000000000001e-17\n"
        );
    }

    #[test]
    fn json_layout() {
        let t = Table::from_records(&[sample(0.5), sample(1.0)]).unwrap();
        let text = String::from_utf8(t.render(Format::Json).unwrap()).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 2);
        assert_eq!(parsed[1]["survival_probability"], 1.0);
        assert!(parsed[0]["beta"].is_null());
        assert!(text.find("\"mode\"").unwrap() < text.find("\"steps\"").unwrap());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(std::f64::consts::PI).parse::<f64>().unwrap(), std::f64::consts::PI);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(Table::from_records(&[]).is_err());
        let t = Table { header: vec!["a".into()], rows: vec![] };
        assert!(t.render(Format::Csv).is_err());
    }

    #[test]
    fn mismatched_columns_rejected() {
        let mut other = sample(1.0);
        other.output("extra", 1.0);
        assert!(Table::from_records(&[sample(1.0), other]).is_err());
    }

    #[test]
    fn wall_time_is_last() {
        let mut r = sample(1.0);
        r.wall_time_seconds = Some(0.5);
        let t = Table::from_records(&[r]).unwrap();
        assert_eq!(t.header.last().unwrap(), "wall_time_seconds");
    }
}
