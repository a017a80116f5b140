//! Result records and their CSV / JSON encodings.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::config::Format;
use crate::error::{CliError, CliResult};

/// Significant digits of floats written to CSV.
pub const CSV_DIGITS: usize = 17;

/// One cell or named scalar. Complex numbers are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Real(f64),
    Complex([f64; 2]),
    Int(i64),
    UInt(u64),
    Bool(bool),
    Text(String),
}

impl Value {
    /// Negative zero is stored as zero.
    pub fn real(x: f64) -> Self {
        Value::Real(x + 0.0)
    }

    pub fn complex(z: Complex64) -> Self {
        Value::Complex([z.re + 0.0, z.im + 0.0])
    }

    pub fn int(n: impl TryInto<i64>) -> Self {
        Value::Int(n.try_into().unwrap_or(i64::MAX))
    }

    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    /// Written as two CSV columns, `<name>_re` and `<name>_im`.
    pub complex: bool,
}

impl Column {
    pub fn plain(name: &str) -> Self {
        Self {
            name: name.to_string(),
            complex: false,
        }
    }

    pub fn complex(name: &str) -> Self {
        Self {
            name: name.to_string(),
            complex: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        let mut st = s.serialize_struct("Table", 2)?;
        st.serialize_field("columns", &names)?;
        st.serialize_field("rows", &self.rows)?;
        st.end()
    }
}

/// Deterministic output of one run. Wall time is never part of it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub tool_version: String,
    pub experiment: String,
    pub config_hash: String,
    pub scalars: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

impl ResultRecord {
    pub fn new(experiment: &str, config_hash: String) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: experiment.to_string(),
            config_hash,
            scalars: BTreeMap::new(),
            table: None,
        }
    }

    pub fn set(&mut self, name: &str, value: Value) {
        self.scalars.insert(name.to_string(), value);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }

    /// The table when there is one, otherwise the scalars as `name,re,im`.
    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(format!("csv encoding failed: {e}"));
        match &self.table {
            Some(table) => {
                let mut header = Vec::new();
                for c in &table.columns {
                    if c.complex {
                        header.push(format!("{}_re", c.name));
                        header.push(format!("{}_im", c.name));
                    } else {
                        header.push(c.name.clone());
                    }
                }
                w.write_record(&header).map_err(io)?;
                for row in &table.rows {
                    let mut cells = Vec::with_capacity(header.len());
                    for (c, v) in table.columns.iter().zip(row) {
                        match (c.complex, v) {
                            (true, Value::Complex([re, im])) => {
                                cells.push(format_float(*re));
                                cells.push(format_float(*im));
                            }
                            (true, other) => {
                                cells.push(cell(other));
                                cells.push(String::new());
                            }
                            (false, other) => cells.push(cell(other)),
                        }
                    }
                    w.write_record(&cells).map_err(io)?;
                }
            }
            None => {
                w.write_record(["name", "re", "im"]).map_err(io)?;
                for (name, v) in &self.scalars {
                    let (re, im) = match v {
                        Value::Complex([re, im]) => (format_float(*re), format_float(*im)),
                        other => (cell(other), String::new()),
                    };
                    w.write_record([name.as_str(), &re, &im]).map_err(io)?;
                }
            }
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Io(format!("csv encoding failed: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }

    /// Writes to `path`, or to stdout when there is none.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> CliResult<()> {
        let text = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, text)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Real(x) => format_float(*x),
        Value::Complex([re, im]) => format!("{} {}", format_float(*re), format_float(*im)),
        Value::Int(n) => n.to_string(),
        Value::UInt(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Text(s) => s.clone(),
    }
}

/// Magnitudes written positionally; others use an exponent.
const POSITIONAL: std::ops::Range<i32> = -5..16;

/// `CSV_DIGITS` significant digits with trailing zeros trimmed down to one
/// digit after the point, in exponent form outside 1e-5 <= |x| < 1e16.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0" } else { "0.0" }.into();
    }
    let sci = format!("{:.*e}", CSV_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    if !POSITIONAL.contains(&exp) {
        let (lead, frac) = mantissa.split_once('.').expect("fractional mantissa");
        let frac = frac.trim_end_matches('0');
        let frac = if frac.is_empty() { "0" } else { frac };
        return format!("{sign}{lead}.{frac}e{exp}");
    }
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let point = exp + 1;
    let (int_part, frac_part) = if point <= 0 {
        (
            "0".to_string(),
            format!("{}{}", "0".repeat((-point) as usize), digits),
        )
    } else if point as usize >= digits.len() {
        (
            format!("{}{}", digits, "0".repeat(point as usize - digits.len())),
            String::new(),
        )
    } else {
        (
            digits[..point as usize].to_string(),
            digits[point as usize..].to_string(),
        )
    };
    let frac = frac_part.trim_end_matches('0');
    let frac = if frac.is_empty() { "0" } else { frac };
    format!("{sign}{int_part}.{frac}")
}
