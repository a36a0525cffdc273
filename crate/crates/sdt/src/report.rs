//! Deterministic CSV and JSON emission.
//!
//! Floats are written with 17 significant digits ('.' decimal separator,
//! scientific notation), which round-trips f64 exactly and keeps repeated
//! runs byte-identical. Non-finite values are refused rather than leaked
//! into output.

use crate::error::{Result, SdtError};

/// 17-significant-digit rendering of a finite float.
pub fn fmt_float(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(SdtError::InvalidParameter(format!(
            "refusing to serialize non-finite value {x}"
        )));
    }
    Ok(format!("{x:.16e}"))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// RFC-4180 CSV: CRLF records, header row first.
pub fn to_csv(columns: &[String], rows: &[Vec<f64>]) -> Result<String> {
    let mut out = String::new();
    out.push_str(&columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
    out.push_str("\r\n");
    for row in rows {
        let fields: Result<Vec<String>> = row.iter().map(|&v| fmt_float(v)).collect();
        out.push_str(&fields?.join(","));
        out.push_str("\r\n");
    }
    Ok(out)
}

/// Minimal JSON value for the flat outputs this crate emits.
#[derive(Debug, Clone)]
pub enum Json {
    Num(f64),
    Int(i64),
    Bool(bool),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn render(&self) -> Result<String> {
        let mut s = String::new();
        self.write(&mut s)?;
        Ok(s)
    }

    fn write(&self, out: &mut String) -> Result<()> {
        match self {
            Json::Num(v) => out.push_str(&fmt_float(*v)?),
            Json::Int(v) => out.push_str(&v.to_string()),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Str(s) => {
                out.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\r' => out.push_str("\\r"),
                        '\t' => out.push_str("\\t"),
                        c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out)?;
                }
                out.push(']');
            }
            Json::Obj(pairs) => {
                out.push('{');
                for (i, (k, v)) in pairs.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    Json::Str(k.clone()).write(out)?;
                    out.push(':');
                    v.write(out)?;
                }
                out.push('}');
            }
        }
        Ok(())
    }
}
