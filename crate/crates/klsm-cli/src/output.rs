//! CSV and flat JSON rendering.

use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (expected csv or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

fn cell(s: &str) -> Value {
    if let Ok(i) = s.parse::<i64>() {
        return Value::Number(i.into());
    }
    if let Ok(u) = s.parse::<u64>() {
        return Value::Number(u.into());
    }
    // integers beyond 64 bits and exact fractions stay exact as strings
    if s.bytes().all(|b| b.is_ascii_digit() || b == b'-' || b == b'/') {
        return Value::String(s.to_string());
    }
    match s.parse::<f64>().ok().and_then(Number::from_f64) {
        Some(n) => Value::Number(n),
        None => Value::String(s.to_string()),
    }
}

/// One JSON object per CSV row, keyed by the header, without nesting.
pub fn csv_to_json(csv: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().map(|h| h.split(',').collect()).unwrap_or_default();
    let rows: Vec<Value> = lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mut obj = Map::new();
            for (k, v) in header.iter().zip(l.split(',')) {
                obj.insert(k.to_string(), cell(v));
            }
            Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("serializable");
    s.push('\n');
    s
}

pub fn render(csv: String, format: Format) -> String {
    match format {
        Format::Csv => csv,
        Format::Json => csv_to_json(&csv),
    }
}

/// Twelve decimals with negative zero suppressed.
pub fn fixed12(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        "0.000000000000".to_string()
    } else {
        s
    }
}

/// `a + bi` with twelve decimals.
pub fn complex12(re: f64, im: f64) -> String {
    let imag = fixed12(im);
    match imag.strip_prefix('-') {
        Some(abs) => format!("{} - {}i", fixed12(re), abs),
        None => format!("{} + {}i", fixed12(re), imag),
    }
}
