//! Deterministic JSON reports and CSV tables.
//!
//! Keys are sorted, rationals are strings `"num/den"`, integers beyond
//! `u64` are decimal strings and reals are rounded to 12 significant digits.
//! Non-finite reals become the strings `"inf"`, `"-inf"` and `"nan"`.

use std::collections::BTreeMap;

use fmlab_core::{Elem, Tuple};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{Map, Value};

pub const REPORT_VERSION: u64 = 1;

pub fn emit_report(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values serialize")
}

pub fn rational(q: &BigRational) -> Value {
    Value::String(format!("{}/{}", q.numer(), q.denom()))
}

pub fn big(n: &BigUint) -> Value {
    match u64::try_from(n) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(n.to_string()),
    }
}

pub fn real(x: f64) -> Value {
    if x.is_nan() {
        return Value::String("nan".into());
    }
    if x.is_infinite() {
        return Value::String(if x > 0.0 { "inf" } else { "-inf" }.into());
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

pub fn tuple(t: &[Elem]) -> Value {
    Value::from(t.to_vec())
}

pub fn tuples<'a>(ts: impl IntoIterator<Item = &'a Tuple>) -> Value {
    Value::Array(ts.into_iter().map(|t| tuple(t)).collect())
}

/// `{0,2}` for the mask `0b101`.
pub fn mask_key(mask: u64) -> String {
    let bits: Vec<String> = (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i.to_string()).collect();
    format!("{{{}}}", bits.join(","))
}

pub fn masked_tuples(b: &BTreeMap<u64, Tuple>) -> Value {
    Value::Object(b.iter().map(|(&w, t)| (mask_key(w), tuple(t))).collect())
}

/// An object built key by key.
#[derive(Clone, Debug, Default)]
pub struct Report(Map<String, Value>);

impl Report {
    pub fn new() -> Self {
        Report(Map::new())
    }

    pub fn with(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.0.insert(key.into(), v.into());
        self
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.0.insert(key.into(), v.into());
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }
}

impl From<Report> for Value {
    fn from(r: Report) -> Value {
        r.into_value()
    }
}

/// Flat `key = value` lines, nested keys joined with dots.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    flatten(v, "", &mut out);
    out
}

fn flatten(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(x, &key, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix} = {s}\n")),
        other => out.push_str(&format!("{prefix} = {other}\n")),
    }
}

/// CSV with a header row; cells are rendered like report text values.
pub fn to_csv(columns: &[&str], rows: &[Vec<Value>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).expect("in-memory write");
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect();
        w.write_record(&cells).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
