//! Report documents and their JSON, CSV and text renderings.

use pgic_core::{tol, VERSION};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const SCHEMA: u32 = 1;
pub const UNITS: &str = "bits/channel use";

/// Rounds to 9 significant decimal digits.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// A number as it appears in CSV and JSON reports.
pub fn num(x: f64) -> String {
    // Debug switches to exponent notation for very small and large values
    format!("{:?}", sig9(x))
}

/// Keys echoed at full precision: inputs, and certificates, which must
/// re-verify from their stored numbers.
const VERBATIM: [&str; 3] = ["channel", "spec", "certificate"];

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(sig9).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => {
            for (key, item) in map.iter_mut() {
                if !VERBATIM.contains(&key.as_str()) {
                    round_floats(item);
                }
            }
        }
        _ => {}
    }
}

/// A JSON report: a versioned envelope followed by the command's fields.
pub struct Document {
    fields: Map<String, Value>,
}

impl Document {
    pub fn new(command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("schema".into(), json!(SCHEMA));
        fields.insert("tool".into(), json!("pgic"));
        fields.insert("version".into(), json!(VERSION));
        fields.insert("command".into(), json!(command));
        fields.insert("units".into(), json!(UNITS));
        fields.insert(
            "tolerances".into(),
            json!({
                "tie_eps": tol::TIE_EPS,
                "capacity_tol": tol::CAPACITY_TOL,
                "psd_tol": tol::PSD_TOL,
            }),
        );
        Document { fields }
    }

    pub fn field(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.fields.insert(key.into(), v);
        self
    }

    /// Inserts every field of an object-shaped value at the top level.
    pub fn flatten(mut self, value: impl Serialize) -> Self {
        if let Value::Object(map) = serde_json::to_value(value).expect("report values serialize") {
            self.fields.extend(map);
        }
        self
    }

    pub fn render(self) -> String {
        let mut v = Value::Object(self.fields);
        round_floats(&mut v);
        let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

/// CSV with a fixed header row.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("writing to memory");
        Table { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("writing to memory");
    }

    pub fn render(self) -> String {
        let bytes = self.writer.into_inner().expect("writing to memory");
        String::from_utf8(bytes).expect("CSV of UTF-8 fields")
    }
}

pub fn flag(b: Option<bool>) -> String {
    b.map(|b| b.to_string()).unwrap_or_default()
}

pub fn list(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}
