//! Report entries, deterministic JSON/CSV emission and the report schema
//! validator.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::config::SuiteName;

/// Keys every entry carries ahead of its metrics.
pub const RESERVED_KEYS: [&str; 3] = ["suite", "check", "pass"];

#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    Floats(Vec<f64>),
    Ints(Vec<i64>),
    Null,
}

impl Metric {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Metric::Float(v) => Some(*v),
            Metric::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Metric::Bool(b) => Some(*b),
            _ => None,
        }
    }

    fn csv_value(&self) -> String {
        match self {
            Metric::Bool(b) => b.to_string(),
            Metric::Int(v) => v.to_string(),
            Metric::Float(v) => fmt_float(*v),
            Metric::Text(s) => s.clone(),
            Metric::Floats(v) => v.iter().map(|x| fmt_float(*x)).collect::<Vec<_>>().join(";"),
            Metric::Ints(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"),
            Metric::Null => String::new(),
        }
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Metric::Bool(b) => s.serialize_bool(*b),
            Metric::Int(v) => s.serialize_i64(*v),
            Metric::Float(v) => s.serialize_f64(*v),
            Metric::Text(t) => s.serialize_str(t),
            Metric::Floats(v) => v.serialize(s),
            Metric::Ints(v) => v.serialize(s),
            Metric::Null => s.serialize_unit(),
        }
    }
}

impl From<bool> for Metric {
    fn from(v: bool) -> Self {
        Metric::Bool(v)
    }
}

impl From<f64> for Metric {
    fn from(v: f64) -> Self {
        Metric::Float(v)
    }
}

impl From<usize> for Metric {
    fn from(v: usize) -> Self {
        Metric::Int(v as i64)
    }
}

impl From<u32> for Metric {
    fn from(v: u32) -> Self {
        Metric::Int(v as i64)
    }
}

impl From<&str> for Metric {
    fn from(v: &str) -> Self {
        Metric::Text(v.to_string())
    }
}

impl From<String> for Metric {
    fn from(v: String) -> Self {
        Metric::Text(v)
    }
}

impl From<Vec<f64>> for Metric {
    fn from(v: Vec<f64>) -> Self {
        Metric::Floats(v)
    }
}

impl From<Vec<i64>> for Metric {
    fn from(v: Vec<i64>) -> Self {
        Metric::Ints(v)
    }
}

impl<T: Into<Metric>> From<Option<T>> for Metric {
    fn from(v: Option<T>) -> Self {
        v.map_or(Metric::Null, Into::into)
    }
}

/// One pass/fail line of a report with its measured constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub suite: String,
    pub check: String,
    pub pass: bool,
    pub metrics: BTreeMap<String, Metric>,
}

impl Entry {
    pub fn new(suite: SuiteName, check: &str) -> Self {
        Self { suite: suite.to_string(), check: check.to_string(), pass: false, metrics: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<Metric>) -> Self {
        self.set(key, value);
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Metric>) {
        assert!(!RESERVED_KEYS.contains(&key), "metric key {key:?} is reserved");
        self.metrics.insert(key.to_string(), value.into());
    }

    pub fn passed(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    /// A failed check carrying the error text.
    pub fn failed(suite: SuiteName, check: &str, error: impl std::fmt::Display) -> Self {
        Entry::new(suite, check).with("error", error.to_string())
    }

    pub fn get(&self, key: &str) -> Option<&Metric> {
        self.metrics.get(key)
    }

    pub fn float(&self, key: &str) -> Option<f64> {
        self.get(key).and_then(Metric::as_f64)
    }
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3 + self.metrics.len()))?;
        m.serialize_entry("suite", &self.suite)?;
        m.serialize_entry("check", &self.check)?;
        m.serialize_entry("pass", &self.pass)?;
        for (k, v) in &self.metrics {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<Entry>,
}

/// 17 significant digits in scientific notation.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON whose floats always carry 17 significant digits.
struct ReportFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for ReportFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_float(value).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes any value with the report float format.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ReportFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("JSON is UTF-8")
}

impl Report {
    /// Entries ordered by suite name; the order within a suite is kept.
    pub fn new(mut entries: Vec<Entry>) -> Self {
        entries.sort_by(|a, b| a.suite.cmp(&b.suite));
        Self { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn find(&self, suite: SuiteName, check: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.suite == suite.as_str() && e.check == check)
    }

    pub fn to_json(&self) -> String {
        to_json_string(&self.entries)
    }

    /// Long format: one row per metric.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "check", "pass", "metric", "value"]).expect("in-memory CSV");
        for e in &self.entries {
            let pass = e.pass.to_string();
            if e.metrics.is_empty() {
                w.write_record([e.suite.as_str(), &e.check, &pass, "", ""]).expect("in-memory CSV");
            }
            for (k, v) in &e.metrics {
                w.write_record([e.suite.as_str(), &e.check, &pass, k, &v.csv_value()]).expect("in-memory CSV");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
    }

    pub fn write_json(&self, path: &Path) -> io::Result<()> {
        write_with_path(path, self.to_json().as_bytes())
    }

    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        write_with_path(path, self.to_csv().as_bytes())
    }

    /// Parses a report previously produced by [`Report::to_json`].
    pub fn from_json(text: &str) -> Result<Self, Vec<String>> {
        validate_json(text)?;
        let value: Value = serde_json::from_str(text).map_err(|e| vec![e.to_string()])?;
        let mut entries = Vec::new();
        for item in value.as_array().expect("validated array") {
            let obj = item.as_object().expect("validated object");
            let mut e = Entry {
                suite: obj["suite"].as_str().unwrap_or_default().to_string(),
                check: obj["check"].as_str().unwrap_or_default().to_string(),
                pass: obj["pass"].as_bool().unwrap_or_default(),
                metrics: BTreeMap::new(),
            };
            for (k, v) in obj {
                if RESERVED_KEYS.contains(&k.as_str()) {
                    continue;
                }
                e.metrics.insert(k.clone(), metric_from_value(v).expect("validated metric"));
            }
            entries.push(e);
        }
        Ok(Self { entries })
    }
}

fn write_with_path(path: &Path, bytes: &[u8]) -> io::Result<()> {
    std::fs::write(path, bytes).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn metric_from_value(v: &Value) -> Option<Metric> {
    Some(match v {
        Value::Null => Metric::Null,
        Value::Bool(b) => Metric::Bool(*b),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Metric::Int(i),
            None => Metric::Float(n.as_f64()?),
        },
        Value::String(s) => Metric::Text(s.clone()),
        Value::Array(items) if items.iter().all(|x| x.as_i64().is_some()) && !items.is_empty() => {
            Metric::Ints(items.iter().map(|x| x.as_i64().unwrap()).collect())
        }
        // non-finite floats are written as null
        Value::Array(items) => Metric::Floats(
            items.iter().map(|x| if x.is_null() { Some(f64::NAN) } else { x.as_f64() }).collect::<Option<_>>()?,
        ),
        Value::Object(_) => return None,
    })
}

/// Checks a JSON report against the report schema: an array of objects with
/// a known `suite`, a non-empty `check`, a boolean `pass`, scalar or numeric
/// array metrics, ordered by suite name.
pub fn validate_json(text: &str) -> Result<(), Vec<String>> {
    let value: Value = serde_json::from_str(text).map_err(|e| vec![format!("not JSON: {e}")])?;
    let Some(items) = value.as_array() else {
        return Err(vec!["top level must be an array".into()]);
    };
    let mut errors = Vec::new();
    let mut last_suite: Option<&str> = None;
    for (i, item) in items.iter().enumerate() {
        let Some(obj) = item.as_object() else {
            errors.push(format!("[{i}]: entry must be an object"));
            continue;
        };
        match obj.get("suite").and_then(Value::as_str) {
            Some(s) if SuiteName::parse(s).is_some() => {
                if last_suite.is_some_and(|prev| prev > s) {
                    errors.push(format!("[{i}].suite: {s:?} is out of order"));
                }
                last_suite = Some(s);
            }
            Some(s) => errors.push(format!("[{i}].suite: unknown suite {s:?}")),
            None => errors.push(format!("[{i}].suite: missing or not a string")),
        }
        match obj.get("check").and_then(Value::as_str) {
            Some(c) if !c.is_empty() => {}
            _ => errors.push(format!("[{i}].check: missing or empty")),
        }
        if !obj.get("pass").is_some_and(Value::is_boolean) {
            errors.push(format!("[{i}].pass: missing or not a boolean"));
        }
        for (k, v) in obj {
            if RESERVED_KEYS.contains(&k.as_str()) {
                continue;
            }
            if metric_from_value(v).is_none() {
                errors.push(format!("[{i}].{k}: metrics must be scalars or numeric arrays"));
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}
