//! CSV tables, run manifests and flat `key=value` configuration text.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Significant digits for floating-point CSV cells.
pub const FLOAT_DIGITS: usize = 12;

/// `%.12g`-style rendering: fixed notation for decimal exponents in
/// `[-5, 12)`, scientific otherwise, trailing zeros trimmed.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", FLOAT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..FLOAT_DIGITS as i32).contains(&exp) {
        let decimals = (FLOAT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    UInt(u64),
    Float(f64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::UInt(v) => write!(f, "{v}"),
            Value::Float(v) => f.write_str(&fmt_float(*v)),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::UInt(v)
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::UInt(v as u64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Text(if v { "true" } else { "false" }.into())
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.into())
    }
}

/// Comma-separated table with a header row and LF line endings.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::invalid(format!(
                "row has {} cells, header has {}",
                row.len(),
                self.header.len()
            )));
        }
        if let Some(Value::Text(bad)) = row
            .iter()
            .find(|v| matches!(v, Value::Text(s) if s.contains([',', '\n'])))
        {
            return Err(Error::invalid(format!("cell {bad:?} needs quoting")));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }
}

/// Parameter record written next to each CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub tool_version: String,
    /// UTC, RFC 3339.
    pub timestamp: String,
    pub command: String,
    pub g: Option<u64>,
    pub b: Option<u64>,
    pub x: Option<u64>,
    pub h: Option<u64>,
    pub eta: Option<f64>,
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub seed: u64,
    /// Subcommand-specific settings, written as `param.<key>`.
    pub params: BTreeMap<String, String>,
    /// Summary values, written as `result.<key>`.
    pub results: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(tool_version: &str, timestamp: &str, command: &str, seed: u64) -> Self {
        RunManifest {
            tool_version: tool_version.into(),
            timestamp: timestamp.into(),
            command: command.into(),
            g: None,
            b: None,
            x: None,
            h: None,
            eta: None,
            p: None,
            q: None,
            seed,
            params: BTreeMap::new(),
            results: BTreeMap::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut lines = vec![
            format!("toolVersion={}", self.tool_version),
            format!("timestamp={}", self.timestamp),
            format!("command={}", self.command),
        ];
        let ints = [
            ("g", self.g),
            ("b", self.b),
            ("X", self.x),
            ("H", self.h),
        ];
        for (k, v) in ints {
            if let Some(v) = v {
                lines.push(format!("{k}={v}"));
            }
        }
        if let Some(eta) = self.eta {
            lines.push(format!("eta={eta}"));
        }
        for (k, v) in [("P", self.p), ("Q", self.q)] {
            if let Some(v) = v {
                lines.push(format!("{k}={v}"));
            }
        }
        lines.push(format!("seed={}", self.seed));
        for (k, v) in &self.params {
            lines.push(format!("param.{k}={v}"));
        }
        for (k, v) in &self.results {
            lines.push(format!("result.{k}={v}"));
        }
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let kv = parse_config(text)?;
        let get = |k: &str| {
            kv.get(k)
                .cloned()
                .ok_or_else(|| Error::invalid(format!("manifest lacks {k}")))
        };
        let int = |k: &str| -> Result<Option<u64>> {
            kv.get(k)
                .map(|v| {
                    v.parse()
                        .map_err(|_| Error::invalid(format!("manifest {k}={v} is not an integer")))
                })
                .transpose()
        };
        let mut m = RunManifest::new(&get("toolVersion")?, &get("timestamp")?, &get("command")?, 0);
        m.seed = int("seed")?.ok_or_else(|| Error::invalid("manifest lacks seed"))?;
        m.g = int("g")?;
        m.b = int("b")?;
        m.x = int("X")?;
        m.h = int("H")?;
        m.p = int("P")?;
        m.q = int("Q")?;
        m.eta = kv
            .get("eta")
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::invalid(format!("manifest eta={v} is not a number")))
            })
            .transpose()?;
        for (k, v) in &kv {
            if let Some(key) = k.strip_prefix("param.") {
                m.params.insert(key.into(), v.clone());
            } else if let Some(key) = k.strip_prefix("result.") {
                m.results.insert(key.into(), v.clone());
            }
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Parses flat `key=value` lines; blank lines and `#` comment lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("line {}: expected key=value, got {line:?}", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::invalid(format!("line {}: empty key", i + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn float_rendering() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(-2.5), "-2.5");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(123456.789), "123456.789");
        assert_eq!(fmt_float(6.543e8), "654300000");
        assert_eq!(fmt_float(1e12), "1e12");
        assert_eq!(fmt_float(1.234e-7), "1.234e-7");
        assert_eq!(fmt_float(0.0001), "0.0001");
        assert_eq!(fmt_float(f64::NAN), "nan");
        assert_eq!(fmt_float(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_layout() {
        let mut t = CsvTable::new(["X", "ratio", "ok"]);
        t.push(vec![100u64.into(), 0.5.into(), true.into()]).unwrap();
        t.push(vec![(-3i64).into(), (2.0 / 3.0).into(), "x".into()]).unwrap();
        assert_eq!(t.render(), "X,ratio,ok\n100,0.5,true\n-3,0.666666666667,x\n");
        assert!(t.push(vec![1u64.into()]).is_err());
        assert!(t.push(vec![1u64.into(), 1.0.into(), "a,b".into()]).is_err());
    }

    #[test]
    fn config_parsing() {
        let kv = parse_config("# comment\n g = 10\n\nb=7\nname = a=b\n").unwrap();
        assert_eq!(kv["g"], "10");
        assert_eq!(kv["b"], "7");
        assert_eq!(kv["name"], "a=b");
        assert!(parse_config("novalue\n").is_err());
        assert!(parse_config("=3\n").is_err());
    }

    #[test]
    fn manifest_requires_core_keys() {
        assert!(RunManifest::from_text("timestamp=t\ncommand=c\nseed=1\n").is_err());
        assert!(RunManifest::from_text("toolVersion=1\ntimestamp=t\ncommand=c\nseed=x\n").is_err());
    }

    proptest! {
        #[test]
        fn manifest_round_trip(
            seed in any::<u64>(),
            g in proptest::option::of(3u64..100),
            x in proptest::option::of(any::<u64>()),
            eta in proptest::option::of(1e-6f64..0.25),
            extra in proptest::collection::btree_map("[a-z]{1,8}", "[a-zA-Z0-9._-]{0,12}", 0..5),
        ) {
            let mut m = RunManifest::new("0.1.0", "2026-01-01T00:00:00Z", "moment --q 1", seed);
            m.g = g;
            m.x = x;
            m.eta = eta;
            m.params = extra.clone();
            m.results = extra;
            let back = RunManifest::from_text(&m.to_text()).unwrap();
            prop_assert_eq!(back, m);
        }

        #[test]
        fn rendered_floats_keep_twelve_digits(x in -1e15f64..1e15) {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            prop_assert!((back - x).abs() <= 1e-11 * x.abs().max(1e-300));
        }
    }
}
