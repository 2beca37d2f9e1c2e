//! Result records: one metric measurement per row, each carrying the
//! acceptance window it was checked against so the pass flag can be
//! recomputed from the row alone.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The acceptance region for a metric value. Rendered in CSV as a compact
/// expression ("==1", "<=22", ">=0.5", "in[0.4,0.6]") that parses back,
/// so a consumer can re-derive the pass flag from value and window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    Eq(f64),
    AtMost(f64),
    AtLeast(f64),
    Between(f64, f64),
}

impl Window {
    pub fn pass(&self, value: f64) -> bool {
        match *self {
            Window::Eq(want) => value == want,
            Window::AtMost(hi) => value <= hi,
            Window::AtLeast(lo) => value >= lo,
            Window::Between(lo, hi) => lo <= value && value <= hi,
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Window::Eq(v) => write!(f, "=={v}"),
            Window::AtMost(v) => write!(f, "<={v}"),
            Window::AtLeast(v) => write!(f, ">={v}"),
            Window::Between(lo, hi) => write!(f, "in[{lo},{hi}]"),
        }
    }
}

impl FromStr for Window {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| -> Result<f64> {
            t.parse::<f64>().with_context(|| format!("bad number {t:?} in window {s:?}"))
        };
        if let Some(rest) = s.strip_prefix("==") {
            return Ok(Window::Eq(num(rest)?));
        }
        if let Some(rest) = s.strip_prefix("<=") {
            return Ok(Window::AtMost(num(rest)?));
        }
        if let Some(rest) = s.strip_prefix(">=") {
            return Ok(Window::AtLeast(num(rest)?));
        }
        if let Some(rest) = s.strip_prefix("in[").and_then(|r| r.strip_suffix(']')) {
            let (lo, hi) = rest
                .split_once(',')
                .with_context(|| format!("window {s:?} needs two comma-separated bounds"))?;
            return Ok(Window::Between(num(lo)?, num(hi)?));
        }
        bail!("unrecognized window {s:?} (expected ==v, <=v, >=v, or in[lo,hi])")
    }
}

impl Serialize for Window {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One measured metric with its acceptance window and provenance: the
/// manifest id it came from and the registered claim it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub claim: String,
    pub metric: String,
    pub value: f64,
    pub window: Window,
    pub pass: bool,
}

impl ResultRecord {
    /// Builds the record with the pass flag derived from the window, the
    /// only constructor, so flag and window can never disagree.
    pub fn new(
        experiment: impl Into<String>,
        claim: impl Into<String>,
        metric: impl Into<String>,
        value: f64,
        window: Window,
    ) -> Self {
        ResultRecord {
            experiment: experiment.into(),
            claim: claim.into(),
            metric: metric.into(),
            value,
            window,
            pass: window.pass(value),
        }
    }
}

pub fn all_pass(records: &[ResultRecord]) -> bool {
    records.iter().all(|r| r.pass)
}

/// RFC-4180-style CSV with a header row. Field order is fixed; float
/// formatting is the shortest round-trip form, so identical records give
/// identical bytes.
pub fn write_csv(out: impl Write, records: &[ResultRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the CSV to a sibling temp file and renames it into place, so a
/// crashed run never leaves a half-written table.
pub fn write_csv_atomic(path: &Path, records: &[ResultRecord]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("csv.tmp");
    let mut buf = Vec::new();
    write_csv(&mut buf, records)?;
    fs::write(&tmp, &buf).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}
