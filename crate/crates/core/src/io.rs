//! Constellation files and number formatting.
//!
//! Constellations are stored as JSON objects
//!
//! ```json
//! { "name": "asym4", "dim": 2, "points": [[0, 0], [1, 0]], "priors": [0.5, 0.5], "labels": ["a", "b"] }
//! ```
//!
//! where `priors` and `labels` are optional. Every floating-point number the
//! crate emits (files, CLI output, HTTP payloads, CSV) is written with 17
//! significant digits, so values round-trip bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::Constellation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub dim: Option<usize>,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl ConstellationFile {
    pub fn from_constellation(c: &Constellation, name: Option<&str>) -> Self {
        Self {
            name: name.map(str::to_string),
            dim: Some(c.dim()),
            points: c.points().iter().map(|p| p.coords().to_vec()).collect(),
            priors: c.explicit_priors().map(<[f64]>::to_vec),
            labels: c.labels().map(<[String]>::to_vec),
        }
    }

    pub fn to_constellation(&self) -> Result<Constellation> {
        let mut c = Constellation::new(self.points.clone())?;
        if let Some(d) = self.dim {
            if d != c.dim() {
                return Err(Error::DimensionMismatch { expected: d, found: c.dim() });
            }
        }
        if let Some(l) = &self.labels {
            c = c.with_labels(l.clone())?;
        }
        if let Some(p) = &self.priors {
            c = c.with_priors(p.clone())?;
        }
        Ok(c)
    }
}

/// Deserializes JSON text, reporting the field path plus line and column on
/// failure.
pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse { path, message: format!("line {} column {}: {}", inner.line(), inner.column(), inner) }
    })
}

pub fn parse_constellation(text: &str) -> Result<(Option<String>, Constellation)> {
    let file: ConstellationFile = from_json_str(text)?;
    let c = file.to_constellation()?;
    Ok((file.name, c))
}

pub fn load_constellation(path: impl AsRef<Path>) -> Result<(Option<String>, Constellation)> {
    let text = std::fs::read_to_string(path)?;
    parse_constellation(&text)
}

pub fn constellation_to_string(c: &Constellation, name: Option<&str>) -> String {
    to_json_string(&ConstellationFile::from_constellation(c, name))
}

pub fn save_constellation(path: impl AsRef<Path>, c: &Constellation, name: Option<&str>) -> Result<()> {
    std::fs::write(path, constellation_to_string(c, name))?;
    Ok(())
}

/// `x` with 17 significant digits in scientific notation; `null` for
/// non-finite values.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// Pretty JSON (two-space indent, struct field order) with every float
/// written by [`fmt_f64`].
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("payload types serialize to JSON");
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            // Flat numeric arrays stay on one line.
            if items.iter().all(|x| x.is_number()) {
                out.push('[');
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                pad(indent + 1, out);
                write_value(x, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, x)) in map.iter().enumerate() {
                pad(indent + 1, out);
                out.push_str(&serde_json::to_string(key).unwrap());
                out.push_str(": ");
                write_value(x, indent + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

fn pad(indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}
