//! JSON file formats for moment sequences and recurrence coefficients.
//!
//! Moment file: `{"label": "...", "mode": "float" | "rational", "moments": [...]}`.
//! Recurrence file: `{"a2": [a_1², a_2², ...], "b": [b_0, b_1, ...]}`.
//! Entries may be JSON numbers or strings such as `"3/4"`; strings and
//! decimal literals are converted exactly before reaching the backend.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::polysys::RecurrenceCoefficients;
use crate::scalar::{parse_rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    #[default]
    Rational,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(Mode::Float),
            "rational" | "exact" => Ok(Mode::Rational),
            _ => Err(Error::Parse(format!("unknown mode `{s}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Float => "float",
            Mode::Rational => "rational",
        })
    }
}

fn entry_to_rational(v: &Value) -> Result<BigRational> {
    match v {
        // the literal text keeps decimals like 0.1 exact
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("expected a number or \"p/q\" string, got {other}"))),
    }
}

fn entries(v: &Value, key: &str) -> Result<Vec<BigRational>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse(format!("missing array `{key}`")))?
        .iter()
        .map(entry_to_rational)
        .collect()
}

/// Parsed moment file; values stay rational until a backend is chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentFile {
    pub label: String,
    pub mode: Mode,
    pub moments: Vec<BigRational>,
}

impl MomentFile {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let label = v.get("label").and_then(Value::as_str).unwrap_or("moments").to_string();
        let mode = match v.get("mode") {
            None => Mode::Rational,
            Some(Value::String(s)) => s.parse()?,
            Some(other) => return Err(Error::Parse(format!("bad mode {other}"))),
        };
        Ok(MomentFile {
            label,
            mode,
            moments: entries(&v, "moments")?,
        })
    }

    pub fn sequence<S: Scalar>(&self) -> Result<MomentSequence<S>> {
        MomentSequence::new(self.label.clone(), self.moments.iter().map(S::from_rational).collect())
    }
}

/// Serializes a moment sequence in the moment-file layout.
pub fn moment_file_json<S: Scalar>(m: &MomentSequence<S>, mode: Mode) -> Value {
    serde_json::json!({
        "label": m.label(),
        "mode": mode,
        "moments": m.moments(),
    })
}

/// Parsed recurrence file.
#[derive(Debug, Clone, PartialEq)]
pub struct RecFile {
    pub a_sq: Vec<BigRational>,
    pub b: Vec<BigRational>,
}

impl RecFile {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(RecFile {
            a_sq: entries(&v, "a2")?,
            b: entries(&v, "b")?,
        })
    }

    pub fn recurrence<S: Scalar>(&self) -> Result<RecurrenceCoefficients<S>> {
        RecurrenceCoefficients::from_a_sq(
            self.a_sq.iter().map(S::from_rational).collect(),
            self.b.iter().map(S::from_rational).collect(),
        )
    }
}

/// Serializes recurrence coefficients in the recurrence-file layout.
pub fn rec_file_json<S: Scalar>(rec: &RecurrenceCoefficients<S>) -> Value {
    serde_json::json!({ "a2": rec.a_sq_from_one(), "b": rec.b_all() })
}
