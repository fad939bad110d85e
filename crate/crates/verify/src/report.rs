//! Report rows and their CSV/JSON forms.

use grushin::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::io::Write;

/// Non-finite values travel as the strings `"inf"`, `"-inf"`, `"nan"`.
mod real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&super::fmt_real(*v))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) => super::parse_real(&s).map_err(serde::de::Error::custom),
        }
    }
}

pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

pub fn parse_real(s: &str) -> Result<f64> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| Error::Parameter(format!("bad number '{s}'"))),
    }
}

/// One checked quantity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    /// `name=value` pairs joined by `;`.
    pub params: String,
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub rhs: f64,
    #[serde(with = "real")]
    pub ratio: f64,
    pub pass: bool,
    #[serde(with = "real")]
    pub tol: f64,
}

impl PartialEq for ReportRow {
    /// Bitwise on the reals, so NaN rows compare equal to themselves.
    fn eq(&self, o: &Self) -> bool {
        self.experiment == o.experiment
            && self.params == o.params
            && self.lhs.to_bits() == o.lhs.to_bits()
            && self.rhs.to_bits() == o.rhs.to_bits()
            && self.ratio.to_bits() == o.ratio.to_bits()
            && self.pass == o.pass
            && self.tol.to_bits() == o.tol.to_bits()
    }
}

/// `lhs/rhs` for positive `rhs`; otherwise 0 when `lhs = 0` and ∞ when not.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

impl ReportRow {
    /// Row whose predicate is `lhs ≤ rhs·(1 + tol)`.
    pub fn bound(experiment: &str, params: String, lhs: f64, rhs: f64, tol: f64) -> Self {
        let pass = lhs.is_finite() && lhs <= rhs * (1.0 + tol);
        Self { experiment: experiment.into(), params, lhs, rhs, ratio: ratio(lhs, rhs), pass, tol }
    }

    /// Row whose predicate is `|lhs − rhs| ≤ tol·scale`.
    pub fn close(experiment: &str, params: String, lhs: f64, rhs: f64, tol: f64, scale: f64) -> Self {
        let pass = (lhs - rhs).abs() <= tol * scale;
        Self { experiment: experiment.into(), params, lhs, rhs, ratio: ratio(lhs, rhs), pass, tol }
    }

    /// Row with an externally decided predicate.
    pub fn with_pass(experiment: &str, params: String, lhs: f64, rhs: f64, tol: f64, pass: bool) -> Self {
        Self { experiment: experiment.into(), params, lhs, rhs, ratio: ratio(lhs, rhs), pass, tol }
    }
}

/// Builds the `params` column from `(name, value)` pairs.
#[macro_export]
macro_rules! params {
    ($($k:expr => $v:expr),* $(,)?) => {{
        let parts: Vec<String> = vec![$(format!("{}={}", $k, $v)),*];
        parts.join(";")
    }};
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub estimate: String,
    pub seed: u64,
    pub psi: String,
    /// Full effective configuration.
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Configuration(format!("unknown format '{s}' (csv or json)"))),
        }
    }
}

pub const CSV_HEADER: [&str; 7] = ["experiment", "params", "lhs", "rhs", "ratio", "pass", "tol"];

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    fn check_rows(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::Configuration("refusing to emit a report with no rows".into()));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        self.check_rows()?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| Error::Evaluation(format!("csv: {e}"));
        w.write_record(CSV_HEADER).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.experiment.clone(),
                r.params.clone(),
                fmt_real(r.lhs),
                fmt_real(r.rhs),
                fmt_real(r.ratio),
                r.pass.to_string(),
                fmt_real(r.tol),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Evaluation(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        self.check_rows()?;
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Evaluation(format!("json: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Configuration(format!("report parse: {e}")))
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        let s = self.render(format)?;
        out.write_all(s.as_bytes()).map_err(|e| Error::Evaluation(format!("write: {e}")))
    }
}

/// Rows of a CSV report.
pub fn rows_from_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let bad = |m: String| Error::Configuration(format!("csv report: {m}"));
    let header = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(bad("unexpected header".into()));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let pass = match &rec[5] {
            "true" => true,
            "false" => false,
            v => return Err(bad(format!("pass column '{v}'"))),
        };
        rows.push(ReportRow {
            experiment: rec[0].to_string(),
            params: rec[1].to_string(),
            lhs: parse_real(&rec[2])?,
            rhs: parse_real(&rec[3])?,
            ratio: parse_real(&rec[4])?,
            pass,
            tol: parse_real(&rec[6])?,
        });
    }
    Ok(rows)
}
