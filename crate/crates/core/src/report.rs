//! Labelled experiment results with deterministic CSV and JSON encodings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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
            other => Err(Error::input(format!(
                "format: expected csv or json, got {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: BTreeMap<String, String>,
    pub rows: Vec<(String, f64)>,
    pub flags: Vec<(String, bool)>,
    pub wall_time: Option<f64>,
}

/// 17 significant digits, the shortest width that round-trips every `f64`.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn parse_value(s: &str) -> Result<f64> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse()
            .map_err(|_| Error::input(format!("not a number: {s:?}"))),
    }
}

fn json_value(x: f64) -> String {
    if x.is_finite() {
        format_value(x)
    } else {
        format!("\"{}\"", format_value(x))
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            ..Self::default()
        }
    }

    pub fn param(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn row(&mut self, label: impl Into<String>, value: f64) -> &mut Self {
        self.rows.push((label.into(), value));
        self
    }

    pub fn flag(&mut self, label: impl Into<String>, pass: bool) -> &mut Self {
        self.flags.push((label.into(), pass));
        self
    }

    /// Appends another report's rows and flags under `prefix`.
    pub fn absorb(&mut self, prefix: &str, other: ExperimentReport) -> &mut Self {
        for (label, v) in other.rows {
            self.rows.push((format!("{prefix}{label}"), v));
        }
        for (label, ok) in other.flags {
            self.flags.push((format!("{prefix}{label}"), ok));
        }
        self
    }

    pub fn value(&self, label: &str) -> Option<f64> {
        self.rows.iter().find(|(l, _)| l == label).map(|&(_, v)| v)
    }

    pub fn flag_value(&self, label: &str) -> Option<bool> {
        self.flags.iter().find(|(l, _)| l == label).map(|&(_, v)| v)
    }

    pub fn all_pass(&self) -> bool {
        self.flags.iter().all(|&(_, ok)| ok)
    }

    pub fn failed_flags(&self) -> Vec<&str> {
        self.flags
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    /// `label,value` lines; flags follow the rows as `pass:<label>` with value 1 or 0.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,value\n");
        for (label, v) in &self.rows {
            let _ = writeln!(out, "{},{}", csv_field(label), format_value(*v));
        }
        for (label, ok) in &self.flags {
            let v = if *ok { 1.0 } else { 0.0 };
            let _ = writeln!(
                out,
                "{},{}",
                csv_field(&format!("pass:{label}")),
                format_value(v)
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{{\"experiment\":{},\"params\":{{",
            json_string(&self.experiment)
        );
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{}:{}", json_string(k), json_string(v)))
            .collect();
        out.push_str(&params.join(","));
        out.push_str("},\"rows\":[");
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|(l, v)| {
                format!(
                    "{{\"label\":{},\"value\":{}}}",
                    json_string(l),
                    json_value(*v)
                )
            })
            .collect();
        out.push_str(&rows.join(","));
        out.push_str("],\"flags\":[");
        let flags: Vec<String> = self
            .flags
            .iter()
            .map(|(l, ok)| format!("{{\"label\":{},\"pass\":{ok}}}", json_string(l)))
            .collect();
        out.push_str(&flags.join(","));
        out.push_str("],\"wall_time\":");
        match self.wall_time {
            Some(t) => out.push_str(&json_value(t)),
            None => out.push_str("null"),
        }
        out.push_str("}\n");
        out
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bad = |what: &str| Error::input(format!("malformed report JSON: {what}"));
        let v: Value = serde_json::from_str(text).map_err(|e| Error::input(e.to_string()))?;
        let number = |x: &Value| -> Result<f64> {
            match x {
                Value::Number(n) => n.as_f64().ok_or_else(|| bad("number")),
                Value::String(s) => parse_value(s),
                _ => Err(bad("value")),
            }
        };
        let experiment = v["experiment"]
            .as_str()
            .ok_or_else(|| bad("experiment"))?
            .to_string();
        let params = v["params"]
            .as_object()
            .ok_or_else(|| bad("params"))?
            .iter()
            .map(|(k, x)| {
                Ok((
                    k.clone(),
                    x.as_str().ok_or_else(|| bad("param"))?.to_string(),
                ))
            })
            .collect::<Result<_>>()?;
        let rows = v["rows"]
            .as_array()
            .ok_or_else(|| bad("rows"))?
            .iter()
            .map(|r| {
                let label = r["label"].as_str().ok_or_else(|| bad("row label"))?;
                Ok((label.to_string(), number(&r["value"])?))
            })
            .collect::<Result<_>>()?;
        let flags = v["flags"]
            .as_array()
            .ok_or_else(|| bad("flags"))?
            .iter()
            .map(|f| {
                let label = f["label"].as_str().ok_or_else(|| bad("flag label"))?;
                Ok((
                    label.to_string(),
                    f["pass"].as_bool().ok_or_else(|| bad("flag"))?,
                ))
            })
            .collect::<Result<_>>()?;
        let wall_time = match &v["wall_time"] {
            Value::Null => None,
            x => Some(number(x)?),
        };
        Ok(Self {
            experiment,
            params,
            rows,
            flags,
            wall_time,
        })
    }

    /// Parses the rows back out of [`to_csv`](Self::to_csv) output.
    pub fn rows_from_csv(text: &str) -> Result<Vec<(String, f64)>> {
        let mut lines = text.lines();
        if lines.next() != Some("label,value") {
            return Err(Error::input("CSV header must be `label,value`"));
        }
        lines
            .map(|line| {
                let (label, value) = line
                    .rsplit_once(',')
                    .ok_or_else(|| Error::input(format!("bad CSV line {line:?}")))?;
                let label = label
                    .strip_prefix('"')
                    .and_then(|l| l.strip_suffix('"'))
                    .map(|l| l.replace("\"\"", "\""))
                    .unwrap_or_else(|| label.to_string());
                Ok((label, parse_value(value)?))
            })
            .collect()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut r = ExperimentReport::new("v2norm");
        r.param("seed", 7).param("dim", 1000);
        r.row("eta0", 1.875_104_068_711_961)
            .row("tiny", 5e-324)
            .row("third", 1.0 / 3.0)
            .row("inf", f64::INFINITY)
            .row("a,b", -0.1);
        r.flag("ok", true).flag("bad", false);
        r
    }

    #[test]
    fn empty_report_is_header_only() {
        assert_eq!(ExperimentReport::new("x").to_csv(), "label,value\n");
    }

    #[test]
    fn single_row_csv() {
        let mut r = ExperimentReport::new("v2norm");
        r.row("eta0", 1.875);
        assert_eq!(r.to_csv(), "label,value\neta0,1.8750000000000000e0\n");
    }

    #[test]
    fn json_round_trip_is_bitwise() {
        let r = sample();
        let back = ExperimentReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back.experiment, r.experiment);
        assert_eq!(back.params, r.params);
        assert_eq!(back.flags, r.flags);
        for ((l1, v1), (l2, v2)) in r.rows.iter().zip(&back.rows) {
            assert_eq!(l1, l2);
            assert_eq!(v1.to_bits(), v2.to_bits());
        }
        assert_eq!(back.wall_time, None);
    }

    #[test]
    fn csv_round_trip_is_bitwise() {
        let r = sample();
        let rows = ExperimentReport::rows_from_csv(&r.to_csv()).unwrap();
        for ((l1, v1), (l2, v2)) in r.rows.iter().zip(&rows) {
            assert_eq!(l1, l2);
            assert_eq!(v1.to_bits(), v2.to_bits());
        }
        assert_eq!(rows.len(), r.rows.len() + r.flags.len());
    }

    #[test]
    fn flags() {
        let r = sample();
        assert!(!r.all_pass());
        assert_eq!(r.failed_flags(), vec!["bad"]);
        assert_eq!(r.flag_value("ok"), Some(true));
    }
}
