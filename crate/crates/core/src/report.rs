//! Machine-readable and text reports. Every number is rounded to 12 significant
//! digits before it is written, so JSON and text carry identical values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::criteria::{CriterionResult, Evaluation};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
        .parse()
        .expect("formatted float parses")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ReportEntry {
    Result {
        criterion: String,
        params: BTreeMap<String, f64>,
        lhs: f64,
        rhs: f64,
        margin: f64,
        detected: bool,
        tol: f64,
    },
    Failure {
        criterion: String,
        error: String,
    },
}

impl From<&CriterionResult> for ReportEntry {
    fn from(r: &CriterionResult) -> Self {
        ReportEntry::Result {
            criterion: r.name.clone(),
            params: r
                .params
                .iter()
                .map(|(k, v)| (k.clone(), round_sig(*v)))
                .collect(),
            lhs: round_sig(r.lhs),
            rhs: round_sig(r.rhs),
            margin: round_sig(r.margin),
            detected: r.detected,
            tol: round_sig(r.tol),
        }
    }
}

impl From<&Evaluation> for ReportEntry {
    fn from(e: &Evaluation) -> Self {
        match &e.outcome {
            Ok(r) => r.into(),
            Err(err) => ReportEntry::Failure {
                criterion: e.criterion.to_string(),
                error: err.to_string(),
            },
        }
    }
}

pub fn entries(evaluations: &[Evaluation]) -> Vec<ReportEntry> {
    evaluations.iter().map(ReportEntry::from).collect()
}

pub fn to_json(entries: &[ReportEntry]) -> String {
    serde_json::to_string_pretty(entries).expect("reports serialize")
}

/// Shortest round-trip form, switching to exponent notation for very small or large magnitudes.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn format_params(params: &BTreeMap<String, f64>) -> String {
    if params.is_empty() {
        return "-".into();
    }
    params
        .iter()
        .map(|(k, v)| format!("{k}={}", format_number(*v)))
        .collect::<Vec<_>>()
        .join(",")
}

/// Aligned table with the same rounded values as [`to_json`].
pub fn to_text(entries: &[ReportEntry]) -> String {
    let header = [
        "criterion",
        "params",
        "lhs",
        "rhs",
        "margin",
        "detected",
        "tol",
    ]
    .map(String::from);
    let mut rows: Vec<[String; 7]> = vec![header];
    for e in entries {
        rows.push(match e {
            ReportEntry::Result {
                criterion,
                params,
                lhs,
                rhs,
                margin,
                detected,
                tol,
            } => [
                criterion.clone(),
                format_params(params),
                format_number(*lhs),
                format_number(*rhs),
                format_number(*margin),
                detected.to_string(),
                format_number(*tol),
            ],
            ReportEntry::Failure { criterion, error } => [
                criterion.clone(),
                format!("error: {error}"),
                "-".into(),
                "-".into(),
                "-".into(),
                "-".into(),
                "-".into(),
            ],
        });
    }
    let widths: Vec<usize> = (0..7)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}
