//! Verification reports: per-trial records, per-resolution summaries, verdict, and their
//! JSON / CSV / text renderings.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::config::CheckKind;
use crate::error::{Error, Result};

/// A scalar parameter or diagnostic value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl ParamValue {
    /// Non-finite floats become the strings "inf", "-inf" or "nan".
    pub fn float(v: f64) -> Self {
        if v.is_finite() {
            ParamValue::Float(v)
        } else if v.is_nan() {
            ParamValue::Str("nan".into())
        } else if v > 0.0 {
            ParamValue::Str("inf".into())
        } else {
            ParamValue::Str("-inf".into())
        }
    }

    fn csv_field(&self) -> String {
        match self {
            ParamValue::Bool(b) => b.to_string(),
            ParamValue::Int(i) => i.to_string(),
            ParamValue::Float(f) => fmt_float(*f),
            ParamValue::Str(s) => s.clone(),
        }
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::float(v)
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Str(v.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Str(v)
    }
}

pub type Params = IndexMap<String, ParamValue>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    /// LHS = RHS = 0.
    Degenerate,
    /// Non-finite ratio, e.g. LHS > 0 = RHS.
    Failed,
}

impl TrialStatus {
    fn as_str(&self) -> &'static str {
        match self {
            TrialStatus::Ok => "ok",
            TrialStatus::Degenerate => "degenerate",
            TrialStatus::Failed => "failed",
        }
    }
}

/// One trial. Non-finite numbers are stored as `None` and written "inf" in CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    pub params: Params,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
    pub status: TrialStatus,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl TrialRecord {
    pub fn new(id: usize, resolution: Option<usize>, params: Params, lhs: f64, rhs: f64, ratio: f64) -> Self {
        let status = if !ratio.is_finite() {
            TrialStatus::Failed
        } else if lhs == 0.0 && rhs == 0.0 {
            TrialStatus::Degenerate
        } else {
            TrialStatus::Ok
        };
        Self { id, resolution, params, lhs: finite(lhs), rhs: finite(rhs), ratio: finite(ratio), status }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionSummary {
    pub n: usize,
    pub trials: usize,
    pub degenerate: usize,
    pub failed: usize,
    /// None when some trial failed.
    pub sup_ratio: Option<f64>,
    /// Id of the trial attaining the sup.
    pub argmax: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    pub name: String,
    pub value: ParamValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    }

    pub fn passed(&self) -> bool {
        *self == Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub experiment_id: String,
    pub inequality: String,
    pub citation: Option<String>,
    pub check_kind: CheckKind,
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
    /// Resolved exponents (q after scaling).
    pub exponents: Params,
    pub resolutions: Vec<ResolutionSummary>,
    /// Largest max(a/b, b/a) over consecutive resolution sups (ratio sweeps only).
    pub stability: Option<f64>,
    pub stability_factor: Option<f64>,
    pub tolerance: Option<f64>,
    pub diagnostics: Vec<Diagnostic>,
    pub post_checks: Vec<PostCheck>,
    pub verdict: Verdict,
    pub records: Vec<TrialRecord>,
}

/// 17 significant digits, exponent form, "inf" for non-finite.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "inf".to_string()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "inf".to_string(), fmt_float)
}

/// Sup of the finite ratios of one resolution; None when a trial failed.
pub fn summarize(n: usize, records: &[&TrialRecord]) -> ResolutionSummary {
    let mut s = ResolutionSummary { n, trials: records.len(), degenerate: 0, failed: 0, sup_ratio: Some(0.0), argmax: None };
    for r in records {
        match r.status {
            TrialStatus::Degenerate => s.degenerate += 1,
            TrialStatus::Failed => s.failed += 1,
            TrialStatus::Ok => {}
        }
        if let (Some(v), Some(cur)) = (r.ratio, s.sup_ratio) {
            if s.argmax.is_none() || v > cur {
                s.sup_ratio = Some(v);
                s.argmax = Some(r.id);
            }
        }
    }
    if s.failed > 0 {
        s.sup_ratio = None;
    }
    s
}

/// max over consecutive pairs of max(a/b, b/a); 1 for two zeros, None if undefined.
pub fn stability(sups: &[Option<f64>]) -> Option<f64> {
    let mut worst: f64 = 1.0;
    for w in sups.windows(2) {
        let (a, b) = (w[0]?, w[1]?);
        let f = if a == 0.0 && b == 0.0 {
            1.0
        } else if a == 0.0 || b == 0.0 {
            return None;
        } else {
            (a / b).max(b / a)
        };
        worst = worst.max(f);
    }
    Some(worst)
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("report: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Flat CSV, one row per trial. The status column is left out for the discrete lemma.
    pub fn to_csv(&self) -> Result<String> {
        let with_resolution = self.records.iter().any(|r| r.resolution.is_some());
        let with_status = self.check_kind != CheckKind::DiscreteLemma;
        let mut names: Vec<&str> = Vec::new();
        for r in &self.records {
            for k in r.params.keys() {
                if !names.contains(&k.as_str()) {
                    names.push(k);
                }
            }
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let mut header: Vec<&str> = Vec::new();
        if with_resolution {
            header.push("resolution");
        }
        header.extend(&names);
        header.extend(["lhs", "rhs", "ratio"]);
        if with_status {
            header.push("status");
        }
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&header).map_err(io)?;
        for r in &self.records {
            let mut row: Vec<String> = Vec::with_capacity(header.len());
            if with_resolution {
                row.push(r.resolution.map(|n| n.to_string()).unwrap_or_default());
            }
            for k in &names {
                row.push(r.params.get(*k).map(ParamValue::csv_field).unwrap_or_default());
            }
            row.extend([fmt_opt(r.lhs), fmt_opt(r.rhs), fmt_opt(r.ratio)]);
            if with_status {
                row.push(r.status.as_str().to_string());
            }
            w.write_record(&row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// Human-readable summary; the last line is the verdict.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("experiment {} ({})\n", self.experiment_id, self.inequality));
        if let Some(c) = &self.citation {
            out.push_str(&format!("statement  {c}\n"));
        }
        out.push_str(&format!("check      {}\n", self.check_kind.as_str()));
        for r in &self.resolutions {
            // Resolution-free checks (the discrete lemma) store n = 0.
            let n = if r.n == 0 { "-".to_string() } else { r.n.to_string() };
            out.push_str(&format!(
                "N = {:<6} trials {:<6} degenerate {:<5} failed {:<5} sup ratio {}\n",
                n,
                r.trials,
                r.degenerate,
                r.failed,
                fmt_opt(r.sup_ratio)
            ));
        }
        if let Some(f) = self.stability_factor {
            out.push_str(&format!("stability  {} (allowed {})\n", fmt_opt(self.stability), fmt_float(f)));
        }
        if let Some(t) = self.tolerance {
            out.push_str(&format!("tolerance  {}\n", fmt_float(t)));
        }
        for d in &self.diagnostics {
            let at = d.resolution.map(|n| format!(" [N = {n}]")).unwrap_or_default();
            out.push_str(&format!("diag       {}{at}: {}\n", d.name, d.value.csv_field()));
        }
        for c in &self.post_checks {
            let mark = if c.passed { "ok" } else { "FAILED" };
            out.push_str(&format!("check      {} {mark}: {}\n", c.name, c.detail));
        }
        out.push_str(self.verdict.as_str());
        out.push('\n');
        out
    }
}
