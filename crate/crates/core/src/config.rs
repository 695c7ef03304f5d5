//! Experiment configuration (JSON).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    ExactIdentity,
    PointwiseDomination,
    RatioSweep,
    DiscreteLemma,
}

impl CheckKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::ExactIdentity => "exact_identity",
            CheckKind::PointwiseDomination => "pointwise_domination",
            CheckKind::RatioSweep => "ratio_sweep",
            CheckKind::DiscreteLemma => "discrete_lemma",
        }
    }
}

/// A target exponent: a positive number or the string "inf".
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Exponent(v)),
            Raw::Text(t) if t == "inf" => Ok(Exponent(f64::INFINITY)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("exponent must be a number or \"inf\", got {t:?}"))),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exponents {
    #[serde(default)]
    pub p1: Option<f64>,
    #[serde(default)]
    pub p2: Option<f64>,
    #[serde(default)]
    pub q: Option<Exponent>,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(default)]
    pub lambda1: Option<f64>,
    #[serde(default)]
    pub lambda2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallFamilySpec {
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
}

impl Default for BallFamilySpec {
    fn default() -> Self {
        Self { stride: default_stride(), radii: None }
    }
}

fn default_stride() -> usize {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub key: String,
    #[serde(default)]
    pub params: Value,
}

/// Sweep ranges of the discrete lemma check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaSpec {
    #[serde(default = "default_lemma_l")]
    pub l_max: u32,
    /// a, b range over 2^k for k in [-log2_range, log2_range].
    #[serde(default = "default_lemma_log2")]
    pub log2_range: i32,
    /// (n, m, s) triples.
    #[serde(default = "default_triples")]
    pub triples: Vec<(u32, f64, f64)>,
}

impl Default for LemmaSpec {
    fn default() -> Self {
        Self { l_max: default_lemma_l(), log2_range: default_lemma_log2(), triples: default_triples() }
    }
}

fn default_lemma_l() -> u32 {
    24
}

fn default_lemma_log2() -> i32 {
    8
}

fn default_triples() -> Vec<(u32, f64, f64)> {
    vec![(1, 1.0, 0.5), (1, 2.0, 0.5), (2, 2.0, 1.0)]
}

fn default_length() -> f64 {
    2.0 * PI
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    /// Registry key of the inequality; defaults to `id`.
    #[serde(default)]
    pub inequality: Option<String>,
    pub check_kind: CheckKind,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(rename = "N_list", default)]
    pub n_list: Vec<usize>,
    #[serde(rename = "L", default = "default_length")]
    pub length: f64,
    #[serde(default)]
    pub exponents: Exponents,
    #[serde(default)]
    pub families: Vec<Value>,
    #[serde(default)]
    pub ball_family: Option<BallFamilySpec>,
    #[serde(default)]
    pub symbol: Option<SymbolSpec>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub stability_factor: Option<f64>,
    #[serde(default)]
    pub output_path: Option<String>,
    /// Truncation of the dyadic ball series.
    #[serde(default)]
    pub l_max: Option<usize>,
    /// Shell scales for the symbol shell check.
    #[serde(default)]
    pub t_list: Option<Vec<f64>>,
    #[serde(default)]
    pub lemma: Option<LemmaSpec>,
}

fn default_n() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check_basic()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn inequality_key(&self) -> &str {
        self.inequality.as_deref().unwrap_or(&self.id)
    }

    pub fn stability(&self) -> f64 {
        self.stability_factor.unwrap_or(2.0)
    }

    fn check_basic(&self) -> Result<()> {
        if !(self.n == 1 || self.n == 2) {
            return Err(Error::Config(format!("n must be 1 or 2, got {}", self.n)));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(Error::Config("tolerance must be positive".into()));
            }
        }
        if let Some(f) = self.stability_factor {
            if !(f >= 1.0) {
                return Err(Error::Config("stability_factor must be at least 1".into()));
            }
        }
        if self.check_kind == CheckKind::RatioSweep && self.n_list.len() < 2 {
            return Err(Error::Config("ratio_sweep needs at least two resolutions in N_list".into()));
        }
        if self.check_kind != CheckKind::DiscreteLemma && self.n_list.is_empty() {
            return Err(Error::Config("N_list is empty".into()));
        }
        let mut sorted = self.n_list.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != self.n_list {
            return Err(Error::Config("N_list must be strictly increasing".into()));
        }
        Ok(())
    }
}
