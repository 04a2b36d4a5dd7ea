use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use wcr_core::cachesim::{default_sizes, parse_size, DEFAULT_KNEE_RATIO};
use wcr_core::ingest::DEFAULT_WARMUP_S;
use wcr_core::reduction::{KSelection, DEFAULT_VARIANCE_TARGET};

use crate::CliError;

/// Run configuration. Loaded from `--config` when given; individual flags
/// override it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_path: Option<PathBuf>,
    pub warmup_s: f64,
    pub variance_target: f64,
    pub k: KSpec,
    pub seed: u64,
    pub restarts: usize,
    pub sizes: Vec<SizeSpec>,
    pub knee_ratio: f64,
    pub line_bytes: u64,
    /// Ways per set; `None` means fully associative.
    pub ways: Option<u32>,
    pub write_allocate: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_path: None,
            warmup_s: DEFAULT_WARMUP_S,
            variance_target: DEFAULT_VARIANCE_TARGET,
            k: KSpec::Word("auto".into()),
            seed: 42,
            restarts: 10,
            sizes: default_sizes().into_iter().map(SizeSpec::Bytes).collect(),
            knee_ratio: DEFAULT_KNEE_RATIO,
            line_bytes: 64,
            ways: None,
            write_allocate: true,
        }
    }
}

/// `17`, `"auto"` or `{"k_min": 1, "k_max": 20}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    Fixed(usize),
    Word(String),
    Range { k_min: usize, k_max: usize },
}

/// A byte count or a string such as `"32K"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SizeSpec {
    Bytes(u64),
    Text(String),
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("config {}: {e}", path.display())))
    }

    pub fn k_selection(&self) -> Result<KSelection, CliError> {
        match &self.k {
            KSpec::Fixed(k) if *k >= 1 => Ok(KSelection::Fixed(*k)),
            KSpec::Fixed(_) => Err(CliError::Usage("k must be at least 1".into())),
            KSpec::Word(w) if w.eq_ignore_ascii_case("auto") => Ok(KSelection::Auto { k_min: 1, k_max: 20 }),
            KSpec::Word(w) => Err(CliError::Usage(format!("k must be an integer or `auto`, got `{w}`"))),
            KSpec::Range { k_min, k_max } if 1 <= *k_min && k_min <= k_max => Ok(KSelection::Auto {
                k_min: *k_min,
                k_max: *k_max,
            }),
            KSpec::Range { .. } => Err(CliError::Usage("k range needs 1 <= k_min <= k_max".into())),
        }
    }

    pub fn size_bytes(&self) -> Result<Vec<u64>, CliError> {
        self.sizes
            .iter()
            .map(|s| match s {
                SizeSpec::Bytes(b) => Ok(*b),
                SizeSpec::Text(t) => parse_size(t).map_err(|e| CliError::Usage(e.to_string())),
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.variance_target > 0.0 && self.variance_target <= 1.0) {
            return Err(CliError::Usage(format!(
                "variance target must lie in (0, 1], got {}",
                self.variance_target
            )));
        }
        if !(self.warmup_s >= 0.0) || !self.warmup_s.is_finite() {
            return Err(CliError::Usage(format!("warm-up must be >= 0, got {}", self.warmup_s)));
        }
        if !(self.knee_ratio > 0.0 && self.knee_ratio <= 1.0) {
            return Err(CliError::Usage(format!("knee must lie in (0, 1], got {}", self.knee_ratio)));
        }
        if self.restarts == 0 {
            return Err(CliError::Usage("restarts must be at least 1".into()));
        }
        if let Some(p) = &self.schema_path {
            if !p.exists() {
                return Err(CliError::io(p, std::io::Error::from(std::io::ErrorKind::NotFound)));
            }
        }
        self.k_selection()?;
        self.size_bytes()?;
        Ok(())
    }
}

/// Parses `--k`: an integer or `auto`.
pub fn parse_k(text: &str) -> Result<KSpec, String> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(KSpec::Word("auto".into()));
    }
    text.parse()
        .map(KSpec::Fixed)
        .map_err(|_| format!("expected an integer or `auto`, got `{text}`"))
}

/// Parses `--k-range`: `MIN:MAX` or `MIN-MAX`.
pub fn parse_k_range(text: &str) -> Result<KSpec, String> {
    let (a, b) = text
        .split_once(':')
        .or_else(|| text.split_once('-'))
        .ok_or_else(|| format!("expected MIN:MAX, got `{text}`"))?;
    let k_min = a.trim().parse().map_err(|_| format!("bad k_min `{a}`"))?;
    let k_max = b.trim().parse().map_err(|_| format!("bad k_max `{b}`"))?;
    Ok(KSpec::Range { k_min, k_max })
}
