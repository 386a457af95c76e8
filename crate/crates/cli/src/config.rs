//! Config-file schema and flag/file/default resolution.
//!
//! Files are TOML or JSON with a mandatory `schema = 1` key; unknown keys
//! are rejected rather than warned about, since silent typos in trial
//! design inputs are unacceptable. Command-line flags override file
//! values, which override defaults.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Flat scenario description shared by the config file, the resolved
/// run record, and replay.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub schema: Option<u32>,

    // design knobs
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,

    // endpoint (study 1)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_total: Option<u64>,

    // endpoint overrides (study 2; defaults to study 1)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2_t2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2_c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_t2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_total2: Option<u64>,

    // scenario selection
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub studies: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,

    // allocation
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fractions: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fractions2: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equal_rest: Option<bool>,

    // solving / enumeration
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_c: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,

    // stochastic settings
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tie_policy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_source: Option<String>,
}

/// A previously emitted run record, accepted directly as replay input.
#[derive(Debug, Deserialize)]
struct RecordEnvelope {
    config: FileConfig,
}

impl FileConfig {
    /// Load from TOML or JSON. A JSON run record (an object carrying a
    /// `config` key) is unwrapped so `--json` output replays directly.
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let is_json = path
            .extension()
            .map(|e| e.eq_ignore_ascii_case("json"))
            .unwrap_or(false)
            || text.trim_start().starts_with('{');
        let config = if is_json {
            if let Ok(record) = serde_json::from_str::<RecordEnvelope>(&text) {
                record.config
            } else {
                serde_json::from_str::<FileConfig>(&text)
                    .with_context(|| format!("invalid JSON config {}", path.display()))?
            }
        } else {
            toml::from_str::<FileConfig>(&text)
                .with_context(|| format!("invalid TOML config {}", path.display()))?
        };
        match config.schema {
            Some(1) => Ok(config),
            Some(v) => bail!("unsupported config schema {v} (expected 1)"),
            None => bail!("config file must declare `schema = 1`"),
        }
    }

    /// Merge: values present in `self` win over `other`.
    pub fn or(mut self, other: FileConfig) -> FileConfig {
        macro_rules! take {
            ($($field:ident),* $(,)?) => {
                $(if self.$field.is_none() { self.$field = other.$field; })*
            };
        }
        take!(
            alpha,
            power,
            pi,
            gamma,
            ratio,
            endpoint,
            d,
            sigma2_t,
            sigma2_c,
            p_t,
            p_c,
            n_total,
            d2,
            sigma2_t2,
            sigma2_c2,
            p_t2,
            p_c2,
            n_total2,
            criterion,
            studies,
            method,
            f,
            f2,
            fractions,
            fractions2,
            k,
            equal_rest,
            target,
            pair_c,
            c,
            grid_start,
            grid_step,
            reps,
            seed,
            threads,
            tie_policy,
            sigma_source,
        );
        self.schema = Some(1);
        self
    }
}
