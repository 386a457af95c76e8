//! Structured run records for `--json` output and replay.

use serde::Serialize;
use serde_json::Value;

use crate::config::FileConfig;

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub timestamp_unix: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Fully resolved configuration; feeding this object back through
    /// `--config` reproduces the run.
    pub config: FileConfig,
    pub results: Value,
}

impl RunRecord {
    pub fn new(command: &str, mut config: FileConfig, results: Value) -> Self {
        config.schema = Some(1);
        RunRecord {
            schema: 1,
            tool: "mrct",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            timestamp_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            seed: config.seed,
            config,
            results,
        }
    }

    pub fn print(&self) {
        println!(
            "{}",
            serde_json::to_string_pretty(self).expect("serializable record")
        );
    }
}

/// Fractions are printed both ways because design documents mix the
/// conventions: three decimals and one-decimal percent.
pub fn fraction_display(f: f64) -> String {
    format!("{:.3} ({:.1}%)", f, f * 100.0)
}
