//! The experiment configuration: one self-contained description of a run.
//!
//! Every run is fully determined by its config (randomness is always
//! seeded), the config round-trips losslessly through TOML, and its
//! canonical serialization is hashed into the provenance header of every
//! output file, so results can be traced back to the exact invocation.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub command: String,
    pub matrix: String,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_range: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub space: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub starred: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_max: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub noise: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x0: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scheme: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mesh: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub segments: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gap: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub registry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub period_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub centers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub enumerate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub validate_only: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub measure_n: Option<u32>,
}

fn default_mode() -> String {
    "exact".to_string()
}

impl ExperimentConfig {
    pub fn empty(command: &str) -> Self {
        Self {
            command: command.to_string(),
            matrix: "2 1 1 1".to_string(),
            mode: default_mode(),
            out: None,
            n: None,
            n_range: None,
            kind: None,
            space: None,
            starred: None,
            delta: None,
            epsilon: None,
            k_max: None,
            seed: None,
            length: None,
            noise: None,
            x0: None,
            input: None,
            scheme: None,
            mesh: None,
            segments: None,
            gap: None,
            registry: None,
            period_mode: None,
            centers: None,
            r: None,
            enumerate: None,
            validate_only: None,
            measure_n: None,
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("serializing config")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("parsing config file")
    }

    /// Short hash of the canonical serialization, for provenance headers.
    pub fn hash(&self) -> String {
        let canonical = self.to_toml().unwrap_or_default();
        let digest = Sha256::digest(canonical.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        hex[..12].to_string()
    }

    /// Provenance line prepended to every CSV output.
    pub fn provenance_comment(&self) -> String {
        format!(
            "# anosovlab {} command={} config_sha256={}\n",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.hash()
        )
    }

    /// Provenance object embedded in JSON outputs.
    pub fn provenance_json(&self) -> serde_json::Value {
        serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config_sha256": self.hash(),
        })
    }
}

/// Inclusive `a..b` range (or a single number) used by `--n-range`.
pub fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<u32>> {
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: u32 = lo.trim().parse().context("range start")?;
        let hi: u32 = hi.trim().parse().context("range end")?;
        anyhow::ensure!(lo <= hi, "empty range {text:?}");
        Ok(lo..=hi)
    } else {
        let n: u32 = text.parse().context("range value")?;
        Ok(n..=n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip_is_lossless() {
        let mut cfg = ExperimentConfig::empty("count");
        cfg.n_range = Some("1..12".into());
        cfg.seed = Some(7);
        cfg.delta = Some("1/1000".into());
        let text = cfg.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.hash(), back.hash());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..12").unwrap(), 1..=12);
        assert_eq!(parse_range("4..=10").unwrap(), 4..=10);
        assert_eq!(parse_range("5").unwrap(), 5..=5);
        assert!(parse_range("9..2").is_err());
    }
}
