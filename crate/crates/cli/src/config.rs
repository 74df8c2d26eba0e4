//! Run configuration: one TOML document aggregating every component's
//! knobs. Unknown keys are rejected.

use std::path::Path;

use serde::Deserialize;

use chromaheat_core::advisor::AdvisorThresholds;
use chromaheat_core::chromatic::{FilterBank, TriangleProfile};
use chromaheat_core::detector::DetectorConfig;
use chromaheat_core::signal::NormalizationConfig;
use chromaheat_core::sim::{OperatingMode, ScenarioKind, ScenarioScript, TankModel};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEntry {
    pub kind: ScenarioKind,
    pub seed: Option<u64>,
    pub duration_s: Option<f64>,
    pub jitter: Option<f64>,
    pub operating_mode: Option<OperatingMode>,
}

impl ScenarioEntry {
    /// Builds the concrete script; scenarios without an explicit seed get
    /// `base_seed + index` so one top-level seed drives the whole run.
    pub fn to_script(&self, base_seed: u64, index: u64) -> ScenarioScript {
        let mut script = ScenarioScript::new(self.kind, self.seed.unwrap_or(base_seed + index));
        if let Some(d) = self.duration_s {
            script.duration_s = d;
        }
        if let Some(j) = self.jitter {
            script.jitter = j;
        }
        if let Some(m) = self.operating_mode {
            script.operating_mode = m;
        }
        script
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterBankConfig {
    /// Defaults to the detector window length.
    pub window_length: Option<f64>,
    /// Exactly three profiles when given; defaults to the
    /// partition-of-unity triangle bank.
    pub profiles: Option<Vec<TriangleProfile>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub tank: TankModel,
    pub scenarios: Vec<ScenarioEntry>,
    pub normalization: NormalizationConfig,
    pub detector: DetectorConfig,
    pub filter_bank: FilterBankConfig,
    pub advisor: AdvisorThresholds,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn bank(&self) -> Result<FilterBank, CliError> {
        let window = self
            .filter_bank
            .window_length
            .unwrap_or(self.detector.window_length);
        match &self.filter_bank.profiles {
            None => FilterBank::default_bank(window).map_err(CliError::from),
            Some(profiles) => {
                let arr: [TriangleProfile; 3] = profiles.as_slice().try_into().map_err(|_| {
                    CliError::usage(format!(
                        "filter_bank.profiles needs exactly 3 entries, got {}",
                        profiles.len()
                    ))
                })?;
                FilterBank::new(window, arr).map_err(CliError::from)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.detector.window_length, 600.0);
        assert!(cfg.scenarios.is_empty());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("bogus_key = 1").is_err());
        assert!(toml::from_str::<RunConfig>("[detector]\nbogus = 1").is_err());
    }

    #[test]
    fn scenario_seed_derivation() {
        let cfg: RunConfig = toml::from_str(
            "seed = 100\n[[scenarios]]\nkind = \"Case1\"\n[[scenarios]]\nkind = \"Case3\"\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.scenarios[0].to_script(cfg.seed, 0).seed, 100);
        assert_eq!(cfg.scenarios[1].to_script(cfg.seed, 1).seed, 9);
    }
}
