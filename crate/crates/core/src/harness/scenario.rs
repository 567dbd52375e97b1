use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adversaries::AttackSpec;
use crate::error::{QkaError, Result};
use crate::protocol::ProtocolConfig;

fn default_protocol() -> ProtocolConfig {
    ProtocolConfig {
        parties: 3,
        key_len: 64,
        delta: 8,
        zeta: 16,
        error_threshold: 0.0,
    }
}

fn default_trials() -> usize {
    1000
}

/// A batch of seeded runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_protocol")]
    pub protocol: ProtocolConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack: Option<AttackSpec>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            protocol: default_protocol(),
            attack: None,
            trials: default_trials(),
            seed: 0,
            output_path: None,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct ScenarioOverrides {
    pub parties: Option<usize>,
    pub key_len: Option<usize>,
    pub delta: Option<usize>,
    pub zeta: Option<usize>,
    /// Attack kind name; `"none"` clears a configured attack.
    pub attack: Option<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| QkaError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Applies `overrides`. An attack given by kind name keeps the file's
    /// parameters when the kinds match, and takes defaults otherwise.
    pub fn apply(&mut self, overrides: &ScenarioOverrides) -> Result<()> {
        let p = &mut self.protocol;
        p.parties = overrides.parties.unwrap_or(p.parties);
        p.key_len = overrides.key_len.unwrap_or(p.key_len);
        p.delta = overrides.delta.unwrap_or(p.delta);
        p.zeta = overrides.zeta.unwrap_or(p.zeta);
        if let Some(name) = &overrides.attack {
            self.attack = match name.as_str() {
                "none" | "honest" => None,
                _ => match &self.attack {
                    Some(existing) if existing.kind_name() == name => Some(existing.clone()),
                    _ => Some(AttackSpec::from_kind(name)?),
                },
            };
        }
        self.trials = overrides.trials.unwrap_or(self.trials);
        self.seed = overrides.seed.unwrap_or(self.seed);
        if overrides.output_path.is_some() {
            self.output_path = overrides.output_path.clone();
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        if self.trials == 0 {
            return Err(QkaError::field("trials", "must be at least 1"));
        }
        if let Some(attack) = &self.attack {
            attack.validate(&self.protocol)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_defaults_and_overrides() {
        let mut s = ScenarioConfig::from_json(r#"{"attack":{"kind":"impersonation","target":2},"seed":9}"#).unwrap();
        assert_eq!(s.protocol, default_protocol());
        assert_eq!(s.trials, 1000);
        s.apply(&ScenarioOverrides {
            parties: Some(4),
            attack: Some("impersonation".into()),
            trials: Some(5),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(s.protocol.parties, 4);
        assert_eq!(s.trials, 5);
        assert_eq!(s.seed, 9);
        assert!(matches!(s.attack, Some(AttackSpec::Impersonation { target: 2, .. })));
        s.apply(&ScenarioOverrides {
            attack: Some("none".into()),
            ..Default::default()
        })
        .unwrap();
        assert!(s.attack.is_none());
        s.validate().unwrap();
    }

    #[test]
    fn unknown_fields_and_bad_values_rejected() {
        assert!(ScenarioConfig::from_json(r#"{"trails":3}"#).is_err());
        let s = ScenarioConfig::from_json(r#"{"trials":0}"#).unwrap();
        assert!(matches!(s.validate(), Err(QkaError::Validation { field, .. }) if field == "trials"));
        let s = ScenarioConfig::from_json(r#"{"protocol":{"parties":1,"key_len":4,"delta":1,"zeta":1}}"#).unwrap();
        assert!(matches!(s.validate(), Err(QkaError::Validation { field, .. }) if field == "parties"));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            ScenarioConfig::load(Path::new("/nonexistent/scenario.json")),
            Err(QkaError::Io { .. })
        ));
    }
}
