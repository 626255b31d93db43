use std::path::{Path, PathBuf};

use flakelab::C2Options;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

/// Parameters of a suite run. Every field has a default, so a config file
/// only names what it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub solver: C2Options,
    /// Criteria to run; empty means all ten.
    pub criteria: Vec<u8>,
    /// Random ℓ_p point sets for the Schoenberg check.
    pub schoenberg_sets: usize,
    /// Random spaces for the snowflake-axiom property.
    pub property_spaces: usize,
    /// Centered sample vectors per kernel in the brute-force check.
    pub brute_force_samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 7,
            out_dir: None,
            solver: C2Options::default(),
            criteria: Vec::new(),
            schoenberg_sets: 50,
            property_spaces: 1000,
            brute_force_samples: 10_000,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn runs(&self, criterion: u8) -> bool {
        self.criteria.is_empty() || self.criteria.contains(&criterion)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&c) = self.criteria.iter().find(|c| !(1..=10).contains(*c)) {
            return Err(CliError::Usage(format!("criterion {c} outside 1..=10")));
        }
        let s = &self.solver;
        if !(s.rel_tol > 0.0 && s.feasibility_tol > 0.0 && s.max_iterations > 0) {
            return Err(CliError::Usage(
                "solver rel_tol, feasibility_tol and max_iterations must be positive".into(),
            ));
        }
        if self.schoenberg_sets == 0 || self.property_spaces == 0 || self.brute_force_samples == 0 {
            return Err(CliError::Usage("sample counts must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_keeps_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"seed": 3}"#).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.schoenberg_sets, 50);
        assert_eq!(c.solver, C2Options::default());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"sede": 3}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig {
            criteria: vec![2, 5],
            ..ExperimentConfig::default()
        };
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
