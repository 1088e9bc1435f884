use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::seed::fnv1a64;
use crate::error::{Error, Result};
use crate::run::{Algorithm, Budget};
use crate::tuner::{DESettings, Objective};

fn default_split_ratio() -> f64 {
    0.8
}

fn default_repetitions() -> u64 {
    15
}

fn default_budget() -> u64 {
    2000
}

fn default_checkpoints() -> usize {
    64
}

fn default_objectives() -> Vec<Objective> {
    Objective::CANONICAL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum TunerBlock {
    De {
        #[serde(default)]
        settings: DESettings,
    },
    Grid {
        /// Evaluate only this many evenly spread grid points.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subset: Option<usize>,
    },
}

/// Everything that determines an experiment's outputs. Paths are relative
/// to the manifest file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub suite: PathBuf,
    pub suite_seed: u64,
    #[serde(default = "default_split_ratio")]
    pub split_ratio: f64,
    #[serde(default)]
    pub split_seed: u64,
    pub algorithm: Algorithm,
    /// Master seed of all algorithm runs and of the tuners.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_repetitions")]
    pub repetitions: u64,
    /// Fitness evaluations per run.
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Replaces the evaluation budget when set; outputs are then not reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuner: Option<TunerBlock>,
    #[serde(default = "default_objectives")]
    pub objectives: Vec<Objective>,
    pub output: PathBuf,
}

impl ExperimentManifest {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Experiment(m));
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return fail(format!("split_ratio {} outside (0, 1)", self.split_ratio));
        }
        if self.repetitions < 1 {
            return fail("repetitions must be at least 1".into());
        }
        if self.budget < 1 {
            return fail("budget must be at least 1".into());
        }
        if self.checkpoints < 2 {
            return fail("checkpoints must be at least 2".into());
        }
        if let Some(s) = self.wall_clock_seconds {
            if !(s > 0.0 && s.is_finite()) {
                return fail(format!("wall-clock budget {s} must be positive"));
            }
        }
        for o in &self.objectives {
            Objective::new(o.alpha, o.beta)?;
        }
        if let Some(TunerBlock::De { settings }) = &self.tuner {
            settings.validate()?;
        }
        Ok(())
    }

    pub fn run_budget(&self) -> Budget {
        match self.wall_clock_seconds {
            Some(s) => Budget::WallClock(std::time::Duration::from_secs_f64(s)),
            None => Budget::Evaluations(self.budget),
        }
    }

    /// FNV-1a of the compact JSON form, as 16 hex digits.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("manifest serialises");
        format!("{:016x}", fnv1a64(&json))
    }
}

/// A manifest together with the directory its paths are relative to.
#[derive(Debug, Clone)]
pub struct LoadedManifest {
    pub manifest: ExperimentManifest,
    pub base: PathBuf,
}

impl LoadedManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Experiment(format!("cannot read manifest {}: {e}", path.display())))?;
        let manifest: ExperimentManifest = serde_json::from_str(&text)?;
        manifest.validate()?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedManifest { manifest, base })
    }

    pub fn suite_path(&self) -> PathBuf {
        self.base.join(&self.manifest.suite)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.base.join(&self.manifest.output)
    }
}

/// One algorithm run as stored in `runs.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub manifest: String,
    pub label: String,
    pub algorithm: Algorithm,
    pub subject: String,
    pub config_digest: String,
    pub repetition: u64,
    pub seed: u64,
    pub coverage: f64,
    pub auc: f64,
    pub evaluations: u64,
    /// Rows of `traces.csv` holding this run's trace.
    pub trace: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"suite":"suite.json","suite_seed":7,"algorithm":"mio","output":"out"}"#;

    #[test]
    fn defaults_fill_in() {
        let m: ExperimentManifest = serde_json::from_str(MINIMAL).unwrap();
        assert_eq!(m.split_ratio, 0.8);
        assert_eq!(m.repetitions, 15);
        assert_eq!(m.budget, 2000);
        assert_eq!(m.checkpoints, 64);
        assert_eq!(m.objectives.len(), 5);
        assert!(m.validate().is_ok());
        assert_eq!(m.run_budget(), Budget::Evaluations(2000));
    }

    #[test]
    fn tuner_blocks_parse() {
        let de = r#"{"mode":"de","settings":{"pop_size":6,"generations":2}}"#;
        let TunerBlock::De { settings } = serde_json::from_str(de).unwrap() else {
            panic!("expected DE block")
        };
        assert_eq!(
            (settings.pop_size, settings.generations, settings.cross_prob),
            (6, 2, 0.7)
        );
        let grid: TunerBlock = serde_json::from_str(r#"{"mode":"grid"}"#).unwrap();
        assert_eq!(grid, TunerBlock::Grid { subset: None });
    }

    #[test]
    fn digest_tracks_content() {
        let a: ExperimentManifest = serde_json::from_str(MINIMAL).unwrap();
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.seed = 1;
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 16);
    }

    #[test]
    fn invalid_manifests_are_rejected() {
        let mut m: ExperimentManifest = serde_json::from_str(MINIMAL).unwrap();
        m.split_ratio = 1.0;
        assert!(m.validate().is_err());
        let mut m: ExperimentManifest = serde_json::from_str(MINIMAL).unwrap();
        m.repetitions = 0;
        assert!(m.validate().is_err());
        assert!(serde_json::from_str::<ExperimentManifest>(
            r#"{"suite":"x","suite_seed":1,"algorithm":"mio","output":"o","bogus":1}"#
        )
        .is_err());
    }
}
