use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::seed::{derive_seed, fnv1a64};
use crate::error::{Error, Result};
use crate::subject::{GeneratorParams, Subject};

/// A reproducible set of generated subjects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    pub seed: u64,
    pub params: GeneratorParams,
    pub subjects: Vec<Subject>,
}

impl Suite {
    /// Subject `i` is named `s000`, `s001`, ... and generated from
    /// `derive_seed(seed, fnv1a64("suite"), i, 0)`.
    pub fn generate(count: usize, seed: u64, params: GeneratorParams) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParams("suite needs at least one subject".into()));
        }
        params.validate()?;
        let width = (count - 1).to_string().len().max(3);
        let tag = fnv1a64(b"suite");
        let subjects = (0..count)
            .map(|i| {
                let id = format!("s{i:0width$}");
                Subject::generate(&id, derive_seed(seed, tag, i as u64, 0), params)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Suite { seed, params, subjects })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let suite: Suite = serde_json::from_str(&text)?;
        let mut ids: Vec<&str> = suite.subjects.iter().map(|s| s.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Experiment(format!("{}: duplicate subject ids", path.display())));
        }
        Ok(suite)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn ids(&self) -> Vec<String> {
        self.subjects.iter().map(|s| s.id.clone()).collect()
    }

    /// Subjects with the given ids, in the order of `ids`.
    pub fn select(&self, ids: &[String]) -> Result<Vec<Subject>> {
        ids.iter()
            .map(|id| {
                self.subjects
                    .iter()
                    .find(|s| &s.id == id)
                    .cloned()
                    .ok_or_else(|| Error::Experiment(format!("subject `{id}` is not in the suite")))
            })
            .collect()
    }
}

/// Shuffles `ids` with `seed` and puts the first `ceil(ratio * n)` into the
/// training side. Both sides come back sorted.
pub fn split_suite(ids: &[String], ratio: f64, seed: u64) -> Result<(Vec<String>, Vec<String>)> {
    let n = ids.len();
    if n < 2 {
        return Err(Error::InvalidParams("splitting needs at least two subjects".into()));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParams(format!("split ratio {ratio} outside (0, 1)")));
    }
    // the epsilon absorbs representation error, e.g. 0.8 * 10
    let train = ((ratio * n as f64) - 1e-9).ceil() as usize;
    if train == 0 || train >= n {
        return Err(Error::InvalidParams(format!(
            "split ratio {ratio} leaves one side empty for {n} subjects"
        )));
    }
    let mut shuffled = ids.to_vec();
    shuffled.sort_unstable();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test = shuffled.split_off(train);
    shuffled.sort_unstable();
    test.sort_unstable();
    Ok((shuffled, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("m{i:03}")).collect()
    }

    #[test]
    fn split_sizes() {
        let (train, test) = split_suite(&ids(101), 0.8, 3).unwrap();
        assert_eq!((train.len(), test.len()), (81, 20));
        let (train, test) = split_suite(&ids(12), 0.8, 3).unwrap();
        assert_eq!((train.len(), test.len()), (10, 2));
        let (train, _) = split_suite(&ids(10), 0.8, 3).unwrap();
        assert_eq!(train.len(), 8);
    }

    #[test]
    fn split_is_a_deterministic_partition() {
        let all = ids(30);
        let (a, b) = split_suite(&all, 0.7, 11).unwrap();
        assert_eq!((a.clone(), b.clone()), split_suite(&all, 0.7, 11).unwrap());
        let mut union = [a.clone(), b.clone()].concat();
        union.sort();
        assert_eq!(union, all);
        assert!(a.iter().all(|x| !b.contains(x)));
        assert_ne!(a, split_suite(&all, 0.7, 12).unwrap().0);
    }

    #[test]
    fn split_rejects_empty_sides() {
        assert!(split_suite(&ids(1), 0.5, 0).is_err());
        assert!(split_suite(&ids(2), 0.99, 0).is_err());
        assert!(split_suite(&ids(5), 1.0, 0).is_err());
        assert!(split_suite(&ids(5), 0.0, 0).is_err());
    }

    #[test]
    fn suite_generation_is_reproducible() {
        let a = Suite::generate(12, 7, GeneratorParams::default()).unwrap();
        assert_eq!(a.subjects.len(), 12);
        assert_eq!(a.subjects[11].id, "s011");
        assert_eq!(a, Suite::generate(12, 7, GeneratorParams::default()).unwrap());
        assert!(Suite::generate(0, 7, GeneratorParams::default()).is_err());
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("suite.json");
        let suite = Suite::generate(3, 1, GeneratorParams::default()).unwrap();
        suite.save(&path).unwrap();
        assert_eq!(Suite::load(&path).unwrap(), suite);
    }
}
