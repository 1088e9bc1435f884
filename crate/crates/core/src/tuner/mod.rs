//! Hyperparameter tuning: objectives over coverage and AUC, configuration
//! evaluation on a set of training subjects, differential evolution and grid
//! search.

mod de;
mod grid;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use de::{de_offspring, de_tune, DESettings, GenerationLog, Scale, Strategy, TuningResult};
pub use grid::{grid_subset, grid_tune, select_best, write_grid_csv, GridRecord};

use crate::error::{Error, Result};
use crate::experiment::derive_seed;
use crate::param_space::{space_by_id, Configuration, ParamSpace};
use crate::run::{Algorithm, AlgorithmConfig, Budget, CoverageTrace};
use crate::subject::Subject;

/// Area under the coverage curve over the budget fraction.
///
/// Trapezoid rule over the trace, prefixed with `(0, 0)` and extended at the
/// last coverage value up to fraction 1.
pub fn auc(trace: &CoverageTrace) -> f64 {
    let mut area = 0.0;
    let (mut x0, mut y0) = (0.0, 0.0);
    for &(x, y) in &trace.points {
        area += (x - x0) * (y0 + y) / 2.0;
        (x0, y0) = (x, y);
    }
    if x0 < 1.0 {
        area += (1.0 - x0) * y0;
    }
    area.clamp(0.0, 1.0)
}

/// Weighted sum of mean final coverage and mean AUC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub alpha: f64,
    pub beta: f64,
}

impl Objective {
    pub const COVERAGE: Objective = Objective { alpha: 1.0, beta: 0.0 };
    pub const AUC: Objective = Objective { alpha: 0.0, beta: 1.0 };

    pub const CANONICAL: [Objective; 5] = [
        Objective { alpha: 1.0, beta: 0.0 },
        Objective { alpha: 0.0, beta: 1.0 },
        Objective { alpha: 1.0, beta: 1.0 },
        Objective { alpha: 10.0, beta: 1.0 },
        Objective { alpha: 1.0, beta: 10.0 },
    ];

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let ok = alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0 && alpha + beta > 0.0;
        if !ok {
            return Err(Error::InvalidParams(format!(
                "objective weights must be non-negative with a positive sum, got ({alpha}, {beta})"
            )));
        }
        Ok(Objective { alpha, beta })
    }

    pub fn score(&self, record: &EvaluationRecord) -> f64 {
        self.alpha * record.mean_coverage + self.beta * record.mean_auc
    }
}

/// Labels like `1+0` or `10+1`.
impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}", self.alpha, self.beta)
    }
}

pub fn objective_score(record: &EvaluationRecord, objective: &Objective) -> f64 {
    objective.score(record)
}

/// Outcome of one run inside an evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub subject: String,
    pub repetition: u64,
    pub seed: u64,
    pub coverage: f64,
    pub auc: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub config: Configuration,
    /// Sorted by subject id, then repetition.
    pub cells: Vec<Cell>,
    pub mean_coverage: f64,
    pub mean_auc: f64,
    pub evaluations: u64,
}

impl EvaluationRecord {
    /// Aggregates `cells`: means over repetitions per subject, then over subjects.
    pub fn from_cells(config: Configuration, mut cells: Vec<Cell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptySample("evaluation has no runs".into()));
        }
        cells.sort_by(|a, b| a.subject.cmp(&b.subject).then(a.repetition.cmp(&b.repetition)));
        let mut coverage = Vec::new();
        let mut area = Vec::new();
        for group in cells.chunk_by(|a, b| a.subject == b.subject) {
            let n = group.len() as f64;
            coverage.push(group.iter().map(|c| c.coverage).sum::<f64>() / n);
            area.push(group.iter().map(|c| c.auc).sum::<f64>() / n);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        Ok(EvaluationRecord {
            config,
            mean_coverage: mean(&coverage),
            mean_auc: mean(&area),
            evaluations: cells.iter().map(|c| c.evaluations).sum(),
            cells,
        })
    }
}

/// Something that scores configurations of one space. The tuners only see
/// this trait, so tests can substitute a cheap analytic objective.
pub trait Evaluator: Sync {
    fn space(&self) -> &ParamSpace;

    fn evaluate(&self, config: &Configuration) -> Result<EvaluationRecord>;

    /// Algorithm runs performed so far.
    fn runs(&self) -> u64;

    /// The configuration DE seeds its population with when asked to.
    fn default_config(&self) -> Result<Configuration>;
}

/// Runs an algorithm on training subjects; each configuration is evaluated
/// over every (subject, repetition) pair.
pub struct TuningTask {
    pub algorithm: Algorithm,
    pub subjects: Vec<Subject>,
    pub repetitions: u64,
    pub budget: Budget,
    pub checkpoints: usize,
    pub master_seed: u64,
    space: ParamSpace,
    runs: AtomicU64,
}

impl TuningTask {
    pub fn new(
        algorithm: Algorithm,
        subjects: Vec<Subject>,
        repetitions: u64,
        budget: Budget,
        checkpoints: usize,
        master_seed: u64,
    ) -> Result<Self> {
        if subjects.is_empty() {
            return Err(Error::InvalidParams("tuning needs at least one subject".into()));
        }
        if repetitions == 0 {
            return Err(Error::InvalidParams("repetitions must be at least 1".into()));
        }
        Ok(TuningTask {
            algorithm,
            subjects,
            repetitions,
            budget,
            checkpoints,
            master_seed,
            space: space_by_id(algorithm.space_id())?,
            runs: AtomicU64::new(0),
        })
    }
}

impl Evaluator for TuningTask {
    fn space(&self) -> &ParamSpace {
        &self.space
    }

    fn evaluate(&self, config: &Configuration) -> Result<EvaluationRecord> {
        let record = evaluate_config(
            self.algorithm,
            &self.subjects,
            self.repetitions,
            self.budget,
            self.checkpoints,
            config,
            self.master_seed,
        )?;
        self.runs.fetch_add(record.cells.len() as u64, Ordering::Relaxed);
        Ok(record)
    }

    fn runs(&self) -> u64 {
        self.runs.load(Ordering::Relaxed)
    }

    fn default_config(&self) -> Result<Configuration> {
        crate::param_space::preset(self.algorithm.default_preset())
    }
}

/// Runs `config` once per (subject, repetition). The seed of each run is
/// `derive_seed(master_seed, config digest, subject digest, repetition)`, so
/// cells can execute in parallel and in any order.
pub fn evaluate_config(
    algorithm: Algorithm,
    subjects: &[Subject],
    repetitions: u64,
    budget: Budget,
    checkpoints: usize,
    config: &Configuration,
    master_seed: u64,
) -> Result<EvaluationRecord> {
    let config = space_by_id(algorithm.space_id())?.normalize(config)?;
    let runner = AlgorithmConfig::new(algorithm, &config)?;
    let digest = config.digest();
    let cells = subjects
        .par_iter()
        .flat_map_iter(|s| (0..repetitions).map(move |r| (s, r)))
        .map(|(subject, repetition)| {
            let seed = derive_seed(master_seed, digest, subject.digest(), repetition);
            let result = runner.run(subject, budget, checkpoints, seed)?;
            Ok(Cell {
                subject: subject.id.clone(),
                repetition,
                seed,
                coverage: result.coverage(),
                auc: auc(&result.trace),
                evaluations: result.evaluations,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    EvaluationRecord::from_cells(config, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param_space::preset;
    use crate::subject::GeneratorParams;

    fn subjects(n: u64) -> Vec<Subject> {
        (0..n)
            .map(|i| Subject::generate(&format!("s{i:02}"), i, GeneratorParams::default()).unwrap())
            .collect()
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&CoverageTrace::new(vec![(0.5, 0.4), (1.0, 0.8)])), 0.4);
        assert_eq!(auc(&CoverageTrace::new(vec![(0.5, 0.6), (1.0, 0.6)])), 0.75 * 0.6);
        // extension to fraction 1 keeps the last value
        assert_eq!(auc(&CoverageTrace::new(vec![(0.5, 1.0)])), 0.75);
        assert_eq!(auc(&CoverageTrace::new(vec![])), 0.0);
    }

    #[test]
    fn dense_constant_trace_approaches_value() {
        let points = (1..=1000).map(|i| (i as f64 / 1000.0, 0.7)).collect();
        assert!((auc(&CoverageTrace::new(points)) - 0.7).abs() < 1e-3);
    }

    #[test]
    fn objective_examples() {
        let record = |cov: f64, area: f64| EvaluationRecord {
            config: preset("mio-default").unwrap(),
            cells: vec![],
            mean_coverage: cov,
            mean_auc: area,
            evaluations: 0,
        };
        assert_eq!(Objective::COVERAGE.score(&record(0.85, 0.1)), 0.85);
        assert!((Objective::new(10.0, 1.0).unwrap().score(&record(0.8, 0.6)) - 8.6).abs() < 1e-12);
        assert!(Objective::new(0.0, 0.0).is_err());
        assert!(Objective::new(-1.0, 2.0).is_err());
        assert_eq!(Objective::CANONICAL[3].to_string(), "10+1");
    }

    #[test]
    fn aggregation_is_mean_of_subject_means() {
        let cell = |s: &str, r: u64, c: f64| Cell {
            subject: s.into(),
            repetition: r,
            seed: 0,
            coverage: c,
            auc: c / 2.0,
            evaluations: 10,
        };
        let cells = vec![cell("b", 0, 1.0), cell("a", 1, 0.5), cell("a", 0, 0.0)];
        let r = EvaluationRecord::from_cells(preset("mio-default").unwrap(), cells).unwrap();
        // subject a: 0.25, subject b: 1.0
        assert_eq!(r.mean_coverage, 0.625);
        assert_eq!(r.evaluations, 30);
        assert_eq!(r.cells[0].subject, "a");
        assert_eq!(r.cells[0].repetition, 0);
    }

    #[test]
    fn single_cell_and_determinism() {
        let s = subjects(1);
        let c = preset("dynamosa-default").unwrap();
        let eval = || evaluate_config(Algorithm::Dynamosa, &s, 1, Budget::Evaluations(300), 8, &c, 3).unwrap();
        let a = eval();
        assert_eq!(a.cells.len(), 1);
        assert_eq!(a, eval());
    }

    #[test]
    fn subject_order_does_not_matter() {
        let s = subjects(3);
        let mut reversed = s.clone();
        reversed.reverse();
        let c = preset("mio-default").unwrap();
        let a = evaluate_config(Algorithm::Mio, &s, 2, Budget::Evaluations(200), 8, &c, 1).unwrap();
        let b = evaluate_config(Algorithm::Mio, &reversed, 2, Budget::Evaluations(200), 8, &c, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wrong_space_fails_before_running() {
        let task = TuningTask::new(Algorithm::Mio, subjects(2), 2, Budget::Evaluations(100), 4, 0).unwrap();
        assert!(task.evaluate(&preset("dynamosa-default").unwrap()).is_err());
        assert_eq!(task.runs(), 0);
        task.evaluate(&preset("mio-default").unwrap()).unwrap();
        assert_eq!(task.runs(), 4);
    }
}
