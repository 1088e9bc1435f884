//! Budgets, coverage traces and the result of one algorithm run.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dynamosa::{run_dynamosa, DynaMosaConfig};
use crate::error::{Error, Result};
use crate::mio::{run_mio, MioConfig};
use crate::operators::{Archive, RandomSource};
use crate::param_space::Configuration;
use crate::subject::{Goal, Subject};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dynamosa,
    Mio,
}

impl Algorithm {
    pub fn space_id(self) -> &'static str {
        match self {
            Algorithm::Dynamosa => crate::param_space::DYNAMOSA_SPACE_ID,
            Algorithm::Mio => crate::param_space::MIO_SPACE_ID,
        }
    }

    pub fn default_preset(self) -> &'static str {
        match self {
            Algorithm::Dynamosa => "dynamosa-default",
            Algorithm::Mio => "mio-default",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Dynamosa => "dynamosa",
            Algorithm::Mio => "mio",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dynamosa" => Ok(Algorithm::Dynamosa),
            "mio" => Ok(Algorithm::Mio),
            other => Err(Error::InvalidParams(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Search budget: a fitness-evaluation count, or elapsed wall-clock time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Evaluations(u64),
    WallClock(Duration),
}

/// Tracks consumption and samples coverage at evenly spaced checkpoints.
pub(crate) struct Clock {
    budget: Budget,
    used: u64,
    start: Instant,
    checkpoints: usize,
    points: Vec<(f64, f64)>,
}

impl Clock {
    pub(crate) fn new(budget: Budget, checkpoints: usize) -> Result<Self> {
        if checkpoints < 2 {
            return Err(Error::InvalidParams("at least two checkpoints are required".into()));
        }
        match budget {
            Budget::Evaluations(0) => return Err(Error::InvalidParams("budget must be positive".into())),
            Budget::WallClock(d) if d.is_zero() => return Err(Error::InvalidParams("budget must be positive".into())),
            _ => {}
        }
        Ok(Clock {
            budget,
            used: 0,
            start: Instant::now(),
            checkpoints,
            points: Vec::with_capacity(checkpoints),
        })
    }

    pub(crate) fn used(&self) -> u64 {
        self.used
    }

    pub(crate) fn exhausted(&self) -> bool {
        match self.budget {
            Budget::Evaluations(n) => self.used >= n,
            Budget::WallClock(d) => self.start.elapsed() >= d,
        }
    }

    /// Consumed share of the budget in `[0, 1]`.
    pub(crate) fn fraction(&self) -> f64 {
        match self.budget {
            Budget::Evaluations(n) => self.used as f64 / n as f64,
            Budget::WallClock(d) => (self.start.elapsed().as_secs_f64() / d.as_secs_f64()).min(1.0),
        }
    }

    fn reached(&self, checkpoint: usize) -> bool {
        match self.budget {
            Budget::Evaluations(n) => self.used as u128 * self.checkpoints as u128 >= checkpoint as u128 * n as u128,
            Budget::WallClock(d) => {
                self.start.elapsed().as_secs_f64() * self.checkpoints as f64 >= checkpoint as f64 * d.as_secs_f64()
            }
        }
    }

    /// Counts one evaluation and records any checkpoint it completes.
    pub(crate) fn tick(&mut self, coverage: f64) {
        self.used += 1;
        while self.points.len() < self.checkpoints && self.reached(self.points.len() + 1) {
            self.push(coverage);
        }
    }

    fn push(&mut self, coverage: f64) {
        let i = self.points.len() + 1;
        self.points.push((i as f64 / self.checkpoints as f64, coverage));
    }

    /// Remaining checkpoints keep the final coverage.
    pub(crate) fn finish(mut self, coverage: f64) -> (CoverageTrace, u64) {
        while self.points.len() < self.checkpoints {
            self.push(coverage);
        }
        (CoverageTrace { points: self.points }, self.used)
    }
}

/// Archive coverage sampled at budget fractions; serialises as `[[fraction, coverage], ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoverageTrace {
    pub points: Vec<(f64, f64)>,
}

impl CoverageTrace {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        CoverageTrace { points }
    }

    pub fn final_coverage(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }

    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub archive: Archive,
    pub trace: CoverageTrace,
    pub evaluations: u64,
}

impl RunResult {
    pub fn coverage(&self) -> f64 {
        self.archive.coverage()
    }

    pub fn covered_ids(&self) -> Vec<usize> {
        self.archive.covered_goals().map(Goal::index).collect()
    }

    pub fn report<'a>(&'a self, config: &'a Configuration) -> RunReport<'a> {
        RunReport {
            algorithm: self.algorithm,
            config,
            evaluations: self.evaluations,
            trace: &self.trace,
            covered: self.covered_ids(),
        }
    }
}

/// Algorithm settings checked against their space, ready to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmConfig {
    Dynamosa(DynaMosaConfig),
    Mio(MioConfig),
}

impl AlgorithmConfig {
    pub fn new(algorithm: Algorithm, config: &Configuration) -> Result<Self> {
        if config.space != algorithm.space_id() {
            return Err(Error::SpaceMismatch {
                expected: algorithm.space_id().to_string(),
                found: config.space.clone(),
            });
        }
        Ok(match algorithm {
            Algorithm::Dynamosa => AlgorithmConfig::Dynamosa(DynaMosaConfig::try_from(config)?),
            Algorithm::Mio => AlgorithmConfig::Mio(MioConfig::try_from(config)?),
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            AlgorithmConfig::Dynamosa(_) => Algorithm::Dynamosa,
            AlgorithmConfig::Mio(_) => Algorithm::Mio,
        }
    }

    /// One run on a fresh random source seeded with `seed`.
    pub fn run(&self, subject: &Subject, budget: Budget, checkpoints: usize, seed: u64) -> Result<RunResult> {
        let mut rng = RandomSource::new(seed);
        match self {
            AlgorithmConfig::Dynamosa(c) => run_dynamosa(subject, c, budget, checkpoints, &mut rng),
            AlgorithmConfig::Mio(c) => run_mio(subject, c, budget, checkpoints, &mut rng),
        }
    }
}

/// JSON form of a run.
#[derive(Debug, Serialize)]
pub struct RunReport<'a> {
    pub algorithm: Algorithm,
    pub config: &'a Configuration,
    pub evaluations: u64,
    pub trace: &'a CoverageTrace,
    pub covered: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    Exploration,
    Exploitation,
}

/// Where MIO took the candidate for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SampleSource {
    /// Forced fresh test when no pool holds any entry yet.
    Bootstrap,
    Random,
    Pool(Goal),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SearchEvent {
    GoalActivated {
        goal: Goal,
        evaluation: u64,
    },
    GoalCovered {
        goal: Goal,
        evaluation: u64,
    },
    Sampled {
        evaluation: u64,
        phase: Phase,
        source: SampleSource,
    },
    PhaseSwitch {
        evaluation: u64,
    },
    /// Largest pool size after an evaluation.
    Pools {
        evaluation: u64,
        largest: usize,
    },
    Generation {
        evaluation: u64,
        population: usize,
    },
}

/// Receives search events; the unit observer ignores them.
pub trait Observer {
    fn on_event(&mut self, event: SearchEvent);
}

impl Observer for () {
    #[inline]
    fn on_event(&mut self, _event: SearchEvent) {}
}

#[derive(Debug, Default, Clone)]
pub struct EventLog {
    pub events: Vec<SearchEvent>,
}

impl Observer for EventLog {
    fn on_event(&mut self, event: SearchEvent) {
        self.events.push(event);
    }
}
