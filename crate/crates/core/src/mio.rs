//! MIO: per-goal test pools, feedback-directed goal sampling and a hard
//! switch from exploration to exploitation at a fixed budget fraction.

use rand::Rng;

use crate::error::{Error, Result};
use crate::operators::{apply_mutations, random_testcase, Archive};
use crate::param_space::{mio_space, names, Configuration};
use crate::run::{Algorithm, Budget, Clock, Observer, Phase, RunResult, SampleSource, SearchEvent};
use crate::subject::{Goal, Subject, TestCase};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExploreParams {
    pub tests_per_target: usize,
    pub random_probability: f64,
    pub mutations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MioConfig {
    pub chromosome_length: usize,
    /// Budget fraction at which exploitation starts.
    pub phase_switch: f64,
    pub explore: ExploreParams,
    /// Exploitation keeps one test per target and never samples at random.
    pub exploit_mutations: usize,
}

impl TryFrom<&Configuration> for MioConfig {
    type Error = Error;

    fn try_from(config: &Configuration) -> Result<Self> {
        let c = mio_space().normalize(config)?;
        Ok(MioConfig {
            chromosome_length: c.int(names::CHROMOSOME_LENGTH)? as usize,
            phase_switch: c.real(names::PHASE_SWITCH)?,
            explore: ExploreParams {
                tests_per_target: c.int(names::EXPLORE_TESTS_PER_TARGET)? as usize,
                random_probability: c.real(names::EXPLORE_RANDOM_PROBABILITY)?,
                mutations: c.int(names::EXPLORE_MUTATIONS)? as usize,
            },
            exploit_mutations: c.int(names::EXPLOIT_MUTATIONS)? as usize,
        })
    }
}

/// Parameters in force after consuming `fraction` of the budget.
pub fn phase_params(config: &MioConfig, fraction: f64) -> ExploreParams {
    if fraction < config.phase_switch {
        config.explore
    } else {
        ExploreParams {
            tests_per_target: 1,
            random_probability: 0.0,
            mutations: config.exploit_mutations,
        }
    }
}

/// Tests kept for one uncovered goal, best heuristic value first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GoalPool {
    entries: Vec<(TestCase, f64)>,
    samples: u64,
}

impl GoalPool {
    pub fn entries(&self) -> &[(TestCase, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Samples since the pool last improved.
    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// Offers `test` with heuristic value `h`; returns whether the pool changed.
    ///
    /// Entries keep strictly decreasing `h`. An equal `h` replaces the
    /// existing entry only with a strictly shorter test; otherwise the test
    /// enters when the pool has room or beats the worst entry.
    pub fn offer(&mut self, test: &TestCase, h: f64, cap: usize) -> bool {
        if let Some(same) = self.entries.iter_mut().find(|(_, v)| *v == h) {
            if test.len() < same.0.len() {
                same.0 = test.clone();
                return true;
            }
            return false;
        }
        if self.entries.len() >= cap && self.entries.last().is_some_and(|(_, worst)| h <= *worst) {
            return false;
        }
        let at = self.entries.partition_point(|(_, v)| *v > h);
        self.entries.insert(at, (test.clone(), h));
        self.entries.truncate(cap);
        true
    }

    fn shrink(&mut self, cap: usize) {
        self.entries.truncate(cap);
    }
}

pub fn run_mio(
    subject: &Subject,
    config: &MioConfig,
    budget: Budget,
    checkpoints: usize,
    rng: &mut impl Rng,
) -> Result<RunResult> {
    run_mio_observed(subject, config, budget, checkpoints, rng, &mut ())
}

/// [`run_mio`] reporting sampling decisions, phase switch and pool sizes to `observer`.
pub fn run_mio_observed<O: Observer>(
    subject: &Subject,
    config: &MioConfig,
    budget: Budget,
    checkpoints: usize,
    rng: &mut impl Rng,
    observer: &mut O,
) -> Result<RunResult> {
    if config.chromosome_length < 1 || config.explore.tests_per_target < 1 {
        return Err(Error::InvalidParams(format!("invalid MIO configuration {config:?}")));
    }
    let mut clock = Clock::new(budget, checkpoints)?;
    let mut archive = Archive::for_subject(subject);
    // None once the goal is covered
    let mut pools: Vec<Option<GoalPool>> = vec![Some(GoalPool::default()); subject.goal_count()];
    let mut exploiting = false;
    let mut candidates: Vec<usize> = Vec::new();

    while !clock.exhausted() && archive.covered_count() < archive.goal_count() {
        let fraction = clock.fraction();
        let params = phase_params(config, fraction);
        if !exploiting && fraction >= config.phase_switch {
            exploiting = true;
            for pool in pools.iter_mut().flatten() {
                pool.shrink(1);
            }
            observer.on_event(SearchEvent::PhaseSwitch {
                evaluation: clock.used(),
            });
        }
        let phase = if exploiting {
            Phase::Exploitation
        } else {
            Phase::Exploration
        };

        // goals with the fewest samples since their last improvement
        candidates.clear();
        let mut fewest = u64::MAX;
        for (i, pool) in pools.iter().enumerate() {
            if let Some(pool) = pool.as_ref().filter(|p| !p.is_empty()) {
                if pool.samples < fewest {
                    fewest = pool.samples;
                    candidates.clear();
                }
                if pool.samples == fewest {
                    candidates.push(i);
                }
            }
        }
        let (test, source) = if candidates.is_empty() {
            (
                random_testcase(subject, config.chromosome_length, rng),
                SampleSource::Bootstrap,
            )
        } else if rng.gen::<f64>() < params.random_probability {
            (
                random_testcase(subject, config.chromosome_length, rng),
                SampleSource::Random,
            )
        } else {
            let goal = candidates[rng.gen_range(0..candidates.len())];
            let pool = pools[goal].as_ref().expect("candidate is uncovered");
            let parent = &pool.entries[rng.gen_range(0..pool.len())].0;
            let child = apply_mutations(parent, params.mutations, config.chromosome_length, subject, rng);
            (child, SampleSource::Pool(Goal::from_index(goal)))
        };
        observer.on_event(SearchEvent::Sampled {
            evaluation: clock.used(),
            phase,
            source,
        });

        let trace = subject.execute(&test);
        let mut improved = false;
        let sampled = match source {
            SampleSource::Pool(g) => Some(g.index()),
            _ => None,
        };
        for (i, slot) in pools.iter_mut().enumerate() {
            let Some(pool) = slot else { continue };
            let fitness = subject.fitness(&trace, Goal::from_index(i));
            if fitness == 0.0 {
                *slot = None;
                improved |= sampled == Some(i);
            } else {
                let changed = pool.offer(&test, 1.0 / (1.0 + fitness), params.tests_per_target);
                improved |= changed && sampled == Some(i);
            }
        }
        let fresh = archive.record(&subject.covered_goals(&trace), &test);
        if let Some(k) = sampled {
            if let Some(pool) = pools[k].as_mut() {
                pool.samples = if improved { 0 } else { pool.samples + 1 };
            }
        }
        clock.tick(archive.coverage());
        let evaluation = clock.used();
        for goal in fresh {
            observer.on_event(SearchEvent::GoalCovered { goal, evaluation });
        }
        let largest = pools.iter().flatten().map(GoalPool::len).max().unwrap_or(0);
        observer.on_event(SearchEvent::Pools { evaluation, largest });
    }

    let coverage = archive.coverage();
    let (trace, evaluations) = clock.finish(coverage);
    Ok(RunResult {
        algorithm: Algorithm::Mio,
        archive,
        trace,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::RandomSource;
    use crate::param_space::preset;
    use crate::run::EventLog;
    use crate::subject::{GeneratorParams, Statement};

    fn default_config() -> MioConfig {
        MioConfig::try_from(&preset("mio-default").unwrap()).unwrap()
    }

    #[test]
    fn phase_params_switch_at_threshold() {
        let c = default_config();
        let explore = phase_params(&c, 0.49);
        assert_eq!(
            (explore.tests_per_target, explore.random_probability, explore.mutations),
            (10, 0.5, 1)
        );
        let exploit = phase_params(&c, 0.5);
        assert_eq!(
            (exploit.tests_per_target, exploit.random_probability, exploit.mutations),
            (1, 0.0, 10)
        );
        assert_eq!(phase_params(&c, 0.0), c.explore);
    }

    #[test]
    fn pool_keeps_strict_order() {
        let t = |n: usize| TestCase::new(vec![Statement::Const(0); n]);
        let mut pool = GoalPool::default();
        assert!(pool.offer(&t(3), 0.5, 2));
        assert!(pool.offer(&t(3), 0.7, 2));
        assert!(!pool.offer(&t(3), 0.4, 2));
        assert!(!pool.offer(&t(3), 0.5, 2));
        assert!(pool.offer(&t(1), 0.5, 2));
        assert!(pool.offer(&t(2), 0.6, 2));
        let hs: Vec<f64> = pool.entries().iter().map(|e| e.1).collect();
        assert_eq!(hs, vec![0.7, 0.6]);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let s = Subject::generate("s", 4, GeneratorParams::default()).unwrap();
        let run = || {
            run_mio(
                &s,
                &default_config(),
                Budget::Evaluations(800),
                16,
                &mut RandomSource::new(6),
            )
            .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a, b);
        assert!(a.trace.is_monotone());
    }

    #[test]
    fn pure_exploitation_from_the_start() {
        let s = Subject::generate("s", 4, GeneratorParams::default()).unwrap();
        let config = MioConfig::try_from(&preset("mio-gs-114").unwrap()).unwrap();
        let mut log = EventLog::default();
        run_mio_observed(
            &s,
            &config,
            Budget::Evaluations(500),
            8,
            &mut RandomSource::new(1),
            &mut log,
        )
        .unwrap();
        assert!(matches!(log.events[0], SearchEvent::PhaseSwitch { evaluation: 0 }));
        for e in &log.events {
            match e {
                SearchEvent::Sampled { source, evaluation, .. } => {
                    assert_ne!(*source, SampleSource::Random);
                    if *source == SampleSource::Bootstrap {
                        assert_eq!(*evaluation, 0);
                    }
                }
                SearchEvent::Pools { largest, .. } => assert!(*largest <= 1),
                _ => {}
            }
        }
    }

    #[test]
    fn full_switch_never_fires() {
        let s = Subject::generate("s", 4, GeneratorParams::default()).unwrap();
        let mut config = default_config();
        config.phase_switch = 1.0;
        let mut log = EventLog::default();
        run_mio_observed(
            &s,
            &config,
            Budget::Evaluations(300),
            8,
            &mut RandomSource::new(1),
            &mut log,
        )
        .unwrap();
        assert!(!log.events.iter().any(|e| matches!(e, SearchEvent::PhaseSwitch { .. })));
    }
}
