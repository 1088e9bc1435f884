//! DynaMOSA: many-objective search with dynamic target activation.
//!
//! Every branch is an objective, but only goals whose enclosing branch is
//! already covered are optimised. Survivors are chosen by preference
//! sorting (the best test per uncovered target goes first), then by Pareto
//! fronts and crowding distance over the uncovered active targets.

mod sorting;

use rand::Rng;

pub use sorting::{crowding_distance, dominates, nondominated_sort};

use crate::error::{Error, Result};
use crate::operators::{apply_mutations, crossover, random_testcase, rank_select, tournament_select, Archive};
use crate::param_space::{dynamosa_space, names, Configuration};
use crate::run::{Algorithm, Budget, Clock, Observer, RunResult, SearchEvent};
use crate::subject::{Goal, Subject, TestCase};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    Rank { bias: f64 },
    Tournament { size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynaMosaConfig {
    pub chromosome_length: usize,
    pub crossover_rate: f64,
    pub mutations: usize,
    pub population_size: usize,
    pub selection: Selection,
}

impl TryFrom<&Configuration> for DynaMosaConfig {
    type Error = Error;

    fn try_from(config: &Configuration) -> Result<Self> {
        let c = dynamosa_space().normalize(config)?;
        let selection = match c.tag(names::SELECTION)? {
            names::RANK => Selection::Rank {
                bias: c.real(names::RANK_BIAS)?,
            },
            _ => Selection::Tournament {
                size: c.int(names::TOURNAMENT_SIZE)? as usize,
            },
        };
        Ok(DynaMosaConfig {
            chromosome_length: c.int(names::CHROMOSOME_LENGTH)? as usize,
            crossover_rate: c.real(names::CROSSOVER_RATE)?,
            mutations: c.int(names::MUTATIONS)? as usize,
            population_size: c.int(names::POPULATION_SIZE)? as usize,
            selection,
        })
    }
}

struct Individual {
    test: TestCase,
    /// Fitness per goal index; zero means covered.
    fitness: Vec<f64>,
}

impl AsRef<[f64]> for Individual {
    fn as_ref(&self) -> &[f64] {
        &self.fitness
    }
}

struct Search<'a, O> {
    subject: &'a Subject,
    clock: Clock,
    archive: Archive,
    active: Vec<bool>,
    observer: &'a mut O,
}

impl<O: Observer> Search<'_, O> {
    fn evaluate(&mut self, test: TestCase) -> Individual {
        let trace = self.subject.execute(&test);
        let fitness: Vec<f64> = self.subject.goals().map(|g| self.subject.fitness(&trace, g)).collect();
        let covered = self.subject.covered_goals(&trace);
        let fresh = self.archive.record(&covered, &test);
        self.clock.tick(self.archive.coverage());
        let evaluation = self.clock.used();
        for goal in fresh {
            self.observer.on_event(SearchEvent::GoalCovered { goal, evaluation });
            for child in self.subject.children(goal) {
                self.activate(child);
            }
        }
        Individual { test, fitness }
    }

    fn activate(&mut self, goal: Goal) {
        if !self.active[goal.index()] {
            self.active[goal.index()] = true;
            let evaluation = self.clock.used();
            self.observer.on_event(SearchEvent::GoalActivated { goal, evaluation });
        }
    }

    fn targets(&self) -> Vec<usize> {
        (0..self.active.len())
            .filter(|&i| self.active[i] && !self.archive.is_covered(Goal::from_index(i)))
            .collect()
    }

    fn done(&self) -> bool {
        self.clock.exhausted() || self.archive.covered_count() == self.archive.goal_count()
    }
}

/// Keeps `keep` individuals of `pool`, ordered best first.
///
/// Front 0 holds, for each target, the individual with the lowest fitness
/// (ties: shorter test, then lower index). The rest are sorted into Pareto
/// fronts. Within every front, members are ordered by descending crowding
/// distance, which also decides the cut in the last admitted front.
fn survivors(pool: Vec<Individual>, targets: &[usize], keep: usize) -> Vec<Individual> {
    let n = pool.len();
    if n == 0 {
        return pool;
    }
    let mut preferred = vec![false; n];
    for &t in targets {
        let best = (0..n)
            .min_by(|&a, &b| {
                pool[a].fitness[t]
                    .total_cmp(&pool[b].fitness[t])
                    .then(pool[a].test.len().cmp(&pool[b].test.len()))
                    .then(a.cmp(&b))
            })
            .expect("pool is non-empty");
        preferred[best] = true;
    }
    let mut fronts: Vec<Vec<usize>> = Vec::new();
    let first: Vec<usize> = (0..n).filter(|&i| preferred[i]).collect();
    if !first.is_empty() {
        fronts.push(first);
    }
    let rest: Vec<usize> = (0..n).filter(|&i| !preferred[i]).collect();
    let rest_vectors: Vec<&[f64]> = rest.iter().map(|&i| pool[i].fitness.as_slice()).collect();
    for front in nondominated_sort(&rest_vectors, targets) {
        fronts.push(front.into_iter().map(|k| rest[k]).collect());
    }

    let mut order = Vec::with_capacity(keep);
    for front in fronts {
        if order.len() == keep {
            break;
        }
        let distance = crowding_distance(&pool, &front, targets);
        let mut ranked: Vec<(usize, f64)> = front.into_iter().zip(distance).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let take = ranked.len().min(keep - order.len());
        order.extend(ranked[..take].iter().map(|r| r.0));
    }

    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    order
        .into_iter()
        .map(|i| slots[i].take().expect("selected once"))
        .collect()
}

fn select_parent(config: &DynaMosaConfig, n: usize, rng: &mut impl Rng) -> Result<usize> {
    match config.selection {
        Selection::Rank { bias } => rank_select(n, bias, rng),
        Selection::Tournament { size } => Ok(tournament_select(n, size, rng)),
    }
}

pub fn run_dynamosa(
    subject: &Subject,
    config: &DynaMosaConfig,
    budget: Budget,
    checkpoints: usize,
    rng: &mut impl Rng,
) -> Result<RunResult> {
    run_dynamosa_observed(subject, config, budget, checkpoints, rng, &mut ())
}

/// [`run_dynamosa`] reporting activations, coverage and generations to `observer`.
pub fn run_dynamosa_observed<O: Observer>(
    subject: &Subject,
    config: &DynaMosaConfig,
    budget: Budget,
    checkpoints: usize,
    rng: &mut impl Rng,
    observer: &mut O,
) -> Result<RunResult> {
    let n = config.population_size;
    if n < 2 || config.chromosome_length < 1 {
        return Err(Error::InvalidParams(format!(
            "invalid DynaMOSA configuration {config:?}"
        )));
    }
    if let Budget::Evaluations(b) = budget {
        if b < n as u64 {
            return Err(Error::BudgetTooSmall {
                budget: b,
                population: n,
            });
        }
    }
    let mut search = Search {
        subject,
        clock: Clock::new(budget, checkpoints)?,
        archive: Archive::for_subject(subject),
        active: vec![false; subject.goal_count()],
        observer,
    };
    for goal in subject.root_goals() {
        search.activate(goal);
    }

    let mut population = Vec::with_capacity(n);
    while population.len() < n && !search.clock.exhausted() {
        let test = random_testcase(subject, config.chromosome_length, rng);
        population.push(search.evaluate(test));
    }
    population = survivors(population, &search.targets(), n);

    while !search.done() {
        let mut offspring = Vec::with_capacity(n);
        while offspring.len() < n && !search.done() {
            let a = select_parent(config, population.len(), rng)?;
            let b = select_parent(config, population.len(), rng)?;
            let (c1, c2) = if rng.gen::<f64>() < config.crossover_rate {
                crossover(
                    &population[a].test,
                    &population[b].test,
                    config.chromosome_length,
                    subject,
                    rng,
                )
            } else {
                (population[a].test.clone(), population[b].test.clone())
            };
            for child in [c1, c2] {
                if offspring.len() == n || search.done() {
                    break;
                }
                let child = apply_mutations(&child, config.mutations, config.chromosome_length, subject, rng);
                offspring.push(search.evaluate(child));
            }
        }
        if offspring.len() < n {
            break;
        }
        population.extend(offspring);
        population = survivors(population, &search.targets(), n);
        search.observer.on_event(SearchEvent::Generation {
            evaluation: search.clock.used(),
            population: population.len(),
        });
    }

    let coverage = search.archive.coverage();
    let (trace, evaluations) = search.clock.finish(coverage);
    Ok(RunResult {
        algorithm: Algorithm::Dynamosa,
        archive: search.archive,
        trace,
        evaluations,
    })
}
