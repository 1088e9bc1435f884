use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Evaluator, Objective};
use crate::error::{Error, Result};
use crate::param_space::Configuration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Base vector and difference pair are three random non-target members.
    Rand1Bin,
    /// Base vector is the current best; the difference pair is random.
    Best1Bin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Fixed(f64),
    /// Drawn uniformly from `[lo, hi)` once per generation.
    Dither(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DESettings {
    pub pop_size: usize,
    pub strategy: Strategy,
    pub scale: Scale,
    pub cross_prob: f64,
    pub generations: usize,
    /// Replace one initial member by the algorithm's default configuration.
    pub include_default: bool,
}

impl Default for DESettings {
    fn default() -> Self {
        DESettings {
            pop_size: 8,
            strategy: Strategy::Best1Bin,
            scale: Scale::Dither(0.5, 1.0),
            cross_prob: 0.7,
            generations: 12,
            include_default: true,
        }
    }
}

impl DESettings {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidParams(m));
        if self.pop_size < 4 {
            return fail(format!("DE population must be at least 4, got {}", self.pop_size));
        }
        if !(0.0..=1.0).contains(&self.cross_prob) {
            return fail(format!("crossover probability {} outside [0, 1]", self.cross_prob));
        }
        match self.scale {
            Scale::Fixed(f) if !(f > 0.0 && f < 2.0) => fail(format!("scale factor {f} outside (0, 2)")),
            Scale::Dither(lo, hi) if !(lo > 0.0 && lo < hi && hi <= 2.0) => {
                fail(format!("dither interval [{lo}, {hi}) must lie in (0, 2]"))
            }
            _ => Ok(()),
        }
    }
}

/// `x_t + scale * (x_r - x_s)`, componentwise.
pub fn de_offspring(x_r: &[f64], x_s: &[f64], x_t: &[f64], scale: f64) -> Result<Vec<f64>> {
    if x_r.len() != x_t.len() || x_s.len() != x_t.len() {
        return Err(Error::DimensionMismatch {
            space: "de".into(),
            expected: x_t.len(),
            actual: if x_r.len() != x_t.len() { x_r.len() } else { x_s.len() },
        });
    }
    Ok(x_t
        .iter()
        .zip(x_r.iter().zip(x_s))
        .map(|(t, (r, s))| t + scale * (r - s))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub generation: usize,
    pub scale: Option<f64>,
    /// Best score in the population after replacement.
    pub best_score: f64,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub objective: Objective,
    pub settings: DESettings,
    pub best_config: Configuration,
    pub best_score: f64,
    pub best_coverage: f64,
    pub best_auc: f64,
    /// Generation 0 is the initial population.
    pub history: Vec<GenerationLog>,
    pub runs: u64,
}

struct Member {
    vector: Vec<f64>,
    config: Configuration,
    score: f64,
    coverage: f64,
    auc: f64,
}

fn best_index(members: &[Member]) -> usize {
    // first maximum keeps the choice stable
    (0..members.len()).fold(0, |b, i| if members[i].score > members[b].score { i } else { b })
}

/// Maximises `objective` over the evaluator's space.
///
/// Synchronous DE: all trials of a generation are built from the same
/// population, evaluated (possibly in parallel) and then replace their
/// targets where they score at least as well. All random draws happen on the
/// calling thread, so the result does not depend on the thread count.
pub fn de_tune<E: Evaluator>(
    evaluator: &E,
    objective: Objective,
    settings: &DESettings,
    rng: &mut impl Rng,
) -> Result<TuningResult> {
    settings.validate()?;
    let space = evaluator.space();
    let bounds = space.bounds();
    let dim = bounds.len();
    let runs_before = evaluator.runs();

    let mut vectors: Vec<Vec<f64>> = (0..settings.pop_size)
        .map(|_| bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect())
        .collect();
    if settings.include_default {
        vectors[0] = space.encode(&evaluator.default_config()?)?;
    }
    let mut population = score_all(evaluator, objective, vectors)?;
    let mut history = vec![log(0, None, &population)];

    for generation in 1..=settings.generations {
        let scale = match settings.scale {
            Scale::Fixed(f) => f,
            Scale::Dither(lo, hi) => rng.gen_range(lo..hi),
        };
        let best = best_index(&population);
        let n = population.len();
        let mut trials = Vec::with_capacity(n);
        for i in 0..n {
            let (base, r, s) = match settings.strategy {
                Strategy::Rand1Bin => {
                    let picks = distinct_others(n, &[i], 3, rng);
                    (picks[0], picks[1], picks[2])
                }
                Strategy::Best1Bin => {
                    let picks = distinct_others(n, &[i, best], 2, rng);
                    (best, picks[0], picks[1])
                }
            };
            let mutant = de_offspring(
                &population[r].vector,
                &population[s].vector,
                &population[base].vector,
                scale,
            )?;
            let forced = rng.gen_range(0..dim);
            let target = &population[i].vector;
            let trial: Vec<f64> = (0..dim)
                .map(|k| {
                    let take = rng.gen::<f64>() < settings.cross_prob || k == forced;
                    let v = if take { mutant[k] } else { target[k] };
                    v.clamp(bounds[k].0, bounds[k].1)
                })
                .collect();
            trials.push(trial);
        }
        let scored = score_all(evaluator, objective, trials)?;
        for (slot, trial) in population.iter_mut().zip(scored) {
            if trial.score >= slot.score {
                *slot = trial;
            }
        }
        history.push(log(generation, Some(scale), &population));
    }

    let best = population.swap_remove(best_index(&population));
    Ok(TuningResult {
        objective,
        settings: *settings,
        best_config: best.config,
        best_score: best.score,
        best_coverage: best.coverage,
        best_auc: best.auc,
        history,
        runs: evaluator.runs() - runs_before,
    })
}

/// `count` distinct indices in `0..n`, none of them in `exclude`.
fn distinct_others(n: usize, exclude: &[usize], count: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut excluded: Vec<usize> = exclude.to_vec();
    excluded.sort_unstable();
    excluded.dedup();
    let pool = n - excluded.len();
    sample(rng, pool, count)
        .into_iter()
        .map(|mut k| {
            // map the k-th allowed index back into 0..n
            for &e in &excluded {
                if k >= e {
                    k += 1;
                }
            }
            k
        })
        .collect()
}

fn score_all<E: Evaluator>(evaluator: &E, objective: Objective, vectors: Vec<Vec<f64>>) -> Result<Vec<Member>> {
    let space = evaluator.space();
    vectors
        .into_par_iter()
        .map(|vector| {
            let config = space.decode(&vector)?.config;
            let record = evaluator.evaluate(&config)?;
            Ok(Member {
                score: objective.score(&record),
                coverage: record.mean_coverage,
                auc: record.mean_auc,
                config: record.config,
                vector,
            })
        })
        .collect()
}

fn log(generation: usize, scale: Option<f64>, population: &[Member]) -> GenerationLog {
    GenerationLog {
        generation,
        scale,
        best_score: population[best_index(population)].score,
        scores: population.iter().map(|m| m.score).collect(),
    }
}
