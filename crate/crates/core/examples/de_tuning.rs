// Differential evolution over the DynaMOSA space on a few training
// subjects, seeded with the default configuration.

use sbst_tune::operators::RandomSource;
use sbst_tune::run::{Algorithm, Budget};
use sbst_tune::subject::{GeneratorParams, Subject};
use sbst_tune::tuner::{de_tune, DESettings, Evaluator, Objective, TuningResult, TuningTask};

pub fn run_example() -> sbst_tune::Result<TuningResult> {
    let subjects = (0..3)
        .map(|i| Subject::generate(&format!("s{i}"), 100 + i, GeneratorParams::default()))
        .collect::<Result<Vec<_>, _>>()?;
    let task = TuningTask::new(Algorithm::Dynamosa, subjects, 2, Budget::Evaluations(400), 16, 3)?;
    let settings = DESettings {
        pop_size: 6,
        generations: 4,
        ..DESettings::default()
    };
    let objective = Objective::new(1.0, 1.0)?;
    let result = de_tune(&task, objective, &settings, &mut RandomSource::new(8))?;

    for g in &result.history {
        let scale = g.scale.map_or("-".to_string(), |f| format!("{f:.2}"));
        println!(
            "generation {:>2}  F {scale:>4}  best so far {:.4}",
            g.generation, g.best_score
        );
    }
    println!(
        "\nbest {objective}: {:.4}  {}",
        result.best_score,
        result.best_config.summary()
    );
    println!("{} algorithm runs", task.runs());
    Ok(result)
}

fn main() -> sbst_tune::Result<()> {
    run_example().map(|_| ())
}
