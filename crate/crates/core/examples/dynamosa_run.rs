// One DynaMOSA run: goal activation as the archive fills, then the coverage
// curve and its area.

use sbst_tune::dynamosa::{run_dynamosa_observed, DynaMosaConfig};
use sbst_tune::operators::RandomSource;
use sbst_tune::param_space::preset;
use sbst_tune::run::{Budget, EventLog, RunResult, SearchEvent};
use sbst_tune::subject::{GeneratorParams, Subject};
use sbst_tune::tuner::auc;

pub fn run_example() -> sbst_tune::Result<RunResult> {
    let subject = Subject::generate("demo", 3, GeneratorParams::default())?;
    let config = DynaMosaConfig::try_from(&preset("dynamosa-default")?)?;
    let mut log = EventLog::default();
    let result = run_dynamosa_observed(
        &subject,
        &config,
        Budget::Evaluations(1000),
        10,
        &mut RandomSource::new(1),
        &mut log,
    )?;

    for event in &log.events {
        match event {
            SearchEvent::GoalCovered { goal, evaluation } => println!("{evaluation:>5}  covered   {goal:?}"),
            SearchEvent::GoalActivated { goal, evaluation } => println!("{evaluation:>5}  activated {goal:?}"),
            _ => {}
        }
    }
    println!("\nfraction  coverage");
    for (f, c) in &result.trace.points {
        println!("{f:>8.2}  {c:.3}");
    }
    println!(
        "final {:.3}, auc {:.3}, {} evaluations",
        result.coverage(),
        auc(&result.trace),
        result.evaluations
    );
    Ok(result)
}

fn main() -> sbst_tune::Result<()> {
    run_example().map(|_| ())
}
