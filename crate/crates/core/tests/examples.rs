//! Every example runs to completion.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(generate_suite, "generate_suite.rs");
example!(dynamosa_run, "dynamosa_run.rs");
example!(mio_phases, "mio_phases.rs");
example!(grid_search, "grid_search.rs");
example!(de_tuning, "de_tuning.rs");
example!(compare_configs, "compare_configs.rs");
example!(experiment_pipeline, "experiment_pipeline.rs");

#[test]
fn generate_suite_runs() {
    let suite = generate_suite::run_example().unwrap();
    assert_eq!(suite.subjects.len(), 10);
}

#[test]
fn dynamosa_run_runs() {
    let result = dynamosa_run::run_example().unwrap();
    assert_eq!(result.evaluations, 1000);
    assert!(result.trace.is_monotone());
}

#[test]
fn mio_phases_runs() {
    use sbst_tune::run::SearchEvent;
    let log = mio_phases::run_example().unwrap();
    let switches = log
        .events
        .iter()
        .filter(|e| matches!(e, SearchEvent::PhaseSwitch { .. }))
        .count();
    assert_eq!(switches, 1);
}

#[test]
fn grid_search_runs() {
    assert_eq!(grid_search::run_example().unwrap().len(), 5);
}

#[test]
fn de_tuning_runs() {
    let result = de_tuning::run_example().unwrap();
    assert_eq!(result.history.len(), 5);
    assert!(result.history.windows(2).all(|w| w[0].best_score <= w[1].best_score));
}

#[test]
fn compare_configs_runs() {
    let report = compare_configs::run_example().unwrap();
    assert!((0.0..=1.0).contains(&report.a12));
}

#[test]
fn experiment_pipeline_runs() {
    let dir = tempfile::tempdir().unwrap();
    let table = experiment_pipeline::run_example_in(dir.path()).unwrap();
    assert_eq!(table.lines().count(), 4);
}
