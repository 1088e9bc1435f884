// Compare two MIO presets on a handful of subjects: effect size, U test and
// relative coverage.

use sbst_tune::param_space::preset;
use sbst_tune::run::{Algorithm, Budget};
use sbst_tune::stats::{a12, mann_whitney_u, relative_coverage, ComparisonReport};
use sbst_tune::subject::{GeneratorParams, Subject};
use sbst_tune::tuner::evaluate_config;

pub fn run_example() -> sbst_tune::Result<ComparisonReport> {
    let subjects = (0..4)
        .map(|i| Subject::generate(&format!("s{i}"), 50 + i, GeneratorParams::default()))
        .collect::<Result<Vec<_>, _>>()?;
    let evaluate = |name: &str| {
        evaluate_config(
            Algorithm::Mio,
            &subjects,
            5,
            Budget::Evaluations(600),
            16,
            &preset(name)?,
            1,
        )
    };
    let default = evaluate("mio-default")?;
    let tuned = evaluate("mio-gs-114")?;

    let coverage = |r: &sbst_tune::tuner::EvaluationRecord| r.cells.iter().map(|c| c.coverage).collect::<Vec<_>>();
    let report = mann_whitney_u(&coverage(&tuned), &coverage(&default), 0.05)?;
    println!(
        "mean coverage: mio-gs-114 {:.3}, mio-default {:.3}",
        report.mean_a, report.mean_b
    );
    println!(
        "A12 {:.3}  U {}  p {:.4}  significant {}",
        report.a12, report.u_statistic, report.p_value, report.significant
    );
    assert_eq!(report.a12, a12(&coverage(&tuned), &coverage(&default))?);

    // per-subject means, rows are configurations
    let per_subject = |r: &sbst_tune::tuner::EvaluationRecord| {
        subjects
            .iter()
            .map(|s| {
                let cells: Vec<f64> = r
                    .cells
                    .iter()
                    .filter(|c| c.subject == s.id)
                    .map(|c| c.coverage)
                    .collect();
                cells.iter().sum::<f64>() / cells.len() as f64
            })
            .collect::<Vec<f64>>()
    };
    let relative = relative_coverage(&[per_subject(&tuned), per_subject(&default)])?;
    println!(
        "relative coverage: mio-gs-114 {:.3}, mio-default {:.3}",
        relative[0], relative[1]
    );
    Ok(report)
}

fn main() -> sbst_tune::Result<()> {
    run_example().map(|_| ())
}
