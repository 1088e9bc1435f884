// Grid search over an evenly spaced slice of the MIO grid, ranked under
// each of the five objective weightings.

use sbst_tune::param_space::mio_space;
use sbst_tune::run::{Algorithm, Budget};
use sbst_tune::subject::{GeneratorParams, Subject};
use sbst_tune::tuner::{grid_subset, grid_tune, select_best, write_grid_csv, Evaluator, Objective, TuningTask};

pub fn run_example() -> sbst_tune::Result<Vec<(Objective, usize)>> {
    let grid = mio_space().grid();
    println!("full grid: {} configurations", grid.len());
    let points = grid_subset(grid, 12);

    let subjects = (0..3)
        .map(|i| Subject::generate(&format!("s{i}"), i, GeneratorParams::default()))
        .collect::<Result<Vec<_>, _>>()?;
    let task = TuningTask::new(Algorithm::Mio, subjects, 2, Budget::Evaluations(300), 16, 9)?;
    let records = grid_tune(&task, &points)?;
    println!("{} runs for {} configurations", task.runs(), records.len());

    let mut winners = Vec::new();
    for objective in Objective::CANONICAL {
        let (id, config, score) = select_best(&records, &objective)?;
        println!("{objective:>5}: grid #{id} scores {score:.3}  {}", config.summary());
        winners.push((objective, id));
    }

    let mut csv = Vec::new();
    write_grid_csv(&mut csv, task.space(), &records, &Objective::CANONICAL)?;
    println!(
        "\n{}",
        String::from_utf8_lossy(&csv)
            .lines()
            .take(3)
            .collect::<Vec<_>>()
            .join("\n")
    );
    Ok(winners)
}

fn main() -> sbst_tune::Result<()> {
    run_example().map(|_| ())
}
