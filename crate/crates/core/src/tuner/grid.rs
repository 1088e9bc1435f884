use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EvaluationRecord, Evaluator, Objective};
use crate::error::{Error, Result};
use crate::param_space::{Configuration, GridPoint, ParamSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub grid_id: usize,
    pub record: EvaluationRecord,
}

/// `count` grid points spread evenly over the enumeration order.
pub fn grid_subset(points: Vec<GridPoint>, count: usize) -> Vec<GridPoint> {
    let n = points.len();
    if count >= n {
        return points;
    }
    let keep: Vec<bool> = {
        let mut keep = vec![false; n];
        for i in 0..count {
            keep[i * n / count] = true;
        }
        keep
    };
    points
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(p, _)| p)
        .collect()
}

/// Evaluates every point once; records come back in grid-id order.
pub fn grid_tune<E: Evaluator>(evaluator: &E, points: &[GridPoint]) -> Result<Vec<GridRecord>> {
    points
        .par_iter()
        .map(|p| {
            Ok(GridRecord {
                grid_id: p.grid_id,
                record: evaluator.evaluate(&p.config)?,
            })
        })
        .collect()
}

/// Highest-scoring record; ties go to the smallest grid id.
pub fn select_best(records: &[GridRecord], objective: &Objective) -> Result<(usize, Configuration, f64)> {
    let mut best: Option<(&GridRecord, f64)> = None;
    for r in records {
        let score = objective.score(&r.record);
        let better = match best {
            None => true,
            Some((b, s)) => score > s || (score == s && r.grid_id < b.grid_id),
        };
        if better {
            best = Some((r, score));
        }
    }
    let (r, score) = best.ok_or_else(|| Error::EmptySample("no grid records".into()))?;
    Ok((r.grid_id, r.record.config.clone(), score))
}

/// Columns: grid_id, one per parameter, mean_coverage, mean_auc, then one
/// `score_<objective>` column per objective.
pub fn write_grid_csv<W: Write>(
    writer: W,
    space: &ParamSpace,
    records: &[GridRecord],
    objectives: &[Objective],
) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    let mut header = vec!["grid_id".to_string()];
    header.extend(space.specs().iter().map(|s| s.name.clone()));
    header.extend(["mean_coverage".to_string(), "mean_auc".to_string()]);
    header.extend(objectives.iter().map(|o| format!("score_{o}")));
    out.write_record(&header)?;
    for r in records {
        let mut row = vec![r.grid_id.to_string()];
        for spec in space.specs() {
            row.push(r.record.config.get(&spec.name)?.to_string());
        }
        row.push(r.record.mean_coverage.to_string());
        row.push(r.record.mean_auc.to_string());
        row.extend(objectives.iter().map(|o| o.score(&r.record).to_string()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param_space::mio_space;

    fn record(grid_id: usize, cov: f64, area: f64) -> GridRecord {
        GridRecord {
            grid_id,
            record: EvaluationRecord {
                config: mio_space().grid()[grid_id - 1].config.clone(),
                cells: vec![],
                mean_coverage: cov,
                mean_auc: area,
                evaluations: 0,
            },
        }
    }

    #[test]
    fn select_best_breaks_ties_by_id() {
        let records = vec![record(5, 0.9, 0.1), record(2, 0.9, 0.2), record(7, 0.5, 0.9)];
        assert_eq!(select_best(&records, &Objective::COVERAGE).unwrap().0, 2);
        assert_eq!(select_best(&records, &Objective::AUC).unwrap().0, 7);
        assert_eq!(select_best(&records[..1], &Objective::AUC).unwrap().0, 5);
        assert!(select_best(&[], &Objective::AUC).is_err());
    }

    #[test]
    fn subset_is_even_and_ordered() {
        let grid = mio_space().grid();
        let sub = grid_subset(grid.clone(), 200);
        assert_eq!(sub.len(), 200);
        assert_eq!(sub[0].grid_id, 1);
        assert!(sub.windows(2).all(|w| w[0].grid_id < w[1].grid_id));
        assert_eq!(grid_subset(grid, 5000).len(), 1620);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_grid_csv(
            &mut buf,
            &mio_space(),
            &[record(1, 0.5, 0.25)],
            &Objective::CANONICAL[..2],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "grid_id,chromosome_length,phase_switch,explore_tests_per_target,explore_random_probability,\
             explore_mutations,exploit_mutations,mean_coverage,mean_auc,score_1+0,score_0+1"
        );
        assert!(lines.next().unwrap().ends_with(",0.5,0.25,0.5,0.25"));
    }
}
