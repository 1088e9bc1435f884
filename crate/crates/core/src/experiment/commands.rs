use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::{LoadedManifest, RunRecord, TunerBlock};
use super::seed::{derive_seed, fnv1a64};
use super::suite::{split_suite, Suite};
use crate::error::{Error, Result};
use crate::operators::RandomSource;
use crate::param_space::{preset, space_by_id, Configuration};
use crate::run::{Algorithm, AlgorithmConfig, CoverageTrace};
use crate::stats::{mann_whitney_u, relative_coverage, write_comparison_csv, ComparisonRow};
use crate::subject::{GeneratorParams, Subject};
use crate::tuner::{
    auc, de_tune, grid_subset, grid_tune, select_best, write_grid_csv, Evaluator, GridRecord, Objective, TuningResult,
    TuningTask,
};

/// Left in an output directory while a command writes to it; a failed
/// command leaves it behind with the error message.
pub const INCOMPLETE_MARKER: &str = "INCOMPLETE";

fn manifest_comment(digest: &str) -> String {
    format!("# manifest={digest}\n")
}

/// Writes through a temporary sibling so readers never see partial files.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Runs `body` with an incomplete-marker in `dir`; on failure the marker
/// keeps the error so the next invocation knows to redo the work.
fn guarded<T>(dir: &Path, body: impl FnOnce() -> Result<T>) -> Result<T> {
    fs::create_dir_all(dir)?;
    let marker = dir.join(INCOMPLETE_MARKER);
    fs::write(&marker, "started\n")?;
    match body() {
        Ok(v) => {
            fs::remove_file(&marker)?;
            Ok(v)
        }
        Err(e) => {
            fs::write(&marker, format!("failed: {e}\n"))?;
            Err(e)
        }
    }
}

pub fn cmd_suite_generate(count: usize, seed: u64, params: GeneratorParams, out: &Path) -> Result<Suite> {
    let suite = Suite::generate(count, seed, params)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    suite.save(out)?;
    Ok(suite)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubjectSelection {
    All,
    Train,
    Test,
}

/// The manifest's suite, checked against its seed, and the split.
pub struct Prepared {
    pub suite: Suite,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

pub fn prepare(loaded: &LoadedManifest) -> Result<Prepared> {
    let path = loaded.suite_path();
    let suite =
        Suite::load(&path).map_err(|e| Error::Experiment(format!("cannot load suite {}: {e}", path.display())))?;
    if suite.seed != loaded.manifest.suite_seed {
        return Err(Error::Experiment(format!(
            "suite {} was generated with seed {}, manifest expects {}",
            path.display(),
            suite.seed,
            loaded.manifest.suite_seed
        )));
    }
    let (train, test) = split_suite(&suite.ids(), loaded.manifest.split_ratio, loaded.manifest.split_seed)?;
    Ok(Prepared { suite, train, test })
}

impl Prepared {
    pub fn subjects(&self, which: SubjectSelection) -> Result<Vec<Subject>> {
        let mut ids = match which {
            SubjectSelection::All => self.suite.ids(),
            SubjectSelection::Train => self.train.clone(),
            SubjectSelection::Test => self.test.clone(),
        };
        ids.sort_unstable();
        self.suite.select(&ids)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigSource {
    Preset(String),
    File(PathBuf),
}

impl ConfigSource {
    pub fn load(&self) -> Result<Configuration> {
        match self {
            ConfigSource::Preset(name) => preset(name),
            ConfigSource::File(path) => Ok(serde_json::from_str(&fs::read_to_string(path)?)?),
        }
    }

    fn default_label(&self) -> String {
        match self {
            ConfigSource::Preset(name) => name.clone(),
            ConfigSource::File(path) => {
                let stem = path.file_name().and_then(|s| s.to_str()).unwrap_or("config");
                stem.trim_end_matches(".json").trim_end_matches(".config").to_string()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub source: ConfigSource,
    pub label: Option<String>,
    pub subjects: SubjectSelection,
    /// Defaults to `<output>/runs/<label>`.
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub records: Vec<RunRecord>,
    /// Outputs were already complete for this manifest and configuration.
    pub skipped: bool,
}

fn read_runs(path: &Path) -> Result<Vec<RunRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::Experiment(format!("cannot read {}: {e}", path.display())))?;
    BufReader::new(file)
        .lines()
        .map(|line| Ok(serde_json::from_str(&line?)?))
        .collect()
}

/// Runs one configuration on every selected subject and repetition. Writes
/// `runs.jsonl` (ordered by subject, then repetition) and `traces.csv`.
pub fn cmd_run(loaded: &LoadedManifest, opts: &RunOptions) -> Result<RunOutcome> {
    let m = &loaded.manifest;
    let config = opts.source.load()?;
    let runner = AlgorithmConfig::new(m.algorithm, &config)?;
    let config = space_by_id(m.algorithm.space_id())?.normalize(&config)?;
    let prepared = prepare(loaded)?;
    let subjects = prepared.subjects(opts.subjects)?;
    let label = opts.label.clone().unwrap_or_else(|| opts.source.default_label());
    let dir = opts
        .out
        .clone()
        .unwrap_or_else(|| loaded.output_dir().join("runs").join(&label));
    let digest = m.digest();
    let config_digest = format!("{:016x}", config.digest());
    let expected = subjects.len() as u64 * m.repetitions;

    let runs_path = dir.join("runs.jsonl");
    if runs_path.exists() && !dir.join(INCOMPLETE_MARKER).exists() {
        if let Ok(records) = read_runs(&runs_path) {
            let current = records.len() as u64 == expected
                && records
                    .iter()
                    .all(|r| r.manifest == digest && r.config_digest == config_digest);
            if current {
                return Ok(RunOutcome {
                    dir,
                    records,
                    skipped: true,
                });
            }
        }
    }

    let records = guarded(&dir, || {
        let cells: Vec<(&Subject, u64)> = subjects
            .iter()
            .flat_map(|s| (0..m.repetitions).map(move |r| (s, r)))
            .collect();
        let budget = m.run_budget();
        let results = cells
            .par_iter()
            .map(|&(subject, repetition)| {
                let seed = derive_seed(m.seed, config.digest(), subject.digest(), repetition);
                runner.run(subject, budget, m.checkpoints, seed).map(|r| (seed, r))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut traces = manifest_comment(&digest);
        traces.push_str("subject,repetition,budget_fraction,coverage\n");
        let mut jsonl = String::new();
        let mut records = Vec::with_capacity(results.len());
        // line 1 is the manifest comment, line 2 the header
        let mut line = 3;
        for (&(subject, repetition), (seed, result)) in cells.iter().zip(results) {
            let rows = result.trace.points.len();
            for (fraction, coverage) in &result.trace.points {
                traces.push_str(&format!("{},{repetition},{fraction},{coverage}\n", subject.id));
            }
            let record = RunRecord {
                manifest: digest.clone(),
                label: label.clone(),
                algorithm: m.algorithm,
                subject: subject.id.clone(),
                config_digest: config_digest.clone(),
                repetition,
                seed,
                coverage: result.coverage(),
                auc: auc(&result.trace),
                evaluations: result.evaluations,
                trace: format!("traces.csv#L{}-L{}", line, line + rows - 1),
            };
            line += rows;
            jsonl.push_str(&serde_json::to_string(&record)?);
            jsonl.push('\n');
            records.push(record);
        }
        write_json(&dir.join("config.json"), &config)?;
        write_atomic(&dir.join("traces.csv"), traces.as_bytes())?;
        write_atomic(&runs_path, jsonl.as_bytes())?;
        Ok(records)
    })?;
    Ok(RunOutcome {
        dir,
        records,
        skipped: false,
    })
}

/// Per-objective DE output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeTuneFile {
    pub manifest: String,
    pub algorithm: Algorithm,
    pub train: Vec<String>,
    pub result: TuningResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecordsFile {
    pub manifest: String,
    pub algorithm: Algorithm,
    pub train: Vec<String>,
    pub grid_size: usize,
    pub runs: u64,
    pub records: Vec<GridRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridBestFile {
    pub manifest: String,
    pub objective: Objective,
    pub grid_id: usize,
    pub score: f64,
    pub config: Configuration,
}

#[derive(Debug, Default)]
pub struct TuneOutcome {
    pub files: Vec<PathBuf>,
    /// Algorithm runs executed by this invocation.
    pub runs: u64,
    /// Objectives whose results were already present.
    pub reused: usize,
}

/// File-name form of an objective label.
pub fn objective_slug(o: &Objective) -> String {
    o.to_string()
}

fn load_if_current<T: for<'de> Deserialize<'de>>(path: &Path, digest: &str, get: impl Fn(&T) -> &str) -> Option<T> {
    let value: T = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
    (get(&value) == digest).then_some(value)
}

/// Tunes on the training split. DE writes `de-<objective>.json` per
/// objective; grid mode writes `grid-records.{json,csv}` and one
/// `grid-best-<objective>.json` per objective. Each best configuration is
/// also written as `<name>.config.json` for `run --config`. Objectives with
/// current outputs are not recomputed.
pub fn cmd_tune(loaded: &LoadedManifest) -> Result<TuneOutcome> {
    let m = &loaded.manifest;
    let tuner = m
        .tuner
        .clone()
        .ok_or_else(|| Error::Experiment("manifest has no tuner block".into()))?;
    let prepared = prepare(loaded)?;
    let train = prepared.train.clone();
    let task = TuningTask::new(
        m.algorithm,
        prepared.subjects(SubjectSelection::Train)?,
        m.repetitions,
        m.run_budget(),
        m.checkpoints,
        m.seed,
    )?;
    let dir = loaded.output_dir().join("tune");
    let digest = m.digest();

    guarded(&dir, || {
        let mut outcome = TuneOutcome::default();
        match tuner {
            TunerBlock::De { settings } => {
                for objective in &m.objectives {
                    let slug = objective_slug(objective);
                    let path = dir.join(format!("de-{slug}.json"));
                    let file = match load_if_current(&path, &digest, |f: &DeTuneFile| &f.manifest) {
                        Some(f) => {
                            outcome.reused += 1;
                            f
                        }
                        None => {
                            let stream = derive_seed(m.seed, fnv1a64(b"de"), fnv1a64(slug.as_bytes()), 0);
                            let result = de_tune(&task, *objective, &settings, &mut RandomSource::new(stream))?;
                            let file = DeTuneFile {
                                manifest: digest.clone(),
                                algorithm: m.algorithm,
                                train: train.clone(),
                                result,
                            };
                            write_json(&path, &file)?;
                            file
                        }
                    };
                    let config_path = dir.join(format!("de-{slug}.config.json"));
                    write_json(&config_path, &file.result.best_config)?;
                    outcome.files.extend([path, config_path]);
                }
            }
            TunerBlock::Grid { subset } => {
                let path = dir.join("grid-records.json");
                let file = match load_if_current(&path, &digest, |f: &GridRecordsFile| &f.manifest) {
                    Some(f) => {
                        outcome.reused += 1;
                        f
                    }
                    None => {
                        let grid = task.space().grid();
                        let grid_size = grid.len();
                        let points = match subset {
                            Some(n) => grid_subset(grid, n),
                            None => grid,
                        };
                        let before = task.runs();
                        let records = grid_tune(&task, &points)?;
                        let file = GridRecordsFile {
                            manifest: digest.clone(),
                            algorithm: m.algorithm,
                            train: train.clone(),
                            grid_size,
                            runs: task.runs() - before,
                            records,
                        };
                        let mut csv = manifest_comment(&digest).into_bytes();
                        write_grid_csv(&mut csv, task.space(), &file.records, &m.objectives)?;
                        write_atomic(&dir.join("grid-records.csv"), &csv)?;
                        write_json(&path, &file)?;
                        file
                    }
                };
                outcome.files.extend([path, dir.join("grid-records.csv")]);
                for objective in &m.objectives {
                    let (grid_id, config, score) = select_best(&file.records, objective)?;
                    let slug = objective_slug(objective);
                    let best_path = dir.join(format!("grid-best-{slug}.json"));
                    let config_path = dir.join(format!("grid-best-{slug}.config.json"));
                    write_json(&config_path, &config)?;
                    write_json(
                        &best_path,
                        &GridBestFile {
                            manifest: digest.clone(),
                            objective: *objective,
                            grid_id,
                            score,
                            config,
                        },
                    )?;
                    outcome.files.extend([best_path, config_path]);
                }
            }
        }
        outcome.runs = task.runs();
        Ok(outcome)
    })
}

/// A loaded `runs.jsonl`.
#[derive(Debug, Clone)]
pub struct ResultSet {
    pub label: String,
    pub dir: PathBuf,
    pub records: Vec<RunRecord>,
}

impl ResultSet {
    pub fn load(dir: &Path) -> Result<Self> {
        let mut records = read_runs(&dir.join("runs.jsonl"))?;
        if records.is_empty() {
            return Err(Error::Experiment(format!("{} holds no runs", dir.display())));
        }
        records.sort_by(|a, b| a.subject.cmp(&b.subject).then(a.repetition.cmp(&b.repetition)));
        Ok(ResultSet {
            label: records[0].label.clone(),
            dir: dir.to_path_buf(),
            records,
        })
    }

    pub fn subjects(&self) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.subject.as_str()).collect()
    }

    /// Final coverage of every run, pooled over subjects and repetitions.
    pub fn coverage(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.coverage).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonFile {
    pub alpha: f64,
    pub baseline: String,
    /// Configurations whose per-subject extremes define relative coverage.
    pub relative_set: Vec<String>,
    pub pooling: String,
    pub manifests: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

/// Compares every result set against the first. Writes `compare.csv` and
/// `compare.json` into `out`.
pub fn cmd_compare(dirs: &[PathBuf], alpha: f64, out: &Path) -> Result<ComparisonFile> {
    if dirs.len() < 2 {
        return Err(Error::Experiment(
            "compare needs a baseline and at least one other result set".into(),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!("alpha {alpha} outside (0, 1)")));
    }
    let sets = dirs.iter().map(|d| ResultSet::load(d)).collect::<Result<Vec<_>>>()?;
    let labels: BTreeSet<&str> = sets.iter().map(|s| s.label.as_str()).collect();
    if labels.len() != sets.len() {
        return Err(Error::Experiment("result sets must have distinct labels".into()));
    }
    let subjects: Vec<String> = sets[0].subjects().into_iter().map(String::from).collect();
    for s in &sets[1..] {
        if s.subjects().into_iter().ne(subjects.iter().map(String::as_str)) {
            return Err(Error::Experiment(format!(
                "{} and {} cover different subjects",
                sets[0].label, s.label
            )));
        }
    }

    // per-subject run extremes over all sets
    let mut extremes: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for r in sets.iter().flat_map(|s| &s.records) {
        let e = extremes.entry(&r.subject).or_insert((f64::INFINITY, f64::NEG_INFINITY));
        *e = (e.0.min(r.coverage), e.1.max(r.coverage));
    }
    let relative_runs: Vec<Vec<f64>> = sets
        .iter()
        .map(|s| {
            s.records
                .iter()
                .map(|r| {
                    let (lo, hi) = extremes[r.subject.as_str()];
                    if hi > lo {
                        (r.coverage - lo) / (hi - lo)
                    } else {
                        1.0
                    }
                })
                .collect()
        })
        .collect();
    let matrix: Vec<Vec<f64>> = sets
        .iter()
        .map(|s| {
            subjects
                .iter()
                .map(|id| {
                    let runs: Vec<f64> = s
                        .records
                        .iter()
                        .filter(|r| &r.subject == id)
                        .map(|r| r.coverage)
                        .collect();
                    runs.iter().sum::<f64>() / runs.len() as f64
                })
                .collect()
        })
        .collect();
    let mean_relative = relative_coverage(&matrix)?;

    let baseline = sets[0].coverage();
    let rows = sets
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(ComparisonRow {
                configuration: s.label.clone(),
                coverage: mann_whitney_u(&s.coverage(), &baseline, alpha)?,
                mean_relative_coverage: mean_relative[i],
                relative: mann_whitney_u(&relative_runs[i], &relative_runs[0], alpha)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let manifests: Vec<String> = sets
        .iter()
        .flat_map(|s| s.records.iter().map(|r| r.manifest.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let file = ComparisonFile {
        alpha,
        baseline: sets[0].label.clone(),
        relative_set: sets.iter().map(|s| s.label.clone()).collect(),
        pooling: "per-run values pooled over subjects and repetitions; per-subject means are not taken first".into(),
        manifests,
        rows,
    };
    fs::create_dir_all(out)?;
    let mut csv = manifest_comment(&file.manifests.join(",")).into_bytes();
    write_comparison_csv(&mut csv, &file.rows)?;
    write_atomic(&out.join("compare.csv"), &csv)?;
    write_json(&out.join("compare.json"), &file)?;
    Ok(file)
}

#[derive(Debug, Deserialize)]
struct TraceRow {
    #[allow(dead_code)]
    subject: String,
    #[allow(dead_code)]
    repetition: u64,
    budget_fraction: f64,
    coverage: f64,
}

fn read_traces(path: &Path) -> Result<Vec<TraceRow>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    reader.deserialize().map(|r| Ok(r?)).collect()
}

/// Mean coverage per budget fraction for each result set, in CSV form with
/// columns `configuration,budget_fraction,mean_coverage`.
pub fn cmd_trace_export(dirs: &[PathBuf], out: &Path) -> Result<Vec<(String, CoverageTrace)>> {
    let mut curves = Vec::new();
    let mut manifests = BTreeSet::new();
    for dir in dirs {
        let set = ResultSet::load(dir)?;
        manifests.extend(set.records.iter().map(|r| r.manifest.clone()));
        // fractions are non-negative, so their bit patterns sort numerically
        let mut sums: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
        for row in read_traces(&dir.join("traces.csv"))? {
            let e = sums.entry(row.budget_fraction.to_bits()).or_insert((0.0, 0));
            e.0 += row.coverage;
            e.1 += 1;
        }
        let points = sums
            .into_iter()
            .map(|(bits, (sum, n))| (f64::from_bits(bits), sum / n as f64))
            .collect();
        curves.push((set.label, CoverageTrace::new(points)));
    }
    let mut text = manifest_comment(&manifests.into_iter().collect::<Vec<_>>().join(","));
    text.push_str("configuration,budget_fraction,mean_coverage\n");
    for (label, trace) in &curves {
        for (x, y) in &trace.points {
            text.push_str(&format!("{label},{x},{y}\n"));
        }
    }
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_atomic(out, text.as_bytes())?;
    Ok(curves)
}
