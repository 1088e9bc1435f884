use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::commands::{
    cmd_compare, cmd_run, cmd_suite_generate, cmd_trace_export, cmd_tune, ConfigSource, RunOptions, SubjectSelection,
};
use super::manifest::LoadedManifest;
use crate::error::{Error, Result};
use crate::subject::GeneratorParams;

#[derive(Debug, Parser)]
#[command(
    name = "sbst-tune",
    version,
    about = "Test generation and hyperparameter tuning experiments"
)]
pub struct Cli {
    /// Worker threads (defaults to all cores); outputs do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Subject suites.
    #[command(subcommand)]
    Suite(SuiteCommand),
    /// Run one configuration on the manifest's subjects.
    Run(RunArgs),
    /// Tune on the training split with the manifest's tuner.
    Tune(ManifestArgs),
    /// Compare result sets against the first one.
    Compare(CompareArgs),
    /// Coverage-over-budget curves.
    #[command(subcommand)]
    Trace(TraceCommand),
}

#[derive(Debug, Subcommand)]
pub enum SuiteCommand {
    Generate(GenerateArgs),
}

#[derive(Debug, Subcommand)]
pub enum TraceCommand {
    /// Mean coverage per budget fraction for each result set.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub roots: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub child_prob: Option<f64>,
    #[arg(long)]
    pub slot_span: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub const_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub const_max: Option<i64>,
}

#[derive(Debug, Args)]
pub struct ManifestArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Overrides the manifest's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-run wall-clock budget in seconds instead of the evaluation count.
    #[arg(long, value_name = "SECONDS")]
    pub wall_clock: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Split {
    All,
    Train,
    Test,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub manifest: ManifestArgs,
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub preset: Option<String>,
    /// Configuration JSON file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long, value_enum, default_value_t = Split::All)]
    pub subjects: Split,
    /// Output directory; defaults to `<output>/runs/<label>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Result directories; the first is the baseline.
    #[arg(required = true, num_args = 2..)]
    pub results: Vec<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(required = true)]
    pub results: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

impl ManifestArgs {
    fn load(&self) -> Result<LoadedManifest> {
        let mut loaded = LoadedManifest::load(&self.manifest)?;
        if let Some(seed) = self.seed {
            loaded.manifest.seed = seed;
        }
        if let Some(s) = self.wall_clock {
            loaded.manifest.wall_clock_seconds = Some(s);
        }
        loaded.manifest.validate()?;
        Ok(loaded)
    }
}

/// Parses `args` (program name first) and executes the command, writing a
/// short summary to `out`.
pub fn run_cli<I, T>(args: I, out: &mut impl Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            write!(out, "{e}")?;
            return Ok(());
        }
        Err(e) => return Err(Error::Usage(e.render().to_string())),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::InvalidParams("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().map_err(|e| Error::Experiment(e.to_string()))?;
    let mut buffer = Vec::new();
    let result = pool.install(|| execute(cli.command, &mut buffer));
    out.write_all(&buffer)?;
    result
}

fn execute(command: Command, out: &mut Vec<u8>) -> Result<()> {
    match command {
        Command::Suite(SuiteCommand::Generate(a)) => {
            let d = GeneratorParams::default();
            let params = GeneratorParams {
                roots: a.roots.unwrap_or(d.roots),
                max_depth: a.max_depth.unwrap_or(d.max_depth),
                child_prob: a.child_prob.unwrap_or(d.child_prob),
                slot_span: a.slot_span.unwrap_or(d.slot_span),
                const_range: (
                    a.const_min.unwrap_or(d.const_range.0),
                    a.const_max.unwrap_or(d.const_range.1),
                ),
            };
            let suite = cmd_suite_generate(a.count, a.seed, params, &a.out)?;
            for s in &suite.subjects {
                writeln!(out, "{}\t{} goals", s.id, s.goal_count())?;
            }
            writeln!(out, "wrote {} subjects to {}", suite.subjects.len(), a.out.display())?;
        }
        Command::Run(a) => {
            let loaded = a.manifest.load()?;
            let source = match (a.preset, a.config) {
                (Some(p), _) => ConfigSource::Preset(p),
                (None, Some(f)) => ConfigSource::File(f),
                (None, None) => unreachable!("clap requires one source"),
            };
            let subjects = match a.subjects {
                Split::All => SubjectSelection::All,
                Split::Train => SubjectSelection::Train,
                Split::Test => SubjectSelection::Test,
            };
            let opts = RunOptions {
                source,
                label: a.label,
                subjects,
                out: a.out,
            };
            let outcome = cmd_run(&loaded, &opts)?;
            let mean = outcome.records.iter().map(|r| r.coverage).sum::<f64>() / outcome.records.len() as f64;
            let verb = if outcome.skipped { "up to date" } else { "wrote" };
            writeln!(
                out,
                "{verb}: {} runs in {} (mean coverage {mean:.4})",
                outcome.records.len(),
                outcome.dir.display()
            )?;
        }
        Command::Tune(a) => {
            let loaded = a.load()?;
            let outcome = cmd_tune(&loaded)?;
            for f in &outcome.files {
                writeln!(out, "{}", f.display())?;
            }
            writeln!(
                out,
                "algorithm runs: {} (reused {} results)",
                outcome.runs, outcome.reused
            )?;
        }
        Command::Compare(a) => {
            let report = cmd_compare(&a.results, a.alpha, &a.out)?;
            for r in &report.rows {
                writeln!(
                    out,
                    "{}\tcoverage {:.4}\tA12 {:.3}\tp {:.4}{}",
                    r.configuration,
                    r.coverage.mean_a,
                    r.coverage.a12,
                    r.coverage.p_value,
                    if r.coverage.significant { " *" } else { "" }
                )?;
            }
        }
        Command::Trace(TraceCommand::Export(a)) => {
            let curves = cmd_trace_export(&a.results, &a.out)?;
            writeln!(out, "wrote {} curves to {}", curves.len(), a.out.display())?;
        }
    }
    Ok(())
}
