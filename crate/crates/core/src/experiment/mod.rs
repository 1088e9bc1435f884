//! Experiment harness: suites, manifests, seeding and the CLI commands.

mod cli;
mod commands;
mod manifest;
mod seed;
mod suite;

pub use cli::{run_cli, Cli};
pub use commands::{
    cmd_compare, cmd_run, cmd_suite_generate, cmd_trace_export, cmd_tune, objective_slug, prepare, ComparisonFile,
    ConfigSource, DeTuneFile, GridBestFile, GridRecordsFile, Prepared, ResultSet, RunOptions, RunOutcome,
    SubjectSelection, TuneOutcome, INCOMPLETE_MARKER,
};
pub use manifest::{ExperimentManifest, LoadedManifest, RunRecord, TunerBlock};
pub use seed::{derive_seed, fnv1a64, mix64};
pub use suite::{split_suite, Suite};
