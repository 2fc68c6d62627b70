//! Command-line driver: dataset generation, code generation runs, direct
//! prompting baselines, evaluation and reports.

mod artifacts;
mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphcode::baseline::BaselineStyle;
use graphcode::prompts::PseudocodeVariant;
use graphcode::{SerializationFormat, SizeBucket, TaskKind};
use serde::de::DeserializeOwned;

use crate::commands::ReportKind;
use crate::config::{BackendConfig, RunConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "graphcode", version, about = "Graph-task code generation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample instances and label them with reference answers.
    GenData(Common),
    /// Generate code per task with the trial-and-error loop, then run it on the datasets.
    RunPie(Common),
    /// Ask the model for each answer directly.
    RunBaseline(Common),
    /// Score every prediction file against the ground truth.
    Eval(Common),
    /// Render the evaluation as CSV and JSON tables.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_enum::<ReportKind>, default_value = "all")]
        format: ReportKind,
    },
}

fn parse_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', value_parser = parse_enum::<TaskKind>)]
    tasks: Option<Vec<TaskKind>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_enum::<SizeBucket>)]
    buckets: Option<Vec<SizeBucket>>,
    /// Instances per task and bucket.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tasks processed concurrently.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    model: Option<String>,
    /// Use a scripted backend with this JSON script.
    #[arg(long, conflicts_with = "replay")]
    script: Option<PathBuf>,
    /// Replay a recorded session file.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Record model exchanges to `<command>/session.json`.
    #[arg(long)]
    record: bool,
    /// Independent trials.
    #[arg(long)]
    k: Option<u32>,
    /// Repairs per trial.
    #[arg(long)]
    r: Option<u32>,
    /// Per-instance execution timeout in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long, value_parser = parse_enum::<PseudocodeVariant>)]
    variant: Option<PseudocodeVariant>,
    #[arg(long)]
    select_pseudocode: bool,
    #[arg(long, value_parser = parse_enum::<BaselineStyle>)]
    style: Option<BaselineStyle>,
    #[arg(long = "graph-format", value_parser = parse_enum::<SerializationFormat>)]
    graph_format: Option<SerializationFormat>,
}

impl Common {
    fn resolve(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.out {
            c.out = v;
        }
        if let Some(v) = self.tasks {
            c.tasks = v;
        }
        if let Some(v) = self.buckets {
            c.buckets = v;
        }
        if let Some(v) = self.count {
            c.count = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.workers {
            c.workers = v;
        }
        if let Some(v) = self.model {
            c.model.model = v;
        }
        if let Some(script) = self.script {
            c.backend = BackendConfig::Scripted { script };
        }
        if let Some(session) = self.replay {
            c.backend = BackendConfig::Replay { session };
        }
        c.record |= self.record;
        if let Some(v) = self.k {
            c.budget.k = v;
        }
        if let Some(v) = self.r {
            c.budget.r = v;
        }
        if let Some(v) = self.timeout {
            c.limits.timeout_s = v;
        }
        if let Some(v) = self.variant {
            c.pie.variant = v;
        }
        c.pie.select_pseudocode |= self.select_pseudocode;
        if let Some(v) = self.style {
            c.baseline.style = v;
        }
        if let Some(v) = self.graph_format {
            c.baseline.format = v;
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenData(common) => commands::gen_data(common.resolve()?),
        Command::RunPie(common) => commands::run_pie(common.resolve()?),
        Command::RunBaseline(common) => commands::run_baseline(common.resolve()?),
        Command::Eval(common) => {
            let reports = commands::eval(common.resolve()?)?;
            print!("{}", graphcode::metrics::render_csv(&reports));
            Ok(())
        }
        Command::Report { common, format } => {
            print!("{}", commands::report(common.resolve()?, format)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
