use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use graphcode::baseline::{self, run_probe, BaselineStyle, ProbeReport};
use graphcode::dataset::{self, d_small, generate_instances};
use graphcode::llm::{Backend, Gateway, RemoteBackend, ReplayBackend, ScriptedBackend, Session};
use graphcode::metrics::{render_csv, render_json, EvalReport, Prediction};
use graphcode::orchestrator::{apply_code, bundle_for, select_pseudocode, GenerationResult, Generator};
use graphcode::prompts::{PromptLibrary, PseudocodeVariant};
use graphcode::reference::reference_code;
use graphcode::sandbox::Sandbox;
use graphcode::{par, Error, SizeBucket, TaskInstance, TaskKind};
use serde::{Deserialize, Serialize};

use crate::artifacts::{self, MethodMeta, BASELINE, DATA, EVAL, PIE, REPORT};
use crate::config::{BackendConfig, RunConfig};
use crate::error::{CliError, Result};

/// Script entries equal to this are replaced by the task's reference
/// solution in a fenced block.
pub const REFERENCE_TOKEN: &str = "@reference";

/// Scripted responses: section (`pie`, `baseline`, `probes`) to key (task
/// id, property name, or `*`) to responses. Lists are replayed cyclically.
pub type Script = BTreeMap<String, BTreeMap<String, Vec<String>>>;

enum Source {
    Scripted(Script),
    Replay(Session),
    Remote(graphcode::llm::RemoteConfig),
}

struct Ctx {
    config: RunConfig,
    library: PromptLibrary,
    source: Source,
}

impl Ctx {
    fn new(config: RunConfig) -> Result<Ctx> {
        config.validate()?;
        let source = match &config.backend {
            BackendConfig::Scripted { script } => Source::Scripted(artifacts::read_json(script)?),
            BackendConfig::Replay { session } => Source::Replay(Session::load(session)?),
            BackendConfig::Remote(remote) => Source::Remote(remote.clone()),
        };
        Ok(Ctx {
            config,
            library: PromptLibrary::embedded(),
            source,
        })
    }

    fn dir(&self, name: &str) -> PathBuf {
        self.config.out.join(name)
    }

    fn gateway(&self, section: &str, key: &str, task: Option<TaskKind>) -> Result<Gateway> {
        let backend: Arc<dyn Backend> = match &self.source {
            Source::Scripted(script) => {
                let responses = script
                    .get(section)
                    .and_then(|s| s.get(key).or_else(|| s.get("*")))
                    .ok_or_else(|| {
                        Error::Config(format!("script has no `{section}` responses for `{key}` and no `*` entry"))
                    })?;
                let expanded = responses.iter().map(|r| match task {
                    Some(t) if r == REFERENCE_TOKEN => format!("```python\n{}```\n", reference_code(t)),
                    _ => r.clone(),
                });
                Arc::new(ScriptedBackend::cycling(expanded))
            }
            Source::Replay(session) => Arc::new(ReplayBackend::from_session(session.clone())),
            Source::Remote(remote) => Arc::new(RemoteBackend::new(remote.clone())),
        };
        let gw = Gateway::new(backend, self.config.model.clone());
        Ok(if self.config.record { gw.recording() } else { gw })
    }

    fn sandbox(&self) -> Sandbox {
        let mut sb = Sandbox::new(self.config.limits.clone()).with_workers(self.config.sandbox_workers);
        sb.interpreter = self.config.python.clone();
        sb
    }

    /// Every dataset file for the configured grid, read before any model
    /// call so a missing file fails fast.
    fn load_data(&self) -> Result<BTreeMap<(TaskKind, SizeBucket), Vec<TaskInstance>>> {
        let dir = self.dir(DATA);
        let mut data = BTreeMap::new();
        for &task in &self.config.tasks {
            for &bucket in &self.config.buckets {
                let path = dataset::instances_path(&dir, task, bucket.as_str());
                if !path.exists() {
                    return Err(CliError::Missing {
                        what: "dataset",
                        path,
                        command: "gen-data",
                    });
                }
                data.insert((task, bucket), dataset::read_instances(&path)?);
            }
        }
        Ok(data)
    }

    fn save_sessions(&self, dir: &str, gateways: &[&Gateway]) -> Result<()> {
        if !self.config.record {
            return Ok(());
        }
        let mut merged = Session::default();
        for gw in gateways {
            if let Some(s) = gw.session() {
                merged.merge(s);
            }
        }
        merged.save(&self.dir(dir).join("session.json"))?;
        Ok(())
    }
}

pub fn gen_data(config: RunConfig) -> Result<()> {
    config.validate()?;
    let dir = config.out.join(DATA);
    for &task in &config.tasks {
        for &bucket in &config.buckets {
            let instances = generate_instances(task, bucket, config.count, config.seed, &config.generation)?;
            let truths = dataset::label(&instances, &config.truth)?;
            dataset::write_instances(&dataset::instances_path(&dir, task, bucket.as_str()), &instances)?;
            dataset::write_truths(&dataset::truths_path(&dir, task, bucket.as_str()), &truths)?;
            log::info!("{task}/{bucket}: wrote {} instances", instances.len());
        }
    }
    Ok(())
}

pub fn pie_method(config: &RunConfig) -> String {
    match (config.pie.select_pseudocode, config.pie.variant) {
        (true, _) => "pie_select".into(),
        (false, PseudocodeVariant::Full) => "pie".into(),
        (false, v) => format!("pie_{v}"),
    }
}

pub fn baseline_method(config: &RunConfig, task: TaskKind) -> String {
    let style = config.baseline.style;
    let mut label = format!("baseline_{style}");
    if style.uses_format() {
        let fmt = serde_json::to_value(config.baseline.format).expect("format serializes");
        label.push('_');
        label.push_str(fmt.as_str().unwrap_or_default());
    }
    if style != BaselineStyle::Generic && !baseline::wording_is_published(task, style) {
        label.push_str("_extrapolated");
    }
    label
}

/// Everything `run-pie` keeps about one task's generation.
#[derive(Debug, Serialize, Deserialize)]
pub struct PieArtifact {
    pub task: TaskKind,
    pub method: String,
    pub variant: PseudocodeVariant,
    pub passed: bool,
    pub llm_calls: u64,
    pub mean_latency_s: Option<f64>,
    pub error: Option<String>,
    pub result: Option<GenerationResult>,
}

struct PieOutput {
    artifact: PieArtifact,
    predictions: Vec<(SizeBucket, Vec<Prediction>)>,
    gateway: Gateway,
}

fn pie_task(
    ctx: &Ctx,
    task: TaskKind,
    data: &BTreeMap<(TaskKind, SizeBucket), Vec<TaskInstance>>,
) -> Result<PieOutput> {
    let config = &ctx.config;
    let lib = &ctx.library;
    let gw = ctx.gateway("pie", task.id(), Some(task))?;
    let sandbox = ctx.sandbox();
    let (bundle, variant) = if config.pie.select_pseudocode {
        let entries = lib
            .variants(task)
            .into_iter()
            .filter(|v| *v != PseudocodeVariant::None)
            .map(|v| lib.entry(task, v))
            .collect::<graphcode::Result<Vec<_>>>()?;
        let (entry, _) = select_pseudocode(&gw, task, &entries)?;
        (bundle_for(lib, &entry)?, entry.variant)
    } else {
        (lib.bundle(task, config.pie.variant)?, config.pie.variant)
    };
    let suite = d_small(task, &config.generation)?;
    let generator = Generator {
        llm: &gw,
        sandbox: &sandbox,
        budget: config.budget,
    };
    let (result, error) = match generator.generate_code(&bundle, &suite) {
        Ok(r) => (Some(r), None),
        Err(e @ Error::GenerationFailed { .. }) => {
            log::warn!("{e}");
            (None, Some(e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    let mut predictions = Vec::new();
    for &bucket in &config.buckets {
        let instances = &data[&(task, bucket)];
        let preds = match &result {
            Some(r) => apply_code(&sandbox, r.code(), instances)?
                .iter()
                .map(|o| o.to_prediction())
                .collect(),
            None => vec![Err("code generation failed".to_string()); instances.len()],
        };
        predictions.push((bucket, preds));
    }
    let artifact = PieArtifact {
        task,
        method: pie_method(config),
        variant,
        passed: result.as_ref().is_some_and(|r| r.passed),
        llm_calls: gw.calls(),
        mean_latency_s: gw.mean_latency_s(),
        error,
        result,
    };
    Ok(PieOutput {
        artifact,
        predictions,
        gateway: gw,
    })
}

fn finish(outcomes: Vec<(TaskKind, Result<()>)>) -> Result<()> {
    let total = outcomes.len();
    let mut failed = 0;
    let mut harness = false;
    for (task, outcome) in outcomes {
        if let Err(e) = outcome {
            log::error!("{task}: {e}");
            failed += 1;
            harness |= e.exit_code() == 2;
        }
    }
    if failed > 0 {
        return Err(CliError::TaskFailures { failed, total, harness });
    }
    Ok(())
}

pub fn run_pie(config: RunConfig) -> Result<()> {
    let ctx = Ctx::new(config)?;
    let data = ctx.load_data()?;
    let dir = ctx.dir(PIE);
    let outputs = par::map_with_workers(&ctx.config.tasks, ctx.config.workers, |&task| pie_task(&ctx, task, &data));
    let mut outcomes = Vec::new();
    let mut gateways = Vec::new();
    for (&task, output) in ctx.config.tasks.iter().zip(outputs) {
        let written = output.and_then(|out| {
            let a = &out.artifact;
            log::info!("{task}: passed={} after {} calls", a.passed, a.llm_calls);
            artifacts::write_json(&dir.join(format!("{}.generation.json", task.id())), a)?;
            for (bucket, preds) in &out.predictions {
                artifacts::write_predictions(&artifacts::predictions_path(&dir, task, bucket.as_str()), preds)?;
                let meta = MethodMeta {
                    method: a.method.clone(),
                    task,
                    bucket: bucket.as_str().to_string(),
                    llm_calls: a.llm_calls,
                    mean_latency_s: a.mean_latency_s,
                };
                artifacts::write_json(&artifacts::meta_path(&dir, task, bucket.as_str()), &meta)?;
            }
            gateways.push(out.gateway);
            Ok(())
        });
        outcomes.push((task, written));
    }
    ctx.save_sessions(PIE, &gateways.iter().collect::<Vec<_>>())?;
    finish(outcomes)
}

struct BaselineOutput {
    cells: Vec<(SizeBucket, Vec<Prediction>, MethodMeta)>,
    gateways: Vec<Gateway>,
}

fn baseline_task(
    ctx: &Ctx,
    task: TaskKind,
    data: &BTreeMap<(TaskKind, SizeBucket), Vec<TaskInstance>>,
) -> Result<BaselineOutput> {
    let config = &ctx.config;
    let mut out = BaselineOutput {
        cells: Vec::new(),
        gateways: Vec::new(),
    };
    for &bucket in &config.buckets {
        let gw = ctx.gateway("baseline", task.id(), Some(task))?;
        let preds = baseline::run_baseline(
            &gw,
            &ctx.library,
            &data[&(task, bucket)],
            config.baseline.format,
            config.baseline.style,
            config.baseline.workers,
        )?;
        let meta = MethodMeta {
            method: baseline_method(config, task),
            task,
            bucket: bucket.as_str().to_string(),
            llm_calls: gw.calls(),
            mean_latency_s: gw.mean_latency_s(),
        };
        out.cells.push((bucket, preds, meta));
        out.gateways.push(gw);
    }
    Ok(out)
}

/// Seed offset for probe graphs, so they differ from the task datasets.
const PROBE_SEED: u64 = 0x9b0b_e5ee;

fn run_probes(ctx: &Ctx) -> Result<(Vec<ProbeReport>, Vec<Gateway>)> {
    let config = &ctx.config;
    let mut reports = Vec::new();
    let mut gateways = Vec::new();
    for &bucket in &config.buckets {
        let graphs: Vec<_> = generate_instances(
            TaskKind::Cc,
            bucket,
            config.probes.count,
            config.seed ^ PROBE_SEED,
            &config.generation,
        )?
        .iter()
        .filter_map(|i| i.primary_graph().cloned())
        .collect();
        for &prop in &config.probes.properties {
            let gw = ctx.gateway("probes", prop.as_str(), None)?;
            reports.push(run_probe(&gw, &graphs, config.probes.format, prop, bucket.as_str())?);
            gateways.push(gw);
        }
    }
    Ok((reports, gateways))
}

pub fn run_baseline(config: RunConfig) -> Result<()> {
    let ctx = Ctx::new(config)?;
    let data = ctx.load_data()?;
    let dir = ctx.dir(BASELINE);
    let outputs = par::map_with_workers(&ctx.config.tasks, ctx.config.workers, |&task| {
        baseline_task(&ctx, task, &data)
    });
    let mut outcomes = Vec::new();
    let mut gateways = Vec::new();
    for (&task, output) in ctx.config.tasks.iter().zip(outputs) {
        let written = output.and_then(|out| {
            for (bucket, preds, meta) in &out.cells {
                artifacts::write_predictions(&artifacts::predictions_path(&dir, task, bucket.as_str()), preds)?;
                artifacts::write_json(&artifacts::meta_path(&dir, task, bucket.as_str()), meta)?;
                log::info!("{task}/{bucket}: {} calls", meta.llm_calls);
            }
            gateways.extend(out.gateways);
            Ok(())
        });
        outcomes.push((task, written));
    }
    if !ctx.config.probes.properties.is_empty() {
        let (reports, probe_gateways) = run_probes(&ctx)?;
        artifacts::write_json(&dir.join("probes.json"), &reports)?;
        artifacts::write_text(&dir.join("probes.csv"), &baseline::render_probe_csv(&reports))?;
        gateways.extend(probe_gateways);
    }
    ctx.save_sessions(BASELINE, &gateways.iter().collect::<Vec<_>>())?;
    finish(outcomes)
}

/// Joins every prediction file present under the method directories with
/// the ground truth and writes `eval/reports.json`.
pub fn eval(config: RunConfig) -> Result<Vec<EvalReport>> {
    config.validate()?;
    let data_dir = config.out.join(DATA);
    let mut reports = Vec::new();
    for method_dir in artifacts::METHOD_DIRS {
        let dir = config.out.join(method_dir);
        for &task in &config.tasks {
            for &bucket in &config.buckets {
                let preds_path = artifacts::predictions_path(&dir, task, bucket.as_str());
                if !preds_path.exists() {
                    continue;
                }
                let truths_path = dataset::truths_path(&data_dir, task, bucket.as_str());
                if !truths_path.exists() {
                    return Err(CliError::Missing {
                        what: "ground truth",
                        path: truths_path,
                        command: "gen-data",
                    });
                }
                let truths: Vec<_> = dataset::read_truths(&truths_path)?
                    .into_iter()
                    .map(|t| t.answer)
                    .collect();
                let preds = artifacts::read_predictions(&preds_path, truths.len())?;
                let meta: MethodMeta = artifacts::read_json(&artifacts::meta_path(&dir, task, bucket.as_str()))?;
                reports.push(EvalReport::build(
                    task,
                    meta.method,
                    bucket.as_str(),
                    &preds,
                    &truths,
                    meta.llm_calls,
                    meta.mean_latency_s,
                )?);
            }
        }
    }
    if reports.is_empty() {
        return Err(CliError::Missing {
            what: "predictions",
            path: config.out.clone(),
            command: "run-pie` or `graphcode run-baseline",
        });
    }
    artifacts::write_json(&config.out.join(EVAL).join("reports.json"), &reports)?;
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Csv,
    Json,
    #[default]
    All,
}

/// Renders `eval/reports.json` (and probe results, if any) into
/// `report/report.csv` and `report/report.json`. Returns the CSV text.
pub fn report(config: RunConfig, kind: ReportKind) -> Result<String> {
    let path = config.out.join(EVAL).join("reports.json");
    if !path.exists() {
        return Err(CliError::Missing {
            what: "evaluation",
            path,
            command: "eval",
        });
    }
    let reports: Vec<EvalReport> = artifacts::read_json(&path)?;
    let probes_path = config.out.join(BASELINE).join("probes.json");
    let probes: Vec<ProbeReport> = if probes_path.exists() {
        artifacts::read_json(&probes_path)?
    } else {
        Vec::new()
    };
    let mut csv = render_csv(&reports);
    for p in &probes {
        csv.push_str(&p.csv_row());
        csv.push('\n');
    }
    let dir = config.out.join(REPORT);
    if kind != ReportKind::Json {
        artifacts::write_text(&dir.join("report.csv"), &csv)?;
    }
    if kind != ReportKind::Csv {
        artifacts::write_text(&dir.join("report.json"), &render_json(&reports))?;
        if !probes.is_empty() {
            artifacts::write_json(&dir.join("probes.json"), &probes)?;
        }
    }
    Ok(csv)
}
