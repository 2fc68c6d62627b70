use std::path::{Path, PathBuf};

use graphcode::baseline::{BaselineStyle, GraphReadingProperty};
use graphcode::dataset::GenConfig;
use graphcode::llm::{CompletionParams, RemoteConfig};
use graphcode::orchestrator::TrialBudget;
use graphcode::prompts::PseudocodeVariant;
use graphcode::sandbox::ExecLimits;
use graphcode::solvers::GroundTruthPolicy;
use graphcode::{SerializationFormat, SizeBucket, TaskKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Root of all artifacts.
    pub out: PathBuf,
    pub tasks: Vec<TaskKind>,
    pub buckets: Vec<SizeBucket>,
    /// Instances per (task, bucket).
    pub count: usize,
    pub seed: u64,
    /// Tasks processed concurrently.
    pub workers: usize,
    /// Interpreters run concurrently inside one task.
    pub sandbox_workers: usize,
    pub python: PathBuf,
    /// Save every model exchange to `<command>/session.json`.
    pub record: bool,
    pub generation: GenConfig,
    pub truth: GroundTruthPolicy,
    pub model: CompletionParams,
    pub backend: BackendConfig,
    pub budget: TrialBudget,
    pub limits: ExecLimits,
    pub pie: PieConfig,
    pub baseline: BaselineConfig,
    pub probes: ProbeConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            out: PathBuf::from("runs/default"),
            tasks: TaskKind::ALL.to_vec(),
            buckets: SizeBucket::ALL.to_vec(),
            count: 50,
            seed: 0,
            workers: 1,
            sandbox_workers: 4,
            python: PathBuf::from("python3"),
            record: false,
            generation: GenConfig::default(),
            truth: GroundTruthPolicy::default(),
            model: CompletionParams::default(),
            backend: BackendConfig::default(),
            budget: TrialBudget::default(),
            limits: ExecLimits::default(),
            pie: PieConfig::default(),
            baseline: BaselineConfig::default(),
            probes: ProbeConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BackendConfig {
    /// Canned responses from a JSON script file.
    Scripted { script: PathBuf },
    /// Responses recorded by an earlier run.
    Replay { session: PathBuf },
    Remote(RemoteConfig),
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig::Remote(RemoteConfig::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PieConfig {
    pub variant: PseudocodeVariant,
    /// Let the model pick among the available pseudocode variants first.
    pub select_pseudocode: bool,
}

impl Default for PieConfig {
    fn default() -> Self {
        PieConfig {
            variant: PseudocodeVariant::Full,
            select_pseudocode: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub style: BaselineStyle,
    pub format: SerializationFormat,
    /// Concurrent calls per task. Keep at 1 with a scripted backend.
    pub workers: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            style: BaselineStyle::Generic,
            format: SerializationFormat::EdgeList,
            workers: 1,
        }
    }
}

/// Graph-reading probes, run by `run-baseline` when `properties` is nonempty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub properties: Vec<GraphReadingProperty>,
    pub format: SerializationFormat,
    pub count: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            properties: Vec::new(),
            format: SerializationFormat::EdgeList,
            count: 20,
        }
    }
}

impl RunConfig {
    /// Reads a TOML file. Relative script and session paths are taken
    /// relative to the file.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: RunConfig = toml::from_str(&text).map_err(|e| CliError::Toml {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        match &mut config.backend {
            BackendConfig::Scripted { script: p } | BackendConfig::Replay { session: p } if p.is_relative() => {
                *p = base.join(&*p);
            }
            _ => {}
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Core(graphcode::Error::Config(msg)));
        if self.tasks.is_empty() {
            return bad("`tasks` is empty".into());
        }
        if self.buckets.is_empty() {
            return bad("`buckets` is empty".into());
        }
        if self.count == 0 {
            return bad("`count` must be at least 1".into());
        }
        if self.workers == 0 || self.sandbox_workers == 0 || self.baseline.workers == 0 {
            return bad("worker counts must be at least 1".into());
        }
        if !self.probes.properties.is_empty() && self.probes.count == 0 {
            return bad("`probes.count` must be at least 1".into());
        }
        self.generation.validate()?;
        self.budget.validate()?;
        self.limits.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let text = toml::to_string(&RunConfig::default()).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.tasks, TaskKind::ALL.to_vec());
        assert_eq!(back.backend, BackendConfig::default());
    }

    #[test]
    fn sections_parse() {
        let c: RunConfig = toml::from_str(
            r#"
            tasks = ["cc", "mvc"]
            buckets = ["small"]
            count = 3
            [backend]
            kind = "scripted"
            script = "s.json"
            [budget]
            k = 2
            r = 1
            [baseline]
            style = "talk_like_a_graph"
            "#,
        )
        .unwrap();
        assert_eq!(c.tasks, [TaskKind::Cc, TaskKind::Mvc]);
        assert_eq!(c.budget, TrialBudget { k: 2, r: 1 });
        assert_eq!(c.baseline.style, BaselineStyle::TalkLikeAGraph);
        assert!(matches!(c.backend, BackendConfig::Scripted { .. }));
        c.validate().unwrap();
    }

    #[test]
    fn remote_backend_keys_sit_beside_kind() {
        let c: RunConfig = toml::from_str(
            "[backend]\nkind = \"remote\"\nendpoint = \"http://localhost:8000/v1\"\nattempts = 1\n",
        )
        .unwrap();
        match c.backend {
            BackendConfig::Remote(r) => {
                assert_eq!(r.endpoint, "http://localhost:8000/v1");
                assert_eq!(r.attempts, 1);
                assert_eq!(r.api_key_env, "OPENAI_API_KEY");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("tasks = [\"cc\"]\nbudgte = 3\n").is_err());
        assert!(toml::from_str::<RunConfig>("tasks = [\"xx\"]\n").is_err());
    }
}
