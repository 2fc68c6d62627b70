//! Benchmark generation, labeling and JSON Lines storage.
//!
//! Every instance is drawn from its own RNG stream seeded from
//! `(seed, task, bucket, index)`, so a dataset is identical whether it is
//! generated sequentially or in parallel, and growing `count` only appends.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{sample_graph, sample_weighted_complete, EdgeDensity, SizeBucket};
use crate::par;
use crate::solvers::{ground_truth, GroundTruthPolicy};
use crate::task::{
    canonical_instance_bytes, decode_instance, GroundTruth, TaskInstance, TaskKind, TruthRecord,
};

pub const D_SMALL_SIZE: usize = 10;
/// Node range for the validation suite; stays inside the exhaustive oracles.
pub const D_SMALL_NODES: RangeInclusive<usize> = 3..=9;
const D_SMALL_MCS_NODES: RangeInclusive<usize> = 3..=7;
const D_SMALL_SEED: u64 = 0x5eed_d5a1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub density: EdgeDensity,
    /// Inclusive TSP weight range.
    pub weight_min: u64,
    pub weight_max: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            density: EdgeDensity::LogDegree,
            weight_min: 1,
            weight_max: 100,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        self.density.validate()?;
        if self.weight_min < 1 || self.weight_min > self.weight_max {
            return Err(Error::Config(format!(
                "weight range {}..={} must be nonempty and positive",
                self.weight_min, self.weight_max
            )));
        }
        Ok(())
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for instance `index` of `(task, bucket)`.
pub fn instance_seed(seed: u64, task: TaskKind, bucket: &str, index: usize) -> u64 {
    let mut h = mix(seed);
    for b in task.id().bytes().chain(*b"/").chain(bucket.bytes()) {
        h = mix(h ^ u64::from(b));
    }
    mix(h ^ index as u64)
}

/// Draws one instance with node counts in `nodes`. SP and GD graphs are
/// connected; MVC graphs have at least one edge.
pub fn sample_instance(
    task: TaskKind,
    nodes: RangeInclusive<usize>,
    config: &GenConfig,
    seed: u64,
) -> Result<TaskInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = config.density;
    match task {
        TaskKind::Cn | TaskKind::Sp => {
            let connected = task == TaskKind::Sp;
            let lo = (*nodes.start()).max(2);
            let g = sample_graph(&mut rng, lo..=*nodes.end().max(&lo), density, connected);
            let n = g.node_count();
            let u = rng.gen_range(0..n);
            let v = (u + rng.gen_range(1..n)) % n;
            TaskInstance::query(task, g, u, v)
        }
        TaskKind::Cc | TaskKind::Mis | TaskKind::Mcp => {
            TaskInstance::graph(task, sample_graph(&mut rng, nodes, density, false))
        }
        TaskKind::Gd => TaskInstance::graph(task, sample_graph(&mut rng, nodes, density, true)),
        TaskKind::Mvc => loop {
            let g = sample_graph(&mut rng, nodes.clone(), density, false);
            if g.edge_count() > 0 {
                break TaskInstance::graph(task, g);
            }
        },
        TaskKind::Mcs => {
            let g1 = sample_graph(&mut rng, nodes.clone(), density, false);
            let g2 = sample_graph(&mut rng, nodes, density, false);
            TaskInstance::graph_pair(g1, g2)
        }
        TaskKind::Tsp => {
            let n = rng.gen_range(nodes).max(3);
            let w = sample_weighted_complete(&mut rng, n, config.weight_min..=config.weight_max)?;
            TaskInstance::weighted(w)
        }
    }
}

pub fn generate_instances(
    task: TaskKind,
    bucket: SizeBucket,
    count: usize,
    seed: u64,
    config: &GenConfig,
) -> Result<Vec<TaskInstance>> {
    config.validate()?;
    let indices: Vec<usize> = (0..count).collect();
    par::map(&indices, |&i| {
        sample_instance(
            task,
            bucket.node_range(),
            config,
            instance_seed(seed, task, bucket.as_str(), i),
        )
    })
    .into_iter()
    .collect()
}

/// Reference answers for a batch, computed in parallel.
pub fn label(instances: &[TaskInstance], policy: &GroundTruthPolicy) -> Result<Vec<GroundTruth>> {
    par::map(instances, |inst| ground_truth(inst, policy))
        .into_iter()
        .collect()
}

/// Sequential twin of [`label`].
pub fn label_seq(instances: &[TaskInstance], policy: &GroundTruthPolicy) -> Result<Vec<GroundTruth>> {
    par::map_seq(instances, |inst| ground_truth(inst, policy))
        .into_iter()
        .collect()
}

/// The fixed validation suite for the generation loop: ten small instances
/// labeled by the exhaustive oracles.
pub fn d_small(task: TaskKind, config: &GenConfig) -> Result<Vec<(TaskInstance, GroundTruth)>> {
    let nodes = if task == TaskKind::Mcs {
        D_SMALL_MCS_NODES
    } else {
        D_SMALL_NODES
    };
    let instances: Vec<TaskInstance> = (0..D_SMALL_SIZE)
        .map(|i| sample_instance(task, nodes.clone(), config, instance_seed(D_SMALL_SEED, task, "dsmall", i)))
        .collect::<Result<_>>()?;
    let truths = label(&instances, &GroundTruthPolicy::default())?;
    Ok(instances.into_iter().zip(truths).collect())
}

pub fn instances_path(dir: &Path, task: TaskKind, bucket: &str) -> PathBuf {
    dir.join(format!("{}_{bucket}.jsonl", task.id()))
}

pub fn truths_path(dir: &Path, task: TaskKind, bucket: &str) -> PathBuf {
    dir.join(format!("{}_{bucket}.truth.jsonl", task.id()))
}

fn create(path: &Path) -> Result<BufWriter<std::fs::File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_instances(path: &Path, instances: &[TaskInstance]) -> Result<()> {
    let mut w = create(path)?;
    for inst in instances {
        w.write_all(&canonical_instance_bytes(inst))
            .and_then(|_| w.write_all(b"\n"))
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

pub fn read_instances(path: &Path) -> Result<Vec<TaskInstance>> {
    read_lines(path)?
        .into_iter()
        .map(|(no, line)| {
            decode_instance(line.as_bytes()).map_err(|e| {
                Error::InvalidInstance(format!("{}:{no}: {e}", path.display()))
            })
        })
        .collect()
}

pub fn write_truths(path: &Path, truths: &[GroundTruth]) -> Result<()> {
    let mut w = create(path)?;
    for (index, t) in truths.iter().enumerate() {
        let record = TruthRecord {
            index,
            answer: t.answer.clone(),
            provenance: t.provenance,
        };
        serde_json::to_writer(&mut w, &record).map_err(|e| Error::json(path.display().to_string(), e))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads truth records and orders them by index; every index in
/// `0..len` must appear exactly once.
pub fn read_truths(path: &Path) -> Result<Vec<GroundTruth>> {
    let mut records: Vec<TruthRecord> = read_lines(path)?
        .into_iter()
        .map(|(no, line)| {
            serde_json::from_str(&line).map_err(|e| Error::json(format!("{}:{no}", path.display()), e))
        })
        .collect::<Result<_>>()?;
    records.sort_by_key(|r| r.index);
    let missing: Vec<usize> = (0..records.len())
        .filter(|i| records.get(*i).map(|r| r.index) != Some(*i))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingIndices(missing));
    }
    Ok(records
        .into_iter()
        .map(|r| GroundTruth {
            answer: r.answer,
            provenance: r.provenance,
        })
        .collect())
}
