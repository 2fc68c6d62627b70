//! On-disk layout of a run directory.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use graphcode::metrics::Prediction;
use graphcode::{Answer, TaskKind};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DATA: &str = "data";
pub const PIE: &str = "pie";
pub const BASELINE: &str = "baseline";
pub const EVAL: &str = "eval";
pub const REPORT: &str = "report";

/// Method directories scanned by `eval`, in report order.
pub const METHOD_DIRS: [&str; 2] = [PIE, BASELINE];

pub fn predictions_path(dir: &Path, task: TaskKind, bucket: &str) -> PathBuf {
    dir.join(format!("{}_{bucket}.pred.jsonl", task.id()))
}

pub fn meta_path(dir: &Path, task: TaskKind, bucket: &str) -> PathBuf {
    dir.join(format!("{}_{bucket}.meta.json", task.id()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub index: usize,
    pub prediction: Option<Answer>,
    pub error: Option<String>,
}

/// Cost figures for one (method, task, bucket) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodMeta {
    pub method: String,
    pub task: TaskKind,
    pub bucket: String,
    pub llm_calls: u64,
    pub mean_latency_s: Option<f64>,
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    ensure_parent(path)?;
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::json(path.display().to_string(), e))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::json(path.display().to_string(), e))
}

pub fn write_predictions(path: &Path, predictions: &[Prediction]) -> Result<()> {
    ensure_parent(path)?;
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for (index, p) in predictions.iter().enumerate() {
        let record = PredictionRecord {
            index,
            prediction: p.as_ref().ok().cloned(),
            error: p.as_ref().err().cloned(),
        };
        serde_json::to_writer(&mut w, &record).map_err(|e| CliError::json(path.display().to_string(), e))?;
        w.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads prediction records and joins them onto `0..expected`. Missing
/// indices are an error; so are duplicates and indices past the end.
pub fn read_predictions(path: &Path, expected: usize) -> Result<Vec<Prediction>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut by_index = BTreeMap::new();
    for (no, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let context = || format!("{}:{}", path.display(), no + 1);
        let r: PredictionRecord = serde_json::from_str(&line).map_err(|e| CliError::json(context(), e))?;
        if r.index >= expected {
            return Err(graphcode::Error::Precondition(format!(
                "{}: index {} but the dataset has {expected} instances",
                context(),
                r.index
            ))
            .into());
        }
        let p: Prediction = match (r.prediction, r.error) {
            (Some(a), _) => Ok(a),
            (None, e) => Err(e.unwrap_or_default()),
        };
        if by_index.insert(r.index, p).is_some() {
            return Err(
                graphcode::Error::Precondition(format!("{}: duplicate index {}", context(), r.index)).into(),
            );
        }
    }
    let missing: Vec<usize> = (0..expected).filter(|i| !by_index.contains_key(i)).collect();
    if !missing.is_empty() {
        return Err(graphcode::Error::MissingIndices(missing).into());
    }
    Ok(by_index.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictions_round_trip_and_join_by_index() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.jsonl");
        let preds: Vec<Prediction> = vec![Ok(Answer::Int(3)), Err("timeout".into()), Ok(Answer::list(vec![2, 1]))];
        write_predictions(&path, &preds).unwrap();
        assert_eq!(read_predictions(&path, 3).unwrap(), preds);

        // shuffled lines still join
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        lines.reverse();
        std::fs::write(&path, lines.join("\n")).unwrap();
        assert_eq!(read_predictions(&path, 3).unwrap(), preds);

        match read_predictions(&path, 5) {
            Err(CliError::Core(graphcode::Error::MissingIndices(m))) => assert_eq!(m, [3, 4]),
            other => panic!("{other:?}"),
        }
        assert!(read_predictions(&path, 2).is_err());
    }
}
