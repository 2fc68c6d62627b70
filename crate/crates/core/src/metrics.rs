//! Accuracy, feasible rate and approximation ratio, plus report emission.
//!
//! Absent predictions (errors, timeouts, unparseable answers) count as wrong
//! for accuracy and infeasible for the feasible rate, and are left out of the
//! approximation-ratio mean.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::task::{Answer, Objective, TaskKind};

fn check_lengths(predictions: usize, truths: usize) -> Result<()> {
    if predictions != truths {
        return Err(Error::LengthMismatch {
            predictions,
            truths,
        });
    }
    if truths == 0 {
        return Err(Error::Precondition("metrics need at least one instance".into()));
    }
    Ok(())
}

pub fn accuracy(preds: &[Option<Answer>], truths: &[Answer]) -> Result<f64> {
    check_lengths(preds.len(), truths.len())?;
    let hits = preds
        .iter()
        .zip(truths)
        .filter(|(p, t)| p.as_ref().is_some_and(|p| p.matches(t)))
        .count();
    Ok(hits as f64 / truths.len() as f64)
}

/// Whether `pred` lies on the allowed side of `truth`: at most the optimum
/// for maximization tasks, at least it for minimization tasks.
pub fn is_feasible(task: TaskKind, pred: &Answer, truth: &Answer) -> Result<bool> {
    let objective = task.objective().ok_or(Error::NotApplicable {
        metric: "feasible rate",
        task,
    })?;
    Ok(match (pred.as_int(), truth.as_int()) {
        (Some(p), Some(t)) => match objective {
            Objective::Maximize => p <= t,
            Objective::Minimize => p >= t,
        },
        _ => false,
    })
}

pub fn feasible_rate(task: TaskKind, preds: &[Option<Answer>], truths: &[Answer]) -> Result<f64> {
    if task.objective().is_none() {
        return Err(Error::NotApplicable {
            metric: "feasible rate",
            task,
        });
    }
    check_lengths(preds.len(), truths.len())?;
    let mut feasible = 0;
    for (p, t) in preds.iter().zip(truths) {
        if let Some(p) = p {
            feasible += usize::from(is_feasible(task, p, t)?);
        }
    }
    Ok(feasible as f64 / truths.len() as f64)
}

/// Mean of |p - p*| / |p*| over defined integer predictions. `None` when no
/// prediction is defined.
pub fn approximation_ratio(preds: &[Option<Answer>], truths: &[Answer]) -> Result<Option<f64>> {
    check_lengths(preds.len(), truths.len())?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for (index, (p, t)) in preds.iter().zip(truths).enumerate() {
        let t = t.as_int().ok_or_else(|| {
            Error::Precondition(format!("ground truth at index {index} is not an integer"))
        })?;
        if t == 0 {
            return Err(Error::UndefinedRatio { index });
        }
        if let Some(p) = p.as_ref().and_then(Answer::as_int) {
            sum += (p - t).unsigned_abs() as f64 / t.unsigned_abs() as f64;
            count += 1;
        }
    }
    Ok((count > 0).then(|| sum / count as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub index: usize,
    pub prediction: Option<Answer>,
    pub truth: Answer,
    pub correct: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: TaskKind,
    pub method: String,
    pub bucket: String,
    #[serde(rename = "T")]
    pub t: usize,
    pub accuracy: f64,
    pub feasible_rate: Option<f64>,
    pub approximation_ratio: Option<f64>,
    pub llm_calls: u64,
    pub mean_latency_s: Option<f64>,
    pub rows: Vec<InstanceRow>,
}

/// One prediction slot: the answer if the method produced one, otherwise
/// the reason it did not.
pub type Prediction = std::result::Result<Answer, String>;

impl EvalReport {
    pub fn build(
        task: TaskKind,
        method: impl Into<String>,
        bucket: impl Into<String>,
        predictions: &[Prediction],
        truths: &[Answer],
        llm_calls: u64,
        mean_latency_s: Option<f64>,
    ) -> Result<EvalReport> {
        let preds: Vec<Option<Answer>> = predictions.iter().map(|p| p.as_ref().ok().cloned()).collect();
        let accuracy = accuracy(&preds, truths)?;
        let np = task.is_np_complete();
        let (feasible_rate, approximation_ratio) = if np {
            (
                Some(feasible_rate(task, &preds, truths)?),
                approximation_ratio(&preds, truths)?,
            )
        } else {
            (None, None)
        };
        let rows = predictions
            .iter()
            .zip(truths)
            .enumerate()
            .map(|(index, (p, t))| {
                let prediction = p.as_ref().ok().cloned();
                let correct = prediction.as_ref().is_some_and(|p| p.matches(t));
                let feasible = np.then(|| {
                    prediction
                        .as_ref()
                        .is_some_and(|p| is_feasible(task, p, t).unwrap_or(false))
                });
                InstanceRow {
                    index,
                    prediction,
                    truth: t.clone(),
                    correct,
                    feasible,
                    error: p.as_ref().err().cloned(),
                }
            })
            .collect();
        Ok(EvalReport {
            task,
            method: method.into(),
            bucket: bucket.into(),
            t: truths.len(),
            accuracy,
            feasible_rate,
            approximation_ratio,
            llm_calls,
            mean_latency_s,
            rows,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

pub const CSV_HEADER: &str = "task,method,bucket,T,accuracy,FR,AR,llm_calls,mean_latency_s";

/// Fraction rendered as a percentage with one decimal, e.g. `1.0 -> "100.0"`.
pub fn percent(x: f64) -> String {
    format!("{:.1}", x * 100.0)
}

pub fn render_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.task.id(),
            csv_field(&r.method),
            csv_field(&r.bucket),
            r.t,
            percent(r.accuracy),
            r.feasible_rate.map(percent).unwrap_or_default(),
            r.approximation_ratio.map(|a| format!("{a:.4}")).unwrap_or_default(),
            r.llm_calls,
            r.mean_latency_s.map(|l| format!("{l:.3}")).unwrap_or_default(),
        );
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Summary JSON without per-instance rows.
pub fn render_json(reports: &[EvalReport]) -> String {
    #[derive(Serialize)]
    struct Summary<'a> {
        task: TaskKind,
        method: &'a str,
        bucket: &'a str,
        #[serde(rename = "T")]
        t: usize,
        accuracy: f64,
        feasible_rate: Option<f64>,
        approximation_ratio: Option<f64>,
        llm_calls: u64,
        mean_latency_s: Option<f64>,
    }
    let rows: Vec<Summary> = reports
        .iter()
        .map(|r| Summary {
            task: r.task,
            method: &r.method,
            bucket: &r.bucket,
            t: r.t,
            accuracy: r.accuracy,
            feasible_rate: r.feasible_rate,
            approximation_ratio: r.approximation_ratio,
            llm_calls: r.llm_calls,
            mean_latency_s: r.mean_latency_s,
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("summary serializes");
    s.push('\n');
    s
}

pub fn emit_report(reports: &[EvalReport], format: ReportFormat, path: &Path) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::Precondition("no reports to emit".into()));
    }
    let text = match format {
        ReportFormat::Csv => render_csv(reports),
        ReportFormat::Json => render_json(reports),
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<Answer> {
        xs.iter().map(|&x| Answer::Int(x)).collect()
    }

    fn some(xs: &[i64]) -> Vec<Option<Answer>> {
        xs.iter().map(|&x| Some(Answer::Int(x))).collect()
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&some(&[2, 3, 4]), &ints(&[2, 9, 4])).unwrap(), 2.0 / 3.0);
        assert_eq!(accuracy(&some(&[1, 2]), &ints(&[1, 2])).unwrap(), 1.0);
        assert_eq!(
            accuracy(&[None, Some(Answer::Int(5))], &ints(&[5, 5])).unwrap(),
            0.5
        );
        assert!(matches!(
            accuracy(&some(&[1]), &ints(&[1, 2])),
            Err(Error::LengthMismatch { .. })
        ));
        let cn = [Some(Answer::List(vec![3, 2]))];
        assert_eq!(accuracy(&cn, &[Answer::list(vec![2, 3])]).unwrap(), 1.0);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(approximation_ratio(&some(&[10]), &ints(&[8])).unwrap(), Some(0.25));
        assert_eq!(approximation_ratio(&some(&[8, 8]), &ints(&[8, 8])).unwrap(), Some(0.0));
        assert_eq!(
            approximation_ratio(&some(&[10, 8]), &ints(&[8, 8])).unwrap(),
            Some(0.125)
        );
        assert_eq!(
            approximation_ratio(&[None, Some(Answer::Int(10))], &ints(&[3, 8])).unwrap(),
            Some(0.25)
        );
        assert!(matches!(
            approximation_ratio(&some(&[1]), &ints(&[0])),
            Err(Error::UndefinedRatio { index: 0 })
        ));
    }

    #[test]
    fn feasible_examples() {
        assert_eq!(feasible_rate(TaskKind::Mis, &some(&[3, 5]), &ints(&[4, 4])).unwrap(), 0.5);
        assert_eq!(feasible_rate(TaskKind::Tsp, &some(&[13]), &ints(&[14])).unwrap(), 0.0);
        assert_eq!(feasible_rate(TaskKind::Mvc, &some(&[3, 4]), &ints(&[3, 4])).unwrap(), 1.0);
        assert_eq!(feasible_rate(TaskKind::Mcs, &[None], &ints(&[4])).unwrap(), 0.0);
        assert!(matches!(
            feasible_rate(TaskKind::Cn, &some(&[1]), &ints(&[1])),
            Err(Error::NotApplicable { .. })
        ));
    }

    #[test]
    fn csv_rendering() {
        let preds: Vec<Prediction> = vec![Ok(Answer::Int(4)), Err("timeout".into())];
        let r = EvalReport::build(TaskKind::Mvc, "pie", "small", &preds, &ints(&[4, 5]), 2, Some(0.5))
            .unwrap();
        let csv = render_csv(&[r.clone()]);
        assert_eq!(
            csv,
            format!("{CSV_HEADER}\nmvc,pie,small,2,50.0,50.0,0.0000,2,0.500\n")
        );
        assert_eq!(csv, render_csv(&[r]));
        assert_eq!(percent(1.0), "100.0");
    }
}
