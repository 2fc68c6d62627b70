//! The trial-and-error generation loop.
//!
//! Each outer trial starts a fresh transcript from the prompt bundle. A
//! candidate that fails its test suite is sent back with the failure message
//! up to `R` times; the first candidate that passes ends the run. If none
//! pass within `K` trials the best final candidate is returned.

use std::cmp::Ordering;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::llm::{ChatMessage, Gateway};
use crate::prompts::{self, PromptBundle, PromptLibrary, PseudocodeEntry};
use crate::sandbox::{ExecOutcome, Sandbox, SuiteReport};
use crate::task::{Answer, GroundTruth, TaskInstance, TaskKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialBudget {
    /// Outer trials.
    pub k: u32,
    /// Repair rounds per trial.
    pub r: u32,
}

impl Default for TrialBudget {
    fn default() -> Self {
        TrialBudget { k: 10, r: 5 }
    }
}

impl TrialBudget {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("trial budget K must be at least 1".into()));
        }
        Ok(())
    }

    /// Upper bound on completions one generation run can make.
    pub fn max_calls(&self) -> u64 {
        u64::from(self.k) * (1 + u64::from(self.r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateCode {
    /// Extracted source; absent when the final response of the trial held
    /// no function definition.
    pub source: Option<String>,
    pub trial: u32,
    pub repairs: u32,
    pub report: Option<SuiteReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub task: TaskKind,
    pub passed: bool,
    pub best: CandidateCode,
    pub candidates: Vec<CandidateCode>,
    pub llm_calls: u64,
    pub transcripts: Vec<Vec<ChatMessage>>,
}

impl GenerationResult {
    /// The selected source. Always present: a result is only built when at
    /// least one candidate has code.
    pub fn code(&self) -> &str {
        self.best.source.as_deref().expect("best candidate has code")
    }
}

const EXTRACTION_FEEDBACK: &str =
    "No Python function definition was found in the response. Output only Python functions starting with def.";

fn is_code_start(line: &str) -> bool {
    ["def ", "async def ", "class ", "import ", "from ", "@"]
        .iter()
        .any(|p| line.starts_with(p))
}

fn is_module_level_code(line: &str) -> bool {
    let assignment = Regex::new(r"^[A-Za-z_][A-Za-z0-9_]*(\s*,\s*[A-Za-z_][A-Za-z0-9_]*)*\s*=[^=]")
        .expect("valid regex");
    is_code_start(line)
        || line.starts_with('#')
        || line.starts_with("if __name__")
        || assignment.is_match(line)
}

/// Pulls Python source out of a model response. Fenced blocks win when any
/// contains a `def`; otherwise the text from the first definition (with any
/// import lines directly above it) up to the first prose line.
pub fn extract_code(response: &str) -> Result<String> {
    let fence = Regex::new(r"(?ms)^[ \t]*```[A-Za-z0-9_+-]*[ \t]*\n(.*?)^[ \t]*```").expect("valid regex");
    let blocks: Vec<&str> = fence
        .captures_iter(response)
        .map(|c| c.get(1).expect("group").as_str())
        .filter(|b| b.lines().any(|l| l.trim_start().starts_with("def ")))
        .collect();
    if !blocks.is_empty() {
        let joined = blocks
            .iter()
            .map(|b| b.trim_end())
            .collect::<Vec<_>>()
            .join("\n\n");
        return Ok(format!("{joined}\n"));
    }

    let lines: Vec<&str> = response.lines().collect();
    let Some(def_at) = lines.iter().position(|l| l.starts_with("def ")) else {
        return Err(Error::Extraction);
    };
    let mut start = def_at;
    while start > 0 {
        let prev = lines[start - 1];
        if prev.starts_with("import ") || prev.starts_with("from ") || prev.trim().is_empty() {
            start -= 1;
        } else {
            break;
        }
    }
    let mut end = def_at + 1;
    while end < lines.len() {
        let l = lines[end];
        let indented = l.starts_with([' ', '\t']);
        if l.trim().is_empty() || indented || is_module_level_code(l) {
            end += 1;
        } else {
            break;
        }
    }
    let body = lines[start..end].join("\n");
    Ok(format!("{}\n", body.trim_matches('\n').trim_end()))
}

/// Orders candidates best-first: polynomial by accuracy, NP-complete by
/// feasible rate then approximation ratio (missing ratio last). Ties keep
/// trial order.
fn compare(task: TaskKind, a: &SuiteReport, b: &SuiteReport) -> Ordering {
    let acc = b.score.accuracy.total_cmp(&a.score.accuracy);
    if !task.is_np_complete() {
        return acc;
    }
    let fr = b
        .score
        .feasible_rate
        .unwrap_or(0.0)
        .total_cmp(&a.score.feasible_rate.unwrap_or(0.0));
    let ar = a
        .score
        .approximation_ratio
        .unwrap_or(f64::INFINITY)
        .total_cmp(&b.score.approximation_ratio.unwrap_or(f64::INFINITY));
    fr.then(ar)
}

pub fn select_best(task: TaskKind, candidates: &[CandidateCode]) -> Option<&CandidateCode> {
    let mut scored: Vec<(&CandidateCode, &SuiteReport)> = candidates
        .iter()
        .filter(|c| c.source.is_some())
        .filter_map(|c| c.report.as_ref().map(|r| (c, r)))
        .collect();
    // stable sort: equal scores keep the earlier trial first
    scored.sort_by(|(_, a), (_, b)| compare(task, a, b));
    scored.first().map(|(c, _)| *c)
}

pub struct Generator<'a> {
    pub llm: &'a Gateway,
    pub sandbox: &'a Sandbox,
    pub budget: TrialBudget,
}

struct Evaluated {
    source: Option<String>,
    report: Option<SuiteReport>,
    feedback: Option<String>,
}

impl Generator<'_> {
    fn evaluate(
        &self,
        task: TaskKind,
        response: &str,
        suite: &[(TaskInstance, GroundTruth)],
        truths: &[Answer],
    ) -> Result<Evaluated> {
        let source = match extract_code(response) {
            Ok(s) => s,
            Err(Error::Extraction) => {
                return Ok(Evaluated {
                    source: None,
                    report: None,
                    feedback: Some(EXTRACTION_FEEDBACK.into()),
                })
            }
            Err(e) => return Err(e),
        };
        let report = self.sandbox.run_suite(&source, suite)?;
        let feedback = report.feedback(task, truths);
        Ok(Evaluated {
            source: Some(source),
            report: Some(report),
            feedback,
        })
    }

    /// Runs the loop for `bundle.task` against `d_small`.
    pub fn generate_code(
        &self,
        bundle: &PromptBundle,
        d_small: &[(TaskInstance, GroundTruth)],
    ) -> Result<GenerationResult> {
        self.budget.validate()?;
        let task = bundle.task;
        if d_small.is_empty() {
            return Err(Error::Precondition("d_small is empty".into()));
        }
        if let Some((inst, _)) = d_small.iter().find(|(i, _)| i.task() != task) {
            return Err(Error::Precondition(format!(
                "d_small holds a {} instance for task {task}",
                inst.task()
            )));
        }
        let truths: Vec<Answer> = d_small.iter().map(|(_, t)| t.answer.clone()).collect();
        let mut calls = 0u64;
        let mut candidates = Vec::new();
        let mut transcripts = Vec::new();

        for trial in 0..self.budget.k {
            let mut transcript = bundle.messages();
            let (response, _) = self.llm.complete(&transcript)?;
            calls += 1;
            let mut current = self.evaluate(task, &response, d_small, &truths)?;
            let mut last_response = response;
            let mut repairs = 0;
            while let Some(feedback) = current.feedback.clone() {
                if repairs >= self.budget.r {
                    break;
                }
                let prev = current.source.as_deref().unwrap_or(&last_response);
                transcript.extend(prompts::repair_messages(prev, &feedback)?);
                let (response, _) = self.llm.complete(&transcript)?;
                calls += 1;
                repairs += 1;
                current = self.evaluate(task, &response, d_small, &truths)?;
                last_response = response;
            }
            transcript.push(ChatMessage::assistant(
                current.source.clone().unwrap_or(last_response),
            ));
            transcripts.push(transcript);
            let passed = current.report.as_ref().is_some_and(|r| r.all_pass);
            let candidate = CandidateCode {
                source: current.source,
                trial,
                repairs,
                report: current.report,
            };
            log::info!(
                "{task}: trial {} finished after {repairs} repairs, passed={passed}",
                trial + 1
            );
            candidates.push(candidate.clone());
            if passed {
                return Ok(GenerationResult {
                    task,
                    passed: true,
                    best: candidate,
                    candidates,
                    llm_calls: calls,
                    transcripts,
                });
            }
        }

        match select_best(task, &candidates).cloned() {
            Some(best) => Ok(GenerationResult {
                task,
                passed: false,
                best,
                candidates,
                llm_calls: calls,
                transcripts,
            }),
            None => Err(Error::GenerationFailed { task, transcripts }),
        }
    }
}

/// Runs validated code over a test set. Makes no model calls.
pub fn apply_code(sandbox: &Sandbox, code: &str, instances: &[TaskInstance]) -> Result<Vec<ExecOutcome>> {
    sandbox.apply(code, instances)
}

/// Asks the model to choose among pseudocode candidates. A single candidate
/// is returned without a call. Returns the chosen entry and the calls made.
pub fn select_pseudocode(
    llm: &Gateway,
    task: TaskKind,
    candidates: &[PseudocodeEntry],
) -> Result<(PseudocodeEntry, u64)> {
    match candidates {
        [] => Err(Error::Precondition("no pseudocode candidates".into())),
        [only] => Ok((only.clone(), 0)),
        _ => {
            let messages = prompts::selection_prompt(task, candidates)?;
            let (response, _) = llm.complete(&messages)?;
            let k = prompts::parse_selection(&response, candidates.len()).unwrap_or_else(|e| {
                log::warn!("{task}: {e}; keeping the first candidate");
                1
            });
            Ok((candidates[k - 1].clone(), 1))
        }
    }
}

/// Assembles the bundle for a selected entry.
pub fn bundle_for(library: &PromptLibrary, entry: &PseudocodeEntry) -> Result<PromptBundle> {
    Ok(PromptBundle {
        task: entry.task,
        variant: entry.variant,
        system_text: library.system_prompt().to_string(),
        problem_text: library.problem_prompt(entry.task, entry.variant, &entry.body)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sandbox::SuiteScore;

    #[test]
    fn fenced_block_interior() {
        let r = "Here you go:\n```python\ndef f(G):\n    return 1\n```\nHope it helps.";
        assert_eq!(extract_code(r).unwrap(), "def f(G):\n    return 1\n");
    }

    #[test]
    fn bare_function_unchanged() {
        let r = "from collections import deque\ndef f(G):\n    return 1\n";
        assert_eq!(extract_code(r).unwrap(), r);
    }

    #[test]
    fn prose_trailer_is_trimmed() {
        let r = "Sure.\ndef f(G):\n    x = 1\n\n    return x\n\nThis function returns one.";
        assert_eq!(extract_code(r).unwrap(), "def f(G):\n    x = 1\n\n    return x\n");
    }

    #[test]
    fn helpers_and_constants_are_kept() {
        let r = "INF = 10**9\ndef g(x):\n    return x\nLIMIT = 3\ndef f(G):\n    return g(LIMIT)\n";
        let code = extract_code(r).unwrap();
        assert!(code.contains("LIMIT = 3") && code.contains("def f(G)"));
    }

    #[test]
    fn prose_only_fails() {
        assert!(matches!(
            extract_code("I cannot help with that."),
            Err(Error::Extraction)
        ));
    }

    fn cand(trial: u32, acc: f64, fr: Option<f64>, ar: Option<f64>) -> CandidateCode {
        CandidateCode {
            source: Some(format!("# {trial}")),
            trial,
            repairs: 0,
            report: Some(SuiteReport {
                outcomes: vec![],
                all_pass: false,
                first_error: None,
                score: SuiteScore {
                    accuracy: acc,
                    feasible_rate: fr,
                    approximation_ratio: ar,
                },
            }),
        }
    }

    #[test]
    fn selection_orders() {
        let poly = [cand(0, 0.5, None, None), cand(1, 0.9, None, None), cand(2, 0.9, None, None)];
        assert_eq!(select_best(TaskKind::Cc, &poly).unwrap().trial, 1);
        let np = [
            cand(0, 0.0, Some(0.8), Some(0.01)),
            cand(1, 0.0, Some(1.0), Some(0.3)),
            cand(2, 0.0, Some(1.0), Some(0.1)),
            cand(3, 0.0, Some(1.0), None),
        ];
        assert_eq!(select_best(TaskKind::Mis, &np).unwrap().trial, 2);
        let none = [CandidateCode {
            source: None,
            trial: 0,
            repairs: 0,
            report: None,
        }];
        assert!(select_best(TaskKind::Mis, &none).is_none());
    }
}
