//! Prompt fixtures and assembly.
//!
//! Fixture texts live under `prompts/` and are embedded at build time; a
//! directory with the same layout can be loaded instead with
//! [`PromptLibrary::from_dir`].

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::llm::ChatMessage;
use crate::task::TaskKind;

pub const PLACEHOLDER: &str = "{PSEUDOCODE INSERT HERE}";
const PROCESS_SENTENCE: &str = "The algorithm process can be described as follows:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PseudocodeVariant {
    /// Structured pseudocode, inserted as a display block.
    Full,
    /// Natural-language walkthrough.
    Nl,
    /// Core-idea summary.
    Core,
    /// No pseudocode; the sentence introducing it is dropped as well.
    None,
}

impl PseudocodeVariant {
    pub const ALL: [PseudocodeVariant; 4] = [
        PseudocodeVariant::Full,
        PseudocodeVariant::Nl,
        PseudocodeVariant::Core,
        PseudocodeVariant::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PseudocodeVariant::Full => "full",
            PseudocodeVariant::Nl => "nl",
            PseudocodeVariant::Core => "core",
            PseudocodeVariant::None => "none",
        }
    }
}

impl fmt::Display for PseudocodeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PseudocodeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown pseudocode variant `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudocodeEntry {
    pub task: TaskKind,
    pub variant: PseudocodeVariant,
    pub body: String,
    pub source_note: String,
}

/// The assembled system and problem texts for one task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub task: TaskKind,
    pub variant: PseudocodeVariant,
    pub system_text: String,
    pub problem_text: String,
}

impl PromptBundle {
    pub fn messages(&self) -> Vec<ChatMessage> {
        vec![
            ChatMessage::system(self.system_text.clone()),
            ChatMessage::user(self.problem_text.clone()),
        ]
    }
}

macro_rules! embedded {
    ($($task:ident => $id:literal),* $(,)?) => {
        fn embedded_problems() -> Vec<(TaskKind, &'static str)> {
            vec![$((TaskKind::$task, include_str!(concat!("../prompts/problem/", $id, ".txt")))),*]
        }

        fn embedded_full() -> Vec<(TaskKind, &'static str)> {
            vec![$((TaskKind::$task, include_str!(concat!("../prompts/pseudocode/", $id, ".full.txt")))),*]
        }
    };
}

embedded! {
    Cn => "cn", Cc => "cc", Sp => "sp", Gd => "gd", Mis => "mis",
    Mvc => "mvc", Mcp => "mcp", Mcs => "mcs", Tsp => "tsp",
}

#[derive(Debug, Clone)]
pub struct PromptLibrary {
    system: String,
    problems: HashMap<TaskKind, String>,
    pseudocode: HashMap<(TaskKind, PseudocodeVariant), String>,
}

impl Default for PromptLibrary {
    fn default() -> Self {
        Self::embedded()
    }
}

impl PromptLibrary {
    /// The fixtures compiled into the crate.
    pub fn embedded() -> Self {
        let mut pseudocode: HashMap<_, _> = embedded_full()
            .into_iter()
            .map(|(t, s)| ((t, PseudocodeVariant::Full), s.to_string()))
            .collect();
        pseudocode.insert(
            (TaskKind::Tsp, PseudocodeVariant::Nl),
            include_str!("../prompts/pseudocode/tsp.nl.txt").to_string(),
        );
        pseudocode.insert(
            (TaskKind::Tsp, PseudocodeVariant::Core),
            include_str!("../prompts/pseudocode/tsp.core.txt").to_string(),
        );
        PromptLibrary {
            system: include_str!("../prompts/system.txt").to_string(),
            problems: embedded_problems()
                .into_iter()
                .map(|(t, s)| (t, s.to_string()))
                .collect(),
            pseudocode,
        }
    }

    /// Loads `system.txt`, `problem/<task>.txt` and whatever
    /// `pseudocode/<task>.<variant>.txt` files exist under `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let system = read(&dir.join("system.txt"))?;
        let mut problems = HashMap::new();
        let mut pseudocode = HashMap::new();
        for task in TaskKind::ALL {
            let text = read(&dir.join("problem").join(format!("{}.txt", task.id())))?;
            if !text.contains(PLACEHOLDER) {
                return Err(Error::Config(format!(
                    "problem prompt for {task} lacks the {PLACEHOLDER} placeholder"
                )));
            }
            problems.insert(task, text);
            for variant in [PseudocodeVariant::Full, PseudocodeVariant::Nl, PseudocodeVariant::Core] {
                let path = dir
                    .join("pseudocode")
                    .join(format!("{}.{}.txt", task.id(), variant));
                if path.exists() {
                    pseudocode.insert((task, variant), read(&path)?);
                }
            }
        }
        Ok(PromptLibrary {
            system,
            problems,
            pseudocode,
        })
    }

    pub fn system_prompt(&self) -> &str {
        &self.system
    }

    /// The raw problem fixture, placeholder included.
    pub fn problem_template(&self, task: TaskKind) -> &str {
        &self.problems[&task]
    }

    pub fn pseudocode(&self, task: TaskKind, variant: PseudocodeVariant) -> Result<&str> {
        self.pseudocode
            .get(&(task, variant))
            .map(String::as_str)
            .ok_or_else(|| Error::VariantUnavailable {
                task,
                variant: variant.to_string(),
            })
    }

    pub fn entry(&self, task: TaskKind, variant: PseudocodeVariant) -> Result<PseudocodeEntry> {
        Ok(PseudocodeEntry {
            task,
            variant,
            body: self.pseudocode(task, variant)?.to_string(),
            source_note: format!("bundled {variant} fixture"),
        })
    }

    /// Variants with a body for `task`, in `PseudocodeVariant::ALL` order.
    pub fn variants(&self, task: TaskKind) -> Vec<PseudocodeVariant> {
        PseudocodeVariant::ALL
            .into_iter()
            .filter(|v| self.pseudocode.contains_key(&(task, *v)))
            .collect()
    }

    /// Fills the task's problem fixture. Structured pseudocode (`Full`) is
    /// set on its own lines after the introducing sentence; prose variants
    /// replace that sentence as a paragraph; `None` drops it.
    pub fn problem_prompt(
        &self,
        task: TaskKind,
        variant: PseudocodeVariant,
        body: &str,
    ) -> Result<String> {
        let template = self.problem_template(task);
        let display = Regex::new(r"\s*\{PSEUDOCODE INSERT HERE\}\s*").expect("valid regex");
        let sentence = Regex::new(&format!(
            r"{}\s*\{{PSEUDOCODE INSERT HERE\}}\s*",
            regex::escape(PROCESS_SENTENCE)
        ))
        .expect("valid regex");
        let out = match variant {
            PseudocodeVariant::Full => {
                if body.trim().is_empty() {
                    return Err(Error::Precondition("empty pseudocode body".into()));
                }
                display.replace(template, |_: &regex::Captures| format!("\n{body}\n"))
            }
            PseudocodeVariant::Nl | PseudocodeVariant::Core => {
                if body.trim().is_empty() {
                    return Err(Error::Precondition("empty pseudocode body".into()));
                }
                sentence.replace(template, |_: &regex::Captures| format!("{body}\n\n"))
            }
            PseudocodeVariant::None => sentence.replace(template, ""),
        };
        Ok(out.into_owned())
    }

    pub fn bundle(&self, task: TaskKind, variant: PseudocodeVariant) -> Result<PromptBundle> {
        let body = match variant {
            PseudocodeVariant::None => "",
            v => self.pseudocode(task, v)?,
        };
        Ok(PromptBundle {
            task,
            variant,
            system_text: self.system.clone(),
            problem_text: self.problem_prompt(task, variant, body)?,
        })
    }
}

/// Messages asking the model to pick one of several pseudocode candidates.
/// With a single candidate the caller should skip the call entirely.
pub fn selection_prompt(task: TaskKind, candidates: &[PseudocodeEntry]) -> Result<Vec<ChatMessage>> {
    if candidates.is_empty() {
        return Err(Error::Precondition("selection needs at least one candidate".into()));
    }
    let mut text = format!(
        "Below are {} candidate pseudocode descriptions for the {} problem. \
         Compare them by time complexity, space complexity and how difficult they are to implement correctly in Python, \
         then choose the one best suited as implementation guidance.\n",
        candidates.len(),
        task.display_name()
    );
    for (i, c) in candidates.iter().enumerate() {
        text.push_str(&format!("\nCandidate {}:\n{}\n", i + 1, c.body));
    }
    text.push_str("\nEnd your reply with a line of the form \"Best: <number>\".");
    Ok(vec![
        ChatMessage::system("You are an expert in the field of graph algorithms."),
        ChatMessage::user(text),
    ])
}

/// Reads the last `Best: k` line; `k` is 1-based and must be in range.
pub fn parse_selection(response: &str, candidates: usize) -> Result<usize> {
    let re = Regex::new(r"(?im)^\W*best\W*?:\W*(\d+)").expect("valid regex");
    let k: usize = re
        .captures_iter(response)
        .last()
        .and_then(|c| c[1].parse().ok())
        .ok_or_else(|| Error::Precondition("no `Best: <k>` line in selection response".into()))?;
    if k == 0 || k > candidates {
        return Err(Error::Precondition(format!(
            "selection {k} out of range 1..={candidates}"
        )));
    }
    Ok(k)
}

/// The two turns appended to a transcript after a failed test: the previous
/// code as the assistant turn and the verbatim error with a fix request.
pub fn repair_messages(prev_code: &str, error_message: &str) -> Result<[ChatMessage; 2]> {
    if error_message.trim().is_empty() {
        return Err(Error::Precondition("repair needs a nonempty error message".into()));
    }
    let code = if prev_code.trim().is_empty() {
        "(no code)"
    } else {
        prev_code
    };
    Ok([
        ChatMessage::assistant(code),
        ChatMessage::user(format!(
            "Running the code above produced the following error:\n{error_message}\n\
             Please fix the code. Output only the corrected Python functions starting with def."
        )),
    ])
}
