//! Markup rendering and golden comparisons shared by the golden-prompt tests
//! and the acceptance report.
#![allow(dead_code)]

use std::path::PathBuf;

use graphcode::baseline::{baseline_prompt, baseline_system_prompt, BaselineStyle};
use graphcode::prompts::{PromptLibrary, PseudocodeVariant};
use graphcode::{Graph, SerializationFormat, TaskInstance, TaskKind};
use regex::{Captures, Regex};

const NL: char = '\u{1}';
const QUAD: char = '\u{2}';

pub fn markup(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden/markup")
        .join(format!("{name}.tex"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Drops `\blue{...}` wrappers, keeping their contents.
fn unblue(s: &str) -> String {
    let mut out = String::new();
    let mut rest = s;
    while let Some(j) = rest.find("\\blue{") {
        out.push_str(&rest[..j]);
        let body = &rest[j + 6..];
        let bytes = body.as_bytes();
        let (mut k, mut depth) = (0, 1);
        while depth > 0 {
            match bytes[k] {
                b'\\' => {
                    k += 2;
                    continue;
                }
                b'{' => depth += 1,
                b'}' => depth -= 1,
                _ => {}
            }
            k += 1;
        }
        out.push_str(&body[..k - 1]);
        rest = &body[k..];
    }
    out.push_str(rest);
    out
}

fn render_text(t: &str) -> String {
    let t = unblue(t)
        .replace("\\_", "_")
        .replace("\\{", "{")
        .replace("\\}", "}")
        .replace("``", "\"")
        .replace("''", "\"");
    let t = Regex::new(r"\\quad ?").unwrap().replace_all(&t, QUAD.to_string());
    let para_split = Regex::new(r"\n[ \t]*\n\s*").unwrap();
    let newline = Regex::new(r"\\newline").unwrap();
    let ws = Regex::new(r"[ \t\n]+").unwrap();
    let around_nl = Regex::new(&format!(" ?{NL} ?")).unwrap();
    let mut out = Vec::new();
    for p in para_split.split(&t) {
        let p = newline.replace_all(p, NL.to_string());
        let p = ws.replace_all(&p, " ");
        let p = around_nl.replace_all(&p, NL.to_string());
        let p = p.trim_matches(' ');
        if !p.is_empty() {
            out.push(p.replace(NL, "\n").replace(QUAD, "    "));
        }
    }
    out.join("\n\n")
}

/// Plain text of a markup source: verbatim blocks kept as-is, text runs
/// normalized, pieces joined with single newlines.
pub fn render(src: &str) -> String {
    let verbatim = Regex::new(r"(?s)\\begin\{verbatim\}\n(.*?)\n\\end\{verbatim\}").unwrap();
    let mut pieces = Vec::new();
    let mut last = 0;
    for c in verbatim.captures_iter(src) {
        let m = c.get(0).unwrap();
        let text = render_text(&src[last..m.start()]);
        if !text.is_empty() {
            pieces.push(text);
        }
        pieces.push(c[1].to_string());
        last = m.end();
    }
    let text = render_text(&src[last..]);
    if !text.is_empty() {
        pieces.push(text);
    }
    pieces.join("\n")
}

pub fn mvc_graph() -> TaskInstance {
    let edges = [(0, 5), (0, 1), (1, 7), (1, 5), (1, 2), (1, 6), (1, 3), (1, 4), (2, 5), (2, 3)];
    TaskInstance::graph(TaskKind::Mvc, Graph::from_edges(8, &edges).unwrap()).unwrap()
}

fn sorted_ids(list: &str, sep: &str) -> String {
    let mut ids: Vec<usize> = list.split(sep).map(|s| s.trim().parse().unwrap()).collect();
    ids.sort_unstable();
    ids.iter().map(usize::to_string).collect::<Vec<_>>().join(sep)
}

/// Puts every graph listing in canonical order so texts compare modulo the
/// order the graph was written in.
pub fn canonical_payload(text: &str) -> String {
    let adjacency = Regex::new(r"connected to nodes ([\d,]+)\.").unwrap();
    let text = adjacency.replace_all(text, |c: &Captures| {
        format!("connected to nodes {}.", sorted_ids(&c[1], ","))
    });
    let tuples = Regex::new(r"\[\(\d+, \d+\)(?:, \(\d+, \d+\))*\]").unwrap();
    let pair = Regex::new(r"\((\d+), (\d+)\)").unwrap();
    let text = tuples.replace_all(&text, |c: &Captures| {
        let mut pairs: Vec<(usize, usize)> = pair
            .captures_iter(&c[0])
            .map(|p| (p[1].parse().unwrap(), p[2].parse().unwrap()))
            .collect();
        pairs.sort_unstable();
        let body: Vec<String> = pairs.iter().map(|(a, b)| format!("({a}, {b})")).collect();
        format!("[{}]", body.join(", "))
    });
    let nl_edges = Regex::new(r"an edge between node \d+ and node \d+(?:, an edge between node \d+ and node \d+)*").unwrap();
    let nl_pair = Regex::new(r"node (\d+) and node (\d+)").unwrap();
    nl_edges
        .replace_all(&text, |c: &Captures| {
            let mut pairs: Vec<(usize, usize)> = nl_pair
                .captures_iter(&c[0])
                .map(|p| (p[1].parse().unwrap(), p[2].parse().unwrap()))
                .collect();
            pairs.sort_unstable();
            pairs
                .iter()
                .map(|(a, b)| format!("an edge between node {a} and node {b}"))
                .collect::<Vec<_>>()
                .join(", ")
        })
        .into_owned()
}

/// Difference between our prompt for `style` and the published one, modulo
/// the order the graph is listed in.
pub fn baseline_mismatch(style: BaselineStyle, name: &str) -> Option<String> {
    let lib = PromptLibrary::embedded();
    let ours = baseline_prompt(&lib, &mvc_graph(), SerializationFormat::EdgeList, style).ok()?;
    let golden = render(&markup(&format!("baseline.{name}")));
    if canonical_payload(&golden) == golden {
        return Some(format!("{name}: graph listing not recognized in the golden text"));
    }
    let (a, b) = (canonical_payload(&ours), canonical_payload(&golden));
    (a != b).then(|| format!("{name}:\n--- ours\n{a}\n--- golden\n{b}"))
}

/// The published example names its users; they are mapped to `User i` in
/// listing order and the friendship connections compared as an edge set.
pub fn grapharena_mismatch() -> Option<String> {
    let golden = render(&markup("baseline.grapharena"));
    let users_line = Regex::new(r"- Users in the network: (.*)\.\n").unwrap();
    let names: Vec<String> = users_line.captures(&golden)?[1]
        .split(", ")
        .map(str::to_string)
        .collect();
    let mut renamed = golden.clone();
    for (i, name) in names.iter().enumerate() {
        renamed = renamed.replace(name.as_str(), &format!("User {i}"));
    }
    let connections = Regex::new(r"- Fiendship connections: (.*)\.\n").unwrap();
    let pair = Regex::new(r"User (\d+),? and User (\d+)").unwrap();
    let edge_set = |text: &str| -> Option<(String, Vec<(usize, usize)>)> {
        let c = connections.captures(text)?;
        let mut pairs: Vec<(usize, usize)> = pair
            .captures_iter(&c[1])
            .map(|p| (p[1].parse().unwrap(), p[2].parse().unwrap()))
            .collect();
        pairs.sort_unstable();
        Some((text.replace(&c[1], "<connections>"), pairs))
    };
    let (golden_text, golden_edges) = edge_set(&renamed)?;
    let graph = Graph::from_edges(names.len(), &golden_edges).ok()?;
    let instance = TaskInstance::graph(TaskKind::Mvc, graph).ok()?;
    let lib = PromptLibrary::embedded();
    let ours = baseline_prompt(&lib, &instance, SerializationFormat::EdgeList, BaselineStyle::Grapharena).ok()?;
    let (our_text, our_edges) = edge_set(&ours)?;
    if our_edges != golden_edges {
        return Some(format!("grapharena edges {our_edges:?} vs {golden_edges:?}"));
    }
    (our_text != golden_text).then(|| format!("grapharena:\n--- ours\n{our_text}\n--- golden\n{golden_text}"))
}

/// Every fixture comparison; empty when all match.
pub fn golden_mismatches() -> Vec<String> {
    let lib = PromptLibrary::embedded();
    let mut bad = Vec::new();
    let mut check = |label: String, ours: &str, golden: String| {
        if ours != golden {
            bad.push(label);
        }
    };
    check("system".into(), lib.system_prompt(), render(&markup("system")));
    for task in TaskKind::ALL {
        check(format!("problem.{task}"), lib.problem_template(task), render(&markup(&format!("problem.{}", task.id()))));
        let full = lib.pseudocode(task, PseudocodeVariant::Full).unwrap_or_default();
        check(format!("pseudocode.{task}"), full, render(&markup(&format!("pseudocode.{}", task.id()))));
    }
    for variant in PseudocodeVariant::ALL {
        let text = lib.bundle(TaskKind::Tsp, variant).map(|b| b.problem_text).unwrap_or_default();
        check(format!("tsp_prompt.{variant}"), &text, render(&markup(&format!("tsp_prompt.{variant}"))));
    }
    check("baseline.system".into(), &baseline_system_prompt(TaskKind::Mvc), render(&markup("baseline.system")));
    for (style, name) in [
        (BaselineStyle::Graphinstruct, "graphinstruct"),
        (BaselineStyle::TalkLikeAGraph, "talk_like_a_graph"),
        (BaselineStyle::Pseudo, "pseudo"),
        (BaselineStyle::Nlgraph, "nlgraph"),
    ] {
        bad.extend(baseline_mismatch(style, name));
    }
    bad.extend(grapharena_mismatch());
    bad
}
