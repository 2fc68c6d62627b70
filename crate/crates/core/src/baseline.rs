//! Direct-answer baselines and graph-reading probes.
//!
//! A baseline puts the serialized graph into the prompt and asks the model
//! for the final answer on a `The answer is [number]` line. Only the minimum
//! vertex cover wordings of the named styles come from published examples;
//! the other tasks use invented wordings (see [`wording_is_published`]).

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge_tuple_list, adjacency_sentences, serialize_graph, Graph, SerializationFormat, WeightedCompleteGraph};
use crate::llm::{ChatMessage, Gateway};
use crate::metrics::{percent, Prediction, CSV_HEADER};
use crate::par;
use crate::prompts::{PromptLibrary, PseudocodeVariant};
use crate::task::{Answer, Payload, TaskInstance, TaskKind};

const SYSTEM_TEMPLATE: &str = include_str!("../prompts/baseline/system.txt");
const GENERIC_TEMPLATE: &str = include_str!("../prompts/baseline/generic.txt");
const GRAPHARENA_TEMPLATE: &str = include_str!("../prompts/baseline/grapharena.txt");
const GRAPHINSTRUCT_TEMPLATE: &str = include_str!("../prompts/baseline/graphinstruct.txt");
const NLGRAPH_TEMPLATE: &str = include_str!("../prompts/baseline/nlgraph.txt");
const PSEUDO_TEMPLATE: &str = include_str!("../prompts/baseline/pseudo.txt");
const TALK_TEMPLATE: &str = include_str!("../prompts/baseline/talk_like_a_graph.txt");
const MVC_CORE_IDEA: &str = include_str!("../prompts/baseline/mvc/nlgraph_core.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineStyle {
    /// Task sentence, serialized graph in the chosen format, question.
    Generic,
    /// Social-network framing with users and friendship connections.
    Grapharena,
    /// Pseudocode, node list and Python edge list.
    Pseudo,
    /// Node list plus one adjacency sentence per node.
    TalkLikeAGraph,
    /// Adjacency sentences only.
    Graphinstruct,
    /// Optional core idea, natural-language edge list.
    Nlgraph,
}

impl BaselineStyle {
    pub const ALL: [BaselineStyle; 6] = [
        BaselineStyle::Generic,
        BaselineStyle::Grapharena,
        BaselineStyle::Pseudo,
        BaselineStyle::TalkLikeAGraph,
        BaselineStyle::Graphinstruct,
        BaselineStyle::Nlgraph,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BaselineStyle::Generic => "generic",
            BaselineStyle::Grapharena => "grapharena",
            BaselineStyle::Pseudo => "pseudo",
            BaselineStyle::TalkLikeAGraph => "talk_like_a_graph",
            BaselineStyle::Graphinstruct => "graphinstruct",
            BaselineStyle::Nlgraph => "nlgraph",
        }
    }

    /// Whether the style reads the serialization format. The named styles
    /// carry their own graph encoding.
    pub fn uses_format(self) -> bool {
        self == BaselineStyle::Generic
    }
}

impl fmt::Display for BaselineStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaselineStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown baseline style `{s}`")))
    }
}

struct Wording {
    problem_name: &'static str,
    question: &'static str,
    arena_intro: &'static str,
    arena_question: &'static str,
    core_idea: &'static str,
}

/// True only for the wordings taken from published prompt examples.
pub fn wording_is_published(task: TaskKind, style: BaselineStyle) -> bool {
    task == TaskKind::Mvc && style != BaselineStyle::Generic
}

fn wording(task: TaskKind) -> Wording {
    match task {
        TaskKind::Mvc => Wording {
            problem_name: "minimum vertex cover",
            question: "What is the size of the minimum vertex cover in this undirected graph? Please only output the number.",
            arena_intro: "Your task is to solve the Minimum Vertex Cover problem in the given social network. In this network, each node represents a user, and each edge represents a friendship connection. You need to identify the smallest subset of users such that every friendship connection has at least one user from this subset.",
            arena_question: "Present the size of this undirected graph's minimum vertex cover. Please just output the number.",
            core_idea: MVC_CORE_IDEA,
        },
        TaskKind::Cn => Wording {
            problem_name: "common neighbors",
            question: "What are the common neighbors of node {U} and node {V} in this undirected graph? Please only output the list of nodes.",
            arena_intro: "Your task is to find the common friends of two users in the given social network. In this network, each node represents a user, and each edge represents a friendship connection.",
            arena_question: "Present the common friends of {UNAME} and {VNAME}. Please just output the list of users.",
            core_idea: "",
        },
        TaskKind::Cc => Wording {
            problem_name: "connected components",
            question: "How many connected components are in this undirected graph? Please only output the number.",
            arena_intro: "Your task is to count the friend circles in the given social network. In this network, each node represents a user, and each edge represents a friendship connection. Two users are in the same circle if a chain of friendships links them.",
            arena_question: "Present the number of connected components of this undirected graph. Please just output the number.",
            core_idea: "",
        },
        TaskKind::Sp => Wording {
            problem_name: "shortest path",
            question: "What is the length of the shortest path between node {U} and node {V} in this undirected graph? Please only output the number.",
            arena_intro: "Your task is to find how far apart two users are in the given social network. In this network, each node represents a user, and each edge represents a friendship connection.",
            arena_question: "Present the length of the shortest path between {UNAME} and {VNAME}. Please just output the number.",
            core_idea: "",
        },
        TaskKind::Gd => Wording {
            problem_name: "graph diameter",
            question: "What is the diameter of this undirected graph? Please only output the number.",
            arena_intro: "Your task is to find the diameter of the given social network. In this network, each node represents a user, and each edge represents a friendship connection. The diameter is the largest shortest-path distance between two users.",
            arena_question: "Present the diameter of this undirected graph. Please just output the number.",
            core_idea: "",
        },
        TaskKind::Mis => Wording {
            problem_name: "maximum independent set",
            question: "What is the size of the maximum independent set in this undirected graph? Please only output the number.",
            arena_intro: "Your task is to solve the Maximum Independent Set problem in the given social network. In this network, each node represents a user, and each edge represents a friendship connection. You need to identify the largest subset of users such that no two users in this subset are friends.",
            arena_question: "Present the size of this undirected graph's maximum independent set. Please just output the number.",
            core_idea: "",
        },
        TaskKind::Mcp => Wording {
            problem_name: "maximum clique",
            question: "What is the size of the maximum clique in this undirected graph? Please only output the number.",
            arena_intro: "Your task is to solve the Maximum Clique problem in the given social network. In this network, each node represents a user, and each edge represents a friendship connection. You need to identify the largest subset of users such that every two users in this subset are friends.",
            arena_question: "Present the size of this undirected graph's maximum clique. Please just output the number.",
            core_idea: "",
        },
        TaskKind::Mcs => Wording {
            problem_name: "maximum common subgraph",
            question: "What is the number of nodes in the maximum common induced subgraph of G1 and G2? Please only output the number.",
            arena_intro: "",
            arena_question: "",
            core_idea: "",
        },
        TaskKind::Tsp => Wording {
            problem_name: "traveling salesman",
            question: "What is the length of the shortest tour that visits every node exactly once and returns to the start? Please only output the number.",
            arena_intro: "",
            arena_question: "",
            core_idea: "",
        },
    }
}

/// Baseline system prompt for `task`.
pub fn baseline_system_prompt(task: TaskKind) -> String {
    SYSTEM_TEMPLATE.replace("{PROBLEM_NAME}", wording(task).problem_name)
}

/// The opening sentence of the task's problem prompt.
pub fn task_sentence(library: &PromptLibrary, task: TaskKind) -> String {
    let text = library.problem_template(task).trim_start_matches('"');
    match text.find(". ") {
        Some(i) => text[..=i].to_string(),
        None => text.lines().next().unwrap_or_default().to_string(),
    }
}

fn fill(template: &str, pairs: &[(&str, &str)]) -> String {
    pairs
        .iter()
        .fold(template.to_string(), |acc, (k, v)| acc.replace(k, v))
}

fn node_list(n: usize) -> String {
    (0..n).map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

fn user(i: usize) -> String {
    format!("User {i}")
}

fn question(text: &str, query: Option<(usize, usize)>) -> String {
    let (u, v) = query.unwrap_or((0, 0));
    fill(
        text,
        &[
            ("{UNAME}", &user(u)),
            ("{VNAME}", &user(v)),
            ("{U}", &u.to_string()),
            ("{V}", &v.to_string()),
        ],
    )
}

fn serialize_weighted(w: &WeightedCompleteGraph, fmt: SerializationFormat) -> String {
    let n = w.node_count();
    match fmt {
        SerializationFormat::EdgeList => {
            let body: Vec<String> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| format!("({i}, {j}, {})", w.weight(i, j)))
                .collect();
            format!("graph weighted edgelist is [{}]", body.join(", "))
        }
        SerializationFormat::Adjacency => (0..n)
            .map(|i| {
                let row: Vec<String> = w.matrix()[i].iter().map(u64::to_string).collect();
                format!("{i}: [{}]", row.join(", "))
            })
            .collect::<Vec<_>>()
            .join(", "),
        SerializationFormat::AdjacencyNl => (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| format!("The edge between node {i} and node {j} has weight {}.", w.weight(i, j)))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn single_graph(instance: &TaskInstance, style: BaselineStyle) -> Result<&Graph> {
    match instance.payload() {
        Payload::Query { graph, .. } | Payload::Graph(graph) => Ok(graph),
        _ => Err(Error::Precondition(format!(
            "baseline style {style} has no template for task {}",
            instance.task()
        ))),
    }
}

/// User prompt for one instance. `fmt` only matters for the generic style.
pub fn baseline_prompt(
    library: &PromptLibrary,
    instance: &TaskInstance,
    fmt: SerializationFormat,
    style: BaselineStyle,
) -> Result<String> {
    let task = instance.task();
    let words = wording(task);
    let query = instance.query_nodes();
    let q = question(words.question, query);
    if style == BaselineStyle::Generic {
        let graph = match instance.payload() {
            Payload::Query { graph, .. } | Payload::Graph(graph) => serialize_graph(graph, fmt),
            Payload::GraphPair { g1, g2 } => format!(
                "G1:\n{}\nG2:\n{}",
                serialize_graph(g1, fmt),
                serialize_graph(g2, fmt)
            ),
            Payload::Weighted(w) => serialize_weighted(w, fmt),
        };
        let query_line = query
            .map(|(u, v)| format!("The query nodes are u = {u} and v = {v}.\n"))
            .unwrap_or_default();
        return Ok(fill(
            GENERIC_TEMPLATE,
            &[
                ("{TASK_SENTENCE}", &task_sentence(library, task)),
                ("{GRAPH}", &graph),
                ("{QUERY}", &query_line),
                ("{QUESTION}", &q),
            ],
        ));
    }

    let g = single_graph(instance, style)?;
    let n = g.node_count();
    Ok(match style {
        BaselineStyle::Generic => unreachable!("handled above"),
        BaselineStyle::Grapharena => {
            let users: Vec<String> = (0..n).map(user).collect();
            let connections: Vec<String> = g
                .edges()
                .map(|(a, b)| format!("{} and {}", user(a), user(b)))
                .collect();
            fill(
                GRAPHARENA_TEMPLATE,
                &[
                    ("{TASK_INTRO}", words.arena_intro),
                    ("{USERS}", &users.join(", ")),
                    ("{CONNECTIONS}", &connections.join(", ")),
                    ("{ARENA_QUESTION}", &question(words.arena_question, query)),
                ],
            )
        }
        BaselineStyle::Pseudo => fill(
            PSEUDO_TEMPLATE,
            &[
                ("{PSEUDOCODE}", library.pseudocode(task, PseudocodeVariant::Full)?),
                ("{NODE_LIST}", &node_list(n)),
                ("{EDGE_LIST}", &edge_tuple_list(g)),
                ("{QUESTION}", &q),
            ],
        ),
        BaselineStyle::TalkLikeAGraph => fill(
            TALK_TEMPLATE,
            &[
                ("{NODE_LIST}", &node_list(n)),
                ("{ADJ_NL}", &adjacency_sentences(g)),
                ("{QUESTION}", &q),
            ],
        ),
        BaselineStyle::Graphinstruct => fill(
            GRAPHINSTRUCT_TEMPLATE,
            &[("{ADJ_NL}", &adjacency_sentences(g)), ("{QUESTION}", &q)],
        ),
        BaselineStyle::Nlgraph => {
            let edges: Vec<String> = g
                .edges()
                .map(|(a, b)| format!("an edge between node {a} and node {b}"))
                .collect();
            let core = if words.core_idea.is_empty() {
                String::new()
            } else {
                format!("{}\n\n", words.core_idea.trim_end())
            };
            fill(
                NLGRAPH_TEMPLATE,
                &[
                    ("{CORE_IDEA}", &core),
                    ("{MAX_NODE}", &n.saturating_sub(1).to_string()),
                    ("{NL_EDGES}", &edges.join(", ")),
                    ("{QUESTION}", &q),
                ],
            )
        }
    })
}

pub fn baseline_messages(
    library: &PromptLibrary,
    instance: &TaskInstance,
    fmt: SerializationFormat,
    style: BaselineStyle,
) -> Result<Vec<ChatMessage>> {
    Ok(vec![
        ChatMessage::system(baseline_system_prompt(instance.task())),
        ChatMessage::user(baseline_prompt(library, instance, fmt, style)?),
    ])
}

fn answer_line() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)the answer is\W*?(-?\d+(?:\.\d+)?|\[[^\]]*\])").unwrap())
}

fn answer_tail(response: &str) -> Result<&str> {
    answer_line()
        .captures_iter(response)
        .last()
        .map(|c| c.get(1).unwrap().as_str())
        .ok_or(Error::UnparseableAnswer)
}

/// The number on the last `The answer is ...` match.
pub fn parse_number(response: &str) -> Result<f64> {
    answer_tail(response)?
        .parse()
        .map_err(|_| Error::UnparseableAnswer)
}

/// Parses a direct answer for `task`. Integer tasks accept decimals within
/// 1e-9 of an integer; common neighbors take a bracketed node list.
pub fn parse_answer(task: TaskKind, response: &str) -> Result<Answer> {
    let tail = answer_tail(response)?;
    if task == TaskKind::Cn {
        let inner = tail
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .unwrap_or(tail);
        let nodes = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| Error::UnparseableAnswer))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Answer::list(nodes));
    }
    let x: f64 = tail.parse().map_err(|_| Error::UnparseableAnswer)?;
    let r = x.round();
    if (x - r).abs() > 1e-9 {
        return Err(Error::UnparseableAnswer);
    }
    Ok(Answer::Int(r as i64))
}

/// Asks the model once per instance and parses each reply.
pub fn run_baseline(
    gateway: &Gateway,
    library: &PromptLibrary,
    instances: &[TaskInstance],
    fmt: SerializationFormat,
    style: BaselineStyle,
    workers: usize,
) -> Result<Vec<Prediction>> {
    let results = par::map_with_workers(instances, workers, |inst| -> Result<Prediction> {
        let messages = baseline_messages(library, inst, fmt, style)?;
        let (text, _) = gateway.complete(&messages)?;
        Ok(parse_answer(inst.task(), &text).map_err(|e| e.to_string()))
    });
    results.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphReadingProperty {
    NodeCount,
    EdgeCount,
    MaxDegree,
    MinDegree,
    AvgDegree,
}

impl GraphReadingProperty {
    pub const ALL: [GraphReadingProperty; 5] = [
        GraphReadingProperty::NodeCount,
        GraphReadingProperty::EdgeCount,
        GraphReadingProperty::MaxDegree,
        GraphReadingProperty::MinDegree,
        GraphReadingProperty::AvgDegree,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GraphReadingProperty::NodeCount => "node_count",
            GraphReadingProperty::EdgeCount => "edge_count",
            GraphReadingProperty::MaxDegree => "max_degree",
            GraphReadingProperty::MinDegree => "min_degree",
            GraphReadingProperty::AvgDegree => "avg_degree",
        }
    }

    fn question(self) -> &'static str {
        match self {
            GraphReadingProperty::NodeCount => "How many nodes are in this undirected graph? Please only output the number.",
            GraphReadingProperty::EdgeCount => "How many edges are in this undirected graph? Please only output the number.",
            GraphReadingProperty::MaxDegree => "What is the maximum node degree in this undirected graph? Please only output the number.",
            GraphReadingProperty::MinDegree => "What is the minimum node degree in this undirected graph? Please only output the number.",
            GraphReadingProperty::AvgDegree => "What is the average node degree in this undirected graph? Round it to one decimal place and only output the number.",
        }
    }
}

impl fmt::Display for GraphReadingProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphReadingProperty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown graph-reading property `{s}`")))
    }
}

/// Exact value of `prop`; the average degree is 2|E|/|V| (0 for no nodes).
pub fn graph_reading_truth(g: &Graph, prop: GraphReadingProperty) -> f64 {
    let n = g.node_count();
    let degrees = (0..n).map(|u| g.degree(u));
    match prop {
        GraphReadingProperty::NodeCount => n as f64,
        GraphReadingProperty::EdgeCount => g.edge_count() as f64,
        GraphReadingProperty::MaxDegree => degrees.max().unwrap_or(0) as f64,
        GraphReadingProperty::MinDegree => degrees.min().unwrap_or(0) as f64,
        GraphReadingProperty::AvgDegree if n == 0 => 0.0,
        GraphReadingProperty::AvgDegree => 2.0 * g.edge_count() as f64 / n as f64,
    }
}

/// Compares at one decimal place.
pub fn probe_matches(predicted: f64, truth: f64) -> bool {
    (predicted * 10.0).round() == (truth * 10.0).round()
}

pub fn probe_messages(g: &Graph, fmt: SerializationFormat, prop: GraphReadingProperty) -> Vec<ChatMessage> {
    vec![
        ChatMessage::system(SYSTEM_TEMPLATE.replace("{PROBLEM_NAME}", "graph reading")),
        ChatMessage::user(format!("{}\nQuestion: {}", serialize_graph(g, fmt), prop.question())),
    ]
}

/// Probe results in the report row layout; the task column holds
/// `probe_<property>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub property: GraphReadingProperty,
    pub method: String,
    pub bucket: String,
    #[serde(rename = "T")]
    pub t: usize,
    pub accuracy: f64,
    pub llm_calls: u64,
    pub mean_latency_s: Option<f64>,
    pub predictions: Vec<Option<f64>>,
    pub truths: Vec<f64>,
}

impl ProbeReport {
    pub fn csv_row(&self) -> String {
        format!(
            "probe_{},{},{},{},{},,,{},{}",
            self.property,
            self.method,
            self.bucket,
            self.t,
            percent(self.accuracy),
            self.llm_calls,
            self.mean_latency_s.map(|l| format!("{l:.3}")).unwrap_or_default()
        )
    }
}

pub fn render_probe_csv(reports: &[ProbeReport]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// One gateway call per graph.
pub fn run_probe(
    gateway: &Gateway,
    graphs: &[Graph],
    fmt: SerializationFormat,
    prop: GraphReadingProperty,
    bucket: &str,
) -> Result<ProbeReport> {
    if graphs.is_empty() {
        return Err(Error::Precondition("probe needs at least one graph".into()));
    }
    let before = gateway.calls();
    let mut predictions = Vec::with_capacity(graphs.len());
    for g in graphs {
        let (text, _) = gateway.complete(&probe_messages(g, fmt, prop))?;
        predictions.push(parse_number(&text).ok());
    }
    let truths: Vec<f64> = graphs.iter().map(|g| graph_reading_truth(g, prop)).collect();
    let hits = predictions
        .iter()
        .zip(&truths)
        .filter(|(p, t)| p.is_some_and(|p| probe_matches(p, **t)))
        .count();
    Ok(ProbeReport {
        property: prop,
        method: format!("probe_{}", fmt_label(fmt)),
        bucket: bucket.to_string(),
        t: graphs.len(),
        accuracy: hits as f64 / graphs.len() as f64,
        llm_calls: gateway.calls() - before,
        mean_latency_s: gateway.mean_latency_s(),
        predictions,
        truths,
    })
}

fn fmt_label(fmt: SerializationFormat) -> &'static str {
    match fmt {
        SerializationFormat::EdgeList => "edge_list",
        SerializationFormat::Adjacency => "adjacency",
        SerializationFormat::AdjacencyNl => "adjacency_nl",
    }
}
