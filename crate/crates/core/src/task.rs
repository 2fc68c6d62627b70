//! Task identities, benchmark instances, answers and the canonical wire
//! encoding shared with the sandbox runner.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{Graph, WeightedCompleteGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Cn,
    Cc,
    Sp,
    Gd,
    Mis,
    Mvc,
    Mcp,
    Mcs,
    Tsp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskClass {
    Polynomial,
    NpComplete,
}

/// Whether larger answers are better (for feasibility direction).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Maximize,
    Minimize,
}

impl TaskKind {
    pub const ALL: [TaskKind; 9] = [
        TaskKind::Cn,
        TaskKind::Cc,
        TaskKind::Sp,
        TaskKind::Gd,
        TaskKind::Mis,
        TaskKind::Mvc,
        TaskKind::Mcp,
        TaskKind::Mcs,
        TaskKind::Tsp,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TaskKind::Cn => "cn",
            TaskKind::Cc => "cc",
            TaskKind::Sp => "sp",
            TaskKind::Gd => "gd",
            TaskKind::Mis => "mis",
            TaskKind::Mvc => "mvc",
            TaskKind::Mcp => "mcp",
            TaskKind::Mcs => "mcs",
            TaskKind::Tsp => "tsp",
        }
    }

    /// Entry point the generated code must define.
    pub fn function_name(self) -> &'static str {
        match self {
            TaskKind::Cn => "common_neighbors",
            TaskKind::Cc => "connected_component_undirected",
            TaskKind::Sp => "shortest_path_unweighted",
            TaskKind::Gd => "graph_diameter",
            TaskKind::Mis => "maximum_independent_set",
            TaskKind::Mvc => "minimum_vertex_cover",
            TaskKind::Mcp => "maximum_clique",
            TaskKind::Mcs => "maximum_common_subgraph",
            TaskKind::Tsp => "travelling_salesman",
        }
    }

    /// Python signature line quoted at the end of each problem prompt.
    pub fn signature(self) -> String {
        let args = match self {
            TaskKind::Cn | TaskKind::Sp => "G, u, v",
            TaskKind::Mcs => "G1, G2",
            _ => "G",
        };
        format!("def {}({args}):", self.function_name())
    }

    pub fn class(self) -> TaskClass {
        match self {
            TaskKind::Cn | TaskKind::Cc | TaskKind::Sp | TaskKind::Gd => TaskClass::Polynomial,
            _ => TaskClass::NpComplete,
        }
    }

    pub fn is_np_complete(self) -> bool {
        self.class() == TaskClass::NpComplete
    }

    /// Optimization direction for NP-complete tasks; `None` for polynomial ones.
    pub fn objective(self) -> Option<Objective> {
        match self {
            TaskKind::Mis | TaskKind::Mcp | TaskKind::Mcs => Some(Objective::Maximize),
            TaskKind::Mvc | TaskKind::Tsp => Some(Objective::Minimize),
            _ => None,
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            TaskKind::Cn => "Common Neighbors",
            TaskKind::Cc => "Connected Components",
            TaskKind::Sp => "Shortest Path",
            TaskKind::Gd => "Graph Diameter",
            TaskKind::Mis => "Maximum Independent Set",
            TaskKind::Mvc => "Minimum Vertex Cover",
            TaskKind::Mcp => "Maximum Clique Problem",
            TaskKind::Mcs => "Maximum Common Subgraph",
            TaskKind::Tsp => "Traveling Salesman Problem",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskKind::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::UnknownTask(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Payload {
    /// A graph plus two query nodes (cn, sp).
    Query { graph: Graph, u: usize, v: usize },
    /// A single graph (cc, gd, mis, mvc, mcp).
    Graph(Graph),
    /// Two graphs (mcs).
    GraphPair { g1: Graph, g2: Graph },
    /// A weighted complete graph (tsp).
    Weighted(WeightedCompleteGraph),
}

/// One benchmark sample.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TaskInstance {
    task: TaskKind,
    payload: Payload,
}

impl TaskInstance {
    pub fn new(task: TaskKind, payload: Payload) -> Result<Self> {
        let instance = TaskInstance { task, payload };
        instance.validate()?;
        Ok(instance)
    }

    pub fn query(task: TaskKind, graph: Graph, u: usize, v: usize) -> Result<Self> {
        Self::new(task, Payload::Query { graph, u, v })
    }

    pub fn graph(task: TaskKind, graph: Graph) -> Result<Self> {
        Self::new(task, Payload::Graph(graph))
    }

    pub fn graph_pair(g1: Graph, g2: Graph) -> Result<Self> {
        Self::new(TaskKind::Mcs, Payload::GraphPair { g1, g2 })
    }

    pub fn weighted(w: WeightedCompleteGraph) -> Result<Self> {
        Self::new(TaskKind::Tsp, Payload::Weighted(w))
    }

    fn validate(&self) -> Result<()> {
        let ok = matches!(
            (self.task, &self.payload),
            (TaskKind::Cn | TaskKind::Sp, Payload::Query { .. })
                | (
                    TaskKind::Cc | TaskKind::Gd | TaskKind::Mis | TaskKind::Mvc | TaskKind::Mcp,
                    Payload::Graph(_)
                )
                | (TaskKind::Mcs, Payload::GraphPair { .. })
                | (TaskKind::Tsp, Payload::Weighted(_))
        );
        if !ok {
            return Err(Error::InvalidInstance(format!(
                "payload shape does not match task {}",
                self.task
            )));
        }
        if let Payload::Query { graph, u, v } = &self.payload {
            let n = graph.node_count();
            if *u >= n || *v >= n {
                return Err(Error::InvalidInstance(format!(
                    "query nodes ({u}, {v}) outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("query nodes coincide ({u})")));
            }
            if self.task == TaskKind::Sp && crate::solvers::solve_shortest_path(graph, *u, *v).is_err() {
                return Err(Error::InvalidInstance(format!(
                    "query nodes ({u}, {v}) lie in different components"
                )));
            }
        }
        Ok(())
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    /// Largest node count among the instance's graphs.
    pub fn node_count(&self) -> usize {
        match &self.payload {
            Payload::Query { graph, .. } | Payload::Graph(graph) => graph.node_count(),
            Payload::GraphPair { g1, g2 } => g1.node_count().max(g2.node_count()),
            Payload::Weighted(w) => w.node_count(),
        }
    }

    pub fn primary_graph(&self) -> Option<&Graph> {
        match &self.payload {
            Payload::Query { graph, .. } | Payload::Graph(graph) => Some(graph),
            Payload::GraphPair { g1, .. } => Some(g1),
            Payload::Weighted(_) => None,
        }
    }

    pub fn query_nodes(&self) -> Option<(usize, usize)> {
        match &self.payload {
            Payload::Query { u, v, .. } => Some((*u, *v)),
            _ => None,
        }
    }
}

/// A task answer: an integer, or a sorted node list for common neighbors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Answer {
    Int(i64),
    List(Vec<usize>),
}

impl Answer {
    /// Sorted, duplicate-free list answer.
    pub fn list(mut nodes: Vec<usize>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        Answer::List(nodes)
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Answer::Int(x) => Some(*x),
            Answer::List(_) => None,
        }
    }

    /// Equality used by the metrics: list answers compare as sets.
    pub fn matches(&self, other: &Answer) -> bool {
        match (self, other) {
            (Answer::Int(a), Answer::Int(b)) => a == b,
            (Answer::List(a), Answer::List(b)) => {
                let mut a = a.clone();
                let mut b = b.clone();
                a.sort_unstable();
                a.dedup();
                b.sort_unstable();
                b.dedup();
                a == b
            }
            _ => false,
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Int(x) => write!(f, "{x}"),
            Answer::List(xs) => write!(f, "{xs:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    BruteOracle,
    ReferenceHeuristic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub answer: Answer,
    pub provenance: Provenance,
}

/// One line of a ground-truth JSON Lines file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub index: usize,
    pub answer: Answer,
    pub provenance: Provenance,
}

// ---- canonical wire encoding ----

#[derive(Serialize)]
struct WireOut<P: Serialize> {
    task: &'static str,
    function_name: &'static str,
    instance: P,
}

#[derive(Serialize, Deserialize)]
struct WireQuery {
    adj: Vec<Vec<usize>>,
    u: usize,
    v: usize,
}

#[derive(Serialize, Deserialize)]
struct WireAdj {
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct WireEdgeGraph {
    n: usize,
    edges: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct WirePair {
    g1: WireEdgeGraph,
    g2: WireEdgeGraph,
}

#[derive(Serialize, Deserialize)]
struct WireMatrix {
    matrix: Vec<Vec<u64>>,
}

#[derive(Deserialize)]
struct WireIn {
    task: String,
    function_name: String,
    instance: Value,
}

impl WireEdgeGraph {
    fn from_graph(g: &Graph) -> Self {
        WireEdgeGraph {
            n: g.node_count(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }
    }

    fn into_graph(self) -> Result<Graph> {
        let edges: Vec<_> = self.edges.into_iter().map(|[u, v]| (u, v)).collect();
        Graph::from_edges(self.n, &edges)
    }
}

fn wire_bytes<P: Serialize>(task: TaskKind, payload: &P) -> Vec<u8> {
    serde_json::to_vec(&WireOut {
        task: task.id(),
        function_name: task.function_name(),
        instance: payload,
    })
    .expect("wire structs serialize")
}

/// UTF-8 JSON with fixed key order (`task`, `function_name`, `instance`);
/// stable byte-for-byte.
pub fn canonical_instance_bytes(instance: &TaskInstance) -> Vec<u8> {
    let task = instance.task;
    match &instance.payload {
        Payload::Query { graph, u, v } => wire_bytes(
            task,
            &WireQuery {
                adj: graph.adjacency().to_vec(),
                u: *u,
                v: *v,
            },
        ),
        Payload::Graph(graph) => wire_bytes(
            task,
            &WireAdj {
                adj: graph.adjacency().to_vec(),
            },
        ),
        Payload::GraphPair { g1, g2 } => wire_bytes(
            task,
            &WirePair {
                g1: WireEdgeGraph::from_graph(g1),
                g2: WireEdgeGraph::from_graph(g2),
            },
        ),
        Payload::Weighted(w) => wire_bytes(
            task,
            &WireMatrix {
                matrix: w.matrix().to_vec(),
            },
        ),
    }
}

/// Inverse of [`canonical_instance_bytes`]; validates the payload.
pub fn decode_instance(bytes: &[u8]) -> Result<TaskInstance> {
    let wire: WireIn =
        serde_json::from_slice(bytes).map_err(|e| Error::json("decoding instance", e))?;
    let task: TaskKind = wire.task.parse()?;
    if wire.function_name != task.function_name() {
        return Err(Error::InvalidInstance(format!(
            "function_name `{}` does not match task {task}",
            wire.function_name
        )));
    }
    let ctx = |e| Error::json(format!("decoding {task} payload"), e);
    let payload = match task {
        TaskKind::Cn | TaskKind::Sp => {
            let q: WireQuery = serde_json::from_value(wire.instance).map_err(ctx)?;
            Payload::Query {
                graph: Graph::from_adjacency(q.adj)?,
                u: q.u,
                v: q.v,
            }
        }
        TaskKind::Mcs => {
            let p: WirePair = serde_json::from_value(wire.instance).map_err(ctx)?;
            Payload::GraphPair {
                g1: p.g1.into_graph()?,
                g2: p.g2.into_graph()?,
            }
        }
        TaskKind::Tsp => {
            let m: WireMatrix = serde_json::from_value(wire.instance).map_err(ctx)?;
            Payload::Weighted(WeightedCompleteGraph::from_matrix(m.matrix)?)
        }
        _ => {
            let a: WireAdj = serde_json::from_value(wire.instance).map_err(ctx)?;
            Payload::Graph(Graph::from_adjacency(a.adj)?)
        }
    };
    TaskInstance::new(task, payload)
}
