//! Undirected graph model, random instance generation and the text
//! serializations used in direct-answer prompts.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph on nodes `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|u| (0..n).filter(|&v| v != u).collect())
            .collect();
        Graph { adj }
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges).expect("path edges are valid")
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::from_edges(leaves + 1, &edges).expect("star edges are valid")
    }

    /// Builds a graph from an undirected edge list. Duplicate edges (in either
    /// orientation) collapse; self-loops and out-of-range ids are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInstance(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop on node {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adj })
    }

    /// Validates an adjacency-list representation. Lists may arrive unsorted
    /// but must be symmetric, loop-free and duplicate-free.
    pub fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Result<Self> {
        let n = adj.len();
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInstance(format!(
                    "duplicate neighbor in adjacency list of node {u}"
                )));
            }
            if let Some(&bad) = list.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidInstance(format!(
                    "node {u} lists neighbor {bad} outside 0..{n}"
                )));
            }
            if list.binary_search(&u).is_ok() {
                return Err(Error::InvalidInstance(format!("self-loop on node {u}")));
            }
        }
        for (u, list) in adj.iter().enumerate() {
            for &v in list {
                if adj[v].binary_search(&u).is_err() {
                    return Err(Error::InvalidInstance(format!(
                        "asymmetric adjacency: {u} lists {v} but not vice versa"
                    )));
                }
            }
        }
        Ok(Graph { adj })
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj
            .get(u)
            .is_some_and(|list| list.binary_search(&v).is_ok())
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn contains_node(&self, u: usize) -> bool {
        u < self.adj.len()
    }

    /// Number of connected components, by BFS sweep.
    pub fn component_count(&self) -> usize {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Graph on the same node set whose edges are exactly the non-edges of
    /// `self`.
    pub fn complement(&self) -> Graph {
        let n = self.node_count();
        let adj = (0..n)
            .map(|u| {
                (0..n)
                    .filter(|&v| v != u && self.adj[u].binary_search(&v).is_err())
                    .collect()
            })
            .collect();
        Graph { adj }
    }

    pub fn serialize(&self, format: SerializationFormat) -> String {
        serialize_graph(self, format)
    }
}

impl TryFrom<Vec<Vec<usize>>> for Graph {
    type Error = Error;

    fn try_from(adj: Vec<Vec<usize>>) -> Result<Self> {
        Graph::from_adjacency(adj)
    }
}

impl From<Graph> for Vec<Vec<usize>> {
    fn from(g: Graph) -> Self {
        g.adj
    }
}

/// Weighted complete graph stored as a full symmetric weight matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u64>>", into = "Vec<Vec<u64>>")]
pub struct WeightedCompleteGraph {
    weights: Vec<Vec<u64>>,
}

impl WeightedCompleteGraph {
    pub fn from_matrix(weights: Vec<Vec<u64>>) -> Result<Self> {
        let n = weights.len();
        if n < 3 {
            return Err(Error::InvalidInstance(format!(
                "weighted complete graph needs at least 3 nodes, got {n}"
            )));
        }
        for (i, row) in weights.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &w) in row.iter().enumerate() {
                if i == j && w != 0 {
                    return Err(Error::InvalidInstance(format!(
                        "diagonal entry ({i}, {i}) is {w}, expected 0"
                    )));
                }
                if i != j && w == 0 {
                    return Err(Error::InvalidInstance(format!(
                        "edge ({i}, {j}) has zero weight"
                    )));
                }
                if weights[j][i] != w {
                    return Err(Error::InvalidInstance(format!(
                        "asymmetric weights at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(WeightedCompleteGraph { weights })
    }

    /// Builds the matrix from the upper-triangle weights `(i, j, w)`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize, u64)]) -> Result<Self> {
        let mut weights = vec![vec![0; n]; n];
        for &(i, j, w) in pairs {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidInstance(format!("bad pair ({i}, {j})")));
            }
            weights[i][j] = w;
            weights[j][i] = w;
        }
        Self::from_matrix(weights)
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> u64 {
        self.weights[i][j]
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.weights
    }

    /// Length of the closed tour visiting `order` and returning to its start.
    pub fn tour_length(&self, order: &[usize]) -> u64 {
        let closing = match (order.first(), order.last()) {
            (Some(&a), Some(&b)) => self.weights[b][a],
            _ => 0,
        };
        order
            .windows(2)
            .map(|w| self.weights[w[0]][w[1]])
            .sum::<u64>()
            + closing
    }
}

impl TryFrom<Vec<Vec<u64>>> for WeightedCompleteGraph {
    type Error = Error;

    fn try_from(weights: Vec<Vec<u64>>) -> Result<Self> {
        WeightedCompleteGraph::from_matrix(weights)
    }
}

impl From<WeightedCompleteGraph> for Vec<Vec<u64>> {
    fn from(g: WeightedCompleteGraph) -> Self {
        g.weights
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeBucket {
    Small,
    Large,
}

impl SizeBucket {
    pub const ALL: [SizeBucket; 2] = [SizeBucket::Small, SizeBucket::Large];

    pub fn node_range(self) -> RangeInclusive<usize> {
        match self {
            SizeBucket::Small => 3..=10,
            SizeBucket::Large => 20..=100,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SizeBucket::Small => "small",
            SizeBucket::Large => "large",
        }
    }
}

impl std::fmt::Display for SizeBucket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SizeBucket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(SizeBucket::Small),
            "large" => Ok(SizeBucket::Large),
            other => Err(Error::Config(format!("unknown size bucket `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SerializationFormat {
    EdgeList,
    Adjacency,
    AdjacencyNl,
}

impl SerializationFormat {
    pub const ALL: [SerializationFormat; 3] = [
        SerializationFormat::EdgeList,
        SerializationFormat::Adjacency,
        SerializationFormat::AdjacencyNl,
    ];
}

/// Edge probability for Erdős–Rényi sampling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeDensity {
    /// `ln(n) / (n - 1)`, giving an expected average degree of about `ln(n)`.
    #[default]
    LogDegree,
    Fixed(f64),
}

impl EdgeDensity {
    pub fn probability(self, n: usize) -> f64 {
        match self {
            EdgeDensity::Fixed(p) => p,
            EdgeDensity::LogDegree if n < 2 => 1.0,
            EdgeDensity::LogDegree => ((n as f64).ln() / (n as f64 - 1.0)).clamp(f64::MIN_POSITIVE, 1.0),
        }
    }

    pub fn validate(self) -> Result<()> {
        match self {
            EdgeDensity::Fixed(p) if !(p > 0.0 && p <= 1.0) => Err(Error::Config(format!(
                "edge density must lie in (0, 1], got {p}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Samples a graph with node count uniform in `nodes` and independent edges at
/// the given density. With `require_connected`, a uniformly random spanning
/// tree is laid down before the Erdős–Rényi pass.
pub fn generate_graph(
    nodes: RangeInclusive<usize>,
    density: EdgeDensity,
    require_connected: bool,
    seed: u64,
) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_graph(&mut rng, nodes, density, require_connected)
}

pub(crate) fn sample_graph<R: Rng>(
    rng: &mut R,
    nodes: RangeInclusive<usize>,
    density: EdgeDensity,
    require_connected: bool,
) -> Graph {
    let n = rng.gen_range(nodes);
    let p = density.probability(n);
    let mut present = vec![false; n * n];
    let mut edges = Vec::new();
    let mut add = |u: usize, v: usize, edges: &mut Vec<(usize, usize)>| {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        if !present[a * n + b] {
            present[a * n + b] = true;
            edges.push((a, b));
        }
    };
    if require_connected && n > 1 {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        for i in 1..n {
            let parent = order[rng.gen_range(0..i)];
            add(order[i], parent, &mut edges);
        }
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                add(u, v, &mut edges);
            }
        }
    }
    Graph::from_edges(n, &edges).expect("generated edges are valid")
}

/// Samples a complete graph with integer weights uniform in `weights`.
pub fn generate_weighted_complete(
    n: usize,
    weights: RangeInclusive<u64>,
    seed: u64,
) -> Result<WeightedCompleteGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_weighted_complete(&mut rng, n, weights)
}

pub(crate) fn sample_weighted_complete<R: Rng>(
    rng: &mut R,
    n: usize,
    weights: RangeInclusive<u64>,
) -> Result<WeightedCompleteGraph> {
    if n < 3 {
        return Err(Error::InvalidInstance(format!(
            "weighted complete graph needs at least 3 nodes, got {n}"
        )));
    }
    if *weights.start() < 1 || weights.start() > weights.end() {
        return Err(Error::InvalidInstance(format!(
            "weight range {}..={} must be a nonempty range of positive integers",
            weights.start(),
            weights.end()
        )));
    }
    let mut matrix = vec![vec![0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.gen_range(weights.clone());
            matrix[i][j] = w;
            matrix[j][i] = w;
        }
    }
    WeightedCompleteGraph::from_matrix(matrix)
}

fn join_ids<'a>(ids: impl IntoIterator<Item = &'a usize>, sep: &str) -> String {
    let mut out = String::new();
    for (k, id) in ids.into_iter().enumerate() {
        if k > 0 {
            out.push_str(sep);
        }
        write!(out, "{id}").unwrap();
    }
    out
}

/// Edge list as a Python-style tuple list, e.g. `[(0, 1), (1, 2)]`.
pub fn edge_tuple_list(g: &Graph) -> String {
    let body: Vec<String> = g.edges().map(|(u, v)| format!("({u}, {v})")).collect();
    format!("[{}]", body.join(", "))
}

/// One `Node i is connected to nodes a,b,c.` sentence per node.
pub fn adjacency_sentences(g: &Graph) -> String {
    (0..g.node_count())
        .map(|u| {
            if g.degree(u) == 0 {
                format!("Node {u} is isolated.")
            } else {
                format!("Node {u} is connected to nodes {}.", join_ids(g.neighbors(u), ","))
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn serialize_graph(g: &Graph, format: SerializationFormat) -> String {
    match format {
        SerializationFormat::EdgeList => format!("graph edgelist is {}", edge_tuple_list(g)),
        SerializationFormat::Adjacency => (0..g.node_count())
            .map(|u| format!("{u}: [{}]", join_ids(g.neighbors(u), ", ")))
            .collect::<Vec<_>>()
            .join(", "),
        SerializationFormat::AdjacencyNl => adjacency_sentences(g),
    }
}
