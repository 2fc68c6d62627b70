use std::collections::VecDeque;

use super::Deadline;
use crate::error::{Error, Result};
use crate::graph::Graph;

fn check_node(g: &Graph, u: usize) -> Result<()> {
    if g.contains_node(u) {
        Ok(())
    } else {
        Err(Error::InvalidInstance(format!(
            "node {u} outside 0..{}",
            g.node_count()
        )))
    }
}

/// Nodes adjacent to both `u` and `v`, ascending, never including `u` or `v`.
pub fn solve_common_neighbors(g: &Graph, u: usize, v: usize) -> Result<Vec<usize>> {
    check_node(g, u)?;
    check_node(g, v)?;
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i] != u && a[i] != v {
                    out.push(a[i]);
                }
                i += 1;
                j += 1;
            }
        }
    }
    Ok(out)
}

pub fn solve_connected_components(g: &Graph) -> usize {
    g.component_count()
}

fn bfs_distances(g: &Graph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(x) = queue.pop_front() {
        let d = dist[x].expect("queued nodes have a distance");
        for &y in g.neighbors(x) {
            if dist[y].is_none() {
                dist[y] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Hop count of a shortest `u`-`v` path.
pub fn solve_shortest_path(g: &Graph, u: usize, v: usize) -> Result<usize> {
    check_node(g, u)?;
    check_node(g, v)?;
    bfs_distances(g, u)[v].ok_or(Error::Unreachable { u, v })
}

/// Largest BFS eccentricity. Disconnected graphs have no finite diameter.
pub fn solve_diameter(g: &Graph) -> Result<usize> {
    let mut best = 0;
    for s in 0..g.node_count() {
        for d in bfs_distances(g, s) {
            match d {
                Some(d) => best = best.max(d),
                None => {
                    return Err(Error::InvalidInstance(
                        "graph is disconnected; diameter is undefined".into(),
                    ))
                }
            }
        }
    }
    Ok(best)
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Self::new(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn or(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn and_count(&self, other: &Bits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }
}

struct CliqueSearch<'a> {
    rows: &'a [Bits],
    best: usize,
    deadline: Deadline,
    steps: u64,
    timed_out: bool,
}

impl CliqueSearch<'_> {
    // Bron–Kerbosch with Tomita pivoting; branches that cannot beat the
    // incumbent are cut.
    fn expand(&mut self, depth: usize, mut p: Bits, mut x: Bits) {
        self.steps += 1;
        if self.steps.is_multiple_of(1024) && self.deadline.expired() {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        if p.is_empty() {
            if x.is_empty() {
                self.best = self.best.max(depth);
            }
            return;
        }
        if depth + p.len() <= self.best {
            return;
        }
        let pivot = p
            .or(&x)
            .iter()
            .max_by_key(|&u| (p.and_count(&self.rows[u]), std::cmp::Reverse(u)))
            .expect("p is nonempty");
        let candidates: Vec<usize> = p.and_not(&self.rows[pivot]).iter().collect();
        for v in candidates {
            if depth + p.len() <= self.best || self.timed_out {
                return;
            }
            let row = &self.rows[v];
            self.expand(depth + 1, p.and(row), x.and(row));
            p.remove(v);
            x.insert(v);
        }
    }
}

fn adjacency_rows(g: &Graph) -> Vec<Bits> {
    let n = g.node_count();
    (0..n)
        .map(|u| {
            let mut row = Bits::new(n);
            for &v in g.neighbors(u) {
                row.insert(v);
            }
            row
        })
        .collect()
}

/// Exact maximum clique size. Returns [`Error::SolverTimeout`] when the
/// deadline passes before the search completes.
pub fn exact_max_clique(g: &Graph, deadline: Deadline) -> Result<usize> {
    let n = g.node_count();
    let rows = adjacency_rows(g);
    let mut search = CliqueSearch {
        rows: &rows,
        best: 0,
        deadline,
        steps: 0,
        timed_out: false,
    };
    search.expand(0, Bits::full(n), Bits::new(n));
    if search.timed_out {
        Err(Error::SolverTimeout)
    } else {
        Ok(search.best)
    }
}

/// Exact maximum independent set size, as the maximum clique of the
/// complement.
pub fn exact_max_independent_set(g: &Graph, deadline: Deadline) -> Result<usize> {
    exact_max_clique(&g.complement(), deadline)
}

struct CommonSubgraphSearch<'a> {
    g1: &'a Graph,
    g2: &'a Graph,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    best: usize,
    deadline: Deadline,
    steps: u64,
    timed_out: bool,
}

impl CommonSubgraphSearch<'_> {
    fn consistent(&self, u1: usize, u2: usize, upto: usize) -> bool {
        (0..upto).all(|a1| match self.map[a1] {
            Some(a2) => self.g1.has_edge(u1, a1) == self.g2.has_edge(u2, a2),
            None => true,
        })
    }

    // Assigns each node of g1 in turn to an unused g2 node or leaves it out.
    fn search(&mut self, next: usize, matched: usize) {
        self.steps += 1;
        if self.steps.is_multiple_of(1024) && self.deadline.expired() {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        let n1 = self.g1.node_count();
        let n2 = self.g2.node_count();
        let remaining = (n1 - next).min(n2 - matched);
        if matched + remaining <= self.best {
            return;
        }
        if next == n1 {
            self.best = self.best.max(matched);
            return;
        }
        for u2 in 0..n2 {
            if !self.used[u2] && self.consistent(next, u2, next) {
                self.map[next] = Some(u2);
                self.used[u2] = true;
                self.search(next + 1, matched + 1);
                self.used[u2] = false;
                self.map[next] = None;
            }
        }
        self.search(next + 1, matched);
    }
}

/// Exact maximum common induced subgraph size (node count), by
/// backtracking over partial injections with a cardinality bound.
pub fn exact_max_common_subgraph(g1: &Graph, g2: &Graph, deadline: Deadline) -> Result<usize> {
    let mut s = CommonSubgraphSearch {
        g1,
        g2,
        map: vec![None; g1.node_count()],
        used: vec![false; g2.node_count()],
        best: 0,
        deadline,
        steps: 0,
        timed_out: false,
    };
    s.search(0, 0);
    if s.timed_out {
        Err(Error::SolverTimeout)
    } else {
        Ok(s.best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_graph, EdgeDensity};
    use std::time::Duration;

    fn graph_a() -> Graph {
        Graph::from_edges(
            5,
            &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)],
        )
        .unwrap()
    }

    #[test]
    fn common_neighbors_examples() {
        assert_eq!(solve_common_neighbors(&graph_a(), 0, 1).unwrap(), vec![2, 3]);
        assert_eq!(solve_common_neighbors(&Graph::complete(3), 0, 1).unwrap(), vec![2]);
        assert!(solve_common_neighbors(&Graph::empty(2), 0, 1).unwrap().is_empty());
        assert!(matches!(
            solve_common_neighbors(&Graph::empty(2), 0, 5),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn component_examples() {
        assert_eq!(solve_connected_components(&Graph::complete(3)), 1);
        assert_eq!(solve_connected_components(&Graph::empty(3)), 3);
        assert_eq!(solve_connected_components(&graph_a()), 1);
    }

    #[test]
    fn shortest_path_examples() {
        assert_eq!(solve_shortest_path(&Graph::path(3), 0, 2).unwrap(), 2);
        assert_eq!(solve_shortest_path(&graph_a(), 1, 4).unwrap(), 2);
        assert_eq!(solve_shortest_path(&graph_a(), 3, 3).unwrap(), 0);
        assert!(matches!(
            solve_shortest_path(&Graph::empty(2), 0, 1),
            Err(Error::Unreachable { u: 0, v: 1 })
        ));
    }

    #[test]
    fn diameter_examples() {
        for n in 2..7 {
            assert_eq!(solve_diameter(&Graph::complete(n)).unwrap(), 1);
        }
        assert_eq!(solve_diameter(&Graph::path(3)).unwrap(), 2);
        assert_eq!(solve_diameter(&graph_a()).unwrap(), 2);
        assert!(solve_diameter(&Graph::empty(2)).is_err());
    }

    #[test]
    fn clique_examples() {
        assert_eq!(exact_max_clique(&Graph::complete(3), Deadline::none()).unwrap(), 3);
        assert_eq!(exact_max_clique(&Graph::empty(4), Deadline::none()).unwrap(), 1);
        assert_eq!(exact_max_clique(&graph_a(), Deadline::none()).unwrap(), 4);
        for n in 1..12 {
            assert_eq!(exact_max_clique(&Graph::complete(n), Deadline::none()).unwrap(), n);
        }
        assert_eq!(exact_max_clique(&Graph::empty(0), Deadline::none()).unwrap(), 0);
    }

    #[test]
    fn clique_handles_more_than_64_nodes() {
        let mut g = generate_graph(130..=130, EdgeDensity::Fixed(0.05), false, 3);
        // plant a 7-clique spanning word boundaries
        let planted = [1, 63, 64, 65, 100, 127, 128];
        let mut edges: Vec<_> = g.edges().collect();
        for (i, &a) in planted.iter().enumerate() {
            for &b in &planted[i + 1..] {
                edges.push((a, b));
            }
        }
        g = Graph::from_edges(130, &edges).unwrap();
        assert!(exact_max_clique(&g, Deadline::none()).unwrap() >= 7);
    }

    #[test]
    fn deadline_in_the_past_times_out() {
        let g = generate_graph(100..=100, EdgeDensity::Fixed(0.9), false, 1);
        let r = exact_max_clique(&g, Deadline::after(Duration::ZERO));
        assert!(matches!(r, Err(Error::SolverTimeout)));
    }

    #[test]
    fn common_subgraph_small_cases() {
        let one = Graph::empty(1);
        assert_eq!(exact_max_common_subgraph(&one, &one, Deadline::none()).unwrap(), 1);
        let k3 = Graph::complete(3);
        let p3 = Graph::path(3);
        assert_eq!(exact_max_common_subgraph(&k3, &k3, Deadline::none()).unwrap(), 3);
        assert_eq!(exact_max_common_subgraph(&k3, &p3, Deadline::none()).unwrap(), 2);
        assert_eq!(exact_max_common_subgraph(&Graph::empty(4), &k3, Deadline::none()).unwrap(), 1);
    }
}
