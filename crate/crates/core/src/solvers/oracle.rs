//! Exhaustive verification oracles. These deliberately share no code with
//! the solvers they check: subsets are enumerated as bitmasks, tours as
//! permutations, and the polynomial tasks go through an all-pairs distance
//! matrix and a union-find.

use crate::error::{Error, Result};
use crate::graph::{Graph, WeightedCompleteGraph};
use crate::task::{Answer, Payload, TaskInstance, TaskKind};

/// Largest node count the subset/permutation oracles accept.
pub const MAX_ORACLE_NODES: usize = 10;
/// Largest node count (per graph) for the common-subgraph oracle.
pub const MAX_MCS_ORACLE_NODES: usize = 7;

const UNREACHABLE: usize = usize::MAX / 4;

fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

/// Floyd–Warshall hop distances; `UNREACHABLE` marks disconnected pairs.
pub fn all_pairs_distances(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let adj = adjacency_matrix(g);
    let mut d = vec![vec![UNREACHABLE; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                d[i][j] = 0;
            } else if adj[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

pub fn union_find_components(g: &Graph) -> usize {
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    let n = g.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut components = n;
    for (u, v) in g.edges() {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    components
}

fn oracle_common_neighbors(g: &Graph, u: usize, v: usize) -> Vec<usize> {
    let adj = adjacency_matrix(g);
    (0..g.node_count())
        .filter(|&w| w != u && w != v && adj[u][w] && adj[v][w])
        .collect()
}

fn oracle_diameter(g: &Graph) -> Result<usize> {
    let d = all_pairs_distances(g);
    let max = d.iter().flatten().copied().max().unwrap_or(0);
    if max >= UNREACHABLE {
        Err(Error::InvalidInstance("graph is disconnected".into()))
    } else {
        Ok(max)
    }
}

fn masks(n: usize) -> impl Iterator<Item = u32> {
    0..(1u32 << n)
}

fn is_independent(adj: &[Vec<bool>], mask: u32) -> bool {
    let n = adj.len();
    (0..n).all(|i| {
        mask & (1 << i) == 0 || ((i + 1)..n).all(|j| mask & (1 << j) == 0 || !adj[i][j])
    })
}

fn is_clique(adj: &[Vec<bool>], mask: u32) -> bool {
    let n = adj.len();
    (0..n).all(|i| {
        mask & (1 << i) == 0 || ((i + 1)..n).all(|j| mask & (1 << j) == 0 || adj[i][j])
    })
}

fn is_cover(g: &Graph, mask: u32) -> bool {
    g.edges()
        .all(|(u, v)| mask & (1 << u) != 0 || mask & (1 << v) != 0)
}

fn check_range(task: TaskKind, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::OracleRange { task, nodes: n })
    } else {
        Ok(())
    }
}

pub fn brute_mis(g: &Graph) -> Result<usize> {
    check_range(TaskKind::Mis, g.node_count(), MAX_ORACLE_NODES)?;
    let adj = adjacency_matrix(g);
    Ok(masks(g.node_count())
        .filter(|&m| is_independent(&adj, m))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0))
}

pub fn brute_mvc(g: &Graph) -> Result<usize> {
    check_range(TaskKind::Mvc, g.node_count(), MAX_ORACLE_NODES)?;
    Ok(masks(g.node_count())
        .filter(|&m| is_cover(g, m))
        .map(|m| m.count_ones() as usize)
        .min()
        .unwrap_or(0))
}

pub fn brute_clique(g: &Graph) -> Result<usize> {
    check_range(TaskKind::Mcp, g.node_count(), MAX_ORACLE_NODES)?;
    let adj = adjacency_matrix(g);
    Ok(masks(g.node_count())
        .filter(|&m| is_clique(&adj, m))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0))
}

fn for_each_permutation(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k == items.len() {
        return f(items);
    }
    for i in k..items.len() {
        items.swap(k, i);
        if for_each_permutation(items, k + 1, f) {
            items.swap(k, i);
            return true;
        }
        items.swap(k, i);
    }
    false
}

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Maximum common induced subgraph by enumerating equal-size subset pairs and
/// testing every bijection between them.
pub fn brute_mcs(g1: &Graph, g2: &Graph) -> Result<usize> {
    let (n1, n2) = (g1.node_count(), g2.node_count());
    check_range(TaskKind::Mcs, n1.max(n2), MAX_MCS_ORACLE_NODES)?;
    let a1 = adjacency_matrix(g1);
    let a2 = adjacency_matrix(g2);
    let induced_edges = |adj: &[Vec<bool>], s: &[usize]| {
        s.iter()
            .enumerate()
            .map(|(i, &x)| s[i + 1..].iter().filter(|&&y| adj[x][y]).count())
            .sum::<usize>()
    };
    for k in (1..=n1.min(n2)).rev() {
        for m1 in masks(n1).filter(|m| m.count_ones() as usize == k) {
            let s1 = members(m1, n1);
            let e1 = induced_edges(&a1, &s1);
            for m2 in masks(n2).filter(|m| m.count_ones() as usize == k) {
                let mut s2 = members(m2, n2);
                if induced_edges(&a2, &s2) != e1 {
                    continue;
                }
                let found = for_each_permutation(&mut s2, 0, &mut |perm| {
                    (0..k).all(|i| (i + 1..k).all(|j| a1[s1[i]][s1[j]] == a2[perm[i]][perm[j]]))
                });
                if found {
                    return Ok(k);
                }
            }
        }
    }
    Ok(0)
}

/// Optimal tour length over all permutations with node 0 fixed first.
pub fn brute_tsp(w: &WeightedCompleteGraph) -> Result<u64> {
    let n = w.node_count();
    check_range(TaskKind::Tsp, n, MAX_ORACLE_NODES)?;
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best = u64::MAX;
    for_each_permutation(&mut rest, 0, &mut |perm| {
        let mut len = w.weight(0, perm[0]) + w.weight(perm[perm.len() - 1], 0);
        for pair in perm.windows(2) {
            len += w.weight(pair[0], pair[1]);
        }
        best = best.min(len);
        false
    });
    Ok(best)
}

/// Exact answer by an independent method: exhaustive enumeration for the
/// NP-complete tasks (oracle range only), distance matrix / union-find for
/// the polynomial ones (any size).
pub fn brute_force_oracle(instance: &TaskInstance) -> Result<Answer> {
    let task = instance.task();
    let int = |x: usize| Answer::Int(x as i64);
    match (task, instance.payload()) {
        (TaskKind::Cn, Payload::Query { graph, u, v }) => {
            Ok(Answer::List(oracle_common_neighbors(graph, *u, *v)))
        }
        (TaskKind::Sp, Payload::Query { graph, u, v }) => {
            let d = all_pairs_distances(graph)[*u][*v];
            if d >= UNREACHABLE {
                Err(Error::Unreachable { u: *u, v: *v })
            } else {
                Ok(int(d))
            }
        }
        (TaskKind::Cc, Payload::Graph(g)) => Ok(int(union_find_components(g))),
        (TaskKind::Gd, Payload::Graph(g)) => oracle_diameter(g).map(int),
        (TaskKind::Mis, Payload::Graph(g)) => brute_mis(g).map(int),
        (TaskKind::Mvc, Payload::Graph(g)) => brute_mvc(g).map(int),
        (TaskKind::Mcp, Payload::Graph(g)) => brute_clique(g).map(int),
        (TaskKind::Mcs, Payload::GraphPair { g1, g2 }) => brute_mcs(g1, g2).map(int),
        (TaskKind::Tsp, Payload::Weighted(w)) => brute_tsp(w).map(|x| Answer::Int(x as i64)),
        _ => unreachable!("TaskInstance validates payload shape"),
    }
}

/// Whether the exhaustive oracle accepts this instance.
pub fn within_oracle_range(instance: &TaskInstance) -> bool {
    let limit = match instance.task() {
        TaskKind::Mcs => MAX_MCS_ORACLE_NODES,
        t if t.is_np_complete() => MAX_ORACLE_NODES,
        _ => return true,
    };
    instance.node_count() <= limit
}
