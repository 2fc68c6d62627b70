use std::collections::VecDeque;

use crate::graph::{Graph, WeightedCompleteGraph};

/// Degree-ascending greedy independent set. Nodes are visited by degree with
/// ties broken by node id; each unblocked node joins the set and blocks its
/// neighbors.
pub fn heuristic_mis(g: &Graph) -> usize {
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by_key(|&v| g.degree(v));
    let mut blocked = vec![false; g.node_count()];
    let mut size = 0;
    for v in order {
        if !blocked[v] {
            size += 1;
            blocked[v] = true;
            for &u in g.neighbors(v) {
                blocked[u] = true;
            }
        }
    }
    size
}

/// Max-coverage greedy vertex cover: repeatedly take the vertex covering the
/// most uncovered edges, lowest id on ties.
pub fn heuristic_mvc(g: &Graph) -> usize {
    let n = g.node_count();
    let mut uncovered: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    let mut in_cover = vec![false; n];
    let mut size = 0;
    loop {
        let mut best: Option<(usize, usize)> = None;
        for (v, &c) in uncovered.iter().enumerate() {
            if c > 0 && best.is_none_or(|(_, bc)| c > bc) {
                best = Some((v, c));
            }
        }
        let Some((v, _)) = best else { break };
        in_cover[v] = true;
        uncovered[v] = 0;
        size += 1;
        for &w in g.neighbors(v) {
            if !in_cover[w] {
                uncovered[w] -= 1;
            }
        }
    }
    size
}

/// Greedy clique grown from every start vertex, adding the highest-degree
/// compatible candidate each step. Used only as a fallback reference.
pub fn greedy_clique(g: &Graph) -> usize {
    let n = g.node_count();
    let mut best = usize::from(n > 0);
    for start in 0..n {
        let mut candidates: Vec<usize> = g.neighbors(start).to_vec();
        let mut size = 1;
        while !candidates.is_empty() {
            let &pick = candidates
                .iter()
                .max_by_key(|&&c| (g.degree(c), std::cmp::Reverse(c)))
                .expect("nonempty");
            size += 1;
            candidates.retain(|&c| c != pick && g.has_edge(pick, c));
        }
        best = best.max(size);
    }
    best
}

/// Nearest-neighbor tour from `start`; ties go to the lowest node id.
/// Returns the visiting order.
pub fn heuristic_tsp_tour(w: &WeightedCompleteGraph, start: usize) -> Vec<usize> {
    let n = w.node_count();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut v = start;
    visited[v] = true;
    order.push(v);
    for _ in 1..n {
        let next = (0..n)
            .filter(|&u| !visited[u])
            .min_by_key(|&u| (w.weight(v, u), u))
            .expect("an unvisited node remains");
        visited[next] = true;
        order.push(next);
        v = next;
    }
    order
}

/// Best nearest-neighbor tour length over all start nodes, closing edge
/// included.
pub fn heuristic_tsp(w: &WeightedCompleteGraph) -> u64 {
    (0..w.node_count())
        .map(|s| w.tour_length(&heuristic_tsp_tour(w, s)))
        .min()
        .unwrap_or(0)
}

/// Multistart nearest neighbor followed by 2-opt descent from each start.
/// Reference-pool member for instances beyond exhaustive search.
pub fn two_opt_tsp(w: &WeightedCompleteGraph) -> u64 {
    let n = w.node_count();
    let mut best = u64::MAX;
    for s in 0..n {
        let mut tour = heuristic_tsp_tour(w, s);
        loop {
            let mut improved = false;
            for i in 0..n - 1 {
                for j in (i + 2)..n {
                    if i == 0 && j == n - 1 {
                        continue;
                    }
                    let (a, b) = (tour[i], tour[i + 1]);
                    let (c, d) = (tour[j], tour[(j + 1) % n]);
                    let before = w.weight(a, b) + w.weight(c, d);
                    let after = w.weight(a, c) + w.weight(b, d);
                    if after < before {
                        tour[i + 1..=j].reverse();
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        best = best.min(w.tour_length(&tour));
    }
    best
}

struct Matching<'a> {
    g1: &'a Graph,
    g2: &'a Graph,
    forward: Vec<Option<usize>>,
    backward: Vec<Option<usize>>,
    pairs: Vec<(usize, usize)>,
}

impl Matching<'_> {
    /// Maps `u1 -> u2` if the induced subgraphs on the matched sets stay
    /// isomorphic under the mapping; otherwise leaves the state untouched.
    fn try_map(&mut self, u1: usize, u2: usize) -> bool {
        let consistent = self
            .pairs
            .iter()
            .all(|&(a1, a2)| self.g1.has_edge(u1, a1) == self.g2.has_edge(u2, a2));
        if consistent {
            self.forward[u1] = Some(u2);
            self.backward[u2] = Some(u1);
            self.pairs.push((u1, u2));
        }
        consistent
    }

    fn free(&self, u1: usize, u2: usize) -> bool {
        self.forward[u1].is_none() && self.backward[u2].is_none()
    }
}

/// Degree-difference greedy matching with BFS extension. Returns the matched
/// node pairs, which always induce isomorphic subgraphs.
pub fn heuristic_mcs_mapping(g1: &Graph, g2: &Graph) -> Vec<(usize, usize)> {
    let mut candidates: Vec<(usize, usize)> = (0..g1.node_count())
        .flat_map(|u1| (0..g2.node_count()).map(move |u2| (u1, u2)))
        .collect();
    candidates.sort_by_key(|&(u1, u2)| {
        (
            g1.degree(u1).abs_diff(g2.degree(u2)),
            std::cmp::Reverse(g1.degree(u1)),
            u1,
            u2,
        )
    });
    let mut m = Matching {
        g1,
        g2,
        forward: vec![None; g1.node_count()],
        backward: vec![None; g2.node_count()],
        pairs: Vec::new(),
    };
    for (u1, u2) in candidates {
        if !m.free(u1, u2) || !m.try_map(u1, u2) {
            continue;
        }
        let mut queue = VecDeque::from([(u1, u2)]);
        while let Some((v1, v2)) = queue.pop_front() {
            for &k1 in g1.neighbors(v1) {
                for &k2 in g2.neighbors(v2) {
                    if m.free(k1, k2)
                        && g1.degree(k1).abs_diff(g2.degree(k2)) <= 2
                        && m.try_map(k1, k2)
                    {
                        queue.push_back((k1, k2));
                    }
                }
            }
        }
    }
    m.pairs
}

pub fn heuristic_mcs(g1: &Graph, g2: &Graph) -> usize {
    heuristic_mcs_mapping(g1, g2).len()
}
