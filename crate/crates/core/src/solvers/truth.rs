use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{exact, heuristics, oracle, Deadline};
use crate::error::{Error, Result};
use crate::task::{Answer, GroundTruth, Payload, Provenance, TaskInstance, TaskKind};

/// Labeling policy for NP-complete instances beyond the exhaustive oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroundTruthPolicy {
    /// Wall-clock budget for one exact search, in milliseconds.
    pub exact_budget_ms: u64,
    /// Run the exact searches on large instances at all.
    pub exact_on_large: bool,
}

impl Default for GroundTruthPolicy {
    fn default() -> Self {
        GroundTruthPolicy {
            exact_budget_ms: 5_000,
            exact_on_large: true,
        }
    }
}

impl GroundTruthPolicy {
    fn deadline(&self) -> Deadline {
        Deadline::after(Duration::from_millis(self.exact_budget_ms))
    }
}

fn labelled(answer: Answer, provenance: Provenance) -> GroundTruth {
    GroundTruth { answer, provenance }
}

fn int(x: usize) -> Answer {
    Answer::Int(x as i64)
}

/// Reference answer for one instance. Polynomial tasks are solved exactly;
/// NP-complete tasks use the exhaustive oracle when in range, then a
/// time-boxed exact search, then the heuristic pool.
pub fn ground_truth(instance: &TaskInstance, policy: &GroundTruthPolicy) -> Result<GroundTruth> {
    let task = instance.task();
    if !task.is_np_complete() {
        let answer = match instance.payload() {
            Payload::Query { graph, u, v } if task == TaskKind::Cn => {
                Answer::list(exact::solve_common_neighbors(graph, *u, *v)?)
            }
            Payload::Query { graph, u, v } => int(exact::solve_shortest_path(graph, *u, *v)?),
            Payload::Graph(g) if task == TaskKind::Cc => int(exact::solve_connected_components(g)),
            Payload::Graph(g) => int(exact::solve_diameter(g)?),
            _ => unreachable!("TaskInstance validates payload shape"),
        };
        return Ok(labelled(answer, Provenance::Exact));
    }

    if oracle::within_oracle_range(instance) {
        return Ok(labelled(
            oracle::brute_force_oracle(instance)?,
            Provenance::BruteOracle,
        ));
    }

    let exact_result = |r: Result<usize>| match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::SolverTimeout) => Ok(None),
        Err(e) => Err(e),
    };
    let try_exact = policy.exact_on_large || instance.node_count() <= oracle::MAX_ORACLE_NODES;

    let (exact_value, pool) = match instance.payload() {
        Payload::Graph(g) => {
            let exact_value = if try_exact {
                exact_result(match task {
                    TaskKind::Mcp => exact::exact_max_clique(g, policy.deadline()),
                    _ => exact::exact_max_independent_set(g, policy.deadline()),
                })?
            } else {
                None
            };
            let n = g.node_count();
            match task {
                TaskKind::Mis => (exact_value, heuristics::heuristic_mis(g)),
                TaskKind::Mvc => (
                    exact_value.map(|mis| n - mis),
                    heuristics::heuristic_mvc(g).min(n - heuristics::heuristic_mis(g)),
                ),
                _ => (exact_value, heuristics::greedy_clique(g)),
            }
        }
        Payload::GraphPair { g1, g2 } => {
            // The backtracking search is only attempted on small pairs; it
            // does not scale to the large bucket.
            let exact_value = if g1.node_count().max(g2.node_count()) <= oracle::MAX_ORACLE_NODES {
                exact_result(exact::exact_max_common_subgraph(g1, g2, policy.deadline()))?
            } else {
                None
            };
            let pool = heuristics::heuristic_mcs(g1, g2).max(heuristics::heuristic_mcs(g2, g1));
            (exact_value, pool)
        }
        Payload::Weighted(w) => {
            let pool = heuristics::heuristic_tsp(w).min(heuristics::two_opt_tsp(w));
            return Ok(labelled(
                Answer::Int(pool as i64),
                Provenance::ReferenceHeuristic,
            ));
        }
        Payload::Query { .. } => unreachable!("TaskInstance validates payload shape"),
    };

    Ok(match exact_value {
        Some(x) => labelled(int(x), Provenance::Exact),
        None => labelled(int(pool), Provenance::ReferenceHeuristic),
    })
}
