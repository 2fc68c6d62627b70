//! Reference solvers for the nine tasks.
//!
//! `exact` holds the polynomial-time solvers and the exact NP searches,
//! `heuristics` the deterministic greedy procedures the injected pseudocode
//! describes, `oracle` the exhaustive enumerations used for verification, and
//! `truth` the policy that picks among them when labeling a dataset.

mod exact;
mod heuristics;
pub mod oracle;
mod truth;

use std::time::{Duration, Instant};

pub use exact::{
    exact_max_clique, exact_max_common_subgraph, exact_max_independent_set,
    solve_common_neighbors, solve_connected_components, solve_diameter, solve_shortest_path,
};
pub use heuristics::{
    greedy_clique, heuristic_mcs, heuristic_mcs_mapping, heuristic_mis, heuristic_mvc,
    heuristic_tsp, heuristic_tsp_tour, two_opt_tsp,
};
pub use oracle::brute_force_oracle;
pub use truth::{ground_truth, GroundTruthPolicy};

/// Optional wall-clock limit for the exponential searches.
#[derive(Debug, Clone, Copy, Default)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn none() -> Self {
        Deadline(None)
    }

    pub fn after(budget: Duration) -> Self {
        Deadline(Some(Instant::now() + budget))
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }
}
