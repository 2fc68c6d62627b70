//! Python implementations of the reference solvers, written against the
//! argument shapes the runner shim passes. They agree with the Rust solvers
//! (for mcs, with `heuristic_mcs(g1, g2)`) and serve as known-good candidates
//! for demos and conformance checks.

use crate::task::TaskKind;

pub fn reference_code(task: TaskKind) -> &'static str {
    match task {
        TaskKind::Cn => include_str!("../reference/cn.py"),
        TaskKind::Cc => include_str!("../reference/cc.py"),
        TaskKind::Sp => include_str!("../reference/sp.py"),
        TaskKind::Gd => include_str!("../reference/gd.py"),
        TaskKind::Mis => include_str!("../reference/mis.py"),
        TaskKind::Mvc => include_str!("../reference/mvc.py"),
        TaskKind::Mcp => include_str!("../reference/mcp.py"),
        TaskKind::Mcs => include_str!("../reference/mcs.py"),
        TaskKind::Tsp => include_str!("../reference/tsp.py"),
    }
}
