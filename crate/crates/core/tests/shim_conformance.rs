//! The runner shim against the in-process solvers, plus its error schema.

use std::io::Write;
use std::process::{Command, Stdio};

use graphcode::dataset::{generate_instances, GenConfig};
use graphcode::reference::reference_code;
use graphcode::sandbox::{shim_request, ExecLimits, ExecOutcome, Sandbox, SHIM_SOURCE};
use graphcode::solvers::{
    exact_max_clique, heuristic_mcs, heuristic_mis, heuristic_mvc, heuristic_tsp,
    solve_common_neighbors, solve_connected_components, solve_diameter, solve_shortest_path,
    Deadline,
};
use graphcode::task::Payload;
use graphcode::{Answer, SizeBucket, TaskInstance, TaskKind};

/// What the reference code for each task computes, evaluated in Rust.
fn in_process(inst: &TaskInstance) -> Answer {
    let int = |x: usize| Answer::Int(x as i64);
    match (inst.task(), inst.payload()) {
        (TaskKind::Cn, Payload::Query { graph, u, v }) => {
            Answer::list(solve_common_neighbors(graph, *u, *v).unwrap())
        }
        (TaskKind::Sp, Payload::Query { graph, u, v }) => int(solve_shortest_path(graph, *u, *v).unwrap()),
        (TaskKind::Cc, Payload::Graph(g)) => int(solve_connected_components(g)),
        (TaskKind::Gd, Payload::Graph(g)) => int(solve_diameter(g).unwrap()),
        (TaskKind::Mis, Payload::Graph(g)) => int(heuristic_mis(g)),
        (TaskKind::Mvc, Payload::Graph(g)) => int(heuristic_mvc(g)),
        (TaskKind::Mcp, Payload::Graph(g)) => int(exact_max_clique(g, Deadline::none()).unwrap()),
        (TaskKind::Mcs, Payload::GraphPair { g1, g2 }) => int(heuristic_mcs(g1, g2)),
        (TaskKind::Tsp, Payload::Weighted(w)) => Answer::Int(heuristic_tsp(w) as i64),
        (task, _) => panic!("unexpected payload for {task}"),
    }
}

#[test]
fn reference_code_matches_solvers_on_100_instances_per_task() {
    let sandbox = Sandbox::new(ExecLimits::with_timeout(30.0)).with_workers(8);
    for task in TaskKind::ALL {
        let instances = generate_instances(task, SizeBucket::Small, 100, 2024, &GenConfig::default()).unwrap();
        let outcomes = sandbox.apply(reference_code(task), &instances).unwrap();
        for (i, (inst, out)) in instances.iter().zip(&outcomes).enumerate() {
            assert_eq!(
                out,
                &ExecOutcome::Ok { value: in_process(inst) },
                "{task} instance {i}"
            );
        }
    }
}

fn run_shim(stdin: &[u8]) -> (Option<i32>, serde_json::Value) {
    let dir = tempfile::tempdir().unwrap();
    let shim = dir.path().join("runner.py");
    std::fs::write(&shim, SHIM_SOURCE).unwrap();
    let mut child = Command::new("python3")
        .arg(&shim)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    let out = child.wait_with_output().unwrap();
    let line = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(line.trim()).unwrap_or_else(|e| panic!("{line:?}: {e}"));
    (out.status.code(), value)
}

fn assert_error_schema(value: &serde_json::Value, kind: &str) {
    let obj = value.as_object().unwrap();
    assert_eq!(obj["status"], "error");
    assert_eq!(obj["type"], kind);
    assert!(obj["message"].as_str().is_some_and(|m| !m.is_empty()));
    assert_eq!(obj.len(), 3);
}

#[test]
fn broken_code_yields_error_json_and_exit_zero() {
    let inst = TaskInstance::graph(TaskKind::Cc, graphcode::Graph::complete(3)).unwrap();
    for code in [
        "def connected_component_undirected(G)\n    return 1\n",
        "def connected_component_undirected(G):\n    return G[99]\n",
        "def other(G):\n    return 1\n",
        "def connected_component_undirected(G):\n    return [1, 2]\n",
        "import sys\ndef connected_component_undirected(G):\n    sys.exit(1)\n",
        "raise RuntimeError('at import')\n",
    ] {
        let (code_status, value) = run_shim(&shim_request(code, &inst));
        assert_eq!(code_status, Some(0), "{code}");
        assert_error_schema(&value, "exception");
    }
}

#[test]
fn malformed_requests_are_protocol_errors() {
    for raw in [
        &b"not json"[..],
        br#"{"code": "!!!", "request": {}}"#,
        br#"{"code": "ZGVmIGYoKTogcGFzcw==", "request": {"task": "zz", "function_name": "f", "instance": {}}}"#,
        br#"{"request": {"task": "cc"}}"#,
    ] {
        let (status, value) = run_shim(raw);
        assert_eq!(status, Some(0));
        assert_error_schema(&value, "protocol");
    }
}

#[test]
fn ok_replies_have_the_value_schema() {
    let inst = TaskInstance::graph(TaskKind::Cc, graphcode::Graph::empty(4)).unwrap();
    let (status, value) = run_shim(&shim_request(reference_code(TaskKind::Cc), &inst));
    assert_eq!(status, Some(0));
    assert_eq!(value, serde_json::json!({"status": "ok", "value": 4}));
}
