//! Property suites over solvers, oracles, prompts, gateway and metrics.

use std::sync::Arc;

use graphcode::baseline::{baseline_prompt, graph_reading_truth, BaselineStyle, GraphReadingProperty};
use graphcode::graph::{generate_graph, generate_weighted_complete, EdgeDensity};
use graphcode::llm::{ChatMessage, CompletionParams, Gateway, ReplayBackend, ScriptedBackend};
use graphcode::metrics::{accuracy, approximation_ratio, feasible_rate, EvalReport, Prediction};
use graphcode::prompts::{PromptLibrary, PseudocodeVariant};
use graphcode::solvers::oracle::{
    all_pairs_distances, brute_mcs, brute_mis, brute_mvc, brute_tsp, union_find_components,
};
use graphcode::solvers::{
    exact_max_clique, heuristic_mcs, heuristic_mis, heuristic_mvc, heuristic_tsp,
    solve_common_neighbors, solve_diameter, solve_shortest_path, Deadline,
};
use graphcode::{Answer, Graph, SerializationFormat, TaskInstance, TaskKind};
use proptest::prelude::*;

fn small_graph(seed: u64, max_n: usize) -> Graph {
    let density = EdgeDensity::Fixed(0.15 + (seed % 7) as f64 * 0.1);
    generate_graph(1..=max_n, density, false, seed)
}

#[test]
fn thousand_generated_graphs_are_valid() {
    for seed in 0..1000u64 {
        let connected = seed % 2 == 0;
        let g = generate_graph(1..=30, EdgeDensity::LogDegree, connected, seed);
        let n = g.node_count();
        for u in 0..n {
            for &v in g.neighbors(u) {
                assert!(v < n && v != u, "seed {seed}");
                assert!(g.neighbors(v).contains(&u), "seed {seed}");
            }
        }
        if connected {
            assert_eq!(union_find_components(&g), 1, "seed {seed}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn gallai_and_complement_duality(seed in any::<u64>()) {
        let g = small_graph(seed, 10);
        let n = g.node_count();
        let mis = brute_mis(&g).unwrap();
        prop_assert_eq!(mis + brute_mvc(&g).unwrap(), n);
        prop_assert_eq!(exact_max_clique(&g, Deadline::none()).unwrap(), brute_mis(&g.complement()).unwrap());
    }

    #[test]
    fn heuristics_stay_on_their_side(seed in any::<u64>()) {
        let g = small_graph(seed, 10);
        prop_assert!(heuristic_mis(&g) <= brute_mis(&g).unwrap());
        prop_assert!(heuristic_mvc(&g) >= brute_mvc(&g).unwrap());
        let g1 = small_graph(seed ^ 1, 6);
        let g2 = small_graph(seed ^ 2, 6);
        prop_assert!(heuristic_mcs(&g1, &g2) <= brute_mcs(&g1, &g2).unwrap());
        let w = generate_weighted_complete(3 + (seed % 6) as usize, 1..=100, seed).unwrap();
        prop_assert!(heuristic_tsp(&w) >= brute_tsp(&w).unwrap());
    }

    #[test]
    fn path_queries_are_symmetric(seed in any::<u64>()) {
        let g = generate_graph(2..=12, EdgeDensity::Fixed(0.3), true, seed);
        let n = g.node_count();
        let dist = all_pairs_distances(&g);
        let mut diameter = 0;
        for u in 0..n {
            for v in 0..n {
                let d = solve_shortest_path(&g, u, v).unwrap();
                prop_assert_eq!(d, solve_shortest_path(&g, v, u).unwrap());
                prop_assert_eq!(d, dist[u][v]);
                diameter = diameter.max(d);
                if u != v {
                    let cn = solve_common_neighbors(&g, u, v).unwrap();
                    prop_assert_eq!(&cn, &solve_common_neighbors(&g, v, u).unwrap());
                    prop_assert!(!cn.contains(&u) && !cn.contains(&v));
                }
            }
        }
        prop_assert_eq!(solve_diameter(&g).unwrap(), diameter);
    }

    #[test]
    fn graph_reading_counts(seed in any::<u64>()) {
        let g = small_graph(seed, 25);
        let degree_sum: usize = (0..g.node_count()).map(|u| g.degree(u)).sum();
        prop_assert_eq!(graph_reading_truth(&g, GraphReadingProperty::NodeCount), g.node_count() as f64);
        prop_assert_eq!(graph_reading_truth(&g, GraphReadingProperty::EdgeCount), (degree_sum / 2) as f64);
    }

    #[test]
    fn baseline_prompt_grows_with_edges(seed in any::<u64>(), style_ix in 0usize..6, fmt_ix in 0usize..3) {
        let lib = PromptLibrary::embedded();
        let style = BaselineStyle::ALL[style_ix];
        let fmt = SerializationFormat::ALL[fmt_ix];
        let full = generate_graph(4..=14, EdgeDensity::Fixed(0.5), false, seed);
        let n = full.node_count();
        let edges: Vec<(usize, usize)> = full.edges().collect();
        let mut last = 0;
        for m in 0..=edges.len() {
            let g = Graph::from_edges(n, &edges[..m]).unwrap();
            let inst = TaskInstance::graph(TaskKind::Mis, g).unwrap();
            let len = baseline_prompt(&lib, &inst, fmt, style).unwrap().len();
            prop_assert!(len >= last, "{} edges: {} < {}", m, len, last);
            last = len;
        }
    }

    #[test]
    fn gateway_counter_matches_records(n in 0usize..20) {
        let backend = ScriptedBackend::new((0..n).map(|i| format!("r{i}")));
        let gw = Gateway::new(Arc::new(backend), CompletionParams::default()).recording();
        let msg = [ChatMessage::user("q")];
        while gw.complete(&msg).is_ok() {}
        prop_assert_eq!(gw.calls() as usize, n);
        prop_assert_eq!(gw.records().len(), n);

        // a replay of the recording answers the same requests the same way
        let replay = Gateway::new(Arc::new(ReplayBackend::from_session(gw.session().unwrap())), CompletionParams::default());
        for i in 0..n {
            prop_assert_eq!(replay.complete(&msg).unwrap().0, format!("r{i}"));
        }
    }

    #[test]
    fn np_reports_keep_accuracy_below_feasibility(
        truths in proptest::collection::vec(1i64..50, 1..40),
        offsets in proptest::collection::vec(-3i64..4, 40),
        absent in proptest::collection::vec(any::<bool>(), 40),
        task_ix in 0usize..5,
    ) {
        let task = [TaskKind::Mis, TaskKind::Mvc, TaskKind::Mcp, TaskKind::Mcs, TaskKind::Tsp][task_ix];
        let preds: Vec<Prediction> = truths
            .iter()
            .enumerate()
            .map(|(i, t)| if absent[i] { Err("timeout".into()) } else { Ok(Answer::Int(t + offsets[i])) })
            .collect();
        let truth_answers: Vec<Answer> = truths.iter().map(|&t| Answer::Int(t)).collect();
        let report = EvalReport::build(task, "m", "small", &preds, &truth_answers, 0, None).unwrap();
        prop_assert!(report.accuracy <= report.feasible_rate.unwrap());
        prop_assert!((0.0..=1.0).contains(&report.accuracy));

        let defined: Vec<Option<Answer>> = preds.iter().map(|p| p.as_ref().ok().cloned()).collect();
        let ar = approximation_ratio(&defined, &truth_answers).unwrap();
        let all_equal = defined.iter().zip(&truth_answers).all(|(p, t)| p.as_ref().is_none_or(|p| p == t));
        if let Some(ar) = ar {
            prop_assert!(ar >= 0.0);
            prop_assert_eq!(ar == 0.0, all_equal);
        }

        // permutation invariance
        let mut rev_p = defined.clone();
        let mut rev_t = truth_answers.clone();
        rev_p.reverse();
        rev_t.reverse();
        prop_assert_eq!(accuracy(&rev_p, &rev_t).unwrap(), accuracy(&defined, &truth_answers).unwrap());
        prop_assert_eq!(feasible_rate(task, &rev_p, &rev_t).unwrap(), feasible_rate(task, &defined, &truth_answers).unwrap());
        let ar_rev = approximation_ratio(&rev_p, &rev_t).unwrap();
        prop_assert_eq!(ar.map(|a| (a * 1e12).round()), ar_rev.map(|a| (a * 1e12).round()));
    }
}

#[test]
fn complete_graph_extremes() {
    for n in 1..=12 {
        let g = Graph::complete(n);
        assert_eq!(exact_max_clique(&g, Deadline::none()).unwrap(), n);
        if n > 1 {
            assert_eq!(solve_diameter(&g).unwrap(), 1);
        }
    }
}

#[test]
fn problem_prompts_carry_signature_and_ignore_instances() {
    let lib = PromptLibrary::embedded();
    for task in TaskKind::ALL {
        let bundle = lib.bundle(task, PseudocodeVariant::Full).unwrap();
        assert!(bundle.problem_text.contains(&task.signature()), "{task}");
        // assembly takes no instance, so its size is fixed per (task, variant)
        assert_eq!(bundle, lib.bundle(task, PseudocodeVariant::Full).unwrap());
    }
}
