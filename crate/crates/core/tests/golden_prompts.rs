//! Prompt fixtures and assembled prompts against the markup sources under
//! `tests/golden/markup`, rendered to plain text by `common::render`.

mod common;

use common::{baseline_mismatch, grapharena_mismatch, markup, mvc_graph, render};
use graphcode::baseline::{baseline_prompt, baseline_system_prompt, BaselineStyle};
use graphcode::graph::serialize_graph;
use graphcode::prompts::{PromptLibrary, PseudocodeVariant};
use graphcode::{Graph, SerializationFormat, TaskKind};

#[test]
fn renderer_handles_the_markup_constructs() {
    assert_eq!(render("a\\_b \\{x\\} ``q''"), "a_b {x} \"q\"");
    assert_eq!(render("\\blue{x {y}} z"), "x {y} z");
    assert_eq!(render("one\n  two\n\n three"), "one two\n\nthree");
    assert_eq!(render("a \\newline b\\newline\n\\newline c"), "a\nb\n\nc");
    assert_eq!(render("\\quad x"), "    x");
    assert_eq!(render("p\n\\begin{verbatim}\n  v  \n\\end{verbatim}\nq"), "p\n  v  \nq");
}

#[test]
fn system_prompt_matches() {
    assert_eq!(PromptLibrary::embedded().system_prompt(), render(&markup("system")));
}

#[test]
fn problem_prompts_match() {
    let lib = PromptLibrary::embedded();
    for task in TaskKind::ALL {
        assert_eq!(
            lib.problem_template(task),
            render(&markup(&format!("problem.{}", task.id()))),
            "{task}"
        );
    }
}

#[test]
fn full_pseudocodes_match() {
    let lib = PromptLibrary::embedded();
    for task in TaskKind::ALL {
        assert_eq!(
            lib.pseudocode(task, PseudocodeVariant::Full).unwrap(),
            render(&markup(&format!("pseudocode.{}", task.id()))),
            "{task}"
        );
    }
}

#[test]
fn tsp_prompt_variants_match() {
    let lib = PromptLibrary::embedded();
    for variant in PseudocodeVariant::ALL {
        let bundle = lib.bundle(TaskKind::Tsp, variant).unwrap();
        assert_eq!(
            bundle.problem_text,
            render(&markup(&format!("tsp_prompt.{variant}"))),
            "{variant}"
        );
    }
}

#[test]
fn graph_a_serializations_match() {
    let g = Graph::from_edges(
        5,
        &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)],
    )
    .unwrap();
    for (fmt, name) in [
        (SerializationFormat::EdgeList, "edge_list"),
        (SerializationFormat::Adjacency, "adjacency"),
        (SerializationFormat::AdjacencyNl, "adjacency_nl"),
    ] {
        // plain text listings, one line per row
        let golden = markup(&format!("serialization.{name}"));
        assert_eq!(serialize_graph(&g, fmt), golden.trim_end_matches('\n'));
    }
}

fn assert_baseline(style: BaselineStyle, name: &str) {
    if let Some(diff) = baseline_mismatch(style, name) {
        panic!("{diff}");
    }
}

#[test]
fn mvc_baseline_system_prompt_matches() {
    assert_eq!(baseline_system_prompt(TaskKind::Mvc), render(&markup("baseline.system")));
}

#[test]
fn mvc_baseline_graphinstruct_matches() {
    assert_baseline(BaselineStyle::Graphinstruct, "graphinstruct");
}

#[test]
fn mvc_baseline_talk_like_a_graph_matches() {
    assert_baseline(BaselineStyle::TalkLikeAGraph, "talk_like_a_graph");
}

#[test]
fn mvc_baseline_pseudo_matches() {
    assert_baseline(BaselineStyle::Pseudo, "pseudo");
    let lib = PromptLibrary::embedded();
    let ours = baseline_prompt(&lib, &mvc_graph(), SerializationFormat::EdgeList, BaselineStyle::Pseudo).unwrap();
    let code = lib.pseudocode(TaskKind::Mvc, PseudocodeVariant::Full).unwrap();
    let at_code = ours.find(code).expect("pseudocode embedded");
    assert!(at_code < ours.find("[(0, 1), (0, 5)").expect("edge list present"));
}

#[test]
fn mvc_baseline_nlgraph_matches() {
    assert_baseline(BaselineStyle::Nlgraph, "nlgraph");
}

#[test]
fn mvc_baseline_grapharena_matches() {
    if let Some(diff) = grapharena_mismatch() {
        panic!("{diff}");
    }
}

#[test]
fn all_golden_comparisons_agree() {
    assert_eq!(common::golden_mismatches(), Vec::<String>::new());
}
