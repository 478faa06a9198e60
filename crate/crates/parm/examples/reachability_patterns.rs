//! Reachability patterns: label-constrained multi-hop connectivity as a
//! rule side.
//!
//! Run with: `cargo run --example reachability_patterns`

use parm::graph::GraphBuilder;
use parm::matcher::{build_reach_sets, match_reachability};
use parm::miner::{mine, MinerConfig, Support};
use parm::pattern::PathPattern;
use parm::records::render_rules;

fn main() {
    // management chain: engineers report upward through managers; everyone
    // with a badge likes the same cafeteria
    let mut b = GraphBuilder::new();
    for (name, attrs) in [
        ("ana", vec!["eng", "badge"]),
        ("bo", vec!["eng", "badge"]),
        ("cy", vec!["mgr", "badge"]),
        ("dee", vec!["mgr", "badge"]),
        ("eve", vec!["vp", "badge"]),
        ("cafe", vec!["place"]),
    ] {
        b.add_vertex(name, &attrs).unwrap();
    }
    for (s, d) in [("ana", "cy"), ("bo", "dee"), ("cy", "eve"), ("dee", "eve")] {
        b.add_edge(s, "reports_to", d);
    }
    for v in ["ana", "bo", "cy", "dee", "eve"] {
        b.add_edge(v, "likes", "cafe");
    }
    let graph = b.build();

    // direct reachability query: who reaches a vp through reports_to?
    let reports = graph.labels().id("reports_to").unwrap();
    let eng = graph.attributes().id("eng").unwrap();
    let vp = graph.attributes().id("vp").unwrap();
    let reach = build_reach_sets(&graph, &[reports], Some(2));
    let pattern = PathPattern::reachability(vec![eng], reports, vec![vp]);
    let table = match_reachability(&graph, &pattern, &reach[0]).unwrap();
    println!(
        "{} matched by {:?}",
        pattern.display(&graph),
        table
            .sources()
            .iter()
            .map(|&v| graph.vertex_name(v))
            .collect::<Vec<_>>()
    );

    // the same connectivity shows up in mined rules
    let outcome = mine(
        &graph,
        &MinerConfig {
            min_support: Support::Absolute(1),
            max_length: 2,
            ..MinerConfig::default()
        },
    )
    .unwrap();
    let reach_rules: Vec<&parm::Rule> = outcome
        .rules
        .iter()
        .filter(|r| r.antecedent.is_reachability() || r.consequent.is_reachability())
        .collect();
    println!(
        "{} of {} rules involve reachability; a few:",
        reach_rules.len(),
        outcome.rules.len()
    );
    let sample: Vec<parm::Rule> = reach_rules.iter().take(3).map(|r| (*r).clone()).collect();
    print!("{}", render_rules(&graph, &sample));
}
