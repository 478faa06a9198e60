//! Mines the bundled 12-vertex social graph and prints every rule.
//!
//! Run with: `cargo run --example mine_social`

use std::io::Cursor;

use parm::miner::{mine, MinerConfig, Support};
use parm::records::render_rules;
use parm::PropertyGraph;

fn main() {
    let vertices = include_str!("../data/social.vertices.tsv");
    let edges = include_str!("../data/social.edges.tsv");
    let (graph, _) = PropertyGraph::load(Cursor::new(vertices), Cursor::new(edges)).unwrap();

    let config = MinerConfig {
        min_support: Support::Absolute(1),
        max_length: 2,
        ..MinerConfig::default()
    };
    let outcome = mine(&graph, &config).unwrap();

    println!(
        "graph: {} vertices, {} edges, {} labels, {} attributes",
        graph.vertex_count(),
        graph.edge_count(),
        graph.labels().len(),
        graph.attributes().len()
    );
    println!(
        "frequent: {} attribute sets, {} simple paths, {} reachability paths",
        outcome.stats.attribute_sets,
        outcome.stats.simple_patterns,
        outcome.stats.reachability_patterns
    );
    println!("{} rules at support > 1:\n", outcome.rules.len());
    print!("{}", render_rules(&graph, &outcome.rules));
}
