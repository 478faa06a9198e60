//! Cost-balanced parallel mining: wall time across thread counts with
//! byte-identical results.
//!
//! Run with: `cargo run --release --example parallel_scaling`

use std::time::Instant;

use parm::gen::{generate, GenParams};
use parm::miner::{mine, MinerConfig, Support};
use parm::records::render_rules;

fn main() {
    let graph = generate(&GenParams {
        vertices: 30_000,
        edges: 150_000,
        labels: 6,
        attributes: 20,
        attrs_per_vertex: 2.0,
        max_attrs_per_vertex: 2,
        attr_skew: 1.4,
        seed: 99,
    })
    .unwrap();
    println!(
        "graph: {} vertices, {} edges",
        graph.vertex_count(),
        graph.edge_count()
    );

    let mut reference: Option<String> = None;
    for threads in [1usize, 2, 4] {
        let config = MinerConfig {
            min_support: Support::Absolute(300),
            max_length: 2,
            threads,
            ..MinerConfig::default()
        };
        let start = Instant::now();
        let outcome = mine(&graph, &config).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let rendered = render_rules(&graph, &outcome.rules);
        println!(
            "threads={threads}: {:.2}s, {} rules",
            elapsed,
            outcome.rules.len()
        );
        match &reference {
            None => reference = Some(rendered),
            Some(expect) => assert_eq!(expect, &rendered, "output changed with thread count"),
        }
    }
    println!("outputs byte-identical across thread counts");
}
