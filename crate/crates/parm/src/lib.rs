//! Path association rule mining on property graphs.
//!
//! Given a directed graph whose vertices carry categorical attributes and
//! whose edges carry labels, the engine finds all pairs of frequent path
//! patterns — fixed-length sequences of attribute-set and label constraints,
//! or single-label reachability constraints — such that the number of
//! vertices sourcing both patterns exceeds a minimum support. Each rule
//! comes with absolute/relative support, confidence and lift.
//!
//! The crate is organized around [`miner::mine`]:
//!
//! - [`graph`]: immutable property graph with counting indexes
//! - [`pattern`]: path pattern values and their algebra
//! - [`matcher`]: incremental matched-vertex tables and reachability sets
//! - [`frontier`]: suffix-pruning bounds on candidate hops
//! - [`miner`]: the level-wise discovery pipeline and rule search
//! - [`approx`]: candidate reduction and stratified sampling
//! - [`scheduler`]: cost-balanced vertex partitioning across threads
//! - [`oracle`]: brute-force reference miner for small instances
//! - [`gen`]: seeded synthetic graph generation
//! - [`records`]: JSON-lines rule serialization
//!
//! The `examples/` directory shows one runnable scenario per capability;
//! the thin `parm` binary wraps the same entry points behind `mine`,
//! `oracle`, `gen` and `stats` subcommands.

pub mod approx;
pub mod cli;
pub mod frontier;
pub mod gen;
pub mod graph;
pub mod matcher;
pub mod miner;
pub mod oracle;
pub mod pattern;
pub mod records;
pub mod scheduler;

pub use graph::{GraphBuilder, PropertyGraph};
pub use miner::{mine, MineOutcome, MinerConfig, Rule, Support};
pub use pattern::PathPattern;

#[cfg(test)]
pub(crate) mod test_fixtures {
    use crate::gen::{generate, GenParams};
    use crate::graph::PropertyGraph;
    use std::io::Cursor;

    /// The 12-vertex running-example graph used throughout the tests.
    pub fn social_graph() -> PropertyGraph {
        let vertices = include_str!("../data/social.vertices.tsv");
        let edges = include_str!("../data/social.edges.tsv");
        PropertyGraph::load(Cursor::new(vertices), Cursor::new(edges))
            .expect("bundled fixture parses")
            .0
    }

    pub fn random_graph(
        vertices: usize,
        edges: usize,
        labels: usize,
        attributes: usize,
        attrs_per_vertex: f64,
        seed: u64,
    ) -> PropertyGraph {
        generate(&GenParams {
            vertices,
            edges,
            labels,
            attributes,
            attrs_per_vertex,
            max_attrs_per_vertex: 4,
            attr_skew: 0.8,
            seed,
        })
        .expect("valid generator parameters")
    }
}
