//! Cross-checks the mining pipeline against the brute-force oracle on a
//! seeded random graph.
//!
//! Run with: `cargo run --example exact_vs_oracle`

use std::collections::BTreeMap;

use parm::gen::{generate, GenParams};
use parm::miner::{mine, MinerConfig, Support};
use parm::oracle::{oracle_mine, OracleLimits};

fn main() {
    let graph = generate(&GenParams {
        vertices: 25,
        edges: 55,
        labels: 3,
        attributes: 5,
        attrs_per_vertex: 1.2,
        seed: 2024,
        ..GenParams::default()
    })
    .unwrap();

    let theta = 2u64;
    let k = 2usize;
    let mined = mine(
        &graph,
        &MinerConfig {
            min_support: Support::Absolute(theta),
            max_length: k,
            ..MinerConfig::default()
        },
    )
    .unwrap();
    let oracle = oracle_mine(&graph, Support::Absolute(theta), k, &OracleLimits::default()).unwrap();

    let mined_patterns: BTreeMap<_, _> = mined
        .sets
        .all_patterns()
        .map(|(p, s, _)| (p.clone(), s.to_vec()))
        .collect();
    assert_eq!(mined_patterns, oracle.patterns, "pattern sets must agree");

    let mined_rules: BTreeMap<_, _> = mined
        .rules
        .iter()
        .map(|r| ((r.antecedent.clone(), r.consequent.clone()), r.asupp))
        .collect();
    let oracle_rules: BTreeMap<_, _> = oracle
        .rules
        .iter()
        .map(|r| ((r.antecedent.clone(), r.consequent.clone()), r.asupp))
        .collect();
    assert_eq!(mined_rules, oracle_rules, "rule sets must agree");

    println!(
        "miner and oracle agree: {} frequent patterns, {} rules (theta {theta}, k {k})",
        mined_patterns.len(),
        mined_rules.len()
    );
    if let Some((p, s)) = mined_patterns.iter().find(|(p, _)| p.len() == 2) {
        println!("sample length-2 pattern {} with {} sources", p.display(&graph), s.len());
    }
}
