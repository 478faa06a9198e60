//! Candidate reduction and stratified sampling on a generated graph,
//! compared against the exact run.
//!
//! Run with: `cargo run --example approximate_mining`

use std::collections::BTreeSet;

use parm::gen::{generate, GenParams};
use parm::miner::{mine, MinerConfig, Support};
use parm::PathPattern;

type RuleKey = (PathPattern, PathPattern);

fn rule_keys(rules: &[parm::Rule]) -> BTreeSet<RuleKey> {
    rules
        .iter()
        .map(|r| (r.antecedent.clone(), r.consequent.clone()))
        .collect()
}

fn main() {
    let graph = generate(&GenParams {
        vertices: 2_000,
        edges: 6_000,
        labels: 4,
        attributes: 12,
        attrs_per_vertex: 1.5,
        attr_skew: 1.2,
        seed: 7,
        ..GenParams::default()
    })
    .unwrap();
    let base = MinerConfig {
        min_support: Support::Absolute(40),
        max_length: 2,
        threads: 2,
        ..MinerConfig::default()
    };

    let exact = mine(&graph, &base).unwrap();
    let exact_keys = rule_keys(&exact.rules);
    println!("exact: {} rules", exact_keys.len());

    // candidate reduction: shrinks the suffix bound, never invents rules
    let reduced = mine(
        &graph,
        &MinerConfig {
            candidate_reduction: Some(0.4),
            ..base.clone()
        },
    )
    .unwrap();
    let reduced_keys = rule_keys(&reduced.rules);
    let false_positives = reduced_keys.difference(&exact_keys).count();
    let recall = if exact_keys.is_empty() {
        1.0
    } else {
        reduced_keys.intersection(&exact_keys).count() as f64 / exact_keys.len() as f64
    };
    println!(
        "candidate reduction psi=0.4: {} rules, {false_positives} false positives, recall {recall:.3}",
        reduced_keys.len()
    );

    // stratified sampling: estimated counts with confidence intervals
    let sampled = mine(
        &graph,
        &MinerConfig {
            sampling_rate: Some(0.4),
            rng_seed: 11,
            ..base
        },
    )
    .unwrap();
    println!("sampling rho=0.4: {} rules (estimated metrics)", sampled.rules.len());
    for rule in sampled.rules.iter().take(3) {
        let (lo, hi) = rule.ci.unwrap_or((rule.asupp, rule.asupp));
        println!(
            "  {} => {}  asupp ~{:.1} in [{lo:.1}, {hi:.1}], conf {:.3}",
            rule.antecedent.display(&graph),
            rule.consequent.display(&graph),
            rule.asupp,
            rule.conf
        );
    }
}
