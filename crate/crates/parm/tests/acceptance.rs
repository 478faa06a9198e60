//! End-to-end acceptance suite. Each test prints one PASS line with the
//! measured evidence; any violation fails the test with context.

use std::collections::BTreeMap;
use std::io::Cursor;
use std::time::Instant;

use parm::approx::build_sample;
use parm::gen::{generate, GenParams};
use parm::graph::{GraphBuilder, PropertyGraph, VertexId};
use parm::matcher::{extend_matches, match_zero};
use parm::miner::{mine, MineOutcome, MinerConfig, Support};
use parm::oracle::{oracle_mine, OracleLimits, OracleResult};
use parm::pattern::PathPattern;
use parm::records::render_rules;
use parm::scheduler::{partition, Partition};

fn social() -> PropertyGraph {
    let v = include_str!("../data/social.vertices.tsv");
    let e = include_str!("../data/social.edges.tsv");
    PropertyGraph::load(Cursor::new(v), Cursor::new(e)).unwrap().0
}

/// Deterministic suite of random graphs within the small-instance bounds:
/// at most 30 vertices, 60 edges, 5 labels, 6 attributes; support in
/// {1,2,3}; length bound in {1,2,3}.
fn suite(count: usize) -> Vec<(PropertyGraph, u64, usize)> {
    (0..count)
        .map(|i| {
            let theta = 1 + (i as u64) % 3;
            let vertices = 8 + (i * 7) % 23;
            let edges_cap = if theta == 1 { 2 * vertices } else { 60 };
            let edges = (10 + (i * 13) % 51).min(edges_cap);
            let labels = 1 + i % 5;
            let attributes = 2 + i % 5;
            let lambda = [0.6, 0.9, 1.2][i % 3];
            let k = 1 + (i / 3) % 3;
            let g = generate(&GenParams {
                vertices,
                edges,
                labels,
                attributes,
                attrs_per_vertex: lambda,
                max_attrs_per_vertex: 4,
                attr_skew: 0.6,
                seed: 9000 + i as u64,
            })
            .unwrap();
            (g, theta, k)
        })
        .collect()
}

fn exact_config(theta: u64, k: usize, threads: usize) -> MinerConfig {
    MinerConfig {
        min_support: Support::Absolute(theta),
        max_length: k,
        threads,
        ..MinerConfig::default()
    }
}

fn pattern_map(out: &MineOutcome) -> BTreeMap<PathPattern, Vec<VertexId>> {
    out.sets
        .all_patterns()
        .map(|(p, s, _)| (p.clone(), s.to_vec()))
        .collect()
}

type RuleKey = (PathPattern, PathPattern);
type Metrics = (f64, f64, f64, f64);

fn rule_map(rules: &[parm::Rule]) -> BTreeMap<RuleKey, Metrics> {
    rules
        .iter()
        .map(|r| {
            (
                (r.antecedent.clone(), r.consequent.clone()),
                (r.asupp, r.rsupp, r.conf, r.lift),
            )
        })
        .collect()
}

fn oracle_rule_map(o: &OracleResult) -> BTreeMap<RuleKey, Metrics> {
    rule_map(&o.rules)
}

fn metrics_close(a: Metrics, b: Metrics) -> bool {
    let c = |x: f64, y: f64| (x - y).abs() <= 1e-12;
    c(a.0, b.0) && c(a.1, b.1) && c(a.2, b.2) && c(a.3, b.3)
}

#[test]
fn acceptance_01_oracle_equivalence_exact() {
    let started = Instant::now();
    let cases = suite(100);
    let mut total_patterns = 0usize;
    let mut total_rules = 0usize;
    for (i, (g, theta, k)) in cases.iter().enumerate() {
        let threads = 1 + i % 3;
        let mined = mine(g, &exact_config(*theta, *k, threads)).unwrap();
        let oracle = oracle_mine(g, Support::Absolute(*theta), *k, &OracleLimits::default())
            .unwrap_or_else(|e| panic!("graph {i} rejected by oracle: {e}"));

        let mined_patterns = pattern_map(&mined);
        assert_eq!(
            mined_patterns, oracle.patterns,
            "pattern sets diverge on graph {i} (theta={theta}, k={k})"
        );
        let mined_rules = rule_map(&mined.rules);
        let oracle_rules = oracle_rule_map(&oracle);
        assert_eq!(
            mined_rules.keys().collect::<Vec<_>>(),
            oracle_rules.keys().collect::<Vec<_>>(),
            "rule sets diverge on graph {i} (theta={theta}, k={k})"
        );
        for (key, m) in &mined_rules {
            assert!(
                metrics_close(*m, oracle_rules[key]),
                "metrics diverge on graph {i} for {key:?}: {m:?} vs {:?}",
                oracle_rules[key]
            );
        }
        total_patterns += mined_patterns.len();
        total_rules += mined_rules.len();
    }
    println!(
        "ACCEPTANCE 01 oracle-equivalence: PASS (100 graphs, {total_patterns} patterns, {total_rules} rules, {:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn acceptance_02_example_fixture() {
    let g = social();
    assert_eq!(
        (g.vertex_count(), g.edge_count(), g.labels().len(), g.attributes().len()),
        (12, 15, 4, 8)
    );
    let out = mine(&g, &exact_config(1, 2, 2)).unwrap();

    let male = g.attributes().id("Male").unwrap();
    let cs = g.attributes().id("CS").unwrap();
    let art = g.attributes().id("Art").unwrap();
    let uni = g.attributes().id("Uni").unwrap();
    let follows = g.labels().id("Follows").unwrap();
    let belongs = g.labels().id("BelongTo").unwrap();

    let male_follows_male =
        PathPattern::simple(vec![vec![male], vec![male]], vec![follows]);
    let mut expected: Vec<VertexId> = ["v8", "v9", "v12"]
        .iter()
        .map(|n| g.vertex_id(n).unwrap())
        .collect();
    expected.sort_unstable();
    assert_eq!(
        out.sets.sources_of(&male_follows_male).expect("pattern must be frequent"),
        expected
    );

    // the two-hop walk v8 -> v5 -> v2 used by the fixture's length example
    let (v8, v5, v2) = (
        g.vertex_id("v8").unwrap(),
        g.vertex_id("v5").unwrap(),
        g.vertex_id("v2").unwrap(),
    );
    assert!(g.out_neighbors(v8, follows).contains(&v5));
    let located = g.labels().id("LocatedIn").unwrap();
    assert!(g.out_neighbors(v5, located).contains(&v2));

    let ante = PathPattern::simple(vec![vec![cs], vec![art]], vec![follows]);
    for cons_attr in [cs, male] {
        let cons = PathPattern::simple(vec![vec![cons_attr], vec![uni]], vec![belongs]);
        let rule = out
            .rules
            .iter()
            .find(|r| r.antecedent == ante && r.consequent == cons)
            .expect("running-example rule missing");
        assert_eq!(rule.asupp, 2.0);
        assert_eq!(rule.rsupp, 2.0 / 12.0);
        assert_eq!(rule.conf, 1.0);
        assert_eq!(rule.lift, 6.0);
    }
    println!("ACCEPTANCE 02 example-fixture: PASS (rule metrics 2, 2/12, 1.0, 6.0 exact)");
}

#[test]
fn acceptance_03_pruning_soundness() {
    let cases = suite(100);
    let mut rejections = 0usize;
    for (i, (g, theta, k)) in cases.iter().enumerate() {
        let mined = mine(g, &exact_config(*theta, *k, 1)).unwrap();
        let oracle =
            oracle_mine(g, Support::Absolute(*theta), *k, &OracleLimits::default()).unwrap();
        for &(label, attr, n) in &mined.stats.rejected_suffixes {
            rejections += 1;
            for p in oracle.patterns.keys() {
                if let PathPattern::Simple { attr_sets, labels } = p {
                    if labels.len() == n
                        && *labels.last().unwrap() == label
                        && attr_sets.last().unwrap().contains(&attr)
                    {
                        panic!(
                            "graph {i}: rejected suffix (label {label}, attr {attr}, n {n}) \
                             ends frequent pattern {p:?}"
                        );
                    }
                }
            }
        }
        for &(label, attr) in &mined.stats.rejected_reach_targets {
            rejections += 1;
            for p in oracle.patterns.keys() {
                if let PathPattern::Reachability { label: l, target, .. } = p {
                    if *l == label && target.contains(&attr) {
                        panic!(
                            "graph {i}: rejected reach target (label {label}, attr {attr}) \
                             appears in frequent pattern {p:?}"
                        );
                    }
                }
            }
        }
    }
    println!("ACCEPTANCE 03 pruning-soundness: PASS ({rejections} rejections, zero violations)");
}

#[test]
fn acceptance_04_antimonotone_invariants() {
    let cases = suite(100);
    let mut tables = 0usize;
    for (g, theta, k) in &cases {
        let mined = mine(g, &exact_config(*theta, *k, 2)).unwrap();
        let all: Vec<(PathPattern, Vec<VertexId>)> = mined
            .sets
            .all_patterns()
            .map(|(p, s, _)| (p.clone(), s.to_vec()))
            .collect();
        tables += all.len();
        // dominating pattern's sources are contained in the dominated one's
        for (p, sp) in &all {
            for (q, sq) in &all {
                if p.dominates(q) {
                    assert!(
                        sp.iter().all(|v| sq.binary_search(v).is_ok()),
                        "containment violated: {p:?} vs {q:?}"
                    );
                }
            }
        }
        // every stored pattern's prefix is stored
        for len in 1..=*k {
            for (p, _, _) in mined.sets.patterns_at(len) {
                let prefix = p.prefix(len - 1).unwrap();
                assert!(mined.sets.contains(&prefix), "missing prefix of {p:?}");
            }
        }
    }
    println!("ACCEPTANCE 04 anti-monotone-invariants: PASS ({tables} tables, zero violations)");
}

#[test]
fn acceptance_05_candidate_reduction_precision() {
    let cases = suite(100);
    let mut kept = 0usize;
    let mut exact_total = 0usize;
    for (g, theta, k) in &cases {
        let exact = mine(g, &exact_config(*theta, *k, 1)).unwrap();
        let exact_patterns = pattern_map(&exact);
        let exact_rules = rule_map(&exact.rules);
        exact_total += exact_rules.len();
        for psi in [0.2, 0.4, 0.6, 0.8] {
            let reduced = mine(
                g,
                &MinerConfig {
                    candidate_reduction: Some(psi),
                    ..exact_config(*theta, *k, 1)
                },
            )
            .unwrap();
            for (p, s) in pattern_map(&reduced) {
                match exact_patterns.get(&p) {
                    Some(expect) => assert_eq!(&s, expect, "psi={psi}: sources differ on {p:?}"),
                    None => panic!("psi={psi}: false positive pattern {p:?}"),
                }
            }
            let rr = rule_map(&reduced.rules);
            for (key, m) in &rr {
                match exact_rules.get(key) {
                    Some(expect) => assert!(
                        metrics_close(*m, *expect),
                        "psi={psi}: rule metrics differ on {key:?}"
                    ),
                    None => panic!("psi={psi}: false positive rule {key:?}"),
                }
            }
            if psi == 0.4 {
                kept += rr.len();
            }
        }
    }
    let recall = if exact_total == 0 {
        1.0
    } else {
        kept as f64 / exact_total as f64
    };
    println!(
        "ACCEPTANCE 05 candidate-reduction-precision: PASS (precision 1.0 at all psi; \
         rule recall at psi=0.4: {recall:.3})"
    );
}

#[test]
fn acceptance_06_sampling_statistics() {
    let started = Instant::now();
    // 10,000 vertices, one frequent attribute, planted support 2,000:
    // exactly the first 2,000 vertices have a `follows` out-edge
    let planted = 2_000usize;
    let n = 10_000usize;
    let mut b = GraphBuilder::new();
    for v in 0..n {
        b.add_vertex(&format!("u{v}"), &["user"]).unwrap();
    }
    for v in 0..planted {
        let dst = (v * 7919 + 13) % n;
        b.add_edge(&format!("u{v}"), "follows", &format!("u{dst}"));
    }
    let g = b.build();
    let user = g.attributes().id("user").unwrap();
    let follows = g.labels().id("follows").unwrap();

    // true support, verified through the matcher
    let table = extend_matches(&g, &match_zero(&g, &[user]), follows, &[user]);
    assert_eq!(table.source_count(), planted);
    let truth: Vec<VertexId> = table.sources();

    let rho = 0.4;
    let z = 1.96;
    let runs = 1000;
    let mut covered = 0usize;
    let mut sum = 0.0f64;
    for seed in 0..runs {
        let plan = build_sample(&g, &[user], rho, seed as u64);
        let matched = plan
            .sampled()
            .iter()
            .filter(|v| truth.binary_search(v).is_ok())
            .count();
        let est = plan.estimate_frequency(matched, z);
        sum += est.point;
        if est.ci_low <= planted as f64 && planted as f64 <= est.ci_high {
            covered += 1;
        }
    }
    let mean = sum / runs as f64;
    let coverage = covered as f64 / runs as f64;
    let rel_err = (mean - planted as f64).abs() / planted as f64;
    assert!(
        rel_err <= 0.02,
        "point-estimate mean {mean} deviates {rel_err:.4} from planted {planted}"
    );
    assert!(
        (0.92..=0.98).contains(&coverage),
        "interval coverage {coverage} outside [0.92, 0.98]"
    );
    println!(
        "ACCEPTANCE 06 sampling-statistics: PASS (mean {mean:.1} vs {planted}, coverage {:.1}%, {:.1}s)",
        coverage * 100.0,
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn acceptance_07_thread_invariance() {
    let mut graphs = vec![(social(), 1u64, 2usize)];
    graphs.extend(suite(3));
    let mut checked = 0usize;
    for (g, theta, k) in &graphs {
        let mut outputs = Vec::new();
        for threads in [1usize, 2, 4, 8] {
            let out = mine(g, &exact_config(*theta, *k, threads)).unwrap();
            outputs.push(render_rules(g, &out.rules));
        }
        for w in outputs.windows(2) {
            assert_eq!(w[0], w[1], "outputs differ across thread counts");
        }
        checked += outputs[0].lines().count();
    }
    println!("ACCEPTANCE 07 thread-invariance: PASS (byte-identical across N in {{1,2,4,8}}, {checked} rule lines)");
}

#[test]
fn acceptance_08_approx_degeneracy() {
    let cases = suite(100);
    for (i, (g, theta, k)) in cases.iter().enumerate() {
        let exact = mine(g, &exact_config(*theta, *k, 1)).unwrap();
        let degenerate = mine(
            g,
            &MinerConfig {
                candidate_reduction: Some(1.0),
                sampling_rate: Some(1.0),
                ..exact_config(*theta, *k, 1)
            },
        )
        .unwrap();
        assert_eq!(
            render_rules(g, &exact.rules),
            render_rules(g, &degenerate.rules),
            "graph {i}: psi=1, rho=1 output differs from exact output"
        );
    }
    println!("ACCEPTANCE 08 approx-degeneracy: PASS (psi=1, rho=1 byte-identical on 100 graphs)");
}

#[test]
fn acceptance_09_performance_trend() {
    let started = Instant::now();
    let g = generate(&GenParams {
        vertices: 100_000,
        edges: 500_000,
        labels: 8,
        attributes: 50,
        attrs_per_vertex: 2.0,
        max_attrs_per_vertex: 2,
        attr_skew: 1.6,
        seed: 424_242,
    })
    .unwrap();
    let config = exact_config(5000, 2, 2);

    let t0 = Instant::now();
    let optimized = mine(&g, &config).unwrap();
    let optimized_time = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let baseline = mine(
        &g,
        &MinerConfig {
            baseline: true,
            ..config
        },
    )
    .unwrap();
    let baseline_time = t1.elapsed().as_secs_f64();

    assert_eq!(
        render_rules(&g, &optimized.rules),
        render_rules(&g, &baseline.rules),
        "modes disagree on the large graph"
    );
    assert!(
        optimized_time <= 0.9 * baseline_time,
        "optimized {optimized_time:.1}s not at least 10% faster than baseline {baseline_time:.1}s"
    );
    println!(
        "ACCEPTANCE 09 performance-trend: PASS (optimized {optimized_time:.1}s vs baseline {baseline_time:.1}s, \
         {} rules, total {:.1}s)",
        optimized.rules.len(),
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn acceptance_10_scheduler_quality() {
    fn optimal_max_load(costs: &[u64], bins: usize, capacity: usize) -> u64 {
        // branch and bound over bin assignments under the capacity cap
        fn rec(
            costs: &[u64],
            i: usize,
            loads: &mut Vec<u64>,
            counts: &mut Vec<usize>,
            capacity: usize,
            best: &mut u64,
        ) {
            if i == costs.len() {
                *best = (*best).min(*loads.iter().max().unwrap());
                return;
            }
            if *loads.iter().max().unwrap() >= *best {
                return;
            }
            let mut tried = Vec::new();
            for b in 0..loads.len() {
                if counts[b] >= capacity || tried.contains(&loads[b]) {
                    continue;
                }
                tried.push(loads[b]);
                loads[b] += costs[i];
                counts[b] += 1;
                rec(costs, i + 1, loads, counts, capacity, best);
                loads[b] -= costs[i];
                counts[b] -= 1;
            }
        }
        let mut sorted: Vec<u64> = costs.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let mut best = u64::MAX;
        rec(
            &sorted,
            0,
            &mut vec![0; bins],
            &mut vec![0; bins],
            capacity,
            &mut best,
        );
        best
    }

    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let instances = 1000;
    for i in 0..instances {
        let n = rng.random_range(3..=12usize);
        let bins = rng.random_range(2..=4usize);
        let costs: Vec<(u32, u64)> = (0..n as u32)
            .map(|v| (v, rng.random_range(1..=100u64)))
            .collect();
        let part: Partition = partition(&costs, bins);
        let raw: Vec<u64> = costs.iter().map(|&(_, c)| c).collect();
        let opt = optimal_max_load(&raw, bins, part.capacity);
        assert!(
            3 * part.max_load() <= 4 * opt,
            "instance {i}: greedy {} exceeds 4/3 of optimal {opt} (costs {raw:?}, bins {bins})",
            part.max_load()
        );
    }
    println!("ACCEPTANCE 10 scheduler-quality: PASS (1000 instances within the 4/3 envelope)");
}
