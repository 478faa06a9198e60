//! The `parm` command line: `mine`, `oracle`, `gen` and `stats`.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for
//! input format and i/o errors.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::frontier::compute_frontier;
use crate::gen::{generate, GenParams};
use crate::graph::{LoadReport, PropertyGraph};
use crate::miner::{mine, MinerConfig, ReachabilityBound, Support};
use crate::oracle::{oracle_mine, OracleLimits};
use crate::records::{parse_rules_file, render_rules, RuleRecord};
use crate::scheduler::{partition, retained_costs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser)]
#[command(
    name = "parm",
    about = "Path association rule mining on property graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine path association rules from a graph.
    Mine(MineArgs),
    /// Run the brute-force reference miner (small graphs only).
    Oracle(OracleArgs),
    /// Generate a seeded synthetic graph in the TSV formats.
    Gen(GenArgs),
    /// Print frontier and per-thread load estimates without mining.
    Stats(StatsArgs),
}

#[derive(Args)]
struct GraphInput {
    /// Vertex file: `id<TAB>attr1,attr2,...`
    #[arg(long)]
    vertices: PathBuf,
    /// Edge file: `src<TAB>label<TAB>dst`
    #[arg(long)]
    edges: PathBuf,
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Absolute count (`10`) or relative percentage (`2.5%`).
    #[arg(long)]
    min_support: String,
    /// Maximum path length k.
    #[arg(long)]
    max_length: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Candidate reduction factor psi in (0, 1].
    #[arg(long)]
    candidate_reduction: Option<f64>,
    /// Stratified sampling rate rho in (0, 1].
    #[arg(long)]
    sampling_rate: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// z-value for sampling confidence intervals.
    #[arg(long, default_value_t = 1.96)]
    z: f64,
    /// Lift the depth bound on reachability patterns.
    #[arg(long)]
    unbounded_reachability: bool,
    /// Disable suffix pruning and staged candidate generation.
    #[arg(long)]
    baseline: bool,
    /// Output file, one JSON rule per line.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    min_support: String,
    #[arg(long)]
    max_length: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Compare against a mined rules file and report the differences.
    #[arg(long)]
    diff: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    vertices: usize,
    #[arg(long)]
    edges: usize,
    #[arg(long)]
    labels: usize,
    #[arg(long)]
    attributes: usize,
    /// Mean attributes per vertex.
    #[arg(long)]
    attrs_per_vertex: f64,
    #[arg(long, default_value_t = 4)]
    max_attrs_per_vertex: usize,
    /// Rank-weighting exponent for attribute popularity.
    #[arg(long, default_value_t = 1.0)]
    attr_skew: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Writes `<prefix>.vertices.tsv` and `<prefix>.edges.tsv`.
    #[arg(long)]
    out_prefix: String,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    min_support: String,
    #[arg(long)]
    max_length: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

/// Entry point used by the binary; parses `std::env::args`.
pub fn run() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    run_from(args)
}

/// Testable entry point.
pub fn run_from<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let cli = match Cli::try_parse_from(args.into_iter().map(Into::into)) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version output on stdout
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Mine(args) => run_mine(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Gen(args) => run_gen(args),
        Command::Stats(args) => run_stats(args),
    }
}

fn parse_support(text: &str) -> Result<Support, String> {
    let text = text.trim();
    if let Some(pct) = text.strip_suffix('%') {
        let f: f64 = pct
            .trim()
            .parse()
            .map_err(|e| format!("invalid relative support {text:?}: {e}"))?;
        Ok(Support::Relative(f / 100.0))
    } else {
        let c: u64 = text
            .parse()
            .map_err(|e| format!("invalid absolute support {text:?} (integer or `X%`): {e}"))?;
        Ok(Support::Absolute(c))
    }
}

fn load_graph(input: &GraphInput) -> Result<(PropertyGraph, LoadReport), String> {
    let vertices = File::open(&input.vertices)
        .map_err(|e| format!("cannot open {}: {e}", input.vertices.display()))?;
    let edges = File::open(&input.edges)
        .map_err(|e| format!("cannot open {}: {e}", input.edges.display()))?;
    PropertyGraph::load(BufReader::new(vertices), BufReader::new(edges))
        .map_err(|e| e.to_string())
}

fn write_file(path: &Path, content: &str) -> Result<(), String> {
    std::fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn run_mine(args: MineArgs) -> i32 {
    let support = match parse_support(&args.min_support) {
        Ok(s) => s,
        Err(msg) => return usage_error(&msg),
    };
    let (graph, report) = match load_graph(&args.input) {
        Ok(g) => g,
        Err(msg) => return input_error(&msg),
    };
    if report.implicit_vertices > 0 {
        eprintln!(
            "note: {} vertices appeared only in the edge file",
            report.implicit_vertices
        );
    }
    let config = MinerConfig {
        min_support: support,
        max_length: args.max_length,
        candidate_reduction: args.candidate_reduction,
        sampling_rate: args.sampling_rate,
        threads: args.threads,
        rng_seed: args.seed,
        reachability_bound: if args.unbounded_reachability {
            ReachabilityBound::Unbounded
        } else {
            ReachabilityBound::KBounded
        },
        baseline: args.baseline,
        z_value: args.z,
    };
    let started = std::time::Instant::now();
    let outcome = match mine(&graph, &config) {
        Ok(o) => o,
        Err(e) => return usage_error(&e.to_string()),
    };
    let rendered = render_rules(&graph, &outcome.rules);
    if let Err(msg) = write_file(&args.output, &rendered) {
        return input_error(&msg);
    }
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "graph: |V|={} |E|={} labels={} attributes={}",
        graph.vertex_count(),
        graph.edge_count(),
        graph.labels().len(),
        graph.attributes().len()
    );
    eprintln!("threshold: {} (strict)", outcome.theta);
    eprintln!("attribute sets: {}", outcome.stats.attribute_sets);
    eprintln!("simple paths: {}", outcome.stats.simple_patterns);
    eprintln!("reachability paths: {}", outcome.stats.reachability_patterns);
    eprintln!("rules: {}", outcome.stats.rules);
    let [t_attr, t_simple, t_reach, t_rules] = outcome.stats.phase_seconds;
    eprintln!(
        "elapsed: {:.3}s (attrs {t_attr:.3}s, simple {t_simple:.3}s, reach {t_reach:.3}s, rules {t_rules:.3}s)",
        started.elapsed().as_secs_f64()
    );
    eprintln!(
        "candidates evaluated: {} pattern, {} rule",
        outcome.stats.simple_candidates_evaluated + outcome.stats.reachability_candidates_evaluated,
        outcome.stats.rule_candidates_evaluated
    );
    EXIT_OK
}

fn run_oracle(args: OracleArgs) -> i32 {
    let support = match parse_support(&args.min_support) {
        Ok(s) => s,
        Err(msg) => return usage_error(&msg),
    };
    let (graph, _) = match load_graph(&args.input) {
        Ok(g) => g,
        Err(msg) => return input_error(&msg),
    };
    let result = match oracle_mine(&graph, support, args.max_length, &OracleLimits::default()) {
        Ok(r) => r,
        Err(e) => return usage_error(&e.to_string()),
    };
    let rendered = render_rules(&graph, &result.rules);
    match &args.output {
        Some(path) => {
            if let Err(msg) = write_file(path, &rendered) {
                return input_error(&msg);
            }
        }
        None => {
            if args.diff.is_none() {
                print!("{rendered}");
            }
        }
    }
    eprintln!(
        "oracle: {} frequent patterns, {} rules",
        result.patterns.len(),
        result.rules.len()
    );
    if let Some(diff_path) = &args.diff {
        let content = match std::fs::read_to_string(diff_path) {
            Ok(c) => c,
            Err(e) => return input_error(&format!("cannot read {}: {e}", diff_path.display())),
        };
        let theirs = match parse_rules_file(&content) {
            Ok(r) => r,
            Err(e) => return input_error(&e.to_string()),
        };
        let ours = parse_rules_file(&rendered).expect("own output parses");
        report_diff(&ours, &theirs);
    }
    EXIT_OK
}

fn report_diff(oracle: &[RuleRecord], mined: &[RuleRecord]) {
    let key = |r: &RuleRecord| (r.antecedent.clone(), r.consequent.clone());
    let oracle_keys: std::collections::BTreeMap<_, &RuleRecord> =
        oracle.iter().map(|r| (key(r), r)).collect();
    let mined_keys: std::collections::BTreeMap<_, &RuleRecord> =
        mined.iter().map(|r| (key(r), r)).collect();
    let mut only_oracle = 0;
    let mut only_mined = 0;
    let mut metric_mismatch = 0;
    for (k, ours) in &oracle_keys {
        match mined_keys.get(k) {
            None => {
                only_oracle += 1;
                eprintln!("only in oracle: {} => {}", k.0, k.1);
            }
            Some(theirs) => {
                let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
                if !(close(ours.asupp, theirs.asupp)
                    && close(ours.rsupp, theirs.rsupp)
                    && close(ours.conf, theirs.conf)
                    && close(ours.lift, theirs.lift))
                {
                    metric_mismatch += 1;
                    eprintln!("metric mismatch: {} => {}", k.0, k.1);
                }
            }
        }
    }
    for k in mined_keys.keys() {
        if !oracle_keys.contains_key(k) {
            only_mined += 1;
            eprintln!("only in mined file: {} => {}", k.0, k.1);
        }
    }
    eprintln!(
        "diff: {} only in oracle, {} only in mined file, {} metric mismatches",
        only_oracle, only_mined, metric_mismatch
    );
}

fn run_gen(args: GenArgs) -> i32 {
    let params = GenParams {
        vertices: args.vertices,
        edges: args.edges,
        labels: args.labels,
        attributes: args.attributes,
        attrs_per_vertex: args.attrs_per_vertex,
        max_attrs_per_vertex: args.max_attrs_per_vertex,
        attr_skew: args.attr_skew,
        seed: args.seed,
    };
    let graph = match generate(&params) {
        Ok(g) => g,
        Err(e) => return usage_error(&e.to_string()),
    };
    let vpath = PathBuf::from(format!("{}.vertices.tsv", args.out_prefix));
    let epath = PathBuf::from(format!("{}.edges.tsv", args.out_prefix));
    let mut vbuf = Vec::new();
    let mut ebuf = Vec::new();
    if graph.save(&mut vbuf, &mut ebuf).is_err() {
        return input_error("serialization failed");
    }
    if let Err(msg) = write_file(&vpath, &String::from_utf8(vbuf).unwrap()) {
        return input_error(&msg);
    }
    if let Err(msg) = write_file(&epath, &String::from_utf8(ebuf).unwrap()) {
        return input_error(&msg);
    }
    eprintln!(
        "wrote {} ({} vertices) and {} ({} edges)",
        vpath.display(),
        graph.vertex_count(),
        epath.display(),
        graph.edge_count()
    );
    EXIT_OK
}

fn run_stats(args: StatsArgs) -> i32 {
    let support = match parse_support(&args.min_support) {
        Ok(s) => s,
        Err(msg) => return usage_error(&msg),
    };
    if args.threads < 1 {
        return usage_error("thread count must be at least 1");
    }
    if args.max_length < 1 {
        return usage_error("maximum path length must be at least 1");
    }
    let (graph, _) = match load_graph(&args.input) {
        Ok(g) => g,
        Err(msg) => return input_error(&msg),
    };
    let theta = support.absolute_threshold(graph.vertex_count());
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let _ = writeln!(
        out,
        "graph: |V|={} |E|={} labels={} attributes={} max-in-degree={}",
        graph.vertex_count(),
        graph.edge_count(),
        graph.labels().len(),
        graph.attributes().len(),
        graph.max_in_degree()
    );
    let _ = writeln!(out, "threshold: {theta} (strict)");
    if theta >= graph.vertex_count() as f64 {
        let _ = writeln!(out, "threshold reaches the vertex count; nothing can be frequent");
        return EXIT_OK;
    }
    let frontier = compute_frontier(&graph, theta, args.max_length);
    let label_names: Vec<&str> = frontier
        .frequent_labels
        .iter()
        .map(|&l| graph.labels().name(l))
        .collect();
    let _ = writeln!(
        out,
        "frequent labels: {} ({})",
        frontier.frequent_labels.len(),
        label_names.join(", ")
    );
    for (label, attrs) in &frontier.admissible_targets {
        let _ = writeln!(
            out,
            "admissible targets for {}: {}",
            graph.labels().name(*label),
            attrs.len()
        );
    }
    let frequent_attrs: Vec<u32> = (0..graph.attributes().len() as u32)
        .filter(|&a| (graph.attr_carriers(a).len() as f64) > theta)
        .collect();
    let costs = retained_costs(&graph, &frontier.frequent_labels, &frequent_attrs);
    let part = partition(&costs, args.threads);
    let _ = writeln!(
        out,
        "retained vertices: {} of {} (capacity {} per thread)",
        costs.len(),
        graph.vertex_count(),
        part.capacity
    );
    for (t, (list, load)) in part.assignments.iter().zip(&part.loads).enumerate() {
        let _ = writeln!(out, "thread {t}: {} vertices, load {load}", list.len());
    }
    EXIT_OK
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn input_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_INPUT
}
