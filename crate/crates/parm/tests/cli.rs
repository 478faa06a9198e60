//! End-to-end runs of the `parm` binary: subcommands, exit codes, and
//! output determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn parm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_social(dir: &Path) -> (PathBuf, PathBuf) {
    let v = dir.join("social.vertices.tsv");
    let e = dir.join("social.edges.tsv");
    std::fs::write(&v, include_str!("../data/social.vertices.tsv")).unwrap();
    std::fs::write(&e, include_str!("../data/social.edges.tsv")).unwrap();
    (v, e)
}

#[test]
fn mine_social_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let (v, e) = write_social(tmp.path());
    let out = parm(
        &[
            "mine",
            "--vertices",
            v.to_str().unwrap(),
            "--edges",
            e.to_str().unwrap(),
            "--min-support",
            "1",
            "--max-length",
            "2",
            "--threads",
            "2",
            "--output",
            "rules.jsonl",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("attribute sets:"), "{stderr}");
    assert!(stderr.contains("rules:"), "{stderr}");
    let rules = std::fs::read_to_string(tmp.path().join("rules.jsonl")).unwrap();
    assert!(rules.lines().count() >= 1);
    assert!(
        rules.contains("<{CS} -Follows-> {Art}>"),
        "expected running-example antecedent in output"
    );

    // reruns are byte-identical
    let out2 = parm(
        &[
            "mine",
            "--vertices",
            v.to_str().unwrap(),
            "--edges",
            e.to_str().unwrap(),
            "--min-support",
            "1",
            "--max-length",
            "2",
            "--threads",
            "2",
            "--output",
            "rules2.jsonl",
        ],
        tmp.path(),
    );
    assert!(out2.status.success());
    let rules2 = std::fs::read_to_string(tmp.path().join("rules2.jsonl")).unwrap();
    assert_eq!(rules, rules2);
}

#[test]
fn relative_support_converts_via_vertex_count() {
    let tmp = tempfile::tempdir().unwrap();
    let gen = parm(
        &[
            "gen",
            "--vertices", "200", "--edges", "400", "--labels", "3",
            "--attributes", "6", "--attrs-per-vertex", "1.5",
            "--seed", "11", "--out-prefix", "g",
        ],
        tmp.path(),
    );
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let out = parm(
        &[
            "mine",
            "--vertices", "g.vertices.tsv", "--edges", "g.edges.tsv",
            "--min-support", "10%", "--max-length", "1",
            "--output", "rules.jsonl",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("threshold: 20 (strict)"), "{stderr}");
}

#[test]
fn gen_is_deterministic_and_supports_zero_edges() {
    let tmp = tempfile::tempdir().unwrap();
    for prefix in ["a", "b"] {
        let out = parm(
            &[
                "gen",
                "--vertices", "30", "--edges", "50", "--labels", "4",
                "--attributes", "8", "--attrs-per-vertex", "2.0",
                "--seed", "77", "--out-prefix", prefix,
            ],
            tmp.path(),
        );
        assert!(out.status.success());
    }
    let av = std::fs::read(tmp.path().join("a.vertices.tsv")).unwrap();
    let bv = std::fs::read(tmp.path().join("b.vertices.tsv")).unwrap();
    let ae = std::fs::read(tmp.path().join("a.edges.tsv")).unwrap();
    let be = std::fs::read(tmp.path().join("b.edges.tsv")).unwrap();
    assert_eq!(av, bv);
    assert_eq!(ae, be);

    let out = parm(
        &[
            "gen",
            "--vertices", "5", "--edges", "0", "--labels", "0",
            "--attributes", "2", "--attrs-per-vertex", "1.0",
            "--seed", "1", "--out-prefix", "empty",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let edges = std::fs::read_to_string(tmp.path().join("empty.edges.tsv")).unwrap();
    assert!(edges.is_empty());
}

#[test]
fn oracle_diff_agrees_with_miner() {
    let tmp = tempfile::tempdir().unwrap();
    let (v, e) = write_social(tmp.path());
    let mine_out = parm(
        &[
            "mine",
            "--vertices", v.to_str().unwrap(), "--edges", e.to_str().unwrap(),
            "--min-support", "1", "--max-length", "2",
            "--output", "mined.jsonl",
        ],
        tmp.path(),
    );
    assert!(mine_out.status.success());
    let oracle_out = parm(
        &[
            "oracle",
            "--vertices", v.to_str().unwrap(), "--edges", e.to_str().unwrap(),
            "--min-support", "1", "--max-length", "2",
            "--diff", "mined.jsonl",
        ],
        tmp.path(),
    );
    assert!(oracle_out.status.success());
    let stderr = String::from_utf8_lossy(&oracle_out.stderr);
    assert!(
        stderr.contains("diff: 0 only in oracle, 0 only in mined file, 0 metric mismatches"),
        "{stderr}"
    );
}

#[test]
fn stats_reports_frontier_and_loads() {
    let tmp = tempfile::tempdir().unwrap();
    let (v, e) = write_social(tmp.path());
    let out = parm(
        &[
            "stats",
            "--vertices", v.to_str().unwrap(), "--edges", e.to_str().unwrap(),
            "--min-support", "1", "--max-length", "2", "--threads", "2",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("frequent labels:"), "{stdout}");
    assert!(stdout.contains("thread 0:"), "{stdout}");
    assert!(stdout.contains("thread 1:"), "{stdout}");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let (v, e) = write_social(tmp.path());

    // usage error: unknown flag
    let out = parm(&["mine", "--nope"], tmp.path());
    assert_eq!(out.status.code(), Some(1));

    // usage error: bad support syntax
    let out = parm(
        &[
            "mine",
            "--vertices", v.to_str().unwrap(), "--edges", e.to_str().unwrap(),
            "--min-support", "0.5", "--max-length", "2",
            "--output", "r.jsonl",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));

    // input format error: malformed vertex file
    let bad = tmp.path().join("bad.tsv");
    std::fs::write(&bad, "a\tx\ttoo\tmany\n").unwrap();
    let out = parm(
        &[
            "mine",
            "--vertices", bad.to_str().unwrap(), "--edges", e.to_str().unwrap(),
            "--min-support", "1", "--max-length", "2",
            "--output", "r.jsonl",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    // input error: missing file
    let out = parm(
        &[
            "mine",
            "--vertices", "missing.tsv", "--edges", e.to_str().unwrap(),
            "--min-support", "1", "--max-length", "2",
            "--output", "r.jsonl",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));

    // success even with zero rules
    let out = parm(
        &[
            "mine",
            "--vertices", v.to_str().unwrap(), "--edges", e.to_str().unwrap(),
            "--min-support", "12", "--max-length", "2",
            "--output", "r.jsonl",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn sampling_mode_flags_estimates() {
    let tmp = tempfile::tempdir().unwrap();
    let gen = parm(
        &[
            "gen",
            "--vertices", "300", "--edges", "900", "--labels", "2",
            "--attributes", "4", "--attrs-per-vertex", "1.2",
            "--seed", "3", "--out-prefix", "g",
        ],
        tmp.path(),
    );
    assert!(gen.status.success());
    let out = parm(
        &[
            "mine",
            "--vertices", "g.vertices.tsv", "--edges", "g.edges.tsv",
            "--min-support", "5", "--max-length", "2",
            "--sampling-rate", "0.5", "--seed", "9",
            "--output", "rules.jsonl",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rules = std::fs::read_to_string(tmp.path().join("rules.jsonl")).unwrap();
    if !rules.is_empty() {
        assert!(rules.lines().all(|l| l.contains("\"estimated\":true")), "{rules}");
        assert!(rules.lines().all(|l| l.contains("\"ci\":[")), "{rules}");
    }
}
