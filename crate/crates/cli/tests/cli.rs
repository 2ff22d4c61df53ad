use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ttc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttc")).args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/scenarios")
        .join(format!("{name}.scenario"))
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn every_golden_runs_clean() {
    for name in ["fig2a", "fig2c", "fig3a", "fig4a", "fig5a", "fig6a", "fig6c"] {
        let o = ttc(&["run", &scenario(name)]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn run_writes_result_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2a.json");
    let o = ttc(&["run", &scenario("fig2a"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let got: Vec<(&str, &str)> = doc["agents"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| (a["agent"].as_str().unwrap(), a["resource"].as_str().unwrap()))
        .collect();
    assert_eq!(got, [("a1", "r2"), ("a2", "r1"), ("a3", "r3")]);
}

#[test]
fn results_are_byte_stable() {
    for format in ["json", "csv"] {
        let a = ttc(&["run", "bundled:fig5a", "--format", format]);
        let b = ttc(&["run", "bundled:fig5a", "--format", format]);
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
}

#[test]
fn csv_has_header_and_one_row() {
    let o = ttc(&["run", "bundled:fig3a", "--format", "csv"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scenario,agents,resources,quota,ratio,rank_sum,total_sat,mean_sat,rounds,millis");
    assert!(lines[1].starts_with("fig3a,4,3,2,1.0,6,3.0,0.75,"), "{}", lines[1]);
    assert_eq!(lines.len(), 2);
}

#[test]
fn golden_mismatch_exits_one() {
    // A flatter value function changes a1's satisfaction away from the golden 0.71.
    let o = ttc(&["run", "bundled:fig4a", "--alpha", "1.0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mismatch"));
}

#[test]
fn usage_and_io_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scenario");
    fs::write(&bad, "ttc-scenario 1\n{\"agents\": [}\n").unwrap();
    for args in [
        vec!["run", bad.to_str().unwrap()],
        vec!["run", "/nonexistent/file.scenario"],
        vec!["run", "bundled:fig2a", "--alpha", "0"],
        vec!["run", "bundled:fig2a", "--colour", "red"],
        vec!["verify", "--max-agents", "40"],
        vec!["frobnicate"],
    ] {
        assert_eq!(ttc(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn oracle_reports_optimum() {
    let o = ttc(&["oracle", "bundled:fig4a"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("engine total      3.7071"));
    assert!(text.contains("oracle optimum    3.7071"));
    assert!(text.contains("gap               0.0000"));
    let o = ttc(&["oracle", "bundled:fig3a"]);
    assert!(stdout(&o).contains("oracle optimum    3.0000"));
}

#[test]
fn oracle_refuses_oversized_markets() {
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.scenario");
    let g = ttc(&["gen", "--resources", "6", "--quota", "2", "--out", big.to_str().unwrap()]);
    assert_eq!(g.status.code(), Some(0));
    let o = ttc(&["oracle", big.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("limit"));
}

#[test]
fn verify_with_no_instances_is_empty_and_clean() {
    let o = ttc(&["verify", "--instances", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("instances 0\n"));
}

/// Mutation check: a mechanism that ignores free capacity must be caught,
/// with a seed that reproduces the failure on its own.
#[test]
fn verify_catches_a_broken_mechanism() {
    let o = ttc(&["verify", "--instances", "40", "--mechanism", "classical"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("reproduce with:")).unwrap();
    let seed = line.split_whitespace().skip_while(|w| *w != "--seed").nth(1).unwrap();
    let again = ttc(&["verify", "--instances", "1", "--seed", seed, "--mechanism", "classical"]);
    assert_eq!(again.status.code(), Some(1));
}

#[test]
fn verify_reports_every_property() {
    let o = ttc(&["verify", "--instances", "20", "--max-agents", "4"]);
    let text = stdout(&o);
    for p in ["individual rationality", "pareto optimality", "core stability", "strategy-proofness", "termination"] {
        assert!(text.contains(p), "{p}");
    }
}

#[test]
fn gen_is_seeded() {
    let a = ttc(&["gen", "--seed", "9", "--max-quota", "3", "--ratio", "0.8"]);
    let b = ttc(&["gen", "--seed", "9", "--max-quota", "3", "--ratio", "0.8"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("ttc-scenario 1\n"));
    let c = ttc(&["gen", "--seed", "10", "--max-quota", "3", "--ratio", "0.8"]);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(ttc(&["gen", "--resources", "0"]).status.code(), Some(2));
}

#[test]
fn trace_writes_one_dot_per_round() {
    let dir = tempfile::tempdir().unwrap();
    let o = ttc(&["trace", "bundled:fig3a", "--dot", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let first = fs::read_to_string(dir.path().join("round-001.dot")).unwrap();
    for edge in [
        "\"a1\" -> \"a3\" [label=\"1.00\"]",
        "\"a2\" -> \"a1\" [label=\"1.00\"]",
        "\"a3\" -> \"a2\" [label=\"0.29\"]",
        "\"a3\" -> \"a4\" [label=\"0.29\"]",
        "\"a4\" -> \"a3\" [label=\"0.29\"]",
    ] {
        assert!(first.contains(edge), "{edge}");
    }
    assert_eq!(first.matches(" -> \"").count(), 5);
    assert!(dir.path().join("round-002.dot").exists());
    assert!(dir.path().join("trace.json").exists());
}

#[test]
fn trace_marks_the_virtual_owner() {
    let dir = tempfile::tempdir().unwrap();
    ttc(&["trace", "bundled:fig5a", "--dot", dir.path().to_str().unwrap()]);
    let first = fs::read_to_string(dir.path().join("round-001.dot")).unwrap();
    assert_eq!(first.matches("doublecircle").count(), 1);
    assert!(first.contains("\"v0@r1\""));
}

#[test]
fn empty_market_traces_no_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.scenario");
    fs::write(&path, "ttc-scenario 1\n{\"resources\": [], \"agents\": [], \"params\": {\"alpha\": 0.5}}\n").unwrap();
    let out = dir.path().join("dots");
    let o = ttc(&["trace", path.to_str().unwrap(), "--dot", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dots = fs::read_dir(&out).unwrap().filter(|e| {
        e.as_ref().unwrap().path().extension().is_some_and(|x| x == "dot")
    });
    assert_eq!(dots.count(), 0);
}

#[test]
fn bench_reports_csv() {
    let o = ttc(&["bench", "--sizes", "4,8", "--repeats", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("bench-4,4,"));
}
