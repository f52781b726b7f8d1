use std::path::Path;
use std::process::{Command, Output};

use gallai_core::ColoredCompleteGraph;
use serde_json::Value;

fn gr() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gr"));
    cmd.env_remove("GR_NODE_BUDGET");
    cmd
}

fn run(args: &[&str]) -> Output {
    gr().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.gcol");
    let out = run(&["gen", "construct", "--m", "4", "--colors", "3", "-o", p(&file)]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["vertices"], 32);
    assert_eq!(report["colors"], 3);

    let out = run(&["check", p(&file), "--cycle", "9", "--expect", "bad"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "bad");
    assert!(v["stats"]["nodes"].is_u64());

    let out = run(&["check", p(&file), "--cycle", "9", "--expect", "not-bad"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["verdict"], "bad");
}

#[test]
fn gen_without_output_embeds_gcol() {
    let out = run(&["gen", "random", "--n", "20", "--colors", "4", "--seed", "9"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["vertices"], 20);
    let g = ColoredCompleteGraph::from_gcol(v["gcol"].as_str().unwrap()).unwrap();
    assert_eq!(g.n(), 20);
    let again = run(&["gen", "random", "--n", "20", "--colors", "4", "--seed", "9"]);
    assert_eq!(again.stdout, out.stdout);

    let v = json(&run(&["gen", "two-color", "--m", "3"]));
    let g = ColoredCompleteGraph::from_gcol(v["gcol"].as_str().unwrap()).unwrap();
    assert_eq!(g.n(), 12);
}

#[test]
fn not_bad_verdict_carries_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r.gcol");
    assert!(run(&[
        "gen",
        "random",
        "--n",
        "33",
        "--colors",
        "3",
        "--seed",
        "7",
        "-o",
        p(&file)
    ])
    .status
    .success());
    let out = run(&["check", p(&file), "--cycle", "9", "--expect", "not-bad"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "not-bad");
    assert!(!v["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn node_budget_override() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.gcol");
    assert!(run(&[
        "gen",
        "random",
        "--n",
        "12",
        "--colors",
        "2",
        "--seed",
        "1",
        "-o",
        p(&file)
    ])
    .status
    .success());
    let out = gr()
        .args(["check", p(&file), "--cycle", "11", "--expect", "not-bad"])
        .env("GR_NODE_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["verdict"], "inconclusive");

    let out = gr()
        .args(["check", p(&file), "--cycle", "11"])
        .env("GR_NODE_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("GR_NODE_BUDGET"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.gcol");
    let out = run(&["check", p(&missing), "--cycle", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    let garbled = dir.path().join("garbled.gcol");
    std::fs::write(&garbled, "gcol 1\n3 2\n1 3\n1\n").unwrap();
    let out = run(&["check", p(&garbled), "--cycle", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");

    for args in [
        &["frobnicate"][..],
        &["check"],
        &[
            "search",
            "--mode",
            "two-color",
            "--n",
            "6",
            "--cycle",
            "4",
            "--colors",
            "3",
        ],
        &[
            "search", "--mode", "gallai", "--n", "6", "--cycle", "2", "--colors", "3",
        ],
        &[
            "search",
            "--mode",
            "two-color",
            "--n",
            "6",
            "--cycle",
            "4",
            "--workers",
            "0",
        ],
        &[
            "scan", "--mode", "gallai", "--cycle", "3", "--from", "9", "--to", "8", "--colors", "3",
        ],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn partition_reports_and_rejects_rainbow() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.gcol");
    assert!(run(&[
        "gen",
        "random",
        "--n",
        "40",
        "--colors",
        "4",
        "--seed",
        "3",
        "-o",
        p(&file)
    ])
    .status
    .success());
    let out = run(&["partition", p(&file)]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["report"]["valid"], true);

    let rainbow = dir.path().join("rainbow.gcol");
    std::fs::write(&rainbow, "gcol 1\n3 3\n1 2\n3\n").unwrap();
    let out = run(&["partition", p(&rainbow)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rainbow"));
}

#[test]
fn search_writes_verified_witness() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w.gcol");
    let out = run(&[
        "search",
        "--mode",
        "gallai",
        "--n",
        "10",
        "--colors",
        "3",
        "--cycle",
        "3",
        "-o",
        p(&file),
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["status"], "witness");
    assert_eq!(v["n"], 10);
    let g = ColoredCompleteGraph::load(&file).unwrap();
    assert_eq!(
        ColoredCompleteGraph::from_gcol(v["witness"].as_str().unwrap()).unwrap(),
        g
    );
    let check = run(&["check", p(&file), "--cycle", "3", "--expect", "bad"]);
    assert_eq!(check.status.code(), Some(0));

    let none = dir.path().join("none.gcol");
    let out = run(&[
        "search",
        "--mode",
        "two-color",
        "--n",
        "6",
        "--cycle",
        "4",
        "-o",
        p(&none),
    ]);
    let v = json(&out);
    assert_eq!(v["status"], "exhausted");
    assert!(v.get("witness").is_none());
    assert!(!none.exists());
}

#[test]
fn search_timeout_is_a_status() {
    let out = run(&[
        "search",
        "--mode",
        "two-color",
        "--n",
        "13",
        "--cycle",
        "7",
        "--time-limit",
        "0",
    ]);
    assert!(out.status.success());
    assert_eq!(json(&out)["status"], "timeout");
}

#[test]
fn scan_reports_threshold() {
    let out = run(&[
        "scan",
        "--mode",
        "two-color",
        "--cycle",
        "5",
        "--from",
        "7",
        "--to",
        "10",
        "--workers",
        "2",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["threshold"], 9);
    let ns: Vec<u64> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["n"].as_u64().unwrap())
        .collect();
    assert_eq!(ns, [7, 8, 9]);
}
