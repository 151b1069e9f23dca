use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kedge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kedge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_regular_octagon() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("oct.txt");
    // Integer octagon in convex position.
    fs::write(
        &file,
        "# octagon\n8\n3 0\n7 0\n10 3\n10 7\n7 10\n3 10\n0 7\n0 3\n",
    )
    .unwrap();
    let out = kedge(&["analyze", path_str(&file)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["crossings"], 70);
    assert_eq!(v["halving_lines"], 4);
    assert_eq!(v["identity_check"], true);
    assert_eq!(v["edge_vector"], serde_json::json!([8, 8, 8, 4]));
}

#[test]
fn collinear_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.txt");
    fs::write(&file, "4\n0 0\n1 1\n2 2\n0 5\n").unwrap();
    let out = kedge(&["analyze", path_str(&file)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(1, 2, 3)"));
    let missing = kedge(&["analyze", path_str(&dir.path().join("none.txt"))]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn published_tables_check() {
    for which in ["table1", "table2", "section5"] {
        let out = kedge(&["tables", which, "--check"]);
        assert!(out.status.success(), "{which}");
    }
    let out = kedge(&["tables", "table1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "27,96,6180"));
}

#[test]
fn scalar_bounds() {
    let out = kedge(&["halving-bound", "--n", "23"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "75");
    let out = kedge(&["cr-bound", "--n", "99", "--pipeline", "section5"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1402932");
    let out = kedge(&["cr-bound", "--n", "20", "--pipeline", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = kedge(&["cr-table", "--from", "39", "--to", "40", "--format", "csv"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "n,cr\n39,29691\n40,33048\n"
    );
    let out = kedge(&["bounds", "--n", "36", "--k", "16", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["rows"][0]["k"], 16);
    assert!(v["rows"][0]["u_prime_k"].is_number());
}

#[test]
fn sr_construction_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s3.txt");
    let out = kedge(&["construct", "sr", "--r", "3", "-o", path_str(&file)]);
    assert!(out.status.success());
    assert_eq!(json(&out)["E_leq"][11], 255);
    let v = json(&kedge(&["analyze", path_str(&file)]));
    assert_eq!(v["n"], 27);
    assert_eq!(v["identity_check"], true);
    assert_eq!(v["E_leq"][10], 207);
    let d = json(&kedge(&[
        "decompose3",
        path_str(&file),
        "--partition",
        "thirds",
    ]));
    assert_eq!(d["decomposable"], true);

    let raw = dir.path().join("raw.txt");
    assert!(
        kedge(&["construct", "sr", "--r", "3", "--raw", "-o", path_str(&raw)])
            .status
            .success()
    );
    assert_eq!(kedge(&["analyze", path_str(&raw)]).status.code(), Some(2));
}

#[test]
fn equality_constructions_and_classification() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("pc.txt");
    let out = kedge(&[
        "construct",
        "polygon-center",
        "--k",
        "3",
        "--n",
        "9",
        "-o",
        path_str(&file),
    ]);
    let v = json(&out);
    assert_eq!(v["equality"], true);
    assert_eq!(v["report"]["e_geq_k"], 15);
    let out = kedge(&[
        "classify",
        path_str(&file),
        "--k",
        "3",
        "--lexicographic-ties",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["records"].as_array().unwrap().len(), 36);
    assert_eq!(v["report"]["holds"], true);

    let file = dir.path().join("cp.txt");
    let v = json(&kedge(&[
        "construct",
        "cluster-polygon",
        "--t",
        "1",
        "--m",
        "3",
        "-o",
        path_str(&file),
    ]));
    assert_eq!(v["report"]["e_k_minus_1"], 9);
    assert_eq!(v["report"]["s"], 0);
}

#[test]
fn classify_accepts_halfperiod_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("h.txt");
    // Convex pentagon: each pair once, reversing 1..5.
    fs::write(&file, "5\n1 2 3 4 5\n1 1 1 2\n2 2 1 3\n3 3 1 4\n4 4 1 5\n5 1 2 3\n6 2 2 4\n7 3 2 5\n8 1 3 4\n9 2 3 5\n10 1 4 5\n")
        .unwrap();
    let out = kedge(&["classify", path_str(&file), "--k", "1"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out)["report"]["critical"], 5);
    fs::write(&file, "3\n1 2 3\n1 1 1 2\n2 1 2 1\n3 2 2 3\n").unwrap();
    assert_eq!(
        kedge(&["classify", path_str(&file), "--k", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn selftest_is_deterministic() {
    let a = kedge(&[
        "selftest", "central", "--trials", "40", "--nmax", "9", "--seed", "5",
    ]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    let lines = String::from_utf8(a.stdout).unwrap();
    assert!(lines.lines().all(|l| l.starts_with("PASS")));
    assert!(kedge(&["selftest", "bounds"]).status.success());
}
