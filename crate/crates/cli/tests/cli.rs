use std::path::PathBuf;
use std::process::Command;

use lpflat_cli::{run, Outcome, EXIT_USAGE};
use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn scratch(name: &str) -> String {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR"))
        .join(format!("cli-{name}"))
        .to_string_lossy()
        .into_owned()
}

fn lpflat(args: &[&str]) -> Outcome {
    run(std::iter::once("lpflat").chain(args.iter().copied()))
}

fn json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

#[test]
fn realize_exit_codes() {
    let out = lpflat(&["realize", &data("k4_equilateral_3.txt"), "--norm", "1", "--dim", "2"]);
    assert_eq!(out.code, 0);
    let rep = json(&out);
    assert_eq!(rep["schema"], 1);
    assert_eq!(rep["status"], "FEASIBLE");
    assert_eq!(rep["exact_points"].as_array().unwrap().len(), 4);
    assert_eq!(lpflat(&["realize", &data("banana_probe_1.5.txt"), "--norm", "1"]).code, 1);
    // Equilateral K_5 is not planar in l_2, and numeric search cannot prove it.
    let k5 = scratch("k5.txt");
    let mut text = String::from("v 5\n");
    for u in 0..5 {
        for v in u + 1..5 {
            text.push_str(&format!("e {u} {v} 1\n"));
        }
    }
    std::fs::write(&k5, text).unwrap();
    assert_eq!(lpflat(&["realize", &k5, "--restarts", "4"]).code, 2);
}

#[test]
fn usage_errors_exit_64() {
    let bad = scratch("bad.txt");
    std::fs::write(&bad, "v 3\ne 0 1 1\ne 1 9 1\n").unwrap();
    let out = lpflat(&["realize", &bad]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);
    assert_eq!(lpflat(&["realize", &data("missing.txt")]).code, EXIT_USAGE);
    assert_eq!(lpflat(&["realize", &data("square.txt"), "--norm", "0"]).code, EXIT_USAGE);
    assert_eq!(lpflat(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(lpflat(&["realize", &data("square.txt"), "--tol", "-1"]).code, EXIT_USAGE);
    let out = lpflat(&["cayley", &data("k4_equilateral_3.txt"), "--nonedge", "0", "1"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("already an edge"), "{}", out.stderr);
    assert_eq!(lpflat(&["--help"]).code, 0);
}

#[test]
fn witnesses_round_trip_through_verify() {
    let cases = [
        ("k4_equilateral_3.txt", "1", "2"),
        ("k4_3_2.txt", "1", "3"),
        ("square.txt", "2", "2"),
        ("square.txt", "inf", "2"),
        ("k4_3_2.txt", "3", "3"),
    ];
    for (i, (file, norm, dim)) in cases.iter().enumerate() {
        let path = scratch(&format!("witness{i}.txt"));
        let out = lpflat(&["realize", &data(file), "--norm", norm, "--dim", dim, "--format", "text", "--out", &path]);
        assert_eq!(out.code, 0, "{file} l_{norm}");
        assert!(out.stdout.is_empty());
        let out = lpflat(&["verify", &path, "--norm", norm]);
        assert_eq!(out.code, 0, "{file} l_{norm}: {}", out.stdout);
        assert_eq!(json(&out)["pass"], true);
        // Same check with the linkage and the points in separate files.
        let out = lpflat(&["verify", &data(file), "--norm", norm, "--framework", &path]);
        assert_eq!(out.code, 0);
    }
}

#[test]
fn verify_rejects_a_wrong_framework() {
    let path = scratch("wrong.txt");
    std::fs::write(&path, "v 2\ne 0 1 1\np 0 0 0\np 1 0.5 0\n").unwrap();
    let out = lpflat(&["verify", &path, "--norm", "2"]);
    assert_eq!(out.code, 1);
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn output_is_deterministic() {
    let runs = [
        vec!["realize", "two_sum_k4.txt", "--norm", "1", "--dim", "3", "--seed", "7"],
        vec!["realize", "square.txt", "--norm", "3", "--seed", "7"],
        vec!["cayley", "square.txt", "--nonedge", "0", "2", "--grid", "21"],
        vec!["rank", "banana.txt", "--norm", "1", "--seed", "3"],
        vec!["flatten", "banana.txt", "--norm", "1"],
    ];
    for args in runs {
        let file = data(args[1]);
        let mut full = args.clone();
        full[1] = &file;
        let a = lpflat(&full);
        let b = lpflat(&full);
        assert_eq!(a, b, "{args:?}");
        let rep = json(&a);
        let fields: Vec<&String> = rep.as_object().unwrap().keys().collect();
        assert_eq!(fields[..2], ["schema", "command"]);
    }
}

#[test]
fn json_input_matches_text_input() {
    let path = scratch("square.json");
    std::fs::write(
        &path,
        r#"{"vertices": 4, "edges": [[0, 1, 1], [1, 2, 1], [2, 3, 1], [0, 3, 1]]}"#,
    )
    .unwrap();
    let a = lpflat(&["cayley", &path, "--nonedge", "0", "2", "--grid", "21"]);
    let b = lpflat(&["cayley", &data("square.txt"), "--nonedge", "0", "2", "--grid", "21"]);
    assert_eq!(a, b);
    std::fs::write(&path, r#"{"distances": [1, 1, 9]}"#).unwrap();
    assert_eq!(lpflat(&["cone", &path, "--test", "edm"]).code, 1);
    std::fs::write(&path, r#"{"vertices": 2, "edges": [[0, 5]]}"#).unwrap();
    assert_eq!(lpflat(&["realize", &path]).code, EXIT_USAGE);
}

#[test]
fn cayley_csv_and_text() {
    let args = ["cayley", &data("banana_unit.txt"), "--norm", "1", "--nonedge", "2", "4", "--grid", "21"];
    let mut csv = args.to_vec();
    csv.extend(["--format", "csv"]);
    let out = lpflat(&csv);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "t,status");
    assert_eq!(lines.len(), 22);
    assert!(lines.contains(&"2,FEASIBLE"));
    let mut text = args.to_vec();
    text.extend(["--format", "text"]);
    assert_eq!(lpflat(&text).stdout, "[0, 1] u [2, 2] NonConvex\n");
}

#[test]
fn other_subcommands() {
    let out = lpflat(&["rank", &data("k4.txt"), "--norm", "2", "--dim", "2"]);
    assert_eq!(json(&out)["rank"], 5);
    assert_eq!(json(&out)["classification"], "RIGID_DEPENDENT");

    let out = lpflat(&["minor", &data("banana.txt"), "--minor", "K4"]);
    assert_eq!(out.code, 0);
    let w = &json(&out)["witness"];
    assert_eq!(w["branch_sets"].as_array().unwrap().len(), 4);
    assert_eq!(w["edge_map"].as_array().unwrap().len(), 6);
    assert_eq!(lpflat(&["minor", &data("square.txt"), "--minor", "K4"]).code, 1);
    assert_eq!(lpflat(&["minor", &data("k4.txt"), "--minor", &data("square.txt")]).code, 0);
    assert_eq!(lpflat(&["minor", &data("k4.txt"), "--minor", "petersen"]).code, EXIT_USAGE);

    assert_eq!(lpflat(&["flatten", &data("k4.txt"), "--norm", "1"]).code, 0);
    assert_eq!(lpflat(&["flatten", &data("banana.txt"), "--norm", "inf"]).code, 1);
    assert_eq!(lpflat(&["flatten", &data("k4.txt"), "--norm", "2"]).code, 1);
    assert_eq!(lpflat(&["flatten", &data("banana.txt"), "--norm", "2", "--dim", "3"]).code, 0);
    assert_eq!(lpflat(&["flatten", &data("k4.txt"), "--norm", "1", "--dim", "3"]).code, EXIT_USAGE);
    let out = lpflat(&["flatten", &data("w4.txt"), "--norm", "1", "--audit", "20"]);
    assert_eq!(out.code, 1);
    assert!(json(&out)["certificate"]["cayley_non_convexity"].is_object());

    let out = lpflat(&["cone", &data("dv_1_1_9.txt"), "--test", "cut"]);
    assert_eq!(json(&out)["member"], "NON_MEMBER");
    let out = lpflat(&["cone", &data("k4_3_2_witness.txt"), "--norm", "1"]);
    assert_eq!(out.code, 0);
    assert!(json(&out)["witness"]["cuts"].is_object());
    let out = lpflat(&["cone", &data("k4_3_2_witness.txt"), "--norm", "1", "--test", "stratum", "--dim", "2"]);
    assert_eq!(out.code, 0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_lpflat");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["realize", &data("k4_equilateral_3.txt"), "--norm", "1"]), Some(0));
    assert_eq!(status(&["realize", &data("banana_probe_1.5.txt"), "--norm", "1"]), Some(1));
    assert_eq!(status(&["flatten", &data("w4.txt"), "--norm", "1"]), Some(3));
    assert_eq!(status(&["realize"]), Some(64));
}
