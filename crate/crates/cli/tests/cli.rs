//! End-to-end checks of the `mrct` binary: output values, exit codes,
//! config precedence, record replay, and reproduction files.

use std::path::Path;
use std::process::{Command, Output};

fn mrct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrct"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn sample_size_normal_design() {
    let out = mrct(&[
        "sample-size",
        "--endpoint",
        "normal",
        "--d",
        "1",
        "--sigma2-t",
        "16",
        "--sigma2-c",
        "16",
        "--alpha",
        "0.025",
        "--power",
        "0.8",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("N   = 504"), "{text}");
}

#[test]
fn sample_size_binary_power_90() {
    let out = mrct(&[
        "sample-size",
        "--endpoint",
        "binary",
        "--p-t",
        "0.6",
        "--p-c",
        "0.5",
        "--alpha",
        "0.025",
        "--power",
        "0.9",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("N   = 1030"));
}

#[test]
fn invalid_effect_exits_2() {
    let out = mrct(&[
        "sample-size",
        "--endpoint",
        "normal",
        "--d",
        "0",
        "--sigma2-t",
        "16",
        "--sigma2-c",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("positive"), "{err}");
}

#[test]
fn unattainable_target_exits_4_with_supremum() {
    let out = mrct(&[
        "solve-fraction",
        "--criterion",
        "2",
        "--studies",
        "1",
        "--k",
        "4",
        "--alpha",
        "0.05",
        "--power",
        "0.8",
        "--target",
        "0.9",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("supremum"));
}

#[test]
fn exact_budget_exceeded_exits_3() {
    let out = mrct(&[
        "cp",
        "--criterion",
        "2",
        "--studies",
        "1",
        "--method",
        "exact",
        "--endpoint",
        "binary",
        "--p-t",
        "0.6",
        "--p-c",
        "0.5",
        "--alpha",
        "0.025",
        "--power",
        "0.8",
        "--k",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn degenerate_simulation_exits_5() {
    let out = mrct(&[
        "simulate",
        "--criterion",
        "2",
        "--studies",
        "1",
        "--endpoint",
        "normal",
        "--d=-5",
        "--sigma2-t",
        "1",
        "--sigma2-c",
        "1",
        "--n-total",
        "40",
        "--alpha",
        "0.025",
        "--power",
        "0.8",
        "--k",
        "2",
        "--seed",
        "3",
        "--reps",
        "200",
    ]);
    assert_eq!(
        out.status.code(),
        Some(5),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn solve_fraction_criterion1_published_values() {
    let out = mrct(&[
        "solve-fraction",
        "--criterion",
        "1",
        "--studies",
        "1",
        "--alpha",
        "0.025",
        "--power",
        "0.8",
        "--pi",
        "0.5",
        "--gamma",
        "0.2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("0.230 (23.0%)"), "{text}");
}

#[test]
fn simulate_is_deterministic_and_appends_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("runs.csv");
    let args = |path: &Path| {
        vec![
            "simulate".to_string(),
            "--criterion".into(),
            "1".into(),
            "--studies".into(),
            "1".into(),
            "--endpoint".into(),
            "binary".into(),
            "--p-t".into(),
            "0.6".into(),
            "--p-c".into(),
            "0.5".into(),
            "--alpha".into(),
            "0.025".into(),
            "--power".into(),
            "0.8".into(),
            "--f".into(),
            "0.23".into(),
            "--seed".into(),
            "42".into(),
            "--reps".into(),
            "2000".into(),
            "--out".into(),
            path.display().to_string(),
        ]
    };
    let run = |path: &Path| {
        Command::new(env!("CARGO_BIN_EXE_mrct"))
            .args(args(path))
            .output()
            .unwrap()
    };
    let a = run(&csv_path);
    let b = run(&csv_path);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b), "same seed must reproduce");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3, "header plus two appended rows: {csv}");
    assert_eq!(lines[1], lines[2]);
}

#[test]
fn monte_carlo_record_replays_estimate_for_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let record_path = dir.path().join("sim.json");
    let out = mrct(&[
        "simulate",
        "--criterion",
        "2",
        "--studies",
        "1",
        "--endpoint",
        "binary",
        "--p-t",
        "0.8",
        "--p-c",
        "0.7",
        "--alpha",
        "0.05",
        "--power",
        "0.8",
        "--f",
        "0.155",
        "--equal-rest",
        "--k",
        "3",
        "--seed",
        "31",
        "--reps",
        "3000",
        "--json",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::write(&record_path, &out.stdout).unwrap();
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();

    let replay = mrct(&["simulate", "--config", record_path.to_str().unwrap(), "--json"]);
    assert!(replay.status.success());
    let replayed: serde_json::Value = serde_json::from_slice(&replay.stdout).unwrap();
    assert_eq!(record["results"], replayed["results"]);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.toml");
    std::fs::write(
        &path,
        "schema = 1\nalpha = 0.025\npower = 0.8\npi = 0.5\nf = 0.230\ncriterion = 1\nstudies = 1\n",
    )
    .unwrap();
    let out = mrct(&["cp", "--config", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("CP = 0.8003"), "{}", stdout(&out));

    // flag beats file: smaller fraction gives lower consistency
    let out = mrct(&["cp", "--config", path.to_str().unwrap(), "--f", "0.10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let cp: f64 = text.trim().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(cp < 0.7, "flag override not applied: {text}");
}

#[test]
fn config_requires_schema_and_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let no_schema = dir.path().join("a.toml");
    std::fs::write(&no_schema, "alpha = 0.025\n").unwrap();
    let out = mrct(&["cp", "--config", no_schema.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema"));

    let typo = dir.path().join("b.toml");
    std::fs::write(&typo, "schema = 1\nalhpa = 0.025\n").unwrap();
    let out = mrct(&["cp", "--config", typo.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_record_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    let record_path = dir.path().join("record.json");
    let out = mrct(&[
        "cp",
        "--criterion",
        "2",
        "--studies",
        "2",
        "--endpoint",
        "normal",
        "--d",
        "1",
        "--sigma2-t",
        "16",
        "--sigma2-c",
        "16",
        "--alpha",
        "0.05",
        "--power",
        "0.8",
        "--k",
        "3",
        "--json",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::write(&record_path, &out.stdout).unwrap();
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let original_cp = record["results"]["cp"].as_f64().unwrap();

    let replay = mrct(&["cp", "--config", record_path.to_str().unwrap(), "--json"]);
    assert!(replay.status.success());
    let replayed: serde_json::Value = serde_json::from_slice(&replay.stdout).unwrap();
    assert_eq!(replayed["results"]["cp"].as_f64().unwrap(), original_cp);
}

#[test]
fn reproduce_table2_has_constant_fraction_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table2.csv");
    let out = mrct(&[
        "reproduce",
        "--table",
        "2",
        "--seed",
        "7",
        "--reps",
        "2000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    for row in &rows[..4] {
        assert!(row.contains(",0.230,"), "{row}");
    }
    for row in &rows[4..] {
        assert!(row.contains(",0.201,"), "{row}");
    }
}

#[test]
fn reproduce_example1_matches_published_triple() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("example1.csv");
    let out = mrct(&[
        "reproduce",
        "--example",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.contains("max_cp_k2,0.9825"));
    assert!(csv.contains("max_cp_k3,0.8973"));
    assert!(csv.contains("max_cp_k4,0.7724"));
    assert!(csv.contains("f1_equal_rest_k3,0.105"));
}

#[test]
fn reproduce_section4_lists_expected_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("section4.csv");
    let out = mrct(&["reproduce", "--section4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.contains("study2_n,380"));
    assert!(csv.contains("study1_n,214"));
    assert!(csv.contains("220"), "published study-1 size must be noted");
    assert!(csv.contains("equal_fraction_cp0.8,0.110"));
    assert!(csv.contains("equal_fraction_cp0.9,0.227"));
    assert!(csv.contains("pair_cp0.9_f1_0.20,0.262"));
    assert!(csv.contains("pair_cp0.9_f1_0.21,0.247"));
    assert!(csv.contains("pair_cp0.9_f1_0.22,0.234"));
}

#[test]
fn pairs_command_reproduces_known_pairs() {
    let out = mrct(&["pairs", "--c", "15.625"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("f1 = 0.100 (10.0%)  f2 = 0.178 (17.8%)"),
        "{text}"
    );
    assert!(
        text.contains("f1 = 0.080 (8.0%)  f2 = 0.320 (32.0%)"),
        "{text}"
    );
}
