use std::fs;
use std::path::Path;

use pwleak_cli::{run, EXIT_DATA, EXIT_USAGE};

const PASSWORDS: &str =
    "123456\n123456\n123456\n123456\n123456\npassword\npassword\npassword\nabc123\nabc123\nletmein\nletmein\n";

fn write_plain(dir: &Path) -> String {
    let path = dir.join("passwords.txt");
    fs::write(&path, PASSWORDS).unwrap();
    path.to_str().unwrap().to_string()
}

fn pwleak(args: &[&str]) -> i32 {
    run(std::iter::once("pwleak").chain(args.iter().copied()))
}

#[test]
fn report_writes_every_format() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_plain(dir.path());
    let csv = dir.path().join("limitadv.csv");
    let code = pwleak(&[
        "report",
        "--table",
        "limitadv",
        "--corpus",
        &corpus,
        "--format",
        "plain",
        "--budgets",
        "1,2,1e1",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("B,lambda_star,diff,ratio,tail_flag"));
    assert_eq!(lines.count(), 3);

    let md = dir.path().join("t.md");
    assert_eq!(
        pwleak(&[
            "report",
            "--table",
            "timeattack",
            "--corpus",
            &corpus,
            "--format",
            "plain",
            "--schedules",
            "1x1,2x2",
            "--out-format",
            "md",
            "--out",
            md.to_str().unwrap()
        ]),
        0
    );
    assert!(fs::read_to_string(&md).unwrap().starts_with("| days | guesses_per_day |"));

    let json = dir.path().join("t.json");
    assert_eq!(
        pwleak(&[
            "report",
            "--table",
            "bopt",
            "--corpus",
            &corpus,
            "--format",
            "plain",
            "--ratios",
            "10,1e3",
            "--lengths",
            "6,8",
            "--out-format",
            "json",
            "--out",
            json.to_str().unwrap()
        ]),
        0
    );
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["table"], "bopt");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn dp_release_round_trips_through_the_directory_format() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_plain(dir.path());
    let out = dir.path().join("released");
    let out_s = out.to_str().unwrap();
    assert_eq!(pwleak(&["dp-release", "--corpus", &corpus, "--format", "plain", "--out", out_s, "--seed", "3"]), 0);
    assert!(out.join("overall.txt").exists());
    assert!(out.join("len6.txt").exists());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("dp_report.json")).unwrap()).unwrap();
    for key in ["overall", "len6", "len7", "len8"] {
        assert!(report[key]["l1_error"].is_u64(), "{key}: {report}");
        assert!(report[key]["bound_value"].as_f64().unwrap() > 0.0);
    }
    // the released corpus loads back; it is flagged as not consistent
    let summary = dir.path().join("summary.csv");
    assert_eq!(pwleak(&["analyze", "--corpus", out_s, "--out", summary.to_str().unwrap()]), 0);
    let summary = fs::read_to_string(summary).unwrap();
    assert!(summary.starts_with("list,users,distinct,weight,singletons,consistent\n"));
    // a reloaded release is re-released only if its lists happen to agree
    let consistent = summary.lines().nth(1).unwrap().ends_with("true");
    let again = dir.path().join("again");
    let code = pwleak(&["dp-release", "--corpus", out_s, "--out", again.to_str().unwrap()]);
    assert_eq!(code, if consistent { 0 } else { EXIT_DATA });
}

#[test]
fn simulate_and_econ() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_plain(dir.path());
    let out = dir.path().join("sim.csv");
    let code = pwleak(&[
        "simulate",
        "--corpus",
        &corpus,
        "--format",
        "plain",
        "--mode",
        "fixed",
        "--budget",
        "1",
        "--trials",
        "1e4",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    let rate: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((rate - 5.0 / 12.0).abs() < 0.03, "{rate}");

    assert_eq!(
        pwleak(&["simulate", "--corpus", &corpus, "--format", "plain", "--mode", "rational-length"]),
        EXIT_USAGE
    );
    let econ = dir.path().join("econ.csv");
    assert_eq!(
        pwleak(&[
            "econ",
            "--corpus",
            &corpus,
            "--format",
            "plain",
            "--ratios",
            "1e2",
            "--lengths",
            "6",
            "--out",
            econ.to_str().unwrap()
        ]),
        0
    );
    let text = fs::read_to_string(econ).unwrap();
    assert!(text.contains("ratio,gain_star,gain,diff,gain_ratio,tail_flag"));
    assert!(text.contains("ratio,lambda_bar_star,lambda_bar,diff,success_ratio,tail_flag"));
    assert!(text.contains("ratio,bopt,bopt_l6,tail_flag"));
}

#[test]
fn length_commands() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pwleak(&["infer-length", "--profile", "2,50", "--payload", "66"]), 0);
    assert_eq!(pwleak(&["infer-length", "--profile", "2,50", "--payload", "67"]), EXIT_DATA);
    let pairs = dir.path().join("pairs.csv");
    fs::write(&pairs, "length,payload\n8,58\n9,59\n").unwrap();
    assert_eq!(pwleak(&["calibrate", "--pairs", pairs.to_str().unwrap()]), 0);
    fs::write(&pairs, "8,58\n9,60\n10,61\n").unwrap();
    assert_eq!(pwleak(&["calibrate", "--pairs", pairs.to_str().unwrap()]), EXIT_DATA);
}

#[test]
fn usage_and_data_errors() {
    assert_eq!(pwleak(&["report", "--table", "nope", "--corpus", "x"]), EXIT_USAGE);
    assert_eq!(pwleak(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(pwleak(&["report", "--table", "limitadv", "--corpus", "x", "--budgets", "1.5"]), EXIT_USAGE);
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("overall.txt"), "3\n5\n").unwrap();
    assert_eq!(pwleak(&["analyze", "--corpus", dir.path().to_str().unwrap()]), EXIT_DATA);
    assert_eq!(pwleak(&["analyze", "--corpus", "/nonexistent/dir"]), EXIT_DATA);
}
