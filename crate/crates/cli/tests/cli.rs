use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qfient(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfient")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Value printed on the `threshold <id>: <value> ...` line of `example`.
fn reported_threshold(out: &str, id: &str) -> f64 {
    let prefix = format!("threshold {id}: ");
    let line = out.lines().find(|l| l.starts_with(&prefix)).expect("threshold line");
    line[prefix.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

/// Parses a sweep CSV into the header and rows of numbers.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

/// First grid interval on which `column` goes from ≤ 0 to > 0.
fn first_crossing(text: &str, column: &str) -> (f64, f64) {
    let (header, rows) = parse_csv(text);
    let k = header.iter().position(|h| h == column).unwrap();
    rows.windows(2)
        .find(|w| w[0][k] <= 0.0 && w[1][k] > 0.0)
        .map(|w| (w[0][0], w[1][0]))
        .expect("column crosses zero")
}

const MIXED_2Q: &str = r#"{"dims": [2, 2], "matrix": [
  [[0.25, 0], [0, 0], [0, 0], [0, 0]],
  [[0, 0], [0.25, 0], [0, 0], [0, 0]],
  [[0, 0], [0, 0], [0.25, 0], [0, 0]],
  [[0, 0], [0, 0], [0, 0], [0.25, 0]]
]}"#;

const SIGMA_Z: &str = r#"{"local_dim": 2, "matrix": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]}"#;

#[test]
fn check_maximally_mixed_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("mixed.json");
    let obs = dir.path().join("z.json");
    fs::write(&state, MIXED_2Q).unwrap();
    fs::write(&obs, SIGMA_Z).unwrap();
    let o = qfient(&["check", "--state", path_str(&state), "--obs", path_str(&obs), "--obs", path_str(&obs)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("criterion_id,lhs,rhs,gap,detected\n"));
    assert_eq!(out.lines().count(), 5);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",false")));
}

#[test]
fn check_malformed_file_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("bad.json");
    fs::write(&state, r#"{"dims": [2, 2], "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, "x"]]]}"#).unwrap();
    let o = qfient(&["check", "--state", path_str(&state), "--obs", "z", "--obs", "z"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("matrix[1][1][1]"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());

    fs::write(&state, r#"{"matrix": []}"#).unwrap();
    let o = qfient(&["check", "--state", path_str(&state), "--obs", "z", "--obs", "z"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`dims`"), "{}", stderr(&o));
}

#[test]
fn check_rejects_non_unit_trace() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("trace.json");
    fs::write(&state, MIXED_2Q.replace("0.25", "0.5")).unwrap();
    let o = qfient(&["check", "--state", path_str(&state), "--obs", "z", "--obs", "z"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("matrix"), "{}", stderr(&o));
}

#[test]
fn check_dimension_mismatch_is_an_input_error() {
    let o = qfient(&["check", "--random-separable", "2,3", "--obs", "z", "--obs", "z"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn example1_export_then_check_reproduces_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let ex = qfient(&["example", "1", "--export", path_str(dir.path())]);
    assert_eq!(ex.status.code(), Some(0), "{}", stderr(&ex));
    let state = dir.path().join("state.json");
    let o0 = dir.path().join("obs_0.json");
    let o1 = dir.path().join("obs_1.json");
    let ck = qfient(&["check", "--state", path_str(&state), "--obs", path_str(&o0), "--obs", path_str(&o1)]);
    assert_eq!(ck.status.code(), Some(0), "{}", stderr(&ck));
    let table: Vec<String> = stdout(&ex).lines().take_while(|l| !l.is_empty()).map(String::from).collect();
    let checked: Vec<String> = stdout(&ck).lines().map(String::from).collect();
    assert_eq!(table, checked);
    let theorem1 = checked.iter().find(|l| l.starts_with("theorem1,")).unwrap();
    assert!(theorem1.ends_with(",true"));
}

#[test]
fn example_exit_codes() {
    for (n, code) in [("1", 0), ("2", 0)] {
        let o = qfient(&["example", n]);
        assert_eq!(o.status.code(), Some(code), "example {n}: {}", stdout(&o));
    }
    let o = qfient(&["example", "2"]);
    let out = stdout(&o);
    assert!((reported_threshold(&out, "theorem1") - 0.5044).abs() <= 5e-4);
    assert!((reported_threshold(&out, "ym_bipartite") - 0.5067).abs() <= 5e-4);
    assert!((reported_threshold(&out, "ppt") - 0.36).abs() <= 1e-6);
    assert_eq!(qfient(&["example", "4"]).status.code(), Some(1));
}

#[test]
fn example3_reports_thresholds_and_comparison_constant() {
    let o = qfient(&["example", "3"]);
    let out = stdout(&o);
    assert!(reported_threshold(&out, "theorem2") < 9.0 / 23.0);
    assert!((reported_threshold(&out, "ym_tripartite") - 0.3657).abs() <= 5e-4);
    assert!(out.contains("9/23 = 0.391304"));
    assert_eq!(o.status.code(), Some(if out.contains("MISMATCH") { 1 } else { 0 }));
}

#[test]
fn sweep_example3_has_101_rows() {
    let o = qfient(&["sweep", "example3", "--grid", "0:1:101"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["p", "theorem2", "ym_tripartite"]);
    assert_eq!(rows.len(), 101);
    let (lo, hi) = first_crossing(&stdout(&o), "ym_tripartite");
    assert!(lo >= 0.36 - 1e-12 && hi <= 0.37 + 1e-12, "{lo} {hi}");
}

#[test]
fn sweep_example3_theorem2_crosses_between_034_and_035() {
    let o = qfient(&["sweep", "example3", "--grid", "0:1:101"]);
    let (lo, hi) = first_crossing(&stdout(&o), "theorem2");
    assert!(lo >= 0.34 - 1e-12 && hi <= 0.35 + 1e-12, "crossing in [{lo}, {hi}]");
}

#[test]
fn sweep_example3_theorem2_crossing_matches_threshold() {
    let sw = qfient(&["sweep", "example3", "--grid", "0:1:101"]);
    let (lo, hi) = first_crossing(&stdout(&sw), "theorem2");
    let th = qfient(&["threshold", "example3", "--criterion", "theorem2"]);
    assert_eq!(th.status.code(), Some(0));
    let line = stdout(&th).lines().nth(1).unwrap().to_string();
    let p: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
    assert!(lo < p && p < hi, "{p} not in [{lo}, {hi}]");
}

#[test]
fn sweep_example2_theorem1_crosses_between_050_and_051() {
    let o = qfient(&["sweep", "example2", "--grid", "0:1:101"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, _) = parse_csv(&stdout(&o));
    assert_eq!(header, ["p", "theorem1", "ym_bipartite", "ppt"]);
    let (lo, hi) = first_crossing(&stdout(&o), "theorem1");
    assert!(lo >= 0.50 - 1e-12 && hi <= 0.51 + 1e-12, "{lo} {hi}");
}

#[test]
fn sweep_grid_count_one_is_a_usage_error() {
    let o = qfient(&["sweep", "example2", "--grid", "0:1:1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    for bad in ["0.5:0.2:10", "0:1.5:10", "0:1", "a:b:c"] {
        assert_eq!(qfient(&["sweep", "example2", "--grid", bad]).status.code(), Some(1), "{bad}");
    }
}

#[test]
fn sweep_output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(qfient(&["sweep", "example3", "--grid", "0:1:101", "--out", path_str(&a), "--jobs", "1"]).status.success());
    assert!(qfient(&["sweep", "example3", "--grid", "0:1:101", "--out", path_str(&b), "--jobs", "4"]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read(&a).unwrap(), qfient(&["sweep", "example3", "--grid", "0:1:101"]).stdout);
}

#[test]
fn random_separable_check_is_seeded() {
    let args = ["check", "--random-separable", "2,2", "--terms", "3", "--seed", "11"];
    let a = qfient(&args);
    let b = qfient(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(2), "{}", stdout(&a));
    let c = qfient(&["check", "--random-separable", "2,2", "--terms", "3", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn sweep_family_file_with_observable_files() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("bell.json");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    fs::write(&fam, format!(r#"{{"dims": [2, 2], "amplitudes": [[{h}, 0], [0, 0], [0, 0], [{h}, 0]]}}"#)).unwrap();
    let o = qfient(&["sweep", path_str(&fam), "--grid", "0:1:11", "--obs", "z", "--obs", "z"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["p", "theorem1", "theorem_n", "ym_bipartite", "ppt"]);
    assert_eq!(rows.len(), 11);
    // The Bell state violates theorem1 by 4 at p = 1.
    assert!((rows[10][1] - 4.0).abs() < 1e-9);

    let th = qfient(&["threshold", path_str(&fam), "--criterion", "ppt"]);
    assert_eq!(th.status.code(), Some(0));
    let p: f64 = stdout(&th).lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((p - 1.0 / 3.0).abs() < 1e-6, "{p}");
}

#[test]
fn threshold_without_violation_exits_2() {
    let o = qfient(&["threshold", "example2", "--criterion", "theorem1", "--obs", "i", "--obs", "z"]);
    assert_eq!(o.status.code(), Some(2), "{} {}", stdout(&o), stderr(&o));
}
