use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const EPS: f64 = 1e-9;

fn instance(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmvci"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}\nstdout: {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn ok_report(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    report(&out)
}

fn num(v: &Value, key: &str) -> f64 {
    v["values"][key]
        .as_f64()
        .unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_single_edge_respects_the_guarantee() {
    let r = ok_report(&["solve", path_arg(&instance("single_edge.json"))]);
    assert_eq!(r["status"], "ok");
    let (lower, upper, bound) = (num(&r, "theta_lower"), num(&r, "theta_upper"), num(&r, "lower_bound"));
    assert!(lower <= upper + EPS);
    assert!(upper <= 8.0 / 3.0 * bound + EPS, "theta {upper} vs bound {bound}");
    assert!(num(&r, "guaranteed_ratio") <= 8.0 / 3.0 + EPS);
    let total: f64 = r["strategy"].as_array().unwrap().iter().map(|e| e["p"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn solve_mixed_instance_respects_the_guarantee() {
    let r = ok_report(&["solve", path_arg(&instance("mixed.json"))]);
    assert!(num(&r, "theta_upper") <= 8.0 / 3.0 * num(&r, "lower_bound") + EPS);
    assert_eq!(r["instance_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn malformed_instance_names_the_field() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"graph": {"edges": [[0, 1, 1.0]]}, "leader": {"kind": "uniform"}, "follower": {"kind": "uniform", "rank": 1}}"#,
    );
    let out = run(&["solve", path_arg(&bad)]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("leader") && err.contains("rank"), "{err}");

    let unknown = write(
        &dir,
        "unknown.json",
        r#"{"graph": {"edges": []}, "leader": {"kind": "uniform", "rank": 0}, "follower": {"kind": "uniform", "rank": 0}, "extra": 1}"#,
    );
    let out = run(&["solve", path_arg(&unknown)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("extra"));

    let out = run(&["solve", path_arg(&dir.path().join("missing.json"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn negative_weight_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "neg.json",
        r#"{"graph": {"edges": [[0, 1, -1.0]]}, "leader": {"kind": "uniform", "rank": 1}, "follower": {"kind": "uniform", "rank": 1}}"#,
    );
    let out = run(&["solve", path_arg(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("graph.edges"));
}

#[test]
fn uniform_dual_matches_cutting_planes() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "cycle.json",
        r#"{
  "graph": { "edges": [[0, 1, 1.0], [1, 2, 2.0], [2, 3, 1.5], [3, 4, 0.5], [4, 5, 3.0], [5, 0, 1.0], [0, 3, 2.0]] },
  "leader": { "kind": "uniform", "rank": 2 },
  "follower": { "kind": "uniform", "rank": 3 }
}"#,
    );
    let plain = ok_report(&["solve", path_arg(&path)]);
    let dual = ok_report(&["solve", path_arg(&path), "--uniform-dual"]);
    let (a, b) = (num(&plain, "surrogate_value"), num(&dual, "surrogate_value"));
    assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()), "{a} vs {b}");
}

#[test]
fn uniform_dual_falls_back_on_other_matroids() {
    let mixed = instance("mixed.json");
    let plain = ok_report(&["solve", path_arg(&mixed)]);
    let flagged = ok_report(&["solve", path_arg(&mixed), "--uniform-dual"]);
    assert_eq!(plain["values"], flagged["values"]);
}

#[test]
fn follower_on_k4_reports_the_gap() {
    let r = ok_report(&["follower", path_arg(&instance("k4_gap.json"))]);
    assert!((num(&r, "lp_value") - 6.0).abs() < 1e-9);
    assert!((num(&r, "ilp_value") - 5.0).abs() < 1e-9);
    assert!((num(&r, "exact_value") - 5.0).abs() < 1e-9);
    assert_eq!(r["values"]["attack_set"].as_array().unwrap().len(), 2);
}

#[test]
fn fully_interdicting_strategy_leaves_nothing() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "all.json",
        r#"{
  "graph": { "edges": [[0, 1, 1.0], [1, 2, 2.0], [0, 2, 4.0]] },
  "leader": { "kind": "uniform", "rank": 3 },
  "follower": { "kind": "uniform", "rank": 2 },
  "strategy": [ { "p": 1.0, "set": [0, 1, 2] } ]
}"#,
    );
    let r = ok_report(&["follower", path_arg(&path)]);
    assert_eq!(num(&r, "lp_value"), 0.0);
    assert_eq!(num(&r, "ilp_value"), 0.0);
    assert_eq!(num(&r, "exact_value"), 0.0);
}

#[test]
fn follower_without_strategy_is_an_input_error() {
    let out = run(&["follower", path_arg(&instance("mixed.json"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn gap_study_smallest_row() {
    let r = ok_report(&["gap-study", "--n-max", "4"]);
    let table = r["table"].as_array().unwrap();
    assert_eq!(table.len(), 1);
    assert_eq!(table[0]["n"], 4);
    assert_eq!(table[0]["lp"].as_f64().unwrap(), 6.0);
    assert_eq!(table[0]["ilp"].as_f64().unwrap(), 5.0);
    assert_eq!(table[0]["ratio"].as_f64().unwrap(), 1.2);
}

#[test]
fn gap_study_ratios_climb_toward_four_thirds() {
    let r = ok_report(&["gap-study", "--n-max", "20"]);
    let table = r["table"].as_array().unwrap();
    assert_eq!(table.len(), 9);
    let ratios: Vec<f64> = table.iter().map(|row| row["ratio"].as_f64().unwrap()).collect();
    assert!(ratios.windows(2).all(|w| w[0] < w[1]), "{ratios:?}");
    assert!(ratios.iter().all(|&x| x < 4.0 / 3.0));
    // lp = n(n-1)/2 and ilp = 3n^2/8 - n/4 for the clique family
    let last = ratios.last().unwrap();
    assert!((last - 190.0 / 145.0).abs() < 1e-9, "{last}");
}

#[test]
fn gap_study_rejects_odd_sizes() {
    assert_eq!(code(&run(&["gap-study", "--n-max", "7"])), 2);
    assert_eq!(code(&run(&["gap-study", "--n-max", "8", "--step", "3"])), 2);
}

#[test]
fn check_passes_every_invariant() {
    for name in ["mixed.json", "single_edge.json", "k4_gap.json"] {
        let r = ok_report(&["check", path_arg(&instance(name)), "--trials", "1000"]);
        let checks = r["checks"].as_array().unwrap();
        assert_eq!(checks.len(), 5);
        for c in checks {
            assert_eq!(c["passed"], true, "{name}: {c}");
        }
    }
}

#[test]
fn injected_fault_is_caught() {
    let out = run(&["check", path_arg(&instance("mixed.json")), "--trials", "20", "--inject-fault"]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["status"], "invariant failure");
    let sign = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["invariant"] == "joint-coefficient-sign")
        .unwrap();
    assert_eq!(sign["passed"], false);
    assert_eq!(sign["counterexample"]["edges"][0], 0);
}

#[test]
fn fixed_seed_gives_identical_reports() {
    let mixed = instance("mixed.json");
    let args = ["check", path_arg(&mixed), "--trials", "200", "--seed", "17"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let solve = ["solve", path_arg(&mixed)];
    assert_eq!(run(&solve).stdout, run(&solve).stdout);
}

#[test]
fn reloaded_strategy_reproduces_theta() {
    let dir = TempDir::new().unwrap();
    let saved = dir.path().join("solve.json");
    let out = run(&["solve", path_arg(&instance("mixed.json")), "--out", path_arg(&saved)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let solved: Value = serde_json::from_slice(&fs::read(&saved).unwrap()).unwrap();
    assert_eq!(solved["values"]["theta_exact"], true);
    let r = ok_report(&[
        "follower",
        path_arg(&instance("mixed.json")),
        "--strategy-from",
        path_arg(&saved),
    ]);
    let (theta, again) = (num(&solved, "theta_upper"), num(&r, "exact_value"));
    assert!((theta - again).abs() <= 1e-6 * (1.0 + theta), "{theta} vs {again}");
}

#[test]
fn decompose_round_trips_the_marginals() {
    let r = ok_report(&["decompose", path_arg(&instance("mixed.json"))]);
    assert!(num(&r, "residual") <= 1e-9);
    let support = r["strategy"].as_array().unwrap();
    assert!(support.len() <= 8);
    assert_eq!(num(&r, "support_size") as usize, support.len());
    for entry in support {
        let set = entry["set"].as_array().unwrap();
        assert!(set.len() <= 3);
    }
}

#[test]
fn decompose_rejects_infeasible_marginals() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "over.json",
        r#"{
  "graph": { "edges": [[0, 1, 1.0], [1, 2, 1.0]] },
  "leader": { "kind": "uniform", "rank": 1 },
  "follower": { "kind": "uniform", "rank": 1 },
  "marginals": [0.6, 0.6, 0.0]
}"#,
    );
    assert_eq!(code(&run(&["decompose", path_arg(&path)])), 2);
}

#[test]
fn exact_optimum_sits_below_the_solver() {
    let exact = ok_report(&["exact", path_arg(&instance("mixed.json"))]);
    let solved = ok_report(&["solve", path_arg(&instance("mixed.json"))]);
    let opt = num(&exact, "optimum");
    assert!(opt <= num(&solved, "theta_lower") + 1e-6);
    assert!(num(&solved, "theta_upper") <= 8.0 / 3.0 * opt + 1e-6);
}

#[test]
fn oversized_exact_hits_capacity() {
    let dir = TempDir::new().unwrap();
    let edges: Vec<String> = (0..39).map(|i| format!("[{i}, {}, 1.0]", i + 1)).collect();
    let text = format!(
        r#"{{"graph": {{"edges": [{}]}}, "leader": {{"kind": "uniform", "rank": 20}}, "follower": {{"kind": "uniform", "rank": 20}}}}"#,
        edges.join(", ")
    );
    let path = write(&dir, "path.json", &text);
    let out = run(&["exact", path_arg(&path)]);
    assert_eq!(code(&out), 4);
    assert_eq!(report(&out)["status"], "capacity exceeded");
}

#[test]
fn out_flag_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("gap.json");
    let out = run(&["gap-study", "--n-max", "6", "--out", path_arg(&target)]);
    assert_eq!(code(&out), 0);
    let written: Value = serde_json::from_slice(&fs::read(&target).unwrap()).unwrap();
    assert_eq!(written["table"].as_array().unwrap().len(), 2);
    assert!(!dir.path().join("gap.json.tmp").exists());
}

#[test]
fn timings_are_opt_in() {
    let plain = ok_report(&["gap-study", "--n-max", "4"]);
    assert!(plain.get("timings_ms").is_none());
    let timed = ok_report(&["gap-study", "--n-max", "4", "--timings"]);
    assert!(timed["timings_ms"]["study"].is_number());
}
