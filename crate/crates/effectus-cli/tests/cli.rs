//! End-to-end tests driving the compiled binary: exit codes, output
//! formats, determinism, and byte-exact round trips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use effectus::io::{read_observable, to_canonical_json, ObservableFile};
use effectus::observable::Observable;
use effectus::sum::obs_sum;
use effectus::EffectAlgebra;

const C2: &str = r#"{"kind":"product_chains","orders":[2]}"#;
const BOOL2: &str = r#"{"kind":"product_chains","orders":[1,1]}"#;
const C3: &str = r#"{"kind":"product_chains","orders":[3]}"#;

const DIAMOND: &str = r#"{
  "kind": "table",
  "elements": ["0", "a", "b", "1"],
  "zero": "0",
  "one": "1",
  "sums": [
    ["0","0","0"], ["0","a","a"], ["a","0","a"], ["0","b","b"], ["b","0","b"],
    ["0","1","1"], ["1","0","1"], ["a","a","1"], ["b","b","1"]
  ]
}"#;

const MO2: &str = r#"{
  "kind": "table",
  "elements": ["0", "a", "ac", "b", "bc", "1"],
  "zero": "0",
  "one": "1",
  "sums": [
    ["0","0","0"], ["0","a","a"], ["a","0","a"], ["0","ac","ac"], ["ac","0","ac"],
    ["0","b","b"], ["b","0","b"], ["0","bc","bc"], ["bc","0","bc"],
    ["0","1","1"], ["1","0","1"],
    ["a","ac","1"], ["ac","a","1"], ["b","bc","1"], ["bc","b","1"]
  ]
}"#;

const MISSING_COMPLEMENT: &str = r#"{
  "kind": "table",
  "elements": ["0", "a", "1"],
  "zero": "0",
  "one": "1",
  "sums": [["0","0","0"], ["0","a","a"], ["a","0","a"], ["0","1","1"], ["1","0","1"]]
}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_effectus"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn out_str(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn err_str(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("no signal")
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn alg_check_classifies_product_and_table_forms() {
    let dir = tempfile::tempdir().unwrap();
    let c2 = put(dir.path(), "c2.json", C2);
    let o = run(&["alg", "check", path_str(&c2)]);
    assert_eq!(code(&o), 0, "stderr: {}", err_str(&o));
    let v: serde_json::Value = serde_json::from_str(&out_str(&o)).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["algebra"]["is_mv"], true);
    assert_eq!(v["algebra"]["is_boolean"], false);

    let b2 = put(dir.path(), "bool2.json", BOOL2);
    let o = run(&["alg", "check", path_str(&b2)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&out_str(&o)).unwrap();
    assert_eq!(v["algebra"]["is_boolean"], true);
    assert_eq!(v["algebra"]["is_orthoalgebra"], true);

    let d = put(dir.path(), "diamond.json", DIAMOND);
    let o = run(&["alg", "check", path_str(&d)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&out_str(&o)).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["algebra"]["is_lattice"], true);
    assert_eq!(v["algebra"]["is_distributive"], true);
    assert_eq!(v["algebra"]["is_mv"], false);
    assert_eq!(v["algebra"]["has_rdp"], false);
    // Only the poles are sharp in the diamond.
    assert_eq!(v["sharp_elements"], serde_json::json!(["0", "1"]));
}

#[test]
fn alg_check_rejects_missing_complement_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let p = put(dir.path(), "nocomp.json", MISSING_COMPLEMENT);
    let o = run(&["alg", "check", path_str(&p)]);
    assert_eq!(code(&o), 1);
    let msg = err_str(&o);
    assert!(msg.contains("complement"), "missing witness: {msg}");
    assert!(msg.contains('a'), "witness should name the element: {msg}");
}

#[test]
fn alg_check_reports_parse_errors_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = put(dir.path(), "bad.json", r#"{"kind":"product_chains",}"#);
    let o = run(&["alg", "check", path_str(&p)]);
    assert_eq!(code(&o), 2);
    assert!(err_str(&o).contains("line 1"), "stderr: {}", err_str(&o));
}

#[test]
fn question_summed_with_itself_doubles_the_support() {
    let dir = tempfile::tempdir().unwrap();
    let c2 = put(dir.path(), "c2.json", C2);
    let qa = dir.path().join("qa.json");
    let o = run(&[
        "obs",
        "question",
        "--algebra",
        path_str(&c2),
        "--element",
        "(1)",
        "--out",
        path_str(&qa),
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", err_str(&o));

    let sum_path = dir.path().join("s.json");
    let o = run(&[
        "obs",
        "sum",
        path_str(&qa),
        path_str(&qa),
        "--out",
        path_str(&sum_path),
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", err_str(&o));

    // Independent expectation computed through the library.
    let alg = Arc::new(EffectAlgebra::product_of_chains(&[2]).unwrap());
    let q = Observable::question(Arc::clone(&alg), &alg.parse_element("(1)").unwrap()).unwrap();
    let expected = obs_sum(&q, &q).unwrap();
    let (got, forced) = read_observable(&sum_path).unwrap();
    assert_eq!(got, expected);
    assert!(!forced);
    // And the bytes on disk are exactly the canonical form.
    let bytes = std::fs::read_to_string(&sum_path).unwrap();
    assert_eq!(
        bytes,
        to_canonical_json(&ObservableFile::from_observable(&expected, false))
    );
}

#[test]
fn sum_refuses_non_distributive_algebras_unless_forced() {
    let dir = tempfile::tempdir().unwrap();
    let mo2 = put(dir.path(), "mo2.json", MO2);
    let ma = dir.path().join("ma.json");
    let mb = dir.path().join("mb.json");
    for (el, p) in [("a", &ma), ("b", &mb)] {
        let o = run(&[
            "obs",
            "question",
            "--algebra",
            path_str(&mo2),
            "--element",
            el,
            "--out",
            path_str(p),
        ]);
        assert_eq!(code(&o), 0, "stderr: {}", err_str(&o));
    }

    let o = run(&["obs", "sum", path_str(&ma), path_str(&mb)]);
    assert_eq!(code(&o), 2);
    assert!(err_str(&o).contains("distributive"), "stderr: {}", err_str(&o));

    let forced_path = dir.path().join("forced.json");
    let o = run(&[
        "obs",
        "sum",
        path_str(&ma),
        path_str(&mb),
        "--force",
        "--out",
        path_str(&forced_path),
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", err_str(&o));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&forced_path).unwrap()).unwrap();
    assert_eq!(v["forced"], true, "forced marker must be present");
    // The forced sum of the two incompatible questions is the point mass at 1.
    assert_eq!(v["points"], serde_json::json!([{"t": "1", "mass": "1"}]));
}

#[test]
fn order_prints_the_relation_word() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "c2.json", C2);
    // Observable files may name their algebra by relative path.
    let zero = put(
        dir.path(),
        "o.json",
        r#"{"algebra": "c2.json", "points": [{"t": "0", "mass": [2]}]}"#,
    );
    let two = put(
        dir.path(),
        "pm2.json",
        r#"{"algebra": "c2.json", "points": [{"t": "2", "mass": [2]}]}"#,
    );
    let o = run(&["obs", "order", path_str(&zero), path_str(&two)]);
    assert_eq!(code(&o), 0, "stderr: {}", err_str(&o));
    assert_eq!(out_str(&o), "LESS\n");

    let o = run(&["obs", "order", path_str(&two), path_str(&zero)]);
    assert_eq!(out_str(&o), "GREATER\n");
    let o = run(&["obs", "order", path_str(&zero), path_str(&zero)]);
    assert_eq!(out_str(&o), "EQUAL\n");
}

#[test]
fn observables_over_different_algebras_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let c2 = put(dir.path(), "c2.json", C2);
    let c3 = put(dir.path(), "c3.json", C3);
    let x = dir.path().join("x.json");
    let y = dir.path().join("y.json");
    run(&[
        "obs", "question", "--algebra", path_str(&c2), "--element", "(1)", "--out", path_str(&x),
    ]);
    run(&[
        "obs", "question", "--algebra", path_str(&c3), "--element", "(1)", "--out", path_str(&y),
    ]);
    let o = run(&["obs", "sum", path_str(&x), path_str(&y)]);
    assert_eq!(code(&o), 2);
    assert!(err_str(&o).contains("algebra"), "stderr: {}", err_str(&o));
}

#[test]
fn written_observables_reread_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let c2 = put(dir.path(), "c2.json", C2);
    let x = dir.path().join("x.json");
    run(&[
        "obs", "question", "--algebra", path_str(&c2), "--element", "(1)", "--out", path_str(&x),
    ]);
    let neg = dir.path().join("neg.json");
    run(&["obs", "negate", path_str(&x), "--out", path_str(&neg)]);
    // Re-reading the written file and re-serializing reproduces the bytes.
    let bytes = std::fs::read_to_string(&neg).unwrap();
    let file: ObservableFile = serde_json::from_str(&bytes).unwrap();
    assert_eq!(to_canonical_json(&file), bytes);
    // Double negation restores the original file byte-for-byte.
    let back = dir.path().join("back.json");
    run(&["obs", "negate", path_str(&neg), "--out", path_str(&back)]);
    assert_eq!(
        std::fs::read_to_string(&x).unwrap(),
        std::fs::read_to_string(&back).unwrap()
    );
}

#[test]
fn compose_meet_and_join_work_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let c22 = put(dir.path(), "c22.json", r#"{"kind":"product_chains","orders":[2,2]}"#);
    let x = dir.path().join("x.json");
    let y = dir.path().join("y.json");
    run(&[
        "obs", "question", "--algebra", path_str(&c22), "--element", "(2,0)", "--out",
        path_str(&x),
    ]);
    run(&[
        "obs", "question", "--algebra", path_str(&c22), "--element", "(0,2)", "--out",
        path_str(&y),
    ]);

    let o = run(&["obs", "order", path_str(&x), path_str(&y)]);
    assert_eq!(out_str(&o), "INCOMPARABLE\n");

    let o = run(&["obs", "meet", path_str(&x), path_str(&y)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&out_str(&o)).unwrap();
    assert_eq!(v["points"], serde_json::json!([{"t": "0", "mass": [2, 2]}]));

    let o = run(&["obs", "join", path_str(&x), path_str(&y)]);
    let v: serde_json::Value = serde_json::from_str(&out_str(&o)).unwrap();
    assert_eq!(v["points"], serde_json::json!([{"t": "1", "mass": [2, 2]}]));

    let o = run(&[
        "obs",
        "compose",
        path_str(&x),
        "--map",
        r#"[["0","5"],["1","-1"]]"#,
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&out_str(&o)).unwrap();
    assert_eq!(
        v["points"],
        serde_json::json!([
            {"t": "-1", "mass": [2, 0]},
            {"t": "5", "mass": [0, 2]}
        ])
    );

    // A map that misses a support point is a usage error.
    let o = run(&["obs", "compose", path_str(&x), "--map", r#"[["0","5"]]"#]);
    assert_eq!(code(&o), 2);
}

#[test]
fn laws_run_passes_on_chain_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = put(dir.path(), "c3.json", C3);
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    for r in [&r1, &r2] {
        let o = run(&[
            "laws",
            "run",
            "--algebra",
            path_str(&c3),
            "--samples",
            "60",
            "--seed",
            "42",
            "--out",
            path_str(r),
        ]);
        assert_eq!(code(&o), 0, "stderr: {}", err_str(&o));
    }
    let b1 = std::fs::read(&r1).unwrap();
    let b2 = std::fs::read(&r2).unwrap();
    assert_eq!(b1, b2, "same seed must give byte-identical reports");

    let v: serde_json::Value = serde_json::from_slice(&b1).unwrap();
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 17);
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["algebra"]["is_mv"], true);

    // A different seed changes the sampled cases but still passes.
    let o = run(&[
        "laws", "run", "--algebra", path_str(&c3), "--samples", "60", "--seed", "43",
    ]);
    assert_eq!(code(&o), 0);
    assert_ne!(out_str(&o).into_bytes(), b1);
}

#[test]
fn laws_run_gates_sum_laws_off_mv_algebras() {
    let dir = tempfile::tempdir().unwrap();
    let d = put(dir.path(), "diamond.json", DIAMOND);
    let o = run(&["laws", "run", "--algebra", path_str(&d), "--samples", "10"]);
    assert_eq!(code(&o), 2);
    let msg = err_str(&o);
    assert!(msg.contains("MV"), "stderr: {msg}");
    assert!(msg.contains("force"), "stderr: {msg}");

    // Forced, the whole catalog passes on the diamond.
    let o = run(&[
        "laws", "run", "--algebra", path_str(&d), "--samples", "25", "--seed", "5", "--force",
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", err_str(&o));
    let v: serde_json::Value = serde_json::from_str(&out_str(&o)).unwrap();
    assert_eq!(v["all_passed"], true);

    // Non-sum laws run unforced.
    let o = run(&[
        "laws", "run", "--algebra", path_str(&d), "--law", "OLSON-PO", "--law", "LATTICE-DIST",
        "--samples", "20",
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", err_str(&o));
}

#[test]
fn laws_run_finds_violations_on_mo2_when_forced() {
    let dir = tempfile::tempdir().unwrap();
    let mo2 = put(dir.path(), "mo2.json", MO2);
    let report = dir.path().join("report.json");
    let o = run(&[
        "laws",
        "run",
        "--algebra",
        path_str(&mo2),
        "--force",
        "--exhaustive",
        "--grid-denom",
        "1",
        "--grid-lo",
        "0",
        "--grid-hi",
        "1",
        "--max-support",
        "2",
        "--out",
        path_str(&report),
    ]);
    assert_eq!(code(&o), 1, "violations must exit 1; stderr: {}", err_str(&o));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["all_passed"], false);
    let failed: Vec<&str> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["status"] == "failed")
        .map(|r| r["law"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"LATTICE-DIST"), "failed set: {failed:?}");
    for r in v["results"].as_array().unwrap() {
        if r["status"] == "failed" {
            assert!(
                r["counterexample"].is_object(),
                "failed law without witness: {r}"
            );
        }
    }
}

#[test]
fn laws_run_rejects_unknown_ids_listing_the_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = put(dir.path(), "c3.json", C3);
    let o = run(&["laws", "run", "--algebra", path_str(&c3), "--law", "NOSUCH"]);
    assert_eq!(code(&o), 2);
    let msg = err_str(&o);
    assert!(msg.contains("NOSUCH"), "stderr: {msg}");
    assert!(msg.contains("SUM-COMM") && msg.contains("ORACLE-EQ"), "stderr: {msg}");

    let o = run(&["laws", "run", "--algebra", path_str(&c3), "--suite", "bogus"]);
    assert_eq!(code(&o), 2);

    let o = run(&[
        "laws", "run", "--algebra", path_str(&c3), "--suite", "all", "--samples", "5",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn laws_search_finds_the_mo2_associativity_witness() {
    let dir = tempfile::tempdir().unwrap();
    let mo2 = put(dir.path(), "mo2.json", MO2);
    let o = run(&[
        "laws",
        "search",
        "--algebra",
        path_str(&mo2),
        "--law",
        "SUM-ASSOC",
        "--force",
        "--budget",
        "5000",
    ]);
    assert_eq!(code(&o), 1, "stderr: {}", err_str(&o));
    let v: serde_json::Value = serde_json::from_str(&out_str(&o)).unwrap();
    assert_eq!(v["found"]["law"], "SUM-ASSOC");
    assert!(v["certificate"].is_null());
    assert!(v["examined"].as_u64().unwrap() <= 5000);

    // Without --force the sum-dependent target is refused.
    let o = run(&[
        "laws", "search", "--algebra", path_str(&mo2), "--law", "SUM-ASSOC", "--budget", "100",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn laws_search_certifies_absence_on_a_chain() {
    let dir = tempfile::tempdir().unwrap();
    let c2 = put(dir.path(), "c2.json", C2);
    let o = run(&[
        "laws",
        "search",
        "--algebra",
        path_str(&c2),
        "--law",
        "SUM-COMM",
        "--budget",
        "400",
        "--seed",
        "9",
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", err_str(&o));
    let v: serde_json::Value = serde_json::from_str(&out_str(&o)).unwrap();
    assert!(v["found"].is_null());
    let cert = &v["certificate"];
    assert_eq!(cert["exhaustive"]["exhausted"], true);
    assert!(cert["random"].is_object(), "random phase expected: {cert}");
    assert_eq!(v["examined"], 400);
}
