mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::{data, jplt, serve, stderr, stdout};
use tempfile::TempDir;

struct Work(TempDir);

impl Work {
    fn new() -> Self {
        Work(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }
}

fn ok(args: &[&str]) -> String {
    let out = jplt(args);
    assert!(out.status.success(), "jplt {args:?}: {}", stderr(&out));
    stdout(&out)
}

fn code(args: &[&str]) -> (i32, String) {
    let out = jplt(args);
    (out.status.code().unwrap(), stderr(&out))
}

fn d(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

fn dataset(w: &Work, k: usize, q: u64, seed: u64) -> String {
    let name = format!("x_{k}_{q}_{seed}.json");
    ok(&["dataset-gen", "--k", &k.to_string(), "--n", "3", "--q", &q.to_string(), "--seed", &seed.to_string(),
        "--out", &w.s(&name)]);
    w.s(&name)
}

#[test]
fn dataset_gen_is_deterministic() {
    let w = Work::new();
    ok(&["dataset-gen", "--k", "10", "--n", "4", "--q", "11", "--seed", "7", "--out", &w.s("a.json")]);
    ok(&["dataset-gen", "--k", "10", "--n", "4", "--q", "11", "--seed", "7", "--out", &w.s("b.json")]);
    ok(&["dataset-gen", "--k", "10", "--n", "4", "--q", "11", "--seed", "8", "--out", &w.s("c.json")]);
    let a = fs::read(w.path("a.json")).unwrap();
    assert_eq!(a, fs::read(w.path("b.json")).unwrap());
    assert_ne!(a, fs::read(w.path("c.json")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["x"].as_array().unwrap().len(), 10);
    assert!(v["x"][0].as_array().unwrap().iter().all(|e| e.as_u64().unwrap() < 11));
}

#[test]
fn dataset_gen_rejects_composite_q() {
    let w = Work::new();
    let (c, err) = code(&["dataset-gen", "--k", "2", "--n", "2", "--q", "12", "--out", &w.s("x.json")]);
    assert_eq!(c, 1);
    assert!(err.contains("q must be prime"), "{err}");
}

#[test]
fn large_dataset_is_fast() {
    let w = Work::new();
    let start = Instant::now();
    ok(&["dataset-gen", "--k", "1000", "--n", "1", "--q", "1009", "--out", &w.s("x.json")]);
    assert!(start.elapsed() < Duration::from_secs(1));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let (c, _) = code(&["dataset-gen", "--k", "2", "--n", "2", "--q", "11", "--out", "/nonexistent/dir/x.json"]);
    assert_eq!(c, 3);
}

#[test]
fn non_mds_demand_is_rejected_for_model_one() {
    let w = Work::new();
    write(&w.path("v.json"), r#"{"version":1,"q":11,"model":"I","w":[1,2,3],"v":[[1,2,3],[2,4,5]]}"#);
    let (c, err) =
        code(&["query", "--demand", &w.s("v.json"), "--k", "6", "--out-query", &w.s("q"), "--out-plan", &w.s("p")]);
    assert_eq!(c, 1);
    assert!(err.contains("V is not MDS"), "{err}");

    // The same matrix is fine when only full rank is assumed.
    write(&w.path("v2.json"), r#"{"version":1,"q":11,"model":"II","w":[1,2,3],"v":[[1,2,3],[2,4,5]]}"#);
    ok(&["query", "--demand", &w.s("v2.json"), "--k", "6", "--out-query", &w.s("q"), "--out-plan", &w.s("p")]);
}

/// `demo --out` and the three separate commands produce the same files.
fn pipeline_matches_demo(demand: &str, extension: Option<&str>, k: usize, q: u64) {
    let w = Work::new();
    let x = dataset(&w, k, q, 5);
    let k = k.to_string();
    let mut query = vec!["query", "--demand", demand, "--k", &k, "--seed", "3"];
    let mut demo = vec!["demo", "--demand", demand, "--dataset", &x, "--seed", "3"];
    if let Some(e) = extension {
        query.extend(["--extension", e]);
        demo.extend(["--extension", e]);
    }
    let (qp, pp, yp, zp, dir) = (w.s("q.json"), w.s("p.json"), w.s("y.json"), w.s("z.json"), w.s("demo"));
    query.extend(["--out-query", &qp, "--out-plan", &pp]);
    demo.extend(["--out", &dir]);
    ok(&query);
    ok(&["answer", "--dataset", &x, "--query", &qp, "--out", &yp]);
    ok(&["recover", "--answer", &yp, "--plan", &pp, "--out", &zp]);
    let printed = ok(&demo);
    assert!(printed.contains("PASS"), "{printed}");
    for (mine, theirs) in [("q.json", "query.json"), ("p.json", "plan.json"), ("y.json", "answer.json"), ("z.json", "z.json")] {
        assert_eq!(
            fs::read(w.path(mine)).unwrap(),
            fs::read(w.path("demo").join(theirs)).unwrap(),
            "{mine} differs from demo's {theirs}"
        );
    }
}

#[test]
fn pipeline_equivalence_for_sample_demands() {
    pipeline_matches_demo(&d("mds_demand.json"), Some(&d("mds_extension.json")), 10, 11);
    pipeline_matches_demo(&d("mds_demand.json"), None, 10, 11);
    pipeline_matches_demo(&d("augmented_demand.json"), Some(&d("augmented_extension.json")), 10, 11);
    pipeline_matches_demo(&d("augmented_demand.json"), None, 10, 11);
}

#[test]
fn pipeline_equivalence_for_generic_demand() {
    let w = Work::new();
    write(&w.path("v.json"), r#"{"version":1,"q":101,"model":"I","w":[1,4,6],"v":[[1,1,1],[1,2,3]]}"#);
    pipeline_matches_demo(&w.s("v.json"), None, 7, 101);
}

#[test]
fn demo_prints_rates() {
    let w = Work::new();
    let x = dataset(&w, 10, 11, 1);
    let out = ok(&["demo", "--demand", &d("mds_demand.json"), "--dataset", &x, "--extension", &d("mds_extension.json")]);
    assert!(out.contains("downloaded_rows 7"), "{out}");
    assert!(out.contains("rate 2/7"), "{out}");
    assert!(out.contains("capacity 2/7"), "{out}");
    assert!(out.trim_end().ends_with("PASS"), "{out}");
}

#[test]
fn demo_rejects_k_mismatch() {
    let w = Work::new();
    let x = dataset(&w, 10, 11, 1);
    let (c, _) = code(&["demo", "--demand", &d("mds_demand.json"), "--dataset", &x, "--k", "9"]);
    assert_eq!(c, 1);
}

#[test]
fn recover_with_foreign_plan_fails() {
    let w = Work::new();
    let x = dataset(&w, 10, 11, 2);
    let mut outputs = Vec::new();
    for (name, demand) in [("a", "mds_demand.json"), ("b", "augmented_demand.json")] {
        let (qp, pp, yp) = (w.s(&format!("{name}q.json")), w.s(&format!("{name}p.json")), w.s(&format!("{name}y.json")));
        ok(&["query", "--demand", &d(demand), "--k", "10", "--seed", "1", "--out-query", &qp, "--out-plan", &pp]);
        ok(&["answer", "--dataset", &x, "--query", &qp, "--out", &yp]);
        outputs.push((pp, yp));
    }
    // Plan of one query applied to the answer of the other.
    let zp = w.s("z.json");
    let out = jplt(["recover", "--answer", &outputs[1].1, "--plan", &outputs[0].0, "--out", &zp]);
    if out.status.success() {
        ok(&["recover", "--answer", &outputs[0].1, "--plan", &outputs[0].0, "--out", &w.s("z_ok.json")]);
        assert_ne!(fs::read(&zp).unwrap(), fs::read(w.path("z_ok.json")).unwrap());
    } else {
        assert_eq!(out.status.code(), Some(1));
    }

    write(&w.path("short.json"), r#"{"type":"answer","version":1,"y":[[1],[2]]}"#);
    let (c, _) = code(&["recover", "--answer", &w.s("short.json"), "--plan", &outputs[0].0, "--out", &zp]);
    assert_eq!(c, 1);
}

#[test]
fn answer_rejects_mismatched_field_and_shape() {
    let w = Work::new();
    let (qp, pp) = (w.s("q.json"), w.s("p.json"));
    ok(&["query", "--demand", &d("mds_demand.json"), "--k", "10", "--out-query", &qp, "--out-plan", &pp]);
    let x13 = dataset(&w, 10, 13, 1);
    let (c, err) = code(&["answer", "--dataset", &x13, "--query", &qp, "--out", &w.s("y.json")]);
    assert_eq!(c, 1);
    assert!(err.contains("field_mismatch"), "{err}");
    let x9 = dataset(&w, 9, 11, 1);
    let (c, err) = code(&["answer", "--dataset", &x9, "--query", &qp, "--out", &w.s("y.json")]);
    assert_eq!(c, 1);
    assert!(err.contains("shape_mismatch"), "{err}");
}

#[test]
fn verify_worked_query_passes_252_subsets() {
    let w = Work::new();
    let (qp, pp) = (w.s("q.json"), w.s("p.json"));
    ok(&["query", "--demand", &d("mds_demand.json"), "--k", "10", "--extension", &d("mds_extension.json"),
        "--out-query", &qp, "--out-plan", &pp]);
    let out = ok(&["verify", "--query", &qp, "--d", "5", "--l", "2", "--model", "I", "--exhaustive"]);
    assert!(out.contains("PASS (252 subsets)"), "{out}");
    let out = ok(&["verify", "--query", &qp, "--d", "5", "--l", "2", "--sample", "20", "--seed", "4"]);
    assert!(out.contains("PASS (20 subsets)"), "{out}");
}

#[test]
fn verify_flags_a_leaky_query() {
    let w = Work::new();
    // Downloading only the demand rows reveals the support.
    write(
        &w.path("q.json"),
        r#"{"type":"query","version":1,"q":11,"k":10,"model":"II","g":[[0,3,0,1,6,0,2,6,0,0],[0,10,0,4,8,0,7,9,0,0]]}"#,
    );
    let out = jplt(["verify", "--query", &w.s("q.json"), "--d", "5", "--l", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn verify_cap_requires_sampling() {
    let w = Work::new();
    let (qp, pp) = (w.s("q.json"), w.s("p.json"));
    ok(&["query", "--demand", &d("mds_demand.json"), "--k", "10", "--out-query", &qp, "--out-plan", &pp]);
    let (c, err) = code(&["verify", "--query", &qp, "--d", "5", "--l", "2", "--cap", "100"]);
    assert_eq!(c, 1);
    assert!(err.contains("252"), "{err}");
    ok(&["verify", "--query", &qp, "--d", "5", "--l", "2", "--cap", "100", "--sample", "50"]);
}

#[test]
fn rates_with_full_dimension_match_pir() {
    let out = ok(&["rates", "--k", "10", "--ld", "1.0", "--d-from", "1", "--d-to", "10", "--d-step", "1"]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    for (i, row) in rows.iter().enumerate() {
        let f: Vec<&str> = row.split(',').collect();
        let d = i + 1;
        assert_eq!(f[1], d.to_string());
        assert_eq!(f[2], d.to_string());
        assert_eq!(f[3], f[5], "{row}");
        assert!((f[4].parse::<f64>().unwrap() - d as f64 / 10.0).abs() < 1e-12);
    }
}

#[test]
fn rates_reject_bad_ratio() {
    let (c, _) = code(&["rates", "--k", "10", "--ld", "abc"]);
    assert_eq!(c, 1);
}

#[test]
fn fetch_matches_offline_answer_and_reports_transport_errors() {
    let w = Work::new();
    let x = dataset(&w, 10, 11, 6);
    let (qp, pp) = (w.s("q.json"), w.s("p.json"));
    ok(&["query", "--demand", &d("augmented_demand.json"), "--k", "10", "--seed", "2", "--out-query", &qp,
        "--out-plan", &pp]);
    ok(&["answer", "--dataset", &x, "--query", &qp, "--out", &w.s("y1.json")]);
    let server = serve(Path::new(&x));
    ok(&["fetch", "--endpoint", &server.endpoint, "--query", &qp, "--out", &w.s("y2.json")]);
    ok(&["fetch", "--endpoint", &server.endpoint, "--query", &qp, "--out", &w.s("y3.json")]);
    let offline = fs::read(w.path("y1.json")).unwrap();
    assert_eq!(offline, fs::read(w.path("y2.json")).unwrap());
    assert_eq!(offline, fs::read(w.path("y3.json")).unwrap());

    let x13 = dataset(&w, 10, 13, 6);
    let other = serve(Path::new(&x13));
    let (c, err) = code(&["fetch", "--endpoint", &other.endpoint, "--query", &qp, "--out", &w.s("y4.json")]);
    assert_eq!(c, 3);
    assert!(err.contains("field_mismatch"), "{err}");

    let endpoint = server.endpoint.clone();
    drop(server);
    let (c, _) = code(&["fetch", "--endpoint", &endpoint, "--query", &qp, "--out", &w.s("y5.json"), "--timeout", "2"]);
    assert_eq!(c, 3);
}

#[test]
fn query_is_deterministic_given_seed() {
    let w = Work::new();
    for name in ["a", "b"] {
        ok(&["query", "--demand", &d("augmented_demand.json"), "--k", "10", "--seed", "9", "--out-query",
            &w.s(&format!("{name}.json")), "--out-plan", &w.s(&format!("{name}p.json"))]);
    }
    assert_eq!(fs::read(w.path("a.json")).unwrap(), fs::read(w.path("b.json")).unwrap());
    assert_eq!(fs::read(w.path("ap.json")).unwrap(), fs::read(w.path("bp.json")).unwrap());
}
