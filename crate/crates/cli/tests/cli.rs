use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_geomlaw"));
    c.env_remove("GEOMLAW_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const SMALL_CONVERGE: &str = r#"{
  "seed": 4,
  "density": { "kind": "uniform", "window": { "kind": "box", "lo": [0, 0], "hi": [1, 1] } },
  "n_grid": [50, 200],
  "replicates": 4,
  "functional": { "kind": "edge_weight", "graph": { "kind": "mst" }, "phi": { "kind": "power", "alpha": 1.0 } },
  "limit": { "kind": "fixed", "value": 0.6331 }
}"#;

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["sample", "--format", "xml"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn bundled_configs_validate() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let o = run(&["validate", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{path:?}: {}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert!(text.starts_with("ok\n"));
        // the echo is itself a valid config
        let dir = tempfile::tempdir().unwrap();
        let echo = write(dir.path(), "echo.json", &text[3..]);
        assert_eq!(code(&run(&["validate", &echo])), 0);
    }
}

#[test]
fn config_errors_exit_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "a.json", "{\n  \"seed\": 1,\n  \"sede\": 2\n}");
    let o = run(&["validate", &unknown]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    let vor3 = write(
        dir.path(),
        "b.json",
        r#"{"density": {"kind": "uniform", "window": {"kind": "box", "lo": [0,0,0], "hi": [1,1,1]}}, "graph": {"kind": "voronoi"}}"#,
    );
    let o = run(&["validate", &vor3]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("d = 2"));

    assert_eq!(code(&run(&["converge", "--config", "/nonexistent/x.json"])), 2);
}

#[test]
fn runtime_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let pts = write(dir.path(), "p.csv", "0,0\n1,0\n0,1\n");
    assert_eq!(code(&run(&["graph", "--kind", "knn", "--k", "5", "--in", &pts])), 3);
}

#[test]
fn sampling_is_deterministic_and_seedable() {
    let a = run(&["sample", "--dim", "2", "--n", "40", "--seed", "9", "--header"]);
    let b = run(&["sample", "--dim", "2", "--n", "40", "--seed", "9", "--header"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("x0,x1"));
    assert_eq!(text.lines().count(), 41);

    let env = bin().args(["sample", "--dim", "2", "--n", "40", "--header"]).env("GEOMLAW_SEED", "9").output().unwrap();
    assert_eq!(env.stdout, a.stdout);
    let flag_wins = bin()
        .args(["sample", "--dim", "2", "--n", "40", "--header", "--seed", "9"])
        .env("GEOMLAW_SEED", "10")
        .output()
        .unwrap();
    assert_eq!(flag_wins.stdout, a.stdout);
    let other = run(&["sample", "--dim", "2", "--n", "40", "--seed", "10", "--header"]);
    assert_ne!(other.stdout, a.stdout);

    let json = run(&["sample", "--dim", "1", "--n", "5", "--seed", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert!(v.is_object() || v.is_array());
}

#[test]
fn graph_from_points() {
    let dir = tempfile::tempdir().unwrap();
    let pts = write(dir.path(), "p.csv", "0,0\n1,0\n3,0\n");
    let o = run(&["graph", "--kind", "mst", "--in", &pts]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "i,j,length\n0,1,1.0\n1,2,2.0\n");
    let out = dir.path().join("g.json");
    let o = run(&["graph", "--kind", "knn", "--k", "1", "--directed", "--in", &pts, "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 3);
}

#[test]
fn converge_writes_table_and_summary_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL_CONVERGE);
    let mut tables = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("out{threads}"));
        let o = run(&["converge", "--config", &cfg, "--threads", threads, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let table = fs::read_to_string(out.join("converge.csv")).unwrap();
        assert!(table.starts_with("n,mean,stderr,abs_error,l2_error,replicates\n"));
        assert_eq!(table.lines().count(), 3);
        let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["config"]["seed"], 4);
        tables.push(table);
    }
    assert_eq!(tables[0], tables[1]);
}

#[test]
fn every_task_runs_on_a_small_config() {
    let dir = tempfile::tempdir().unwrap();
    let base = r#""density": { "kind": "uniform", "window": { "kind": "box", "lo": [0, 0], "hi": [1, 1] } }"#;
    let cases = [
        (
            "functional",
            format!(r#"{{{base}, "n": 300, "functional": {{"kind": "component_reciprocal", "graph": {{"kind": "knn", "k": 1}}}}}}"#),
            "quantity,value",
        ),
        (
            "limit",
            format!(r#"{{{base}, "replicates": 20, "functional": {{"kind": "component_reciprocal", "graph": {{"kind": "knn", "k": 1}}}}}}"#),
            "quantity,mean,stderr",
        ),
        ("couple", format!(r#"{{{base}, "n_grid": [100, 400], "replicates": 20, "coupling_radius": 1.0}}"#), "n,probability,stderr,replicates"),
        ("boolean", format!(r#"{{{base}, "n": 300, "radius": {{"kind": "constant", "r": 0.3}}}}"#), "cx,cy,radius,clump_id,selected"),
        ("pack", format!(r#"{{{base}, "n_grid": [100, 400], "replicates": 3}}"#), "n,mean,stderr,replicates"),
    ];
    for (task, cfg, header) in cases {
        let path = write(dir.path(), &format!("{task}.json"), &cfg);
        let o = run(&[task, "--config", &path, "--seed", "2"]);
        assert_eq!(code(&o), 0, "{task}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).starts_with(header), "{task}: {}", stdout(&o));
    }
}

#[test]
fn schema_is_printed() {
    let o = run(&["validate", "--schema"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["properties"]["density"].is_object());
}
