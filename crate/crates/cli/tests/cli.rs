use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn knotcubes(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knotcubes"))
        .args(args)
        .current_dir(dir)
        .env_remove("KNOTCUBES_THREADS")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn without_timestamp(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timestamp").expect("timestamp present");
    v
}

#[test]
fn export_then_v2() {
    let dir = tempfile::tempdir().unwrap();
    let out = knotcubes(&["knot", "export", "--name", "trefoil", "--out", "t.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert_eq!(file["kind"], "embedded");

    let v = json_of(&knotcubes(&["v2", "--input", "t.json", "--method", "quadrisecant", "--json"], dir.path()));
    assert_eq!(v["v2"], 1);
    assert_eq!(v["quadrisecants"].as_array().unwrap().len(), 1);
    assert!(v.get("perturbation_seed").is_some());
    assert_eq!(v["library_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["command"], "v2");

    let g = json_of(&knotcubes(&["v2", "--input", "t.json", "--method", "gauss", "--json"], dir.path()));
    assert_eq!(g["v2"], 1);
}

#[test]
fn reports_are_deterministic_apart_from_the_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    knotcubes(&["knot", "export", "--name", "figure_eight", "--out", "f.json"], dir.path());
    let args = ["v2", "--input", "f.json", "--json", "--seed", "3"];
    let a = without_timestamp(json_of(&knotcubes(&args, dir.path())));
    let b = without_timestamp(json_of(&knotcubes(&args, dir.path())));
    assert_eq!(a, b);
    assert_eq!(a["v2"], -1);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    knotcubes(&["knot", "export", "--name", "granny", "--out", "g.json"], dir.path());
    let strip = |v: Value| {
        let mut v = without_timestamp(v);
        v["config"].as_object_mut().unwrap().remove("threads");
        v
    };
    let one = strip(json_of(&knotcubes(&["v2", "--input", "g.json", "--json", "--threads", "1"], dir.path())));
    let env = Command::new(env!("CARGO_BIN_EXE_knotcubes"))
        .args(["v2", "--input", "g.json", "--json"])
        .current_dir(dir.path())
        .env("KNOTCUBES_THREADS", "2")
        .output()
        .unwrap();
    let two = json_of(&env);
    assert_eq!(two["config"]["threads"], 2);
    assert_eq!(one, strip(two));
}

#[test]
fn operad_selfcheck_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = knotcubes(&["operad", "selfcheck", "--seed", "7", "--cases", "200"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &["v2", "--bogus-flag"],
        &["knot", "show", "--name", "no_such_knot"],
        &["v2", "--input", "missing.json"],
        &["v2", "--input", "x.json", "--threads", "0"],
    ] {
        let out = knotcubes(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn invalid_knot_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // the straight segment folds back on itself
    let bad = r#"{"version":1,"ambient_dim":3,"kind":"embedded",
        "vertices":[[-1,-1,0,0],[0,0.5,0,0],[0.5,-0.5,0,0],[1,1,0,0]]}"#;
    std::fs::write(dir.path().join("bad.json"), bad).unwrap();
    let out = knotcubes(&["validate", "--input", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn quadsec_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    knotcubes(&["knot", "export", "--name", "square", "--out", "s.json"], dir.path());
    let out = knotcubes(&["quadsec", "enumerate", "--input", "s.json", "--csv", "q.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("q.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t1,t2,t3,t4,sign,residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(!rows.is_empty());
    for r in &rows {
        assert_eq!(r.len(), 6);
        assert!(r[0] < r[1] && r[1] < r[2] && r[2] < r[3]);
        assert!(r[4] == 1.0 || r[4] == -1.0);
    }
    let total: f64 = rows.iter().map(|r| r[4]).sum();
    assert_eq!(total, 2.0);
}

#[test]
fn compose_axis_adds_v2() {
    let dir = tempfile::tempdir().unwrap();
    knotcubes(&["knot", "export", "--name", "trefoil", "--out", "t.json"], dir.path());
    knotcubes(&["knot", "export", "--name", "figure_eight", "--out", "f.json"], dir.path());
    let config = r#"{"dim":1,"cubes":[
        {"dim":1,"factors":[{"a":"1/3","b":"-1/2"}]},
        {"dim":1,"factors":[{"a":"1/3","b":"1/2"}]}]}"#;
    std::fs::write(dir.path().join("c.json"), config).unwrap();
    let out = knotcubes(
        &["compose", "--config", "c.json", "--inputs", "t.json", "f.json", "--mode", "axis", "--out", "g.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&knotcubes(&["v2", "--input", "g.json", "--json"], dir.path()));
    assert_eq!(v["v2"], 0);
}

#[test]
fn spin_writes_obj_and_json() {
    let dir = tempfile::tempdir().unwrap();
    knotcubes(&["knot", "export", "--name", "unknot", "--out", "u.json"], dir.path());
    let u: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("u.json")).unwrap()).unwrap();
    let lp = serde_json::json!({ "base": u, "entries": [[-1.0, u], [1.0, u]] });
    std::fs::write(dir.path().join("loop.json"), lp.to_string()).unwrap();

    let out = knotcubes(&["spin", "--method", "gr1", "--loop", "loop.json", "--samples", "16", "--out", "s.obj"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let obj = std::fs::read_to_string(dir.path().join("s.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 256);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 225);

    let v = json_of(&knotcubes(
        &["spin", "--method", "litherland", "--loop", "loop.json", "--samples", "16", "--out", "s.json", "--json"],
        dir.path(),
    ));
    assert_eq!(v["passes_proxy"], true);
    let s: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(s["images"].as_array().unwrap().len(), 256);
}

#[test]
fn family_nu2_counts_one() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_of(&knotcubes(&["family-nu2", "--grid", "8", "--json"], dir.path()));
    assert_eq!(v["nu2"].as_i64().unwrap().abs(), 1);
    assert_eq!(v["stable"], true);
    assert_eq!(v["config"]["grid"], 8);
}
