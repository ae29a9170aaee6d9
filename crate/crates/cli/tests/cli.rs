use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn tool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tool"))
        .args(args)
        .output()
        .expect("tool runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const CYCLE: &str = r#"{"L":[2],"universe":[0,1,2],"relations":{"2":[[0,1],[1,2],[2,0]]}}"#;

#[test]
fn counterexample_report_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = tool(&[
        "verify-counterexample",
        "--p",
        "2",
        "--depth",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
    assert_eq!(r["tower"].as_array().unwrap().len(), 3);
    assert!(r["counts"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
}

#[test]
fn counterexample_passes_for_small_primes_and_depths() {
    for p in ["2", "3", "5"] {
        for d in ["0", "1", "2", "3"] {
            let o = tool(&["verify-counterexample", "--p", p, "--depth", d]);
            assert_eq!(o.status.code(), Some(0), "p = {p}, depth = {d}");
        }
    }
}

#[test]
fn composite_prime_is_an_input_error() {
    let o = tool(&["verify-counterexample", "--p", "4", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not prime"));
}

#[test]
fn suite_is_deterministic_and_passes() {
    let fx = fixtures();
    let args = [
        "suite",
        "--seed",
        "42",
        "--tiny",
        "--fixtures",
        fx.to_str().unwrap(),
    ];
    let (a, b) = (tool(&args), tool(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn corrupted_fixture_is_located() {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(fixtures()).unwrap() {
        let p = entry.unwrap().path();
        fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    let target = dir.path().join("counterexample_subgroup.json");
    let text = fs::read_to_string(&target)
        .unwrap()
        .replace("\"vertices\": 5", "\"vertices\": 6");
    fs::write(&target, text).unwrap();
    let o = tool(&[
        "suite",
        "--tiny",
        "--fixtures",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let s = json(&o);
    let fx = s["invariants"]
        .as_array()
        .unwrap()
        .iter()
        .find(|i| i["name"] == "fixtures")
        .unwrap()
        .clone();
    let msg = fx["first_violation"].as_str().unwrap();
    assert!(
        msg.contains("counterexample_subgroup.json") && msg.contains("vertices"),
        "{msg}"
    );
}

#[test]
fn extension_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "M.json", CYCLE);
    let p = write(dir.path(), "P.json", r#"[{"map":{"0":"1"}}]"#);
    let r = dir.path().join("R.json");
    let o = tool(&[
        "eppa-extend",
        &m,
        &p,
        "--L",
        "2",
        "--bound",
        "10000",
        "--out",
        r.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = tool(&["verify-extension", r.to_str().unwrap(), &m, &p]);
    assert_eq!(o.status.code(), Some(0));

    let mut res: Value = serde_json::from_str(&fs::read_to_string(&r).unwrap()).unwrap();
    res["extended"]["relations"]["2"]
        .as_array_mut()
        .unwrap()
        .remove(0);
    let bad = write(dir.path(), "bad.json", &res.to_string());
    let o = tool(&["verify-extension", &bad, &m, &p]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["verified"], false);
}

#[test]
fn rejections_carry_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "M.json",
        r#"{"L":[2],"universe":[0,1],"relations":{"2":[[0,1]]}}"#,
    );
    let p = write(dir.path(), "P.json", r#"[{"map":{"0":"1","1":"0"}}]"#);
    let o = tool(&["eppa-extend", &m, &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("E_NOT_PARTIAL_ISO"));

    let o = tool(&["eppa-extend", &m, &p, "--L", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn caps_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "M.json", CYCLE);
    let p = write(dir.path(), "P.json", r#"[{"map":{"0":"1"}}]"#);
    let o = tool(&["eppa-extend", &m, &p, "--bound", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("E_TOO_LARGE"));
    let o = tool(&[
        "separate", "--cyclic", "ab", "--word", "ba", "--L", "2", "--budget", "1",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn validate_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", CYCLE);
    assert_eq!(tool(&["validate", &good]).status.code(), Some(0));
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"L":[2],"universe":[0,1],"relations":{"2":[]}}"#,
    );
    let o = tool(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["violation"]["kind"], "unoriented");
    let o = tool(&[
        "validate",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn subgroup_queries() {
    let o = tool(&["malnormal", "abABa,b"]);
    assert_eq!(json(&o)["verdict"], true);
    let o = tool(&["root-closed", "aa", "--l", "2"]);
    assert_eq!(json(&o)["witness"], "a");
    let o = tool(&["membership", "abABa,b", "--word", "ab"]);
    assert_eq!(json(&o)["member"], false);
    let o = tool(&["basis", "ab,ba"]);
    assert_eq!(json(&o)["rank"], 2);
    let o = tool(&["root", "ababab"]);
    assert_eq!(json(&o)["exponent"], 3);
    let o = tool(&["separate", "--cyclic", "ab", "--word", "ba", "--L", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["order"].as_u64().unwrap() % 2 == 1);
}

#[test]
fn graph_commands() {
    let dir = tempfile::tempdir().unwrap();
    let wedge = write(
        dir.path(),
        "X.json",
        r#"{"n":2,"vertices":[0],"edges":[[0,0,"a"],[0,0,"b"]],"basepoint":0}"#,
    );
    let unfolded = write(
        dir.path(),
        "G.json",
        r#"{"n":2,"vertices":["p","q","r"],"edges":[["p","q","a"],["p","r","a"],["q","q","b"]],"basepoint":"p"}"#,
    );
    let o = tool(&["fold", &unfolded]);
    assert_eq!(json(&o)["graph"]["vertices"].as_array().unwrap().len(), 2);
    let o = tool(&["h1", &wedge, "--p", "3"]);
    assert_eq!(json(&o)["dim"], 2);
    let o = tool(&["cover", &wedge, "--p", "2", "--cocycle", "a=1,b=0"]);
    assert_eq!(json(&o)["connected"], true);
    let o = tool(&["cover", &wedge, "--p", "2", "--cocycle", "a=0,b=0"]);
    assert_eq!(json(&o)["components"], 2);
    let a = write(
        dir.path(),
        "A.json",
        r#"{"n":2,"vertices":[0,1],"edges":[[0,1,"a"],[1,0,"a"],[0,0,"b"]],"basepoint":0}"#,
    );
    let o = tool(&[
        "tower",
        &wedge,
        "--p",
        "3",
        "--depth",
        "2",
        "--pullback",
        &a,
    ]);
    let levels = json(&o)["levels"].as_array().unwrap().clone();
    assert_eq!(levels.len(), 2);
    assert!(levels
        .iter()
        .all(|l| l["connected"] == true && l["pullback"]["vertices"].is_u64()));
    let o = tool(&["fiber-product", "abABa,b", "abABa,b"]);
    assert_eq!(json(&o)["component_stats"]["vertices"], 25);
}

#[test]
fn gersten_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{
          "x": {"n":1,"vertices":[0],"edges":[[0,0,"a"]],"basepoint":0},
          "y": {"n":1,"vertices":[0],"edges":[[0,0,"a"]],"basepoint":0},
          "f": {"vertex_map":[0],"edge_map":[0]},
          "p": 3, "cocycle_x": [1], "cocycle_y": [1]
        }"#,
    );
    let o = tool(&["gersten-check", &cfg]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(json(&o)["lift_injective"], true);
}
