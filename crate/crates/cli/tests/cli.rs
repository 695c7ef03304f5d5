use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn bihat(cwd: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bihat")).args(args).current_dir(cwd).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn load(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(configs_dir().join(format!("{name}.json"))).unwrap()).unwrap()
}

/// Writes `cfg` into `dir` and runs `verify` on it from there.
fn verify(dir: &Path, cfg: &Value) -> Output {
    let path = dir.join("cfg.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    bihat(dir, &["verify", path.to_str().unwrap()])
}

#[test]
fn passing_run_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(dir.path(), &load("katoponce"));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "PASS"), "{text}");

    let json = dir.path().join("katoponce.json");
    let csv = std::fs::read_to_string(dir.path().join("katoponce.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("resolution,f,g,lhs,rhs,ratio,status"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(lines.count(), report["records"].as_array().unwrap().len());

    let summary = bihat(dir.path(), &["report", json.to_str().unwrap()]);
    assert_eq!(summary.status.code(), Some(0));
    assert_eq!(stdout(&summary).lines().last(), Some("PASS"));
}

#[test]
fn json_rerender_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(verify(dir.path(), &load("holder_domination")).status.code(), Some(0));
    let json = dir.path().join("holder_domination.json");
    let again = bihat(dir.path(), &["report", json.to_str().unwrap(), "--format", "json"]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(again.stdout, std::fs::read(&json).unwrap());

    let csv = bihat(dir.path(), &["report", json.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(csv.stdout, std::fs::read(dir.path().join("holder_domination.csv")).unwrap());
}

#[test]
fn output_path_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = load("freqdecoup_identity");
    cfg["output_path"] = json!("out/sub/r.json");
    assert_eq!(verify(dir.path(), &cfg).status.code(), Some(0));
    assert!(dir.path().join("out/sub/r.json").is_file());
    assert!(dir.path().join("out/sub/r.csv").is_file());
}

#[test]
fn lemma_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(dir.path(), &load("lemma_lem"));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("lemma_lem.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("l,a,b,n,m,s,lhs,rhs,ratio"));
    assert!(!stdout(&out).contains("N = 0 "));
}

#[test]
fn failing_stability_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = load("katoponce");
    cfg["stability_factor"] = json!(1.0);
    let out = verify(dir.path(), &cfg);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).lines().any(|l| l == "FAIL"));
    // The report is still written.
    assert!(dir.path().join("katoponce.json").is_file());
}

#[test]
fn infinite_q_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = load("coro_leibniz_sobolev");
    cfg["exponents"] = json!({"p1": 2.0, "p2": 2.0, "s": 1.0, "m": 1.0});
    let out = verify(dir.path(), &cfg);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("scaling gives q = ∞"), "{}", stderr(&out));
    assert!(!dir.path().join("coro_leibniz_sobolev.json").exists());
}

#[test]
fn bad_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = load("katoponce");
    cfg["N_list"] = json!([128]);
    let out = verify(dir.path(), &cfg);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("two resolutions"), "{}", stderr(&out));

    assert_eq!(bihat(dir.path(), &["verify", "missing.json"]).status.code(), Some(2));
    std::fs::write(dir.path().join("junk.json"), "{not json").unwrap();
    assert_eq!(bihat(dir.path(), &["report", "junk.json"]).status.code(), Some(2));
    assert_eq!(bihat(dir.path(), &["report", "nowhere.json"]).status.code(), Some(2));
    assert_eq!(bihat(dir.path(), &["frobnicate"]).status.code(), Some(2));

    let threads = Command::new(env!("CARGO_BIN_EXE_bihat"))
        .arg("list")
        .env("BIHAT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn list_is_stable_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let a = bihat(dir.path(), &["list"]);
    let b = bihat(dir.path(), &["list"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let bp = text.lines().find(|l| l.trim_start().starts_with("thm_bp_poincare ")).unwrap();
    assert!(bp.contains("Theorem thm:bp"), "{bp}");
    assert!(text.contains("lemma_lem"));
    for section in ["inequalities:", "symbols:", "families:"] {
        assert!(text.lines().any(|l| l == section), "{section}");
    }
    // Every shipped config names something the registry knows.
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(entry.unwrap().path()).unwrap()).unwrap();
        let key = v.get("inequality").or_else(|| v.get("id")).and_then(Value::as_str).unwrap();
        assert!(text.contains(&format!("  {key} ")), "{key}");
    }
}

#[test]
fn closed_stdout_is_not_a_crash() {
    use std::io::Read;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_bihat")).arg("list").stdout(Stdio::piped()).spawn().unwrap();
    let mut first = [0u8; 4];
    child.stdout.as_mut().unwrap().read_exact(&mut first).unwrap();
    drop(child.stdout.take());
    let status = child.wait().unwrap();
    assert_eq!(status.code(), Some(0), "{status:?}");
}
