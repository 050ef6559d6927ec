use std::process::Command;

fn covol(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_covol")).args(args).output().unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("covol-proc-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn help_and_usage_codes() {
    assert_eq!(covol(&["--help"]).status.code(), Some(0));
    assert_eq!(covol(&["--version"]).status.code(), Some(0));
    assert_eq!(covol(&[]).status.code(), Some(2));
    assert_eq!(covol(&["series", "--name", "Nope"]).status.code(), Some(2));
    assert_eq!(covol(&["covolume", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn family_then_covolume() {
    let dir = scratch("family");
    let report = dir.join("report.json");
    let out = covol(&["family", "--name", "GA", "--params", "n=3,k=2", "--out", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["schema"], "covol.report/1");
    let doc = dir.join("ga.json");
    std::fs::write(&doc, v["result"]["complex"].to_string()).unwrap();
    let out = covol(&["covolume", doc.to_str().unwrap(), "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("covolume: 25/12"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn timings_go_to_stderr() {
    let out = covol(&["series", "--name", "X0", "--params", "m=2,x=2", "--k-max", "4", "--timings"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr).unwrap().contains("timing total"));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["limit"], "11");
}

#[test]
fn verify_is_reproducible() {
    let a = covol(&["verify", "--suite", "paper"]);
    let b = covol(&["verify", "--suite", "paper"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
