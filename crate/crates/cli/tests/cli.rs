use std::fs;
use std::process::{Command, Output};

fn cycfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cycfam")).args(args).env_remove("CYCFAM_CACHE_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn constants_table() {
    let o = cycfam(&["constants", "--m", "1", "--n", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for line in ["a=3/16", "b=13/32", "β=1/4", "δ̃=1/8"] {
        assert!(s.lines().any(|l| l == line), "{line} missing from\n{s}");
    }
}

#[test]
fn quadratic_census_listing() {
    let o = cycfam(&["census", "-n", "2", "-X", "30"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("N=19"));
    let discs: Vec<i64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(discs.len(), 19);
    assert!(discs.contains(&-23) && discs.contains(&29) && !discs.contains(&-12));
}

#[test]
fn zeta_check_matches() {
    let o = cycfam(&["zeta-check", "-n", "2", "-M", "1000"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("coefficients match: 1000/1000"));
}

#[test]
fn validation_failures_exit_1() {
    assert_eq!(cycfam(&["census", "-n", "1", "-X", "10"]).status.code(), Some(1));
    assert_eq!(cycfam(&["census", "--nonsense"]).status.code(), Some(1));
    assert_eq!(cycfam(&["classgroup", "-D", "-16"]).status.code(), Some(1));
    assert_eq!(cycfam(&["heights", "--task", "count", "-n", "2", "-X", "100000"]).status.code(), Some(1));
    assert_eq!(cycfam(&["sieve", "-n", "2", "-X", "1000", "-z", "2"]).status.code(), Some(1));
    assert_eq!(cycfam(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_with_overrides_is_embedded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    fs::write(&cfg, r#"{"n": 3, "x": 100000, "arch": "all"}"#).unwrap();
    let out = dir.path().join("out");
    let o = cycfam(&[
        "enumerate",
        "--config",
        cfg.to_str().unwrap(),
        "-X",
        "50000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("enumerate.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["n"], 3);
    assert_eq!(report["config"]["x"], 50000);
    let csv = fs::read_to_string(out.join("enumerate.csv")).unwrap();
    assert_eq!(csv.lines().count() as u64 - 1, report["result"]["fields"].as_u64().unwrap());
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(2).unwrap().parse::<u64>().unwrap() <= 50000));
}

#[test]
fn output_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for w in ["1", "3"] {
        let out = dir.path().join(w);
        let o = cycfam(&["enumerate", "-n", "4", "-X", "1e7", "--workers", w, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        csvs.push(fs::read(out.join("enumerate.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn interrupted_run_resumes_to_same_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full");
    let o = cycfam(&["enumerate", "-n", "3", "-X", "1e8", "--out", full.to_str().unwrap()]);
    assert!(o.status.success());

    let ck = dir.path().join("ck");
    let part = dir.path().join("part");
    let base = ["enumerate", "-n", "3", "-X", "1e8", "--checkpoint", ck.to_str().unwrap(), "--out", part.to_str().unwrap()];
    let mut first: Vec<&str> = base.to_vec();
    first.extend(["--stop-after", "1"]);
    let o = cycfam(&first);
    assert!(o.status.success());
    assert!(stdout(&o).contains("rerun to resume"));
    assert!(!part.join("enumerate.csv").exists());
    let o = cycfam(&base);
    assert!(o.status.success());
    assert_eq!(fs::read(full.join("enumerate.csv")).unwrap(), fs::read(part.join("enumerate.csv")).unwrap());
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cycfam"))
        .args(["enumerate", "-n", "2", "-X", "1000", "--out", dir.path().join("o").to_str().unwrap()])
        .env("CYCFAM_CACHE_DIR", dir.path().join("cache"))
        .output()
        .unwrap();
    assert!(o.status.success());
    let entries: Vec<_> = fs::read_dir(dir.path().join("cache")).unwrap().collect();
    assert_eq!(entries.len(), 1);
}

#[test]
fn sieve_and_heights_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = cycfam(&["sieve", "-n", "2", "-X", "10000", "-z", "50", "--out", out]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("holds: true"));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sieve.json")).unwrap()).unwrap();
    assert_eq!(r["result"]["inequality_holds"], true);
    assert_eq!(r["config"]["z"], 50);
    let o = cycfam(&["heights", "--task", "mahler", "--poly", "1,0,-2"]);
    assert!(stdout(&o).starts_with("M=2.000000000000"));
    let o = cycfam(&["heights", "--task", "eta", "-D", "8,5,-4", "--out", out]);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("heights.csv")).unwrap();
    assert!(csv.contains("x^2-x-1"));
    let o = cycfam(&["torsion-scan", "--ell", "3", "-X", "20000"]);
    assert!(o.status.success());
    let o = cycfam(&["classgroup", "-D", "-23", "--ell", "3"]);
    assert!(stdout(&o).contains("h=3 Cl=Z/3"));
}
