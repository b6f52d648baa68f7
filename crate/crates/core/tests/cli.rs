use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn weightfn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weightfn"))
        .args(args)
        .env_remove("WEIGHTFN_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn cache_entries(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    out.sort();
    out
}

#[test]
fn weight_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = weightfn(&["weight", "plus", "--n", "3", "--depth", "3", "--format", "json", "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let doc: serde_json::Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    assert_eq!(doc["schema"], "weight");
    assert_eq!(doc["n"], 3);
}

#[test]
fn n1_text() {
    let o = weightfn(&["weight", "plus", "--n", "1", "--depth", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "P(f(z1))"));
}

#[test]
fn cache_hit_is_byte_identical() {
    let cache = tempfile::tempdir().unwrap();
    let args = ["weight", "minus", "--n", "2", "--depth", "2", "--modes", "--window", "2", "--format", "json", "--cache-dir"];
    let mut full: Vec<&str> = args.to_vec();
    full.push(cache.path().to_str().unwrap());
    let cold = weightfn(&full);
    assert!(cold.status.success());
    let entries = cache_entries(cache.path());
    assert_eq!(entries.len(), 1);
    let warm = weightfn(&full);
    assert_eq!(cold.stdout, warm.stdout);

    fs::write(&entries[0], "{ not json").unwrap();
    let repaired = weightfn(&full);
    assert!(repaired.status.success());
    assert_eq!(cold.stdout, repaired.stdout);
    assert!(String::from_utf8_lossy(&repaired.stderr).contains("warning"));
    let uncached = weightfn(&full[..full.len() - 2]);
    assert_eq!(cold.stdout, uncached.stdout);
}

#[test]
fn cache_dir_from_environment() {
    let cache = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_weightfn"))
        .args(["weight", "plus", "--n", "2", "--depth", "1", "--format", "json"])
        .env("WEIGHTFN_CACHE_DIR", cache.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(cache_entries(cache.path()).len(), 1);
}

#[test]
fn latex_structure() {
    let o = weightfn(&["weight", "plus", "--n", "2", "--format", "latex"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains(r"\tau^1_{\{1\},\{2\}}(z_1,z_2)\mathcal{S}(z_1)"), "{s}");
}

#[test]
fn rmatrix_lists_cartan_rows() {
    let o = weightfn(&["rmatrix", "--order", "1", "--depth", "2", "--window", "3", "--cartan", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("c_1 = "));
    assert!(s.contains("c_2 = "));
    assert!(!s.contains("c_3 = "));
    let o = weightfn(&["rmatrix", "--window", "2", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["window"], 2);
}

#[test]
fn blocks_dump() {
    let o = weightfn(&["blocks", "rho", "--n", "2", "--prefix", "1", "--target", "2", "--k", "1", "--format", "latex"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("z_2/z_1"));
    let o = weightfn(&["blocks", "tau", "--n", "2", "--i", "1", "--j", "2", "--k", "1"]);
    assert!(o.status.success());
    let o = weightfn(&["blocks", "tau", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_exit_codes_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = weightfn(&["verify", "--suite", "enumeration", "--n", "5", "--report", report.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(doc["suite"], "enumeration");
    assert_eq!(doc["failures"].as_array().unwrap().len(), 0);
    let o = weightfn(&["verify", "--suite", "oracle", "--n", "5", "--depth", "4"]);
    assert!(o.status.success());
}

#[test]
fn usage_errors() {
    for args in [
        vec!["verify", "--suite", "nosuch"],
        vec!["weight", "plus", "--n", "0"],
        vec!["weight", "sideways", "--n", "2"],
        vec!["weight", "plus", "--n", "2", "--modes", "--window", "0"],
        vec!["weight", "plus", "--n", "2", "--depth", "-1"],
    ] {
        let o = weightfn(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("Usage") || !o.stderr.is_empty());
    }
}
