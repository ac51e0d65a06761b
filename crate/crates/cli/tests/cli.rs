use std::path::Path;
use std::process::{Command, Output};

fn contdpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contdpp")).args(args).output().expect("binary runs")
}

fn write_kernel(dir: &Path, similarity: &str, params: &str) -> String {
    let path = dir.join("kernel.json");
    let body = format!(
        r#"{{"dim": 1, "quality.kind": "gaussian", "quality.center": [0.0], "quality.cov": [[1.0]],
            "similarity.kind": "{similarity}", "similarity.params": {params}, "domain": "full"}}"#
    );
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn sample_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = write_kernel(dir.path(), "gaussian", r#"{"cov": [[0.1]]}"#);
    let out = dir.path().join("sets.csv");
    let o = contdpp(&["sample", "--kernel", &kernel, "--rank", "20", "--k", "4", "--n-sets", "3", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["set_id", "point_index", "x1"]);
    assert_eq!(rdr.records().count(), 12);
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sets.json")).unwrap()).unwrap();
    assert_eq!(side["command"], "sample");
    assert_eq!(side["seed"], 7);
}

#[test]
fn same_seed_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = write_kernel(dir.path(), "gaussian", r#"{"cov": [[0.1]]}"#);
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = contdpp(&["sample", "--kernel", &kernel, "--method", "rff", "--rank", "20", "--n-sets", "5", "--seed", seed, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv", "3");
    assert_eq!(a, run("b.csv", "3"));
    assert_ne!(a, run("c.csv", "4"));
}

#[test]
fn gibbs_then_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.csv");
    let o = contdpp(&["gibbs-kdpp", "--sigma2", "0.05", "--k", "5", "--cycles", "30", "--burn-in", "10", "--seed", "1", "--out", chain.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv::Reader::from_path(&chain).unwrap().records().count();
    assert_eq!(rows, 20 * 5);
    let diag = dir.path().join("diag.json");
    let o = contdpp(&["diagnose", "--chain", chain.to_str().unwrap(), "--out", diag.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(diag).unwrap()).unwrap();
    assert!(v["m"].as_f64().unwrap() > 0.0);
    assert!(v["alpha"].as_f64().unwrap() > 0.0);
}

#[test]
fn rff_with_polynomial_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = write_kernel(dir.path(), "polynomial", r#"{"degree": 2, "offset": 1.0}"#);
    let out = dir.path().join("x.csv");
    let o = contdpp(&["sample", "--kernel", &kernel, "--method", "rff", "--k", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_flag_is_config_error() {
    assert_eq!(contdpp(&["sample", "--no-such-flag"]).status.code(), Some(1));
}

#[test]
fn missing_kernel_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = contdpp(&["sample", "--kernel", "/nonexistent/kernel.json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn malformed_kernel_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = dir.path().join("x.csv");
    let o = contdpp(&["sample", "--kernel", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
