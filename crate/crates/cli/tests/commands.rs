use std::path::Path;
use std::process::{Command, Output};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gasket-fgf"))
        .args(args)
        .env("GASKET_FGF_OUT", out)
        .output()
        .unwrap()
}

fn rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().skip(1).map(String::from).collect()
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn graph_level_two_and_zero() {
    let d = tempfile::tempdir().unwrap();
    assert!(run(d.path(), &["graph", "--m", "2"]).status.success());
    assert_eq!(rows(&d.path().join("graph_m2/vertices.csv")).len(), 15);
    assert_eq!(rows(&d.path().join("graph_m2/edges.csv")).len(), 27);

    assert!(run(d.path(), &["graph", "--m", "0"]).status.success());
    let v = rows(&d.path().join("graph_m0/vertices.csv"));
    assert_eq!(v.len(), 3);
    assert!(v.iter().all(|r| r.split(',').nth(7) == Some("1")));
}

#[test]
fn invalid_level_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["graph", "--m", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(d.path(), &["graph", "--m", "5", "--cap", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}

#[test]
fn spectrum_rows() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["spectrum", "--m", "1"]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("lambda_1 = ") && stdout.contains("N_1 = 3"));
    let r: Vec<(usize, f64)> = rows(&d.path().join("spectrum_m1/eigenvalues.csv"))
        .iter()
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    for (row, expect) in r.iter().zip([(1, 10.0), (2, 25.0), (3, 25.0)]) {
        assert_eq!(row.0, expect.0);
        assert!((row.1 - expect.1).abs() < 1e-9);
    }

    assert!(run(d.path(), &["spectrum", "--m", "4"]).status.success());
    let first = std::fs::read(d.path().join("spectrum_m4/eigenvalues.csv")).unwrap();
    assert_eq!(rows(&d.path().join("spectrum_m4/eigenvalues.csv")).len(), 120);
    assert!(run(d.path(), &["spectrum", "--m", "4"]).status.success());
    assert_eq!(first, std::fs::read(d.path().join("spectrum_m4/eigenvalues.csv")).unwrap());
}

#[test]
fn sampling_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["sample", "--m", "3", "--s", "0.5", "--seed", "42", "--n", "3"];
    assert!(run(a.path(), &args).status.success());
    assert!(run(b.path(), &args).status.success());
    let dir = "sample_m3_s0.5_seed42";
    let sa = snapshot(&a.path().join(dir));
    assert_eq!(sa.len(), 4);
    assert_eq!(sa, snapshot(&b.path().join(dir)));

    let other = ["sample", "--m", "3", "--s", "0.5", "--seed", "43", "--n", "1"];
    assert!(run(a.path(), &other).status.success());
    assert_ne!(
        std::fs::read(a.path().join(dir).join("field_0.csv")).unwrap(),
        std::fs::read(a.path().join("sample_m3_s0.5_seed43/field_0.csv")).unwrap()
    );
}

#[test]
fn empty_sample_writes_only_a_manifest() {
    let d = tempfile::tempdir().unwrap();
    let s = format!("{}", gasket_fgf::CONSTANTS.critical_s);
    assert!(run(d.path(), &["sample", "--m", "2", "--s", &s, "--n", "0"]).status.success());
    let dir = d.path().join(format!("sample_m2_s{s}_seed20240601"));
    let files = snapshot(&dir);
    assert_eq!(files.len(), 1);
    let manifest: serde_json::Value = serde_json::from_slice(&files[0].1).unwrap();
    assert_eq!(manifest["flags"][0], "log-correlated");
    assert_eq!(manifest["run"]["seed"], 20240601);
}

#[test]
fn replay_reproduces_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run(a.path(), &["--tol", "holder=0.12", "lab", "holder", "--m", "5", "--s", "1.0", "--n", "100"]).status.success());
    let manifest = a.path().join("lab_holder/manifest.json");
    let o = run(b.path(), &["replay", manifest.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(snapshot(&a.path().join("lab_holder")), snapshot(&b.path().join("lab_holder")));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(&manifest).unwrap()).unwrap();
    assert_eq!(m["run"]["tolerances"]["holder"], 0.12);
}

#[test]
fn failing_checks_exit_nonzero_with_a_list() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["--tol", "weyl_slope=0.001", "lab", "weyl", "--m", "5"]);
    assert_eq!(o.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let list: serde_json::Value = serde_json::from_str(stdout.lines().last().unwrap()).unwrap();
    assert_eq!(list[0]["check"], "log-log slope");
    let m: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.path().join("lab_weyl/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["pass"], false);
}

#[test]
fn lab_writes_reports_and_series() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["lab", "quadform", "--s", "0", "--levels", "2..4", "--reference", "6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.path().join("lab_quadform/report.json")).unwrap()).unwrap();
    let r = &report[0];
    for key in ["experiment", "params", "levels", "observed", "diffs", "fit", "predicted", "tolerance", "pass"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["levels"], serde_json::json!([2, 3, 4]));

    let o = run(d.path(), &["lab", "weyl", "--m", "5"]);
    assert!(o.status.success());
    let series = std::fs::read_to_string(d.path().join("lab_weyl/series_0_counting.csv")).unwrap();
    assert!(series.starts_with("t,N(t)\n"));
}

#[test]
fn config_file_sets_defaults() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("batch.conf");
    let out = d.path().join("from-config");
    std::fs::write(&cfg, format!("out = {}\ncap = 3\n", out.display())).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gasket-fgf"))
        .args(["--config", cfg.to_str().unwrap(), "graph", "--m", "3"])
        .env_remove("GASKET_FGF_OUT")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(out.join("graph_m3/vertices.csv").exists());
    let o = Command::new(env!("CARGO_BIN_EXE_gasket-fgf"))
        .args(["--config", cfg.to_str().unwrap(), "graph", "--m", "4"])
        .env_remove("GASKET_FGF_OUT")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_documents_commands_and_flags() {
    let o = Command::new(env!("CARGO_BIN_EXE_gasket-fgf")).arg("--help").output().unwrap();
    let text = String::from_utf8_lossy(&o.stdout);
    for word in ["graph", "spectrum", "sample", "lab", "--out", "--config", "--cap", "GASKET_FGF_OUT"] {
        assert!(text.contains(word), "{word} missing from help");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_gasket-fgf")).args(["lab", "--help"]).output().unwrap();
    let text = String::from_utf8_lossy(&o.stdout);
    for word in ["weyl", "riesz-regime", "semigroup", "quadform", "holder", "logcorr", "sobolev", "supnorm", "lipschitz", "eigsweep", "--seed", "--n"] {
        assert!(text.contains(word), "{word} missing from lab help");
    }
}
