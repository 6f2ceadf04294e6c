use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(bin: &str, args: &[&str]) -> Output {
    Command::new(bin).args(args).env("RUST_BACKTRACE", "0").output().expect("binary runs")
}

fn json(bin: &str, args: &[&str]) -> Value {
    let out = run(bin, args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn diffuse_is_byte_identical_and_refits() {
    let cfg = configs().join("diffusion.toml");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let out =
            run(env!("CARGO_BIN_EXE_lab"), &["diffuse", "--config", path_str(&cfg), "--out", path_str(dir.path())]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["diffusion.csv", "summary.json", "time_law.dat"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let fit = json(env!("CARGO_BIN_EXE_lab"), &["fit", "--in", path_str(a.path())]);
    assert_eq!(fit["points"], 3);
    assert_eq!(fit["preferred"], "inv_mu_log");
    let summary: Value = serde_json::from_slice(&fs::read(a.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["fit"], fit);
}

#[test]
fn stability_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("stability.toml");
    fs::write(&cfg, "pert = \"arnold\"\nmu_list = [1e-2]\nkappa0 = 0.05\nsamples = 3\nseed = 4\n").unwrap();
    let outs = [dir.path().join("a"), dir.path().join("b")];
    for out in &outs {
        let r = run(env!("CARGO_BIN_EXE_lab"), &["stability", "--config", path_str(&cfg), "--out", path_str(out)]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    for f in ["stability.csv", "summary.json"] {
        assert_eq!(fs::read(outs[0].join(f)).unwrap(), fs::read(outs[1].join(f)).unwrap(), "{f}");
    }
    let rows = fs::read_to_string(outs[0].join("stability.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 3 * 3);
}

#[test]
fn free_drift_mode_writes_its_own_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("free.toml");
    fs::write(&cfg, "pert = \"arnold\"\nmu_list = [0.05]\nomega_i = [0.4]\nomega_f = [0.6]\n").unwrap();
    let out = dir.path().join("out");
    let r =
        run(env!("CARGO_BIN_EXE_lab"), &["diffuse", "--config", path_str(&cfg), "--out", path_str(&out), "--no-jumps"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let v: Value = serde_json::from_slice(&fs::read(out.join("free_drift.json")).unwrap()).unwrap();
    assert!(v.to_string().contains("max_drift"));
}

#[test]
fn missing_config_fails_cleanly() {
    let r = run(env!("CARGO_BIN_EXE_lab"), &["diffuse", "--config", "/nonexistent.toml", "--out", "/tmp/never"]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("nonexistent.toml"));
}

#[test]
fn melnikov_scan_finds_the_origin() {
    let pert = configs().join("arnold.toml");
    let v = json(
        env!("CARGO_BIN_EXE_melnikov"),
        &["scan", "--pert", path_str(&pert), "--omega-from", "0.4", "--omega-to", "0.6", "--samples", "5"],
    );
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert_eq!(row["nondegenerate"], true);
        assert!(row["minimizer"].as_array().unwrap().iter().all(|x| x.as_f64().unwrap().abs() < 1e-8));
    }
}

#[test]
fn resonance_commands() {
    let bin = env!("CARGO_BIN_EXE_resonance");
    let d = json(bin, &["dist", "--omega", "0.45", "--order", "2"]);
    assert!((d["distance"].as_f64().unwrap() - 0.45).abs() < 1e-12);
    let path = configs().join("path.toml");
    let c = json(bin, &["certify", "--path", path_str(&path), "--order", "2"]);
    assert_eq!(c["accepted"], true);
    assert!((c["certified_distance"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    let c = json(bin, &["certify", "--path", path_str(&path), "--order", "3"]);
    assert_eq!(c["accepted"], false);
}

#[test]
fn ergodization_commands() {
    let bin = env!("CARGO_BIN_EXE_ergo");
    let basis = configs().join("lattice.toml");
    let a = json(bin, &["alpha", "--basis", path_str(&basis), "--omega", "1,0.618", "--radius", "5"]);
    // p = (3, −5): |3 − 5·0.618| = 0.09 is beyond radius 5; (2, −3) gives 0.146
    assert!((a["alpha"].as_f64().unwrap() - 0.146).abs() < 1e-12);
    let t = json(bin, &["time", "--basis", path_str(&basis), "--omega", "1,0.618", "--delta", "0.1", "--tmax", "200"]);
    assert_eq!(t["lower_bound_holds"], true);
    assert!(t["t_emp"].as_f64().unwrap() >= t["lower_bound"].as_f64().unwrap());
}
