use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use oped::phantom::ImageGrid;
use oped::radon::Sinogram;
use serde_json::Value;
use tempfile::TempDir;

fn oped(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oped"))
        .args(args)
        .env_remove("OPED_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = oped(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn manifest(output: &Path) -> Value {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    serde_json::from_str(&std::fs::read_to_string(PathBuf::from(name)).expect("manifest")).expect("json")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn simulate_shapes() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.sino");
    ok(&["simulate", "--preset", "unit-disk", "--type", "II", "--order", "4", "-o", s(&a)]);
    let sino = Sinogram::read(&a).unwrap();
    assert_eq!((sino.geometry.view_count(), sino.geometry.node_count()), (9, 8));
    let m = manifest(&a);
    assert_eq!(m["geometry"]["views"], 9);
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let b = path(&dir, "b.sino");
    ok(&["simulate", "--preset", "unit-ball", "--d", "3", "--order", "2", "-o", s(&b)]);
    let sino = Sinogram::read(&b).unwrap();
    assert_eq!((sino.geometry.view_count(), sino.geometry.node_count()), (9, 3));
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let p = path(&dir, &format!("z{i}.sino"));
            ok(&["simulate", "--preset", "shepp-logan", "--order", "8", "--noise", "0", "--seed", "1", "-o", s(&p)]);
            std::fs::read(&p).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);

    let noisy: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let p = path(&dir, &format!("n{i}.sino"));
            ok(&["simulate", "--preset", "shepp-logan", "--order", "8", "--noise", "0.01", "--seed", "42", "-o", s(&p)]);
            std::fs::read(&p).unwrap()
        })
        .collect();
    assert_eq!(noisy[0], noisy[1]);
    assert_ne!(noisy[0], runs[0]);

    let p = path(&dir, "x.sino");
    let out = oped(&["simulate", "--preset", "unit-disk", "--order", "2", "--noise", "0.1", "-o", s(&p)]);
    assert_eq!(code(&out), 2);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let sino = path(&dir, "s.sino");
    ok(&["simulate", "--preset", "shepp-logan", "--order", "8", "-o", s(&sino)]);
    let mut grids = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let g = path(&dir, &format!("g{i}.grid"));
        ok(&["--threads", threads, "reconstruct", "-i", s(&sino), "-o", s(&g), "--resolution", "48"]);
        grids.push(std::fs::read(&g).unwrap());
    }
    assert_eq!(grids[0], grids[1]);
    let g = path(&dir, "e.grid");
    let out = Command::new(env!("CARGO_BIN_EXE_oped"))
        .args(["reconstruct", "-i", s(&sino), "-o", s(&g)])
        .env("OPED_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert_eq!(code(&oped(&["--threads", "0", "diagnose", "--order", "2"])), 2);
}

#[test]
fn polynomial_round_trip_is_exact() {
    let dir = TempDir::new().unwrap();
    let sino = path(&dir, "p.sino");
    let grid = path(&dir, "p.grid");
    ok(&["simulate", "--preset", "poly_2", "--type", "II", "--order", "4", "-o", s(&sino)]);
    let out = ok(&[
        "reconstruct", "-i", s(&sino), "-o", s(&grid), "--order", "4", "--type", "II",
        "--reference-preset", "poly_2", "--diagnostics", "--pgm", s(&path(&dir, "p.pgm")),
    ]);
    let m = manifest(&grid);
    assert!(m["metrics"]["linf"].as_f64().unwrap() < 1e-8);
    let diag = stdout_json(&out);
    assert!(diag["max_lebesgue"].as_f64().unwrap() >= 1.0);
    assert!(diag["runtime_seconds"].as_f64().is_some());
    assert_eq!(m["outputs"].as_array().unwrap().len(), 3);
    let g = ImageGrid::read(&grid).unwrap();
    assert_eq!((g.dimension, g.resolution), (2, 128));
    assert!(std::fs::read(path(&dir, "p.pgm")).unwrap().starts_with(b"P5"));
}

#[test]
fn svd_matches_oped_at_matched_order() {
    let dir = TempDir::new().unwrap();
    let sino = path(&dir, "s.sino");
    ok(&["simulate", "--preset", "shepp-logan", "--type", "II", "--order", "8", "-o", s(&sino)]);
    let g = path(&dir, "svd.grid");
    let out = ok(&["reconstruct", "-i", s(&sino), "-o", s(&g), "--algorithm", "svd", "--truncation", "16", "--compare", "--resolution", "64"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let delta = manifest(&g)["details"]["algorithm_delta"].as_f64().unwrap();
    assert!(delta < 1e-6, "{delta}");

    let h = path(&dir, "svd2.grid");
    ok(&["svd-reconstruct", "-i", s(&sino), "-o", s(&h), "--truncation", "16", "--resolution", "64"]);
    assert_eq!(std::fs::read(&g).unwrap(), std::fs::read(&h).unwrap());

    // directions of degree 32 cannot carry truncation 17
    let out = oped(&["svd-reconstruct", "-i", s(&sino), "-o", s(&h), "--truncation", "17"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn io_and_validation_failures() {
    let dir = TempDir::new().unwrap();
    let out = oped(&["reconstruct", "-i", s(&path(&dir, "missing.sino")), "-o", s(&path(&dir, "g"))]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.sino"));

    let sino = path(&dir, "s.sino");
    ok(&["simulate", "--preset", "unit-disk", "--order", "4", "-o", s(&sino)]);
    let g = path(&dir, "g.grid");
    assert_eq!(code(&oped(&["reconstruct", "-i", s(&sino), "-o", s(&g), "--order", "3"])), 2);
    assert_eq!(code(&oped(&["reconstruct", "-i", s(&sino), "-o", s(&g), "--type", "I"])), 2);
    assert_eq!(code(&oped(&["reconstruct", "-i", s(&sino), "-o", s(&g), "--type", "3d"])), 2);

    let mut bytes = std::fs::read(&sino).unwrap();
    bytes[3] ^= 0xff;
    let bad = path(&dir, "bad.sino");
    std::fs::write(&bad, &bytes).unwrap();
    assert_eq!(code(&oped(&["reconstruct", "-i", s(&bad), "-o", s(&g)])), 2);

    let phantom = path(&dir, "bad.json");
    std::fs::write(&phantom, r#"{"d": 2, "components": [{"center": [0.9, 0.0], "axes": [0.5, 0.5], "density": 1.0}]}"#).unwrap();
    assert_eq!(code(&oped(&["simulate", "--phantom", s(&phantom), "--order", "2", "-o", s(&sino)])), 2);
    std::fs::write(&phantom, "not json").unwrap();
    assert_eq!(code(&oped(&["simulate", "--phantom", s(&phantom), "--order", "2", "-o", s(&sino)])), 2);
    assert_eq!(code(&oped(&["simulate", "--preset", "unit-disk", "--type", "I", "--d", "3", "--order", "2", "-o", s(&sino)])), 2);
}

#[test]
fn numerical_failure_exit_code() {
    let dir = TempDir::new().unwrap();
    let poly = path(&dir, "big.json");
    std::fs::write(
        &poly,
        r#"{"d": 2, "polynomial": [{"coef": 1e308, "powers": [0, 0]}, {"coef": 1e308, "powers": [2, 0]}]}"#,
    )
    .unwrap();
    let out = oped(&["simulate", "--phantom", s(&poly), "--order", "2", "-o", s(&path(&dir, "s.sino"))]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn report_metrics() {
    let dir = TempDir::new().unwrap();
    let mut l2 = Vec::new();
    for m in ["16", "64"] {
        let sino = path(&dir, &format!("s{m}.sino"));
        let grid = path(&dir, &format!("g{m}.grid"));
        ok(&["simulate", "--preset", "shepp-logan", "--order", m, "-o", s(&sino)]);
        ok(&["reconstruct", "-i", s(&sino), "-o", s(&grid), "--resolution", "96"]);
        let out = ok(&["report", "--grid", s(&grid), "--reference-preset", "shepp-logan"]);
        let r = stdout_json(&out);
        assert_eq!(r["component_mean_errors"].as_array().unwrap().len(), 10);
        l2.push(r["l2"].as_f64().unwrap());
    }
    assert!(l2[0] > l2[1], "{l2:?}");

    let g16 = path(&dir, "g16.grid");
    let out = ok(&["report", "--grid", s(&g16), "--reference-grid", s(&g16)]);
    let r = stdout_json(&out);
    for key in ["l2", "relative_l2", "linf"] {
        assert_eq!(r[key].as_f64().unwrap(), 0.0);
    }

    let zero = path(&dir, "zero.grid");
    ImageGrid::from_fn(2, 64, |_| 0.0).unwrap().write(&zero).unwrap();
    let report = path(&dir, "report.json");
    let out = ok(&["report", "--grid", s(&zero), "--reference-preset", "unit-disk", "-o", s(&report)]);
    assert_eq!(stdout_json(&out)["linf"].as_f64().unwrap(), 1.0);
    assert_eq!(manifest(&report)["metrics"]["linf"].as_f64().unwrap(), 1.0);

    // resolution mismatch against a grid reference
    assert_eq!(code(&oped(&["report", "--grid", s(&zero), "--reference-grid", s(&g16)])), 2);
}

#[test]
fn svd_verify_report() {
    let out = ok(&["svd-verify", "--d", "3", "--n-max", "2", "--lattice", "4", "--gamma-samples", "1"]);
    let r = stdout_json(&out);
    assert_eq!(r["d"], 3);
    assert_eq!(r["n_max"], 2);
    assert!(r["max_pair_residual"].as_f64().unwrap() < 1e-7);
    for key in ["ball", "cylinder", "harmonics"] {
        assert!(r["gram_residuals"][key].as_f64().unwrap() < 1e-9);
    }
    let table = r["gamma_table"].as_array().unwrap();
    assert_eq!(table.len(), 3);
    for row in table {
        let (a, b) = (row["closed_form"].as_f64().unwrap(), row["measured"].as_f64().unwrap());
        assert!((a - b).abs() < 1e-6);
    }
    assert_eq!(code(&oped(&["svd-verify", "--d", "4"])), 2);
}

#[test]
fn diagnose_geometry() {
    let out = ok(&["diagnose", "--type", "II", "--order", "4", "--resolution", "32"]);
    let r = stdout_json(&out);
    assert_eq!(r["geometry"]["views"], 9);
    assert_eq!(r["reconstruction_order"], 8);
    assert!(r["max_lebesgue"].as_f64().unwrap() >= 1.0);

    let dir = TempDir::new().unwrap();
    let sino = path(&dir, "b.sino");
    ok(&["simulate", "--preset", "unit-ball", "--type", "3d", "--order", "3", "-o", s(&sino)]);
    let r = stdout_json(&ok(&["diagnose", "-i", s(&sino), "--filter", "eta", "--resolution", "12"]));
    assert_eq!(r["geometry"]["d"], 3);
    assert_eq!(r["filter"], "eta");
}
