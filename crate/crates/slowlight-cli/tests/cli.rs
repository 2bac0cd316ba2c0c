//! End-to-end checks of the binary: exit codes, outputs, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_slowlight")
}

fn unique_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("slowlight_cli_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_small_config(dir: &Path, name: &str, tweak: impl Fn(String) -> String) -> PathBuf {
    let base = r#"
name = "cli-test"

[grid]
n = 64
extent = 40.0

[medium]
g_sqrt_n = 1e6

[probe]
kind = "gaussian"

[storing.c2]
kind = "gaussian"
[storing.c3]
kind = "gaussian"
amplitude = 0.0

[retrieving.c2]
kind = "lg"
charge = 1
[retrieving.c3]
kind = "gaussian"

[schedule]
t_store = 50.0
t_retrieve = 100.0

[plan]
mode = "free_space"
z_end = 300.0
n_slices = 20
record_every = 5

[output]
formats = ["json", "csv", "raster"]
"#;
    let path = dir.join(name);
    std::fs::write(&path, tweak(base.to_string())).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

#[test]
fn check_accepts_valid_and_rejects_invalid() {
    let dir = unique_dir("check");
    let good = write_small_config(&dir, "good.toml", |s| s);
    let out = run(&["check", good.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");

    let bad = write_small_config(&dir, "bad.toml", |s| {
        s.replace("n = 64", "n = 60")
            .replace("t_retrieve = 100.0", "t_retrieve = 1.0")
    });
    let out = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("power of two"), "{err}");
    assert!(err.contains("retrieval"), "{err}");
}

#[test]
fn run_writes_reports_and_is_deterministic() {
    let dir = unique_dir("run");
    let cfg = write_small_config(&dir, "run.toml", |s| s);
    let out1 = dir.join("out1");
    let out2 = dir.join("out2");
    for out_dir in [&out1, &out2] {
        let out = run(&[
            "run",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let report1 = std::fs::read(out1.join("report.json")).unwrap();
    let report2 = std::fs::read(out2.join("report.json")).unwrap();
    assert_eq!(report1, report2, "reports must be byte-identical");

    let report: serde_json::Value = serde_json::from_slice(&report1).unwrap();
    assert_eq!(report["regenerated"]["vortex_charge"], 1);
    assert_eq!(report["degraded"], false);
    assert_eq!(report["decoupling"]["shared_envelope"], true);
    assert!(report["adiabaticity"]["loss_ratio"].is_f64());
    let slices = report["slices"].as_array().unwrap();
    assert_eq!(slices.len(), 5); // steps 0, 5, 10, 15, 20
    for s in slices {
        assert_eq!(s["vortex_charge"], 1, "charge preserved in flight");
    }
    // rms grows monotonically
    let rms: Vec<f64> = slices
        .iter()
        .map(|s| s["rms_radius"].as_f64().unwrap())
        .collect();
    assert!(rms.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{rms:?}");

    // csv has a header and one block per slice
    let csv = std::fs::read_to_string(out1.join("profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "z_lambda,x_lambda,intensity_rel,phase_rad"
    );
    assert_eq!(csv.lines().count(), 1 + 5 * 64);

    // the z = 0 block is the closed-form regenerated beam: with equal
    // probe/storing/retrieving widths, |E(x, 0)|² = x²e^{-2x²/σ²}
    let sigma: f64 = 10.0;
    let peak = (sigma / 2f64.sqrt() * (-0.5f64).exp()).powi(2);
    for line in csv.lines().skip(1).take(64) {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(cols[0], 0.0);
        let x = cols[1];
        let want = x * x * (-2.0 * x * x / (sigma * sigma)).exp();
        assert!(
            (cols[2] - want).abs() <= 1e-10 * peak,
            "z=0 intensity at x={x}: {} vs closed form {want}",
            cols[2]
        );
    }

    // rasters and manifest
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("slices/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest.as_array().unwrap().len(), 5);
    assert!(out1.join("slices/slice_00000.bin").exists());
    assert!(out1.join("regenerated.bin").exists());
    let field = slowlight::io::read_field_raster(&out1.join("regenerated")).unwrap();
    assert_eq!(field.grid().n(), 64);
}

#[test]
fn degraded_runs_are_flagged_not_rejected() {
    let dir = unique_dir("degraded");
    let cfg = write_small_config(&dir, "strong.toml", |s| {
        s.replace(
            "kind = \"gaussian\"\n\n[storing.c2]",
            "kind = \"gaussian\"\npeak_rabi = 10.0\n\n[storing.c2]",
        )
    });
    let out = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["degraded"], true);
    assert_eq!(report["linearity"]["ok"], false);
}

#[test]
fn sweep_runs_each_value() {
    let dir = unique_dir("sweep");
    let cfg = write_small_config(&dir, "sweep.toml", |s| {
        // tripod storage with a vortex, Λ retrieval: b sweeps the helper
        s.replace(
            "[storing.c2]\nkind = \"gaussian\"\n[storing.c3]\nkind = \"gaussian\"\namplitude = 0.0",
            "[storing.c2]\nkind = \"lg\"\ncharge = 1\n[storing.c3]\nkind = \"gaussian\"\namplitude = 3.0",
        )
        .replace(
            "[retrieving.c2]\nkind = \"lg\"\ncharge = 1\n[retrieving.c3]\nkind = \"gaussian\"",
            "[retrieving.c2]\nkind = \"gaussian\"\n[retrieving.c3]\nkind = \"gaussian\"\namplitude = 0.0",
        )
    });
    let out_dir = dir.join("out");
    let out = run(&[
        "sweep",
        cfg.to_str().unwrap(),
        "--param",
        "b",
        "--values",
        "3,10",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("sweep_summary.json")).unwrap())
            .unwrap();
    let entries = summary.as_array().unwrap();
    assert_eq!(entries.len(), 2);
    // conjugated vortex in both runs; weaker beam for larger b
    for e in entries {
        assert_eq!(e["vortex_charge"], -1);
    }
    let p3 = entries[0]["peak_intensity"].as_f64().unwrap();
    let p10 = entries[1]["peak_intensity"].as_f64().unwrap();
    assert!(p3 > p10, "peak must drop with b: {p3} vs {p10}");

    let out = run(&[
        "sweep",
        cfg.to_str().unwrap(),
        "--param",
        "nonsense",
        "--values",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runtime_failures_exit_with_two() {
    let dir = unique_dir("runtime");
    let cfg = write_small_config(&dir, "ok.toml", |s| s);
    // an output directory that cannot be created: a path under a regular file
    let blocker = dir.join("blocker");
    std::fs::write(&blocker, "file").unwrap();
    let out = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
