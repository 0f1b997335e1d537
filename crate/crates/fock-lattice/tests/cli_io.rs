//! End-to-end CLI behavior: exit codes, bundle layout, determinism, and the
//! selftest gate.

use std::fs;
use std::process::Command;

fn fsl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fsl"))
}

#[test]
fn selftest_command_passes() {
    let out = fsl().arg("selftest").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("all checks passed"), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("ok ")).count() >= 8);
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = fsl().arg("warp-drive").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_typo_exits_2_with_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"scenario": "landau", "g0_MHZ": 9.0}"#).unwrap();
    let out = fsl()
        .args(["landau", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(dir.path().join("runs"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    let record: serde_json::Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    assert!(
        record["error"].as_str().unwrap().contains("g0_mhz"),
        "{record}"
    );
    // partial outputs removed: the runs dir holds no bundle
    assert!(!dir.path().join("runs").join("landau").exists());
}

#[test]
fn scenario_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("t.json");
    fs::write(&cfg, r#"{"scenario": "transport"}"#).unwrap();
    let out = fsl()
        .args(["landau", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn landau_bundle_contents_and_rerun_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    // small, fast config
    fs::write(
        &cfg,
        r#"{"scenario": "landau", "n": 2, "horizon_ns": 511.0, "sample_dt_ns": 1.0}"#,
    )
    .unwrap();
    let run = || {
        let out = fsl()
            .args(["landau", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path().join("runs"))
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    run();
    let bundle = dir.path().join("runs").join("landau");
    for f in [
        "series.csv",
        "spectrum.csv",
        "fft_peaks.csv",
        "metrics.csv",
        "manifest.json",
    ] {
        assert!(bundle.join(f).exists(), "{f} missing");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(bundle.join("manifest.json")).unwrap()).unwrap();
    // config echo is fully defaulted
    assert_eq!(manifest["config"]["g0_mhz"], 9.0);
    assert_eq!(manifest["config"]["seed"], 0);
    // series header stability
    let series = fs::read_to_string(bundle.join("series.csv")).unwrap();
    assert!(
        series.starts_with("t_ns,n1,n2,n3,p_up\n"),
        "{}",
        &series[..40]
    );

    let before: Vec<(String, Vec<u8>)> = fs::read_dir(&bundle)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().to_string(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    run();
    for (name, content) in before {
        if name == "manifest.json" {
            continue; // carries the timestamp
        }
        assert_eq!(
            fs::read(bundle.join(&name)).unwrap(),
            content,
            "{name} changed between reruns"
        );
    }
}

#[test]
fn snapshots_flag_produces_lattice_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"scenario": "vhe-binomial", "n": 2, "horizon_ns": 100.0, "sample_dt_ns": 10.0,
            "revival_window_ns": [50.0, 100.0], "revival_time_ns": 80.0,
            "snapshot_times_ns": []}"#,
    )
    .unwrap();
    let out = fsl()
        .args(["vhe-binomial", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("runs"))
        .args(["--snapshots", "0,50"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let bundle = dir.path().join("runs").join("vhe-binomial");
    assert!(bundle.join("lattice_t0.csv").exists());
    assert!(bundle.join("lattice_t50.csv").exists());
    let lattice = fs::read_to_string(bundle.join("lattice_t0.csv")).unwrap();
    assert!(lattice.starts_with("s,n1,n2,n3,x,y,population\n"));
    // (N+1)^2 = 9 sites + header
    assert_eq!(lattice.lines().count(), 10);
}
