use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eit_fbp::{parse_config, parse_str, run_pipeline, ConfigError, RunOptions};
use eit_fbp_core::{Error as CoreError, PhantomError};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> PathBuf {
    fixtures().join(format!("{name}.json"))
}

fn eit_fbp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eit-fbp")).args(args).output().unwrap()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn every_fixture_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut count = 0;
    for entry in fs::read_dir(fixtures()).unwrap() {
        let path = entry.unwrap().path();
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let out = tmp.path().join(&stem);
        let status = eit_fbp(&["run", path.to_str().unwrap(), "--out", out.to_str().unwrap(), "--quiet"]);
        assert!(
            status.status.success(),
            "{stem}: {}",
            String::from_utf8_lossy(&status.stderr)
        );
        assert!(out.join("metrics.json").exists());
        count += 1;
    }
    assert_eq!(count, 8);
}

#[test]
fn one_perturbation_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = parse_config(&fixture("one_perturbation")).unwrap();
    cfg.output_dir = tmp.path().join("run");
    cfg.recon.truncate(1);
    let report = run_pipeline(&cfg, RunOptions { quiet: true }).unwrap();
    assert_eq!(report.sinograms.len(), 2);
    assert_eq!(report.reconstructions.len(), 2);
    assert!(report.sinograms.iter().all(|s| s.slices == 80 && s.angles == 18));
    let names = listing(&cfg.output_dir);
    assert_eq!(names.iter().filter(|n| n.ends_with(".csv")).count(), 2);
    assert_eq!(names.iter().filter(|n| n.starts_with("target")).count(), 2);
    assert_eq!(
        names
            .iter()
            .filter(|n| n.ends_with(".pgm") && !n.starts_with("target"))
            .count(),
        2
    );
}

fn fixture_value(name: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

#[test]
fn filter_matrix_yields_one_image_per_pair() {
    let mut value = fixture_value("one_perturbation");
    value["recon"] = serde_json::json!({
        "filters": ["ram_lak", "cosine"],
        "interpolations": ["nearest", "spline"],
        "grid_size": 40
    });
    let mut cfg = parse_str(&value.to_string(), Path::new("matrix.json")).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    cfg.output_dir = tmp.path().to_path_buf();
    let report = run_pipeline(&cfg, RunOptions { quiet: true }).unwrap();
    assert_eq!(report.reconstructions.len(), 8);
    let pgm: Vec<_> = listing(tmp.path())
        .into_iter()
        .filter(|n| n.starts_with("avgcond") && n.ends_with(".pgm"))
        .collect();
    assert_eq!(
        pgm,
        [
            "avgcond_cosine_nearest.pgm",
            "avgcond_cosine_spline.pgm",
            "avgcond_ramlak_nearest.pgm",
            "avgcond_ramlak_spline.pgm"
        ]
    );
}

#[test]
fn two_perturbations_use_36_angles() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = parse_config(&fixture("two_perturbations"))
        .unwrap()
        .with_grid(32)
        .unwrap();
    cfg.output_dir = tmp.path().to_path_buf();
    let report = run_pipeline(&cfg, RunOptions { quiet: true }).unwrap();
    assert!(report.sinograms.iter().all(|s| s.angles == 36));
}

#[test]
fn outputs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: Vec<PathBuf> = (0..2).map(|i| tmp.path().join(format!("run{i}"))).collect();
    for dir in &runs {
        let out = eit_fbp(&[
            "run",
            fixture("two_perturbations").to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
            "--quiet",
        ]);
        assert!(out.status.success());
    }
    let names = listing(&runs[0]);
    assert_eq!(names, listing(&runs[1]));
    for name in names.iter().filter(|n| !n.ends_with(".json")) {
        assert_eq!(
            fs::read(runs[0].join(name)).unwrap(),
            fs::read(runs[1].join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn metrics_echo_reparses_to_same_config() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = parse_config(&fixture("resistive_pair")).unwrap();
    cfg.output_dir = tmp.path().join("echo");
    run_pipeline(&cfg, RunOptions { quiet: true }).unwrap();
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(cfg.output_dir.join("metrics.json")).unwrap()).unwrap();
    let echoed = serde_json::to_string(&metrics["config"]).unwrap();
    assert_eq!(parse_str(&echoed, Path::new("echo.json")).unwrap(), cfg);
    let recon = metrics["reconstructions"].as_array().unwrap();
    assert_eq!(recon.len(), 4);
    for r in recon {
        assert!(r["pearson"].as_f64().is_some());
        assert!(r["elapsed_ms"].as_f64().is_some());
    }
}

#[test]
fn identical_images_report_infinite_psnr() {
    // a homogeneous subject reconstructs to the same flat image as its target
    let text = r#"{
        "phantom": {"subject_radius_mm": 10, "subject_resistivity_ohm_m": 0.5, "depth_mm": 1, "slice_width_mm": 1},
        "angle_step_deg": 45,
        "quantities": ["avg_conductivity"],
        "recon": [{"filter": "none", "interpolation": "nearest", "grid_size": 8}],
        "output_dir": "unused",
        "emit": ["metrics_json"]
    }"#;
    let mut cfg = parse_str(text, Path::new("flat.json")).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    cfg.output_dir = tmp.path().to_path_buf();
    let report = run_pipeline(&cfg, RunOptions { quiet: true }).unwrap();
    assert!(report.reconstructions[0].psnr.is_infinite());
    let metrics = fs::read_to_string(tmp.path().join("metrics.json")).unwrap();
    assert!(metrics.contains(r#""psnr": "inf""#), "{metrics}");
    assert_eq!(listing(tmp.path()), ["metrics.json"]);
}

#[test]
fn printed_three_perturbation_pairing_overlaps() {
    // radii 12 and 8 in the order printed put a 12 mm disk at (-10, 15),
    // 20 mm from the 10 mm disk at (10, 15)
    let mut value = fixture_value("three_perturbations");
    value["phantom"]["perturbations"][1]["radius_mm"] = 12.0.into();
    value["phantom"]["perturbations"][2]["radius_mm"] = 8.0.into();
    let err = parse_str(&value.to_string(), Path::new("printed.json")).unwrap_err();
    assert!(matches!(
        err,
        ConfigError::Invalid(CoreError::Phantom(PhantomError::OverlappingPerturbations {
            first: 0,
            second: 1,
            ..
        }))
    ));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = eit_fbp(&["validate", fixture("one_perturbation").to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("80 slices, 18 angles"));

    let bad = tmp.path().join("bad.json");
    let mut value = fixture_value("one_perturbation");
    value["angle_step_deg"] = 7.0.into();
    fs::write(&bad, value.to_string()).unwrap();
    assert_eq!(eit_fbp(&["validate", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(eit_fbp(&["run", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(
        eit_fbp(&["validate", "/nonexistent/config.json"]).status.code(),
        Some(2)
    );

    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = blocker.join("sub");
    let run = eit_fbp(&[
        "run",
        fixture("one_perturbation").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(run.status.code(), Some(3));
}

#[test]
fn failed_run_removes_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("partial");
    fs::create_dir(&dir).unwrap();
    // a directory squatting on the metrics file name makes the last write fail
    fs::create_dir(dir.join("metrics.json")).unwrap();
    let mut cfg = parse_config(&fixture("one_perturbation"))
        .unwrap()
        .with_grid(24)
        .unwrap();
    cfg.output_dir = dir.clone();
    assert!(run_pipeline(&cfg, RunOptions { quiet: true }).is_err());
    assert_eq!(listing(&dir), ["metrics.json"]);
}

#[test]
fn filters_table_has_requested_rows() {
    let out = eit_fbp(&["filters"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text
        .lines()
        .nth(6)
        .unwrap()
        .starts_with("0.500000000000000,0.500000000000000,"));
}
