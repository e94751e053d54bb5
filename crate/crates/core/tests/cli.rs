use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use geo::{Area, LineString, Polygon};
use serde_json::Value;

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes").join(name)
}

fn run(scene: &Path, out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fovregion"))
        .env("FOVREGION_LOG", "off")
        .arg("--scene")
        .arg(scene)
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn far_position_is_outside_and_visible() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&scene("square.json"), dir.path(), &["check", "3", "-2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("check.json"));
    assert_eq!(report["in_rna"], false);
    assert_eq!(report["h_c"], 1.5);
    assert!(report["min_margin_px"].as_f64().unwrap() > 0.0);
    let printed: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(printed, report);
}

#[test]
fn position_against_the_marker_is_inside_and_blind() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&scene("square.json"), dir.path(), &["check", "0", "1.9"]);
    assert!(out.status.success());
    let report = json(&dir.path().join("check.json"));
    assert_eq!(report["in_rnh"], true);
    assert_eq!(report["in_rna"], true);
    assert!(report["min_margin_px"].as_f64().unwrap() < 0.0);
}

#[test]
fn aperture_overrides_change_the_region() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run(&scene("square.json"), &a, &["region"]).status.success());
    assert!(run(
        &scene("square.json"),
        &b,
        &["--theta", "0.9", "--phi", "0.75", "region"]
    )
    .status
    .success());
    let area = |d: &Path| -> f64 {
        let rings = json(&d.join("region.json"))["rna_polygon"].clone();
        let rings: Vec<Vec<[f64; 2]>> = serde_json::from_value(rings).unwrap();
        rings
            .iter()
            .map(|r| {
                let ring: LineString<f64> = r.iter().map(|p| (p[0], p[1])).collect();
                Polygon::new(ring, vec![]).unsigned_area()
            })
            .sum()
    };
    assert!(area(&b) > area(&a));
    let svg = std::fs::read_to_string(a.join("region.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains(r#"id="rnv""#));
}

#[test]
fn malformed_scene_exits_with_validation_status() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"camera": {"theta": 1.13}, "markers": []}"#).unwrap();
    let out = run(&bad, dir.path(), &["region"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("fovregion: "));

    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(run(&bad, dir.path(), &["region"]).status.code(), Some(2));
}

#[test]
fn unreadable_scene_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&dir.path().join("absent.json"), dir.path(), &["region"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.json"));
}

#[test]
fn bad_options_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let sq = scene("square.json");
    assert_eq!(run(&sq, dir.path(), &["--theta", "4", "region"]).status.code(), Some(2));
    assert_eq!(
        run(&sq, dir.path(), &["oracle-compare", "--jitter", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&sq, dir.path(), &["region", "--m-per-px", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn planning_from_inside_the_region_is_unreachable() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&scene("square.json"), dir.path(), &["plan", "0", "1.9", "3", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unreachable"));
}

#[test]
fn plan_and_simulate_agree_on_the_planned_path() {
    let dir = tempfile::tempdir().unwrap();
    let sq = scene("square.json");
    let out = run(&sq, dir.path(), &["plan", "-3", "1.6", "3", "1.6", "--dt", "0.05"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let plan = dir.path().join("plan.json");
    let planned = std::fs::read(dir.path().join("plan_trace.csv")).unwrap();

    let sim = dir.path().join("sim");
    let out = run(&sq, &sim, &["simulate", plan.to_str().unwrap(), "--dt", "0.05"]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(sim.join("trace.csv")).unwrap(), planned);

    let text = String::from_utf8(planned).unwrap();
    for line in text.lines().skip(1) {
        assert!(line.ends_with(",0,0,0"), "{line}");
    }
}

#[test]
fn oracle_compare_writes_grid_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&scene("square.json"), dir.path(), &["oracle-compare", "--grid", "20"]);
    assert!(out.status.success());
    let summary = json(&dir.path().join("oracle_summary.json"));
    assert_eq!(summary["missed_beyond_band"], 0);
    let rows = std::fs::read_to_string(dir.path().join("oracle_grid.csv")).unwrap();
    assert_eq!(rows.lines().count(), 401);
}
