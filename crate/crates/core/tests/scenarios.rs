use std::path::Path;

use monopose::config::RunConfig;
use monopose::runner::{estimates_csv, run_config};
use monopose::frontend_sim::read_recorded;

fn load(name: &str) -> RunConfig {
    RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)).unwrap()
}

fn scenarios_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios"))
}

#[test]
fn static_cube_golden_median() {
    let cfg = load("static-cube.toml");
    let s = run_config(&cfg, scenarios_dir(), cfg.seed).unwrap().summary().unwrap();
    // pinned from a reference run; any change in numerics shows up here
    assert!((s.t_err.median - GOLDEN_T_MEDIAN).abs() < 1e-9, "{}", s.t_err.median);
    assert!((s.r_err.median - GOLDEN_R_MEDIAN).abs() < 1e-7, "{}", s.r_err.median);
}

const GOLDEN_T_MEDIAN: f64 = 0.0038256506841741027;
const GOLDEN_R_MEDIAN: f64 = 0.13289981415264251;

#[test]
fn replay_reproduces_the_synthetic_run() {
    let synthetic = load("mug-detection.toml");
    let replay = load("recorded-replay.toml");
    let a = run_config(&synthetic, scenarios_dir(), synthetic.seed).unwrap();
    let b = run_config(&replay, scenarios_dir(), replay.seed).unwrap();
    let recorded = std::fs::read_to_string(scenarios_dir().join("mug-detection.rec")).unwrap();
    assert_eq!(read_recorded(&recorded).unwrap(), a.frames);
    assert_eq!(estimates_csv(&a.reports), estimates_csv(&b.reports));
}

#[test]
fn bundled_scenarios_track_without_faults() {
    for (name, bound) in [
        ("static-cube.toml", 0.02),
        ("cv-moving.toml", 0.03),
        ("occlusion.toml", 0.02),
        ("mug-detection.toml", 0.03),
        ("bowl-waypoints.toml", 0.05),
        ("exit-frame.toml", 0.1),
    ] {
        let cfg = load(name);
        let ep = run_config(&cfg, scenarios_dir(), cfg.seed).unwrap();
        assert!(ep.reports.iter().all(|r| r.fault.is_none()), "{name}");
        let s = ep.summary().unwrap();
        assert!(s.t_err.median < bound, "{name}: {s:?}");
    }
}

#[test]
fn symmetric_bowl_scores_without_spin() {
    let cfg = load("bowl-waypoints.toml");
    let s = run_config(&cfg, scenarios_dir(), cfg.seed).unwrap().summary().unwrap();
    assert!(s.r_err.median < 5.0, "{s:?}");
}
