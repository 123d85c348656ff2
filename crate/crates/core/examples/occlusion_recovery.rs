//! Re-detection timeline for the bundled occlusion scenario.
//!
//! cargo run --example occlusion_recovery [scenario.toml]

use std::path::PathBuf;

use monopose::config::RunConfig;
use monopose::runner::run_config;

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/occlusion.toml")));
    let cfg = RunConfig::load(&path).unwrap();
    let ep = run_config(&cfg, path.parent().unwrap(), cfg.seed).unwrap();
    for e in &cfg.events {
        println!("{:?} from {:.2} s to {:.2} s", e.kind, e.start_t_s, e.end_t_s);
    }
    let mut last_mode = None;
    for r in &ep.reports {
        let interesting = r.redetect.is_some_and(|x| x.as_str() != "periodic") || r.reinitialized;
        if last_mode != Some(r.mode_after) || interesting {
            let err = ep.errors.iter().find(|e| e.t == r.t);
            println!(
                "{:6.3} s  {:<9}  d {:>6}  {:<10}  t_err {}",
                r.t,
                r.mode_after.as_str(),
                r.gates.map(|g| format!("{:.2}", g.mahalanobis)).unwrap_or_default(),
                r.redetect.map(|x| x.as_str()).unwrap_or(if r.reinitialized { "reinit" } else { "" }),
                err.map(|e| format!("{:.3} m", e.t_err)).unwrap_or_else(|| "-".into()),
            );
        }
        last_mode = Some(r.mode_after);
    }
    if let Some(s) = ep.summary() {
        println!("median t_err {:.4} m over {} frames", s.t_err.median, s.frames);
    }
}
