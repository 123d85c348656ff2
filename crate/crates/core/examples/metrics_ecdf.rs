//! Error distributions for the moving-box scenario across seeds.
//!
//! cargo run --release --example metrics_ecdf

use std::path::Path;

use monopose::config::RunConfig;
use monopose::metrics::{ecdf, summarize, FrameError};
use monopose::runner::run_config;

const SCENARIO: &str = include_str!("../scenarios/cv-moving.toml");

fn fraction_below(steps: &[(f64, f64)], x: f64) -> f64 {
    steps.iter().take_while(|(v, _)| *v <= x).last().map_or(0.0, |s| s.1)
}

fn main() {
    let cfg = RunConfig::from_toml(SCENARIO).unwrap();
    let mut all: Vec<FrameError> = Vec::new();
    for seed in 0..5 {
        let ep = run_config(&cfg, Path::new("."), seed).unwrap();
        let s = ep.summary().unwrap();
        println!(
            "seed {seed}: t_err {:.2} cm  in-plane {:.2} cm  depth {:.2} cm  r_err {:.2} deg (medians)",
            100.0 * s.t_err.median,
            100.0 * s.inplane_err.median,
            100.0 * s.depth_err.median,
            s.r_err.median
        );
        all.extend(ep.errors);
    }
    let s = summarize(&all).unwrap();
    println!("pooled over {} frames: mean t_err {:.2} cm", s.frames, 100.0 * s.t_err.mean);

    let inplane = ecdf(&all.iter().map(|e| e.inplane_err).collect::<Vec<_>>()).unwrap();
    let depth = ecdf(&all.iter().map(|e| e.depth_err).collect::<Vec<_>>()).unwrap();
    println!("threshold   in-plane  depth");
    for cm in [0.5, 1.0, 2.0, 3.0, 5.0] {
        let x = cm / 100.0;
        println!(
            "{cm:>6.1} cm   {:7.3}  {:5.3}",
            fraction_below(&inplane, x),
            fraction_below(&depth, x)
        );
    }
}
