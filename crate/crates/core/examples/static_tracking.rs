//! Tracks a resting box from a perturbed first pose, built without a config file.
//!
//! cargo run --example static_tracking [seed]

use monopose::config::Initialization;
use monopose::gating::GateConfig;
use monopose::geometry::{CameraModel, Pose, Quaternion};
use monopose::runner::run_synthetic;
use monopose::frontend_sim::{NoiseSpec, Scenario, Trajectory};
use monopose::tracker::{ObjectModel, Tracker, TrackerConfig};
use monopose::ukf::{Ukf, UkfParams};
use nalgebra::Vector3;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let camera = CameraModel::default();
    let object = ObjectModel::cuboid("box", 0.3, 0.2, 0.25);
    let start = Pose::new(
        Quaternion::new(0.9362934889, 0.1894521183, 0.2863390145, 0.0593925841),
        Vector3::new(0.0, 0.0, 3.0),
    );
    let scenario = Scenario {
        camera,
        object: object.clone(),
        trajectory: Trajectory::stationary(start, 0.0, 5.0).unwrap(),
        noise: NoiseSpec::default(),
        events: Vec::new(),
        frame_rate_hz: 30.0,
    };
    let mut tracker = Tracker::new(
        object,
        camera,
        Ukf::new(UkfParams::default()),
        GateConfig::default(),
        TrackerConfig::default(),
    );
    let ep = run_synthetic(&scenario, &mut tracker, Initialization::Perturbed, seed).unwrap();

    println!("  frame   t_err [cm]  r_err [deg]  depth_err [cm]");
    for (i, e) in ep.errors.iter().enumerate().filter(|(i, _)| i % 15 == 0) {
        println!("{:7} {:12.2} {:12.2} {:15.2}", i + 1, 100.0 * e.t_err, e.r_err, 100.0 * e.depth_err);
    }
    let s = ep.summary().unwrap();
    println!(
        "median over {} frames: {:.2} cm, {:.2} deg",
        s.frames,
        100.0 * s.t_err.median,
        s.r_err.median
    );
}
