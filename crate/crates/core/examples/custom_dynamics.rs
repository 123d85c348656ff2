//! Registers a class-specific transition model and selects it by name.
//!
//! cargo run --release --example custom_dynamics

use std::path::Path;

use monopose::config::{RunConfig, TrajectoryKind, Waypoint};
use monopose::dynamics::{DynamicsRegistry, State13};
use monopose::runner::{run_config, run_config_with};

const SCENARIO: &str = r#"
seed = 2

[object]
class = "cart"
dynamics = "damped"

"#;

const TAU_S: f64 = 2.0;

/// A cart pushed to the right that rolls to a stop.
fn coasting_cart() -> Vec<Waypoint> {
    let v0 = 0.3;
    (0..=20)
        .map(|i| {
            let t = 0.5 * i as f64;
            Waypoint {
                t_s: t,
                position_m: [-0.4 + v0 * TAU_S * (1.0 - (-t / TAU_S).exp()), 0.1, 3.0],
                orientation_wxyz: [0.9362934889, 0.1894521183, 0.2863390145, 0.0593925841],
            }
        })
        .collect()
}

fn main() {
    let mut cfg = RunConfig::from_toml(SCENARIO).unwrap();
    cfg.trajectory.kind = TrajectoryKind::Waypoints;
    cfg.trajectory.waypoints = coasting_cart();

    // velocities decay with the cart's time constant; pose integrates as usual
    let mut registry = DynamicsRegistry::new();
    registry
        .register("damped", |s: &State13, dt: f64| {
            let decay = (-dt / TAU_S).exp();
            let cv = monopose::dynamics::constant_velocity(s, dt);
            State13 {
                v: s.v * decay,
                omega: s.omega * decay,
                ..cv
            }
        })
        .unwrap();

    match run_config(&cfg, Path::new("."), cfg.seed) {
        Err(e) => println!("without the model: {e}"),
        Ok(_) => unreachable!(),
    }
    let damped = run_config_with(&cfg, Path::new("."), cfg.seed, registry).unwrap();
    let cv = RunConfig {
        object: monopose::config::ObjectSection {
            dynamics: "constant-velocity".into(),
            ..cfg.object.clone()
        },
        ..cfg.clone()
    };
    let plain = run_config(&cv, Path::new("."), cfg.seed).unwrap();
    for (name, ep) in [("damped", damped), ("constant-velocity", plain)] {
        let s = ep.summary().unwrap();
        println!(
            "{name:>17}: median t_err {:.2} cm, r_err {:.2} deg",
            100.0 * s.t_err.median,
            s.r_err.median
        );
    }
}
