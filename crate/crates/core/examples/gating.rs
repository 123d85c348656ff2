//! The measurement gates on a hand-built predicted box distribution.
//!
//! cargo run --example gating

use std::collections::BTreeMap;

use monopose::gating::{
    aspect_ratio_gate, chi2_gate, edge_distance_gate, edge_margins, edge_ztest, mahalanobis, AspectBounds, GateConfig,
    MEAS_DOF,
};
use monopose::geometry::{AxisAlignedBox, CameraModel};
use monopose::ukf::MeasurementStats;
use nalgebra::{Matrix5, Vector5};

fn main() {
    let camera = CameraModel::default();
    let mut cfg = GateConfig {
        aspect_ratio: BTreeMap::from([("mug".to_string(), AspectBounds { min: 0.5, max: 2.0 })]),
        ..GateConfig::default()
    };
    println!("chi-squared threshold (dof {MEAS_DOF}): {:.4}", cfg.chi2_threshold());

    let stats = MeasurementStats {
        z_hat: Vector5::new(320.0, 240.0, 80.0, 50.0, 0.1),
        s_hat: Matrix5::from_diagonal(&Vector5::new(9.0, 9.0, 25.0, 25.0, 0.01)),
    };
    for shift in [0.0, 6.0, 12.0] {
        let z = Vector5::new(320.0 + shift, 240.0 - shift, 80.0, 50.0, 0.1);
        let d = mahalanobis(&z, &stats).unwrap();
        println!(
            "box shifted by ({shift}, -{shift}) px: d = {d:.2}, d^2 = {:.2}, gate {}",
            d * d,
            if chi2_gate(d, MEAS_DOF, &cfg) { "pass" } else { "fail" }
        );
    }

    // slide the predicted box toward the right edge
    for x in [500.0, 570.0, 585.0, 600.0] {
        let near_edge = MeasurementStats {
            z_hat: Vector5::new(x, 240.0, 80.0, 50.0, 0.1),
            ..stats
        };
        let right = edge_margins(&near_edge, &camera)[1];
        let tests = edge_ztest(&near_edge, &camera, &cfg);
        println!(
            "center x {x}: right margin {:6.1} px (std {:.1}), crossing prob {:.4}, z-test {}",
            right.margin,
            right.std,
            right.crossing_probability(),
            if tests.right { "pass" } else { "fail" }
        );
    }

    let tall = AxisAlignedBox::new(100.0, 100.0, 20.0, 60.0).unwrap();
    let near_border = AxisAlignedBox::new(12.0, 200.0, 20.0, 20.0).unwrap();
    println!("tall box as a mug: {}", aspect_ratio_gate(&tall, "mug", &cfg));
    println!("tall box as an unlisted class: {}", aspect_ratio_gate(&tall, "laptop", &cfg));
    println!("box 2 px from the left border: {}", edge_distance_gate(&near_border, &camera, &cfg));
    cfg.d_min = 1.0;
    println!("same box with d_min = 1 px: {}", edge_distance_gate(&near_border, &camera, &cfg));
}
