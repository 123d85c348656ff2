//! Coarse poses from single boxes, and symmetry-reduced orientation.
//!
//! cargo run --example detection_init

use monopose::geometry::{predict_measurement, to_axis_aligned, CameraModel, Pose, Quaternion};
use monopose::frontend_sim::Shape;
use monopose::tracker::{apply_symmetry, init_pose_from_box, place_on_box, Extent, ObjectModel};
use nalgebra::Vector3;

fn main() {
    let camera = CameraModel::default();
    let model = ObjectModel::cuboid("box", 0.3, 0.2, 0.25);
    let attitude = Quaternion::new(0.9362934889, 0.1894521183, 0.2863390145, 0.0593925841).normalize();

    println!("true depth   from angled box   placed with known attitude");
    for z in [1.0, 2.0, 4.0, 8.0] {
        let truth = Pose::new(attitude, Vector3::new(0.15, -0.05, z));
        let b = predict_measurement(&camera, &truth, &model.verts).unwrap();
        let coarse = init_pose_from_box(&b, &model, &camera).unwrap();
        let placed = place_on_box(&to_axis_aligned(&b), &model, &camera, attitude).unwrap();
        println!(
            "{z:>8.1} m {:>14.3} m {:>24.3} m",
            coarse.translation.z, placed.translation.z
        );
    }

    // a bowl looks the same however it is spun about its axis
    let bowl = Shape::Bowl.model(
        "bowl",
        Extent {
            width: 0.16,
            height: 0.07,
            length: 0.16,
        },
    );
    let tilt = Quaternion::from_axis_angle(&Vector3::x(), 0.4);
    for spin in [0.0, 1.0, 2.5] {
        let q = tilt * Quaternion::from_axis_angle(&Vector3::y(), spin);
        let pose = Pose::new(q, Vector3::new(0.0, 0.0, 1.5));
        let reduced = apply_symmetry(&bowl, &pose).unwrap();
        let r = reduced.rotation;
        println!(
            "spin {spin:.1} rad -> reduced attitude ({:+.4}, {:+.4}, {:+.4}, {:+.4})",
            r.w, r.x, r.y, r.z
        );
    }
}
