//! Why angled boxes: poses that axis-aligned boxes cannot tell apart.
//!
//! cargo run --example ambiguity

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use monopose::geometry::{predict_measurement, to_axis_aligned, CameraModel, Pose, Quaternion, VertexSet};
use nalgebra::Vector3;

fn main() {
    let camera = CameraModel::default();

    // A thin square plate rolled by +θ and -θ: mirror images whose
    // axis-aligned boxes coincide while their angled boxes do not.
    let plate = VertexSet::cuboid(0.3, 0.3, 0.01);
    let roll = 0.3;
    for sign in [1.0, -1.0] {
        let pose = Pose::new(
            Quaternion::from_axis_angle(&Vector3::z(), sign * roll),
            Vector3::new(0.0, 0.0, 2.0),
        );
        let b = predict_measurement(&camera, &pose, &plate).unwrap();
        let a = to_axis_aligned(&b);
        println!(
            "roll {:+.2}: axis-aligned {:.2} x {:.2} px   angled {:.2} x {:.2} px at {:+.4} rad",
            sign * roll,
            a.w,
            a.h,
            b.w,
            b.h,
            b.alpha
        );
    }

    // The same plate face-on at 2 m and rolled a quarter turn further away
    // fills the same axis-aligned box; the angled box tells them apart.
    let near = Pose::new(Quaternion::default(), Vector3::new(0.0, 0.0, 2.0));
    let far = Pose::new(
        Quaternion::from_axis_angle(&Vector3::z(), FRAC_PI_4),
        Vector3::new(0.0, 0.0, 2.0 * SQRT_2),
    );
    for (name, pose) in [("face-on", near), ("rolled", far)] {
        let b = predict_measurement(&camera, &pose, &plate).unwrap();
        let a = to_axis_aligned(&b);
        println!(
            "{name:>7} at {:.2} m: axis-aligned {:.2} x {:.2} px   angled {:.2} x {:.2} px at {:+.4} rad",
            pose.translation.z, a.w, a.h, b.w, b.h, b.alpha
        );
    }
    println!("the two poses are {:.2} m apart", (near.translation - far.translation).norm());
}
