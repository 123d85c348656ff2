//! Projects a cuboid through the pinhole camera and fits its measurement box.
//!
//! cargo run --example projection

use monopose::geometry::{predict_measurement, project_points, CameraModel, Pose, Quaternion, VertexSet};
use nalgebra::Vector3;

fn main() {
    let camera = CameraModel::default();
    let verts = VertexSet::cuboid(0.3, 0.2, 0.25);
    let rotation = Quaternion::from_axis_angle(&Vector3::new(1.0, 1.0, 0.2).normalize(), 0.4);
    let pose = Pose::new(rotation, Vector3::new(0.2, -0.1, 2.5));

    for (v, p) in verts.vertices().iter().zip(project_points(&camera, &pose, &verts).unwrap()) {
        println!("({:+.3}, {:+.3}, {:+.3}) m -> ({:7.2}, {:7.2}) px", v.x, v.y, v.z, p.x, p.y);
    }
    let b = predict_measurement(&camera, &pose, &verts).unwrap();
    println!(
        "measurement: x {:.2}  y {:.2}  w {:.2}  h {:.2}  alpha {:.4}",
        b.x, b.y, b.w, b.h, b.alpha
    );

    // the box shrinks as the object recedes
    for z in [1.0, 2.0, 4.0, 8.0] {
        let far = Pose::new(rotation, Vector3::new(0.0, 0.0, z));
        let b = predict_measurement(&camera, &far, &verts).unwrap();
        println!("depth {z:>3} m: {:6.1} x {:5.1} px", b.w, b.h);
    }
}
