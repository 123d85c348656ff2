//! One hand-driven predict/update cycle of the filter.
//!
//! cargo run --example ukf_step

use monopose::dynamics::{DynamicsSpec, State13};
use monopose::gating::mahalanobis;
use monopose::geometry::{predict_measurement, CameraModel, Pose, Quaternion, VertexSet};
use monopose::ukf::{StateBelief, Ukf, UkfParams};
use nalgebra::Vector3;

fn main() {
    let camera = CameraModel::default();
    let verts = VertexSet::cuboid(0.3, 0.2, 0.25);
    let q = Quaternion::new(0.9362934889, 0.1894521183, 0.2863390145, 0.0593925841).normalize();
    let truth = Pose::new(q, Vector3::new(0.1, 0.0, 3.0));

    // belief 5 cm off to the side and 10 cm too far
    let guess = Pose::new(q, truth.translation + Vector3::new(0.05, 0.0, 0.1));
    let std = [0.05, 0.05, 0.2, 0.1, 0.1, 0.1, 0.02, 0.02, 0.02, 0.02, 0.02, 0.02];
    let mut belief = StateBelief::with_diagonal(State13::at_rest(&guess), &std);
    let ukf = Ukf::new(UkfParams::default());
    let dynamics = DynamicsSpec::default();
    let z = predict_measurement(&camera, &truth, &verts).unwrap();

    for k in 0..5 {
        belief = ukf.predict(&belief, 1.0 / 30.0, &dynamics).unwrap();
        let (posterior, stats) = ukf.update(&belief, &z, &camera, &verts).unwrap();
        let d = mahalanobis(&z.as_vector(), &stats).unwrap();
        belief = posterior;
        let err = belief.mean.p - truth.translation;
        println!(
            "step {k}: d = {d:5.2}  position error ({:+.4}, {:+.4}, {:+.4}) m  cov trace {:.2e}  min eig {:.2e}",
            err.x,
            err.y,
            err.z,
            belief.cov.trace(),
            belief.min_eigenvalue()
        );
    }
}
