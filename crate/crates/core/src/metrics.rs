//! Pose error metrics, summaries and ECDF tables.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{Pose, Quaternion};
use crate::tracker::{apply_symmetry, ObjectModel, Symmetry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no values to summarize")]
    EmptyInput,
}

/// Errors of one estimate against ground truth. Lengths in meters, angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameError {
    pub t: f64,
    pub t_err: f64,
    pub r_err: f64,
    /// Translation error parallel to the image plane.
    pub inplane_err: f64,
    /// Translation error along the optical axis.
    pub depth_err: f64,
}

/// Geodesic angle between two rotations, in radians.
pub fn rotation_angle(a: &Quaternion, b: &Quaternion) -> f64 {
    // chord form: exact zero for equal inputs and well conditioned near zero
    let s = if a.dot(b) < 0.0 { -1.0 } else { 1.0 };
    let (a, b) = (a.to_array(), b.to_array());
    let diff: f64 = (0..4).map(|i| (a[i] - s * b[i]).powi(2)).sum::<f64>().sqrt();
    let sum: f64 = (0..4).map(|i| (a[i] + s * b[i]).powi(2)).sum::<f64>().sqrt();
    4.0 * diff.atan2(sum)
}

pub fn pose_error(est: &Pose, truth: &Pose, model: &ObjectModel) -> FrameError {
    pose_error_at(0.0, est, truth, model)
}

pub fn pose_error_at(t: f64, est: &Pose, truth: &Pose, model: &ObjectModel) -> FrameError {
    let d = est.translation - truth.translation;
    let (qe, qt) = match model.symmetry {
        Symmetry::AxisSymmetric(_) => (
            apply_symmetry(model, est).expect("symmetric model").rotation,
            apply_symmetry(model, truth).expect("symmetric model").rotation,
        ),
        Symmetry::None => (est.rotation, truth.rotation),
    };
    FrameError {
        t,
        t_err: d.norm(),
        r_err: rotation_angle(&qe, &qt).to_degrees(),
        inplane_err: d.x.hypot(d.y),
        depth_err: d.z.abs(),
    }
}

/// Empirical CDF as `(threshold, fraction ≤ threshold)` steps, one per distinct value.
pub fn ecdf(values: &[f64]) -> Result<Vec<(f64, f64)>, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, x) in v.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *x => last.1 = frac,
            _ => out.push((*x, frac)),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub median: f64,
}

/// Mean and median; the median of an even-length list is its lower-middle element.
pub fn stat(values: &[f64]) -> Result<Stat, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(Stat {
        mean: v.iter().sum::<f64>() / v.len() as f64,
        median: v[(v.len() - 1) / 2],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub frames: usize,
    pub t_err: Stat,
    pub r_err: Stat,
    pub inplane_err: Stat,
    pub depth_err: Stat,
}

pub fn summarize(run: &[FrameError]) -> Result<Summary, MetricsError> {
    let col = |f: fn(&FrameError) -> f64| stat(&run.iter().map(f).collect::<Vec<_>>());
    Ok(Summary {
        frames: run.len(),
        t_err: col(|e| e.t_err)?,
        r_err: col(|e| e.r_err)?,
        inplane_err: col(|e| e.inplane_err)?,
        depth_err: col(|e| e.depth_err)?,
    })
}

pub const ERRORS_HEADER: &str = "t_s,t_err_m,r_err_deg,inplane_err_m,depth_err_m";

pub fn errors_csv(run: &[FrameError]) -> String {
    let mut out = format!("{ERRORS_HEADER}\n");
    for e in run {
        let _ = writeln!(out, "{},{},{},{},{}", e.t, e.t_err, e.r_err, e.inplane_err, e.depth_err);
    }
    out
}

pub fn ecdf_csv(steps: &[(f64, f64)], unit: &str) -> String {
    let mut out = format!("threshold_{unit},fraction\n");
    for (x, p) in steps {
        let _ = writeln!(out, "{x},{p}");
    }
    out
}

pub fn summary_csv(s: &Summary) -> String {
    let mut out = String::from("metric,mean,median\n");
    for (name, st) in [
        ("t_err_m", s.t_err),
        ("r_err_deg", s.r_err),
        ("inplane_err_m", s.inplane_err),
        ("depth_err_m", s.depth_err),
    ] {
        let _ = writeln!(out, "{name},{},{}", st.mean, st.median);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{Rotation3, UnitQuaternion, Vector3};
    use proptest::prelude::*;

    fn model() -> ObjectModel {
        ObjectModel::cuboid("box", 0.2, 0.3, 0.2)
    }

    fn quat(axis: [f64; 3], angle: f64) -> Quaternion {
        Quaternion::from_axis_angle(&Vector3::from(axis), angle)
    }

    #[test]
    fn identical_poses_have_zero_error() {
        let p = Pose::new(quat([1.0, 2.0, 3.0], 0.7), Vector3::new(0.1, 0.2, 3.0));
        let e = pose_error(&p, &p, &model());
        assert_eq!((e.t_err, e.r_err, e.inplane_err, e.depth_err), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn pure_depth_offset() {
        let truth = Pose::from_translation(Vector3::new(0.0, 0.0, 3.0));
        let est = Pose::from_translation(Vector3::new(0.0, 0.0, 4.0));
        let e = pose_error(&est, &truth, &model());
        assert_eq!((e.t_err, e.depth_err, e.inplane_err), (1.0, 1.0, 0.0));
    }

    #[test]
    fn symmetric_yaw_is_free() {
        let mut m = model();
        m.symmetry = Symmetry::AxisSymmetric(Vector3::z());
        let truth = Pose::new(quat([1.0, 0.0, 0.0], 0.4), Vector3::new(0.0, 0.0, 3.0));
        let est = Pose::new(truth.rotation * quat([0.0, 0.0, 1.0], 1.3), truth.translation);
        assert!(pose_error(&est, &truth, &m).r_err < 1e-9);
        assert!(pose_error(&est, &truth, &model()).r_err > 70.0);
    }

    #[test]
    fn rotation_error_matches_nalgebra() {
        let a = quat([0.3, -1.0, 0.2], 2.0);
        let b = quat([1.0, 0.5, 0.0], -1.1);
        let na = |q: &Quaternion| UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(q.rotation_matrix()));
        assert_relative_eq!(rotation_angle(&a, &b), na(&a).angle_to(&na(&b)), epsilon = 1e-12);
    }

    #[test]
    fn ecdf_examples() {
        assert_eq!(ecdf(&[1.0, 2.0, 3.0]).unwrap(), vec![(1.0, 1.0 / 3.0), (2.0, 2.0 / 3.0), (3.0, 1.0)]);
        assert_eq!(ecdf(&[4.0; 5]).unwrap(), vec![(4.0, 1.0)]);
        assert_eq!(ecdf(&[]), Err(MetricsError::EmptyInput));
    }

    #[test]
    fn summary_examples() {
        let e = FrameError { t: 0.0, t_err: 0.5, r_err: 3.0, inplane_err: 0.3, depth_err: 0.4 };
        let s = summarize(&[e]).unwrap();
        assert_eq!(s.t_err, Stat { mean: 0.5, median: 0.5 });
        assert_eq!(s.r_err, Stat { mean: 3.0, median: 3.0 });
        assert_eq!(stat(&[4.0, 1.0, 3.0, 2.0]).unwrap().median, 2.0);
        let sym = stat(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(sym.mean, sym.median);
        assert_eq!(summarize(&[]), Err(MetricsError::EmptyInput));
    }

    #[test]
    fn csv_headers() {
        let e = FrameError { t: 0.5, t_err: 1.0, r_err: 2.0, inplane_err: 0.6, depth_err: 0.8 };
        assert_eq!(errors_csv(&[e]), format!("{ERRORS_HEADER}\n0.5,1,2,0.6,0.8\n"));
        assert_eq!(ecdf_csv(&[(1.0, 1.0)], "m"), "threshold_m,fraction\n1,1\n");
    }

    fn finite_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![0.0..10.0f64, Just(1.0), Just(2.5)], 1..60)
    }

    proptest! {
        #[test]
        fn ecdf_matches_rank_oracle(v in finite_vec()) {
            let steps = ecdf(&v).unwrap();
            for w in steps.windows(2) {
                prop_assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
            }
            prop_assert_eq!(steps.last().unwrap().1, 1.0);
            for (x, p) in &steps {
                let rank = v.iter().filter(|y| *y <= x).count();
                prop_assert_eq!(*p, rank as f64 / v.len() as f64);
            }
        }

        #[test]
        fn stat_matches_sorted_oracle(v in finite_vec()) {
            let s = stat(&v).unwrap();
            let mut sorted = v.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let lower_mid = if sorted.len() % 2 == 0 { sorted[sorted.len() / 2 - 1] } else { sorted[sorted.len() / 2] };
            prop_assert_eq!(s.median, lower_mid);
            let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
            prop_assert!((s.mean - mean).abs() <= 1e-12 * mean.abs().max(1.0));
        }

        #[test]
        fn errors_invariant_under_rigid_motion(
            ax in prop::array::uniform3(-1.0..1.0f64), ang in -3.0..3.0f64,
            tx in prop::array::uniform3(-2.0..2.0f64),
            d in prop::array::uniform3(-0.3..0.3f64), dang in -0.5..0.5f64,
        ) {
            prop_assume!(Vector3::from(ax).norm() > 1e-3);
            let truth = Pose::new(quat([0.2, 1.0, 0.1], 0.4), Vector3::new(0.1, -0.2, 3.0));
            let est = Pose::new(truth.rotation * quat([1.0, 0.0, 0.3], dang), truth.translation + Vector3::from(d));
            let g = Pose::new(Quaternion::from_axis_angle(&Vector3::from(ax), ang), Vector3::from(tx));
            let e0 = pose_error(&est, &truth, &model());
            // a rigid motion applied in the object frame leaves camera-frame offsets unchanged
            let e1 = pose_error(&est.compose(&g), &truth.compose(&g), &model());
            prop_assert!((e0.r_err - e1.r_err).abs() < 1e-9);
            // a rigid motion of the world preserves translation and rotation error magnitudes
            let e2 = pose_error(&g.compose(&est), &g.compose(&truth), &model());
            prop_assert!((e0.t_err - e2.t_err).abs() < 1e-9);
            prop_assert!((e0.r_err - e2.r_err).abs() < 1e-9);
            prop_assert!((e0.inplane_err.powi(2) + e0.depth_err.powi(2) - e0.t_err.powi(2)).abs() < 1e-9);
            prop_assert!(e0.r_err >= 0.0 && e0.r_err <= 180.0);
        }
    }
}
