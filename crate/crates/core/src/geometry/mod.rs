//! Rigid-body math, pinhole projection and the enclosing-rectangle
//! computation that together form the measurement function.

mod camera;
mod hull;
mod quaternion;
mod rect;

pub use camera::{project_points, CameraModel, Pose, VertexSet, DEPTH_EPSILON};
pub use hull::{convex_hull, Hull};
pub use quaternion::{quat_boxminus, quat_boxplus, quat_multiply, wrap_pi, Quaternion};
pub use rect::{
    min_area_rect, normalize_rect, predict_measurement, to_axis_aligned, AngledBox, AxisAlignedBox,
    DegenerateFit,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("vertex {index} is behind the camera (depth {depth:.4} m)")]
    BehindCamera { index: usize, depth: f64 },
    #[error("degenerate point set: enclosing rectangle has zero height")]
    Degenerate(DegenerateFit),
    #[error("invalid camera intrinsics")]
    InvalidCamera,
    #[error("invalid vertex set: {0}")]
    InvalidVertexSet(&'static str),
    #[error("box width and height must be positive and finite")]
    InvalidBox,
}
