use nalgebra::{Point2, Vector3};
use serde::{Deserialize, Serialize};

use super::{GeometryError, Quaternion};

/// Minimum camera-frame depth (m) a vertex needs to be projected.
pub const DEPTH_EPSILON: f64 = 1e-3;

/// Rigid transform taking object-frame points into the camera frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub rotation: Quaternion,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn new(rotation: Quaternion, translation: Vector3<f64>) -> Self {
        Self {
            rotation: rotation.normalize(),
            translation,
        }
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self::new(Quaternion::identity(), translation)
    }

    pub fn transform(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.rotate(p) + self.translation
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose::new(
            self.rotation * other.rotation,
            self.rotation.rotate(&other.translation) + self.translation,
        )
    }

    pub fn inverse(&self) -> Pose {
        let r = self.rotation.inverse();
        Pose::new(r, -r.rotate(&self.translation))
    }
}

/// Pinhole intrinsics plus image size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl CameraModel {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: u32, height: u32) -> Result<Self, GeometryError> {
        let cam = Self { fx, fy, cx, cy, width, height };
        cam.check()?;
        Ok(cam)
    }

    pub fn check(&self) -> Result<(), GeometryError> {
        if !(self.fx > 0.0 && self.fy > 0.0) || self.width == 0 || self.height == 0 {
            return Err(GeometryError::InvalidCamera);
        }
        Ok(())
    }

    /// Projects a camera-frame point. Caller guarantees positive depth.
    pub fn project(&self, p: &Vector3<f64>) -> Point2<f64> {
        Point2::new(self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy)
    }

    /// Back-projects pixel `(u, v)` to the camera-frame point at depth `z`.
    pub fn back_project(&self, u: f64, v: f64, z: f64) -> Vector3<f64> {
        Vector3::new((u - self.cx) * z / self.fx, (v - self.cy) * z / self.fy, z)
    }

    pub fn width_f(&self) -> f64 {
        f64::from(self.width)
    }

    pub fn height_f(&self) -> f64 {
        f64::from(self.height)
    }
}

impl Default for CameraModel {
    fn default() -> Self {
        Self {
            fx: 500.0,
            fy: 500.0,
            cx: 320.0,
            cy: 240.0,
            width: 640,
            height: 480,
        }
    }
}

/// Sparse 3D point set approximating an object's volume, in the object frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSet {
    vertices: Vec<Vector3<f64>>,
}

impl VertexSet {
    pub fn new(vertices: Vec<Vector3<f64>>) -> Result<Self, GeometryError> {
        if vertices.len() < 4 {
            return Err(GeometryError::InvalidVertexSet("fewer than 4 vertices"));
        }
        let a = vertices[0];
        let far = vertices
            .iter()
            .map(|v| (v - a).norm())
            .fold(0.0f64, f64::max);
        if far < 1e-12 {
            return Err(GeometryError::InvalidVertexSet("all vertices coincide"));
        }
        let b = *vertices
            .iter()
            .max_by(|p, q| (*p - a).norm().total_cmp(&(*q - a).norm()))
            .expect("non-empty");
        let dir = (b - a).normalize();
        let off_line = vertices
            .iter()
            .map(|v| (v - a).cross(&dir).norm())
            .fold(0.0f64, f64::max);
        if off_line < 1e-9 * far {
            return Err(GeometryError::InvalidVertexSet("vertices are collinear"));
        }
        Ok(Self { vertices })
    }

    /// The 8 corners of a `width × height × length` box centered at the origin,
    /// with width along x, height along y and length along z.
    pub fn cuboid(width: f64, height: f64, length: f64) -> Self {
        let (a, b, c) = (width / 2.0, height / 2.0, length / 2.0);
        let mut v = Vec::with_capacity(8);
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                for sz in [-1.0, 1.0] {
                    v.push(Vector3::new(sx * a, sy * b, sz * c));
                }
            }
        }
        Self { vertices: v }
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Pinhole projection of every vertex after applying `pose`.
pub fn project_points(
    camera: &CameraModel,
    pose: &Pose,
    verts: &VertexSet,
) -> Result<Vec<Point2<f64>>, GeometryError> {
    let r = pose.rotation.rotation_matrix();
    verts
        .vertices()
        .iter()
        .enumerate()
        .map(|(index, v)| {
            let pc = r * v + pose.translation;
            if pc.z <= DEPTH_EPSILON || !pc.z.is_finite() {
                Err(GeometryError::BehindCamera { index, depth: pc.z })
            } else {
                Ok(camera.project(&pc))
            }
        })
        .collect()
}
