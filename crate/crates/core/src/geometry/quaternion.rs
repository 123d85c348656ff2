use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Unit quaternion `w + xi + yj + zk` representing a 3D rotation.
///
/// Every constructor and operation returns a normalized value with `w >= 0`,
/// so `q` and `-q` collapse to a single representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Default for Quaternion {
    fn default() -> Self {
        Self::identity()
    }
}

impl Quaternion {
    pub const fn identity() -> Self {
        Self { w: 1.0, x: 0.0, y: 0.0, z: 0.0 }
    }

    /// Builds a quaternion from raw components and normalizes it.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }.normalize()
    }

    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 {
            return Self::identity();
        }
        Self::exp(&(axis * (angle / n)))
    }

    /// Exponential map of a rotation vector.
    pub fn exp(rotvec: &Vector3<f64>) -> Self {
        let theta = rotvec.norm();
        let half = 0.5 * theta;
        // sin(θ/2)/θ, series near zero
        let k = if theta < 1e-8 {
            0.5 - theta * theta / 48.0
        } else {
            half.sin() / theta
        };
        Self {
            w: half.cos(),
            x: rotvec.x * k,
            y: rotvec.y * k,
            z: rotvec.z * k,
        }
        .normalize()
    }

    /// Logarithm map: rotation vector with magnitude in `[0, π]`.
    pub fn log(&self) -> Vector3<f64> {
        let q = self.normalize();
        let v = Vector3::new(q.x, q.y, q.z);
        let s = v.norm();
        if s < 1e-12 {
            // θ ≈ 2·v for tiny angles
            return v * 2.0;
        }
        let theta = 2.0 * s.atan2(q.w);
        v * (theta / s)
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalize(&self) -> Self {
        let n = self.norm();
        let s = if self.w < 0.0 { -1.0 / n } else { 1.0 / n };
        Self {
            w: self.w * s,
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn inverse(&self) -> Self {
        self.conjugate()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Hamilton product `self ⊗ other`, normalized.
    pub fn multiply(&self, b: &Self) -> Self {
        let a = self;
        Self {
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        }
        .normalize()
    }

    /// `self ⊗ exp(delta)`: perturbation expressed in the body frame.
    pub fn boxplus(&self, delta: &Vector3<f64>) -> Self {
        self.multiply(&Self::exp(delta))
    }

    /// `log(other⁻¹ ⊗ self)`, the body-frame rotation vector taking `other` to `self`.
    pub fn boxminus(&self, other: &Self) -> Vector3<f64> {
        other.inverse().multiply(self).log()
    }

    /// Geodesic angle to `other` in radians, in `[0, π]`.
    pub fn angle_to(&self, other: &Self) -> f64 {
        let d = self.dot(other).abs().min(1.0);
        2.0 * d.acos()
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        let Self { w, x, y, z } = *self;
        Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation_matrix() * v
    }

    /// Spherical linear interpolation along the shorter arc.
    pub fn slerp(&self, other: &Self, s: f64) -> Self {
        let delta = other.boxminus(self);
        self.boxplus(&(delta * s))
    }

    /// Splits `self = swing ⊗ twist` where `twist` rotates about the body-frame `axis`.
    pub fn swing_twist(&self, axis: &Vector3<f64>) -> (Self, Self) {
        let a = axis.normalize();
        let v = Vector3::new(self.x, self.y, self.z);
        let p = a * v.dot(&a);
        let twist = if p.norm() < 1e-15 && self.w.abs() < 1e-15 {
            // 180° swing exactly perpendicular to the axis
            Self::identity()
        } else {
            Self::new(self.w, p.x, p.y, p.z)
        };
        let swing = self.multiply(&twist.inverse());
        (swing, twist)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: Self) -> Self {
        self.multiply(&rhs)
    }
}

/// Free-function forms matching the rest of the crate's vocabulary.
pub fn quat_multiply(a: &Quaternion, b: &Quaternion) -> Quaternion {
    a.multiply(b)
}

pub fn quat_boxplus(q: &Quaternion, delta: &Vector3<f64>) -> Quaternion {
    q.boxplus(delta)
}

pub fn quat_boxminus(a: &Quaternion, b: &Quaternion) -> Vector3<f64> {
    a.boxminus(b)
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_pi(a: f64) -> f64 {
    a - 2.0 * PI * ((a + PI) / (2.0 * PI)).floor()
}
