//! Measurement verification gates.
//!
//! Detected boxes are screened with a class aspect-ratio range and a minimum
//! distance to the image border. Tracked boxes are checked against the
//! filter's predicted box distribution with a Mahalanobis/chi-squared test,
//! and the predicted box is z-tested against each image edge.

pub mod dist;

use std::collections::BTreeMap;

use log::warn;
use nalgebra::Vector5;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{AxisAlignedBox, CameraModel};
use crate::ukf::MeasurementStats;

pub use dist::{chi2_inv_cdf, normal_quantile};

/// Degrees of freedom of the box measurement `[x, y, w, h, α]`.
pub const MEAS_DOF: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateError {
    #[error("innovation covariance is singular")]
    SingularCovariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AspectBounds {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateConfig {
    pub chi2_quantile: f64,
    pub ztest_quantile: f64,
    pub d_min: f64,
    /// Valid `w̃ / h̃` range per class label.
    pub aspect_ratio: BTreeMap<String, AspectBounds>,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            chi2_quantile: 0.997,
            ztest_quantile: 0.997,
            d_min: 5.0,
            aspect_ratio: BTreeMap::new(),
        }
    }
}

impl GateConfig {
    /// Human-readable list of invariant violations; empty when valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.chi2_quantile > 0.0 && self.chi2_quantile < 1.0) {
            out.push(format!("gate.chi2_quantile = {} must lie in (0, 1)", self.chi2_quantile));
        }
        if !(self.ztest_quantile > 0.0 && self.ztest_quantile < 1.0) {
            out.push(format!("gate.ztest_quantile = {} must lie in (0, 1)", self.ztest_quantile));
        }
        if !(self.d_min >= 0.0) {
            out.push(format!("gate.d_min_px = {} must be >= 0", self.d_min));
        }
        for (class, b) in &self.aspect_ratio {
            if !(b.min < b.max) {
                out.push(format!(
                    "gate.aspect_ratio.{class}: gamma_min ({}) must be < gamma_max ({})",
                    b.min, b.max
                ));
            }
        }
        out
    }

    pub fn chi2_threshold(&self) -> f64 {
        chi2_inv_cdf(self.chi2_quantile, MEAS_DOF)
    }
}

/// Eq. 1 distance of a box vector from the predicted distribution, with the
/// angle residual wrapped on the box-angle circle.
pub fn mahalanobis(z: &Vector5<f64>, stats: &MeasurementStats) -> Result<f64, GateError> {
    let nu = stats.innovation(z);
    let chol = stats.s_hat.cholesky().ok_or(GateError::SingularCovariance)?;
    let y = chol
        .l()
        .solve_lower_triangular(&nu)
        .ok_or(GateError::SingularCovariance)?;
    Ok(y.norm())
}

/// Passes iff `d² <= χ²⁻¹(quantile, dof)`.
pub fn chi2_gate(d: f64, dof: u32, cfg: &GateConfig) -> bool {
    d * d <= chi2_inv_cdf(cfg.chi2_quantile, dof)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImageEdge {
    Left,
    Right,
    Top,
    Bottom,
}

impl ImageEdge {
    pub const ALL: [ImageEdge; 4] = [ImageEdge::Left, ImageEdge::Right, ImageEdge::Top, ImageEdge::Bottom];
}

/// First-order statistics of the predicted box extremity nearest one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeMargin {
    pub edge: ImageEdge,
    /// Signed distance (px) from the box extremity to the edge, positive inside.
    pub margin: f64,
    pub std: f64,
    /// Gradient of `margin` with respect to `[x, y, w, h, α]`.
    pub gradient: Vector5<f64>,
}

impl EdgeMargin {
    /// Probability that the extremity lies beyond the edge.
    pub fn crossing_probability(&self) -> f64 {
        if self.std > 0.0 {
            dist::normal_cdf(-self.margin / self.std)
        } else if self.margin < 0.0 {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTests {
    pub left: bool,
    pub right: bool,
    pub top: bool,
    pub bottom: bool,
}

impl EdgeTests {
    pub fn all_pass(&self) -> bool {
        self.left && self.right && self.top && self.bottom
    }

    pub fn get(&self, edge: ImageEdge) -> bool {
        match edge {
            ImageEdge::Left => self.left,
            ImageEdge::Right => self.right,
            ImageEdge::Top => self.top,
            ImageEdge::Bottom => self.bottom,
        }
    }
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Margins of the predicted box to the four image edges, with standard
/// deviations propagated from the diagonal of `Ŝ`.
pub fn edge_margins(stats: &MeasurementStats, camera: &CameraModel) -> [EdgeMargin; 4] {
    let z = &stats.z_hat;
    let (x, y, w, h, a) = (z[0], z[1], z[2], z[3], z[4]);
    let (c, s) = (a.cos(), a.sin());
    let (ac, as_) = (c.abs(), s.abs());
    // half extents along image x and y
    let ex = 0.5 * (w * ac + h * as_);
    let ey = 0.5 * (w * as_ + h * ac);
    let dex = Vector5::new(0.0, 0.0, 0.5 * ac, 0.5 * as_, 0.5 * (-w * s * sign(c) + h * c * sign(s)));
    let dey = Vector5::new(0.0, 0.0, 0.5 * as_, 0.5 * ac, 0.5 * (w * c * sign(s) - h * s * sign(c)));
    let (width, height) = (camera.width_f(), camera.height_f());
    let diag = stats.s_hat.diagonal();

    let make = |edge, margin: f64, gradient: Vector5<f64>| {
        let var = gradient.component_mul(&gradient).dot(&diag);
        EdgeMargin {
            edge,
            margin,
            std: var.max(0.0).sqrt(),
            gradient,
        }
    };
    [
        make(ImageEdge::Left, x - ex, Vector5::new(1.0, 0.0, 0.0, 0.0, 0.0) - dex),
        make(ImageEdge::Right, width - (x + ex), Vector5::new(-1.0, 0.0, 0.0, 0.0, 0.0) - dex),
        make(ImageEdge::Top, y - ey, Vector5::new(0.0, 1.0, 0.0, 0.0, 0.0) - dey),
        make(ImageEdge::Bottom, height - (y + ey), Vector5::new(0.0, -1.0, 0.0, 0.0, 0.0) - dey),
    ]
}

/// One-sided z-test per edge: fails when the probability that the box
/// extends past that edge exceeds `1 − ztest_quantile`.
pub fn edge_ztest(stats: &MeasurementStats, camera: &CameraModel, cfg: &GateConfig) -> EdgeTests {
    let limit = 1.0 - cfg.ztest_quantile;
    let m = edge_margins(stats, camera);
    let pass = |i: usize| m[i].crossing_probability() <= limit;
    EdgeTests {
        left: pass(0),
        right: pass(1),
        top: pass(2),
        bottom: pass(3),
    }
}

/// `Γ_min(c) < w̃ / h̃ < Γ_max(c)`; classes without bounds pass.
pub fn aspect_ratio_gate(b: &AxisAlignedBox, class: &str, cfg: &GateConfig) -> bool {
    match cfg.aspect_ratio.get(class) {
        Some(bounds) => {
            let r = b.w / b.h;
            bounds.min < r && r < bounds.max
        }
        None => {
            warn!("no aspect-ratio bounds configured for class {class:?}; accepting box");
            true
        }
    }
}

/// `d_min < x̃ − w̃/2 < x̃ + w̃/2 < W − d_min`, and likewise in y.
pub fn edge_distance_gate(b: &AxisAlignedBox, camera: &CameraModel, cfg: &GateConfig) -> bool {
    let d = cfg.d_min;
    d < b.left()
        && b.left() < b.right()
        && b.right() < camera.width_f() - d
        && d < b.top()
        && b.top() < b.bottom()
        && b.bottom() < camera.height_f() - d
}
