//! Vertex sets for the shipped object shapes.
//!
//! Object frame: x across (width), y up the object (height), z along its depth
//! (length), origin at the bounding-box center.

use std::f64::consts::TAU;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::dynamics::DynamicsSpec;
use crate::geometry::VertexSet;
use crate::tracker::{Extent, ObjectModel, Symmetry};

/// Number of samples on each circular rim.
pub const RIM_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// The 8 corners of the bounding cuboid.
    #[default]
    Box,
    /// 12 points: an L-shaped side profile (base plus open screen) extruded across the width.
    Laptop,
    /// Top and bottom rims of a cylinder, inscribed in the bounding box.
    Mug,
    /// Wide top rim and a half-radius foot rim.
    Bowl,
    /// Same rims as [`Shape::Mug`], but rotationally symmetric about y.
    Cylinder,
}

impl Shape {
    pub fn vertices(&self, extent: &Extent) -> VertexSet {
        let (hw, hh, hl) = (extent.width / 2.0, extent.height / 2.0, extent.length / 2.0);
        let pts = match self {
            Shape::Box => {
                let mut v = Vec::with_capacity(8);
                for sx in [-1.0, 1.0] {
                    for sy in [-1.0, 1.0] {
                        for sz in [-1.0, 1.0] {
                            v.push(Vector3::new(sx * hw, sy * hh, sz * hl));
                        }
                    }
                }
                v
            }
            Shape::Laptop => {
                // base and screen thickness
                let t = 0.1 * extent.height.min(extent.length);
                let profile = [
                    (-hh, -hl),
                    (-hh + t, -hl),
                    (-hh + t, hl - t),
                    (hh, hl - t),
                    (hh, hl),
                    (-hh, hl),
                ];
                [-hw, hw]
                    .iter()
                    .flat_map(|&x| profile.iter().map(move |&(y, z)| Vector3::new(x, y, z)))
                    .collect()
            }
            Shape::Mug | Shape::Cylinder => rim(hw, hl, hh).into_iter().chain(rim(hw, hl, -hh)).collect(),
            Shape::Bowl => rim(hw, hl, hh).into_iter().chain(rim(hw / 2.0, hl / 2.0, -hh)).collect(),
        };
        VertexSet::new(pts).expect("shipped shapes are non-degenerate")
    }

    pub fn symmetry(&self) -> Symmetry {
        match self {
            Shape::Bowl | Shape::Cylinder => Symmetry::AxisSymmetric(Vector3::y()),
            _ => Symmetry::None,
        }
    }

    pub fn model(&self, class_label: &str, extent: Extent) -> ObjectModel {
        ObjectModel {
            class_label: class_label.to_owned(),
            verts: self.vertices(&extent),
            extent,
            dynamics: DynamicsSpec::default(),
            symmetry: self.symmetry(),
            init_orientation: None,
        }
    }
}

/// Elliptic rim in the plane `y = y`, with semi-axes along x and z.
fn rim(rx: f64, rz: f64, y: f64) -> Vec<Vector3<f64>> {
    (0..RIM_SAMPLES)
        .map(|k| {
            let a = TAU * k as f64 / RIM_SAMPLES as f64;
            Vector3::new(rx * a.cos(), y, rz * a.sin())
        })
        .collect()
}
