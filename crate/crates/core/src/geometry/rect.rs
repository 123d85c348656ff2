use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{Point2, Vector2, Vector5};
use serde::{Deserialize, Serialize};

use super::hull::{convex_hull, Hull};
use super::{project_points, CameraModel, GeometryError, Pose, VertexSet};

/// Relative tolerance under which `w` and `h` are treated as equal.
const SQUARE_TOL: f64 = 1e-9;
/// Relative tolerance under which two candidate rectangle areas tie.
const AREA_TIE_TOL: f64 = 1e-12;

/// Rotated rectangle `[x, y, w, h, α]` in pixel coordinates.
///
/// Normalized so that `h <= w` and `α ∈ [-π/2, π/2)`. When `w == h` the angle
/// is only defined modulo π/2 and is reduced to `[-π/4, π/4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngledBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub alpha: f64,
}

/// Axis-aligned box `[x, y, w, h]`, the detector's output form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisAlignedBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

/// Zero-height fit returned for collinear input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateFit {
    pub center: Point2<f64>,
    pub length: f64,
    pub alpha: f64,
}

/// Brings `(w, h, θ)` to the canonical representative described on [`AngledBox`].
pub fn normalize_rect(mut w: f64, mut h: f64, mut theta: f64) -> (f64, f64, f64) {
    if h > w {
        std::mem::swap(&mut w, &mut h);
        theta += FRAC_PI_2;
    }
    if (w - h) <= SQUARE_TOL * w {
        theta -= FRAC_PI_2 * ((theta + FRAC_PI_4) / FRAC_PI_2).floor();
    } else {
        theta -= PI * ((theta + FRAC_PI_2) / PI).floor();
    }
    (w, h, theta)
}

impl AngledBox {
    /// Builds a box and normalizes its `(w, h, α)` representation.
    pub fn new(x: f64, y: f64, w: f64, h: f64, alpha: f64) -> Result<Self, GeometryError> {
        if !(w > 0.0 && h > 0.0) || !(x.is_finite() && y.is_finite() && alpha.is_finite()) {
            return Err(GeometryError::InvalidBox);
        }
        let (w, h, alpha) = normalize_rect(w, h, alpha);
        Ok(Self { x, y, w, h, alpha })
    }

    pub fn as_vector(&self) -> Vector5<f64> {
        Vector5::new(self.x, self.y, self.w, self.h, self.alpha)
    }

    pub fn from_vector(v: &Vector5<f64>) -> Result<Self, GeometryError> {
        Self::new(v[0], v[1], v[2], v[3], v[4])
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// Corners in order around the rectangle.
    pub fn corners(&self) -> [Point2<f64>; 4] {
        let u = Vector2::new(self.alpha.cos(), self.alpha.sin()) * (self.w / 2.0);
        let n = Vector2::new(-self.alpha.sin(), self.alpha.cos()) * (self.h / 2.0);
        let c = Point2::new(self.x, self.y);
        [c - u - n, c + u - n, c + u + n, c - u + n]
    }
}

impl From<AxisAlignedBox> for AngledBox {
    fn from(b: AxisAlignedBox) -> Self {
        let (w, h, alpha) = normalize_rect(b.w, b.h, 0.0);
        AngledBox { x: b.x, y: b.y, w, h, alpha }
    }
}

impl AxisAlignedBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self, GeometryError> {
        if !(w > 0.0 && h > 0.0) || !(x.is_finite() && y.is_finite()) {
            return Err(GeometryError::InvalidBox);
        }
        Ok(Self { x, y, w, h })
    }

    pub fn left(&self) -> f64 {
        self.x - self.w / 2.0
    }

    pub fn right(&self) -> f64 {
        self.x + self.w / 2.0
    }

    pub fn top(&self) -> f64 {
        self.y - self.h / 2.0
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h / 2.0
    }

    pub fn from_bounds(left: f64, top: f64, right: f64, bottom: f64) -> Result<Self, GeometryError> {
        Self::new((left + right) / 2.0, (top + bottom) / 2.0, right - left, bottom - top)
    }
}

/// Tight axis-aligned bounds of a rotated rectangle.
pub fn to_axis_aligned(b: &AngledBox) -> AxisAlignedBox {
    let (c, s) = (b.alpha.cos().abs(), b.alpha.sin().abs());
    AxisAlignedBox {
        x: b.x,
        y: b.y,
        w: b.w * c + b.h * s,
        h: b.w * s + b.h * c,
    }
}

struct Candidate {
    area: f64,
    rect: AngledBox,
}

/// Minimum-area enclosing rectangle by rotating calipers over the hull edges.
pub fn min_area_rect(points: &[Point2<f64>]) -> Result<AngledBox, GeometryError> {
    let hull = match convex_hull(points) {
        Hull::Polygon(h) => h,
        Hull::Segment(a, b) => {
            let d = b - a;
            let (_, _, alpha) = normalize_rect(d.norm(), 0.0, d.y.atan2(d.x));
            return Err(GeometryError::Degenerate(DegenerateFit {
                center: nalgebra::center(&a, &b),
                length: d.norm(),
                alpha,
            }));
        }
        Hull::Point(p) => {
            return Err(GeometryError::Degenerate(DegenerateFit {
                center: p,
                length: 0.0,
                alpha: 0.0,
            }))
        }
    };

    let n = hull.len();
    let origin = hull[0].coords;
    let pt = |i: usize| hull[i % n].coords - origin;

    let edge_dir = |i: usize| (pt(i + 1) - pt(i)).normalize();
    let normal = |u: &Vector2<f64>| Vector2::new(-u.y, u.x);

    // Initial caliper positions for edge 0 by full scan.
    let u0 = edge_dir(0);
    let n0 = normal(&u0);
    let argmax = |f: &dyn Fn(usize) -> f64| (0..n).max_by(|&a, &b| f(a).total_cmp(&f(b))).unwrap();
    let mut i_max_u = argmax(&|k| pt(k).dot(&u0));
    let mut i_min_u = argmax(&|k| -pt(k).dot(&u0));
    let mut i_max_n = argmax(&|k| pt(k).dot(&n0));

    let mut best: Option<Candidate> = None;
    for i in 0..n {
        let u = edge_dir(i);
        let nn = normal(&u);
        // Advance each caliper counter-clockwise while it improves.
        for _ in 0..n {
            if pt(i_max_u + 1).dot(&u) > pt(i_max_u).dot(&u) {
                i_max_u = (i_max_u + 1) % n;
            } else {
                break;
            }
        }
        for _ in 0..n {
            if pt(i_min_u + 1).dot(&u) < pt(i_min_u).dot(&u) {
                i_min_u = (i_min_u + 1) % n;
            } else {
                break;
            }
        }
        for _ in 0..n {
            if pt(i_max_n + 1).dot(&nn) > pt(i_max_n).dot(&nn) {
                i_max_n = (i_max_n + 1) % n;
            } else {
                break;
            }
        }

        let (lo_u, hi_u) = (pt(i_min_u).dot(&u), pt(i_max_u).dot(&u));
        let (lo_n, hi_n) = (pt(i).dot(&nn), pt(i_max_n).dot(&nn));
        let (w, h) = (hi_u - lo_u, hi_n - lo_n);
        let center = origin + u * ((lo_u + hi_u) / 2.0) + nn * ((lo_n + hi_n) / 2.0);
        let (w, h, alpha) = normalize_rect(w, h, u.y.atan2(u.x));
        let cand = Candidate {
            area: w * h,
            rect: AngledBox { x: center.x, y: center.y, w, h, alpha },
        };
        best = match best {
            None => Some(cand),
            Some(b) => {
                let tol = AREA_TIE_TOL * b.area.max(cand.area);
                if cand.area < b.area - tol
                    || ((cand.area - b.area).abs() <= tol && cand.rect.alpha.abs() < b.rect.alpha.abs())
                {
                    Some(cand)
                } else {
                    Some(b)
                }
            }
        };
    }
    let rect = best.expect("hull has at least 3 edges").rect;
    if !(rect.h > 0.0) {
        return Err(GeometryError::Degenerate(DegenerateFit {
            center: Point2::new(rect.x, rect.y),
            length: rect.w,
            alpha: rect.alpha,
        }));
    }
    Ok(rect)
}

/// The measurement function: enclosing rectangle of the projected vertices.
pub fn predict_measurement(
    camera: &CameraModel,
    pose: &Pose,
    verts: &VertexSet,
) -> Result<AngledBox, GeometryError> {
    let px = project_points(camera, pose, verts)?;
    min_area_rect(&px)
}
