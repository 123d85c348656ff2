//! Enclosing rectangles of a random point cloud.
//!
//! cargo run --example min_area_rect

use monopose::geometry::{convex_hull, min_area_rect, to_axis_aligned, Hull};
use nalgebra::Point2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    // an elongated, tilted blob
    let tilt: f64 = 0.6;
    let (c, s) = (tilt.cos(), tilt.sin());
    let points: Vec<Point2<f64>> = (0..40)
        .map(|_| {
            let (u, v) = (rng.random_range(-60.0..60.0), rng.random_range(-15.0..15.0));
            Point2::new(320.0 + c * u - s * v, 240.0 + s * u + c * v)
        })
        .collect();

    if let Hull::Polygon(h) = convex_hull(&points) {
        println!("hull: {} of {} points", h.len(), points.len());
    }
    let rect = min_area_rect(&points).expect("points are not collinear");
    let aabb = to_axis_aligned(&rect);
    println!(
        "angled box:  center ({:.1}, {:.1})  {:.1} x {:.1} px  alpha {:.3} rad  area {:.0}",
        rect.x,
        rect.y,
        rect.w,
        rect.h,
        rect.alpha,
        rect.area()
    );
    println!(
        "its axis-aligned hull: {:.1} x {:.1} px  area {:.0}",
        aabb.w,
        aabb.h,
        aabb.w * aabb.h
    );
    for (i, p) in rect.corners().iter().enumerate() {
        println!("corner {i}: ({:.1}, {:.1})", p.x, p.y);
    }
}
