use nalgebra::Point2;

/// Result of a convex hull computation.
#[derive(Debug, Clone, PartialEq)]
pub enum Hull {
    /// Counter-clockwise vertices, no three consecutive collinear.
    Polygon(Vec<Point2<f64>>),
    /// All inputs lie on a segment (endpoints given).
    Segment(Point2<f64>, Point2<f64>),
    /// All inputs coincide.
    Point(Point2<f64>),
}

impl Hull {
    pub fn polygon(&self) -> Option<&[Point2<f64>]> {
        match self {
            Hull::Polygon(v) => Some(v),
            _ => None,
        }
    }
}

/// z-component of `(a - o) × (b - o)`; positive when `o → a → b` turns left.
pub(crate) fn cross(o: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Andrew's monotone chain.
///
/// Image coordinates have y pointing down, so "counter-clockwise" here is in
/// the mathematical (x right, y up) sense of the signed area.
pub fn convex_hull(points: &[Point2<f64>]) -> Hull {
    let mut pts: Vec<Point2<f64>> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();

    match pts.len() {
        0 => return Hull::Point(Point2::origin()),
        1 => return Hull::Point(pts[0]),
        _ => {}
    }

    let mut lower: Vec<Point2<f64>> = Vec::with_capacity(pts.len());
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<Point2<f64>> = Vec::with_capacity(pts.len());
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);

    if lower.len() < 3 {
        return Hull::Segment(pts[0], pts[pts.len() - 1]);
    }
    Hull::Polygon(lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// O(n³): `i → j` is a hull edge iff every other point lies strictly left of it.
    pub(crate) fn brute_force_hull(points: &[Point2<f64>]) -> Vec<Point2<f64>> {
        let n = points.len();
        let mut next = vec![None; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let all_left = (0..n)
                    .filter(|&k| k != i && k != j)
                    .all(|k| cross(&points[i], &points[j], &points[k]) > 0.0);
                if all_left {
                    next[i] = Some(j);
                }
            }
        }
        let start = (0..n).find(|&i| next[i].is_some()).expect("hull exists");
        let mut out = vec![points[start]];
        let mut cur = next[start].unwrap();
        while cur != start {
            out.push(points[cur]);
            cur = next[cur].unwrap();
        }
        out
    }

    fn rotate_to_min(v: &[Point2<f64>]) -> Vec<Point2<f64>> {
        let k = (0..v.len())
            .min_by(|&a, &b| v[a].x.total_cmp(&v[b].x).then(v[a].y.total_cmp(&v[b].y)))
            .unwrap();
        v[k..].iter().chain(&v[..k]).copied().collect()
    }

    #[test]
    fn square_with_center() {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.5, 0.5),
        ];
        let hull = convex_hull(&pts);
        assert_eq!(
            hull,
            Hull::Polygon(vec![pts[0], pts[1], pts[2], pts[3]])
        );
    }

    #[test]
    fn triangle_is_ccw() {
        let pts = [Point2::new(0.0, 0.0), Point2::new(0.0, 1.0), Point2::new(1.0, 0.0)];
        let hull = convex_hull(&pts);
        let v = hull.polygon().unwrap();
        assert_eq!(v.len(), 3);
        assert!(cross(&v[0], &v[1], &v[2]) > 0.0);
    }

    #[test]
    fn collinear_points_collapse_to_segment() {
        let pts: Vec<_> = (0..6).map(|i| Point2::new(i as f64, 2.0 * i as f64)).collect();
        assert_eq!(convex_hull(&pts), Hull::Segment(pts[0], pts[5]));
        assert_eq!(convex_hull(&[pts[2], pts[2]]), Hull::Point(pts[2]));
    }

    #[test]
    fn edge_midpoints_are_dropped() {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(0.0, 2.0),
        ];
        assert_eq!(convex_hull(&pts).polygon().unwrap().len(), 4);
    }

    #[test]
    fn random_clouds_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let pts: Vec<_> = (0..100)
                .map(|_| Point2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)))
                .collect();
            let got = convex_hull(&pts);
            let want = brute_force_hull(&pts);
            assert_eq!(rotate_to_min(got.polygon().unwrap()), rotate_to_min(&want));
        }
    }
}
