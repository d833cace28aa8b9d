//! Smallest enclosing circle by randomized incremental construction
//! (expected linear time).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geo::PlanarPoint;

const SHUFFLE_SEED: u64 = 0x6d65_635f_7368_7566;
const REL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: PlanarPoint,
    pub radius: f64,
}

impl Circle {
    pub fn contains(&self, p: &PlanarPoint) -> bool {
        self.center.dist(p) <= self.radius + REL_EPS * self.radius.max(1.0)
    }

    fn diameter(a: PlanarPoint, b: PlanarPoint) -> Self {
        let center = PlanarPoint::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
        Self { center, radius: center.dist(&a).max(center.dist(&b)) }
    }

    /// Circle through three points; `None` when they are collinear.
    fn circumscribed(a: PlanarPoint, b: PlanarPoint, c: PlanarPoint) -> Option<Self> {
        // Translate to the bounding-box midpoint for accuracy.
        let ox = (a.x.min(b.x).min(c.x) + a.x.max(b.x).max(c.x)) / 2.0;
        let oy = (a.y.min(b.y).min(c.y) + a.y.max(b.y).max(c.y)) / 2.0;
        let (ax, ay) = (a.x - ox, a.y - oy);
        let (bx, by) = (b.x - ox, b.y - oy);
        let (cx, cy) = (c.x - ox, c.y - oy);
        let d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0;
        if d == 0.0 {
            return None;
        }
        let a2 = ax * ax + ay * ay;
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let x = ox + (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
        let y = oy + (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
        let center = PlanarPoint::new(x, y);
        let radius = center.dist(&a).max(center.dist(&b)).max(center.dist(&c));
        Some(Self { center, radius })
    }
}

fn cross(a: &PlanarPoint, b: &PlanarPoint, c: &PlanarPoint) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// The smallest circle containing every point; `None` for no points.
/// Collinear and duplicate points are handled by the two-point cases.
pub fn minimum_enclosing_circle(points: &[PlanarPoint]) -> Option<Circle> {
    let mut pts = points.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(SHUFFLE_SEED ^ pts.len() as u64);
    pts.shuffle(&mut rng);

    let mut circle: Option<Circle> = None;
    for i in 0..pts.len() {
        let p = pts[i];
        if circle.is_none_or(|c| !c.contains(&p)) {
            circle = Some(with_one_boundary(&pts[..i], p));
        }
    }
    circle
}

fn with_one_boundary(pts: &[PlanarPoint], p: PlanarPoint) -> Circle {
    let mut c = Circle { center: p, radius: 0.0 };
    for (i, q) in pts.iter().enumerate() {
        if !c.contains(q) {
            c = if c.radius == 0.0 {
                Circle::diameter(p, *q)
            } else {
                with_two_boundary(&pts[..i], p, *q)
            };
        }
    }
    c
}

fn with_two_boundary(pts: &[PlanarPoint], p: PlanarPoint, q: PlanarPoint) -> Circle {
    let base = Circle::diameter(p, q);
    let mut left: Option<Circle> = None;
    let mut right: Option<Circle> = None;
    for r in pts {
        if base.contains(r) {
            continue;
        }
        let side = cross(&p, &q, r);
        let Some(c) = Circle::circumscribed(p, q, *r) else { continue };
        let offset = cross(&p, &q, &c.center);
        if side > 0.0 && left.is_none_or(|l| offset > cross(&p, &q, &l.center)) {
            left = Some(c);
        } else if side < 0.0 && right.is_none_or(|rc| offset < cross(&p, &q, &rc.center)) {
            right = Some(c);
        }
    }
    match (left, right) {
        (None, None) => base,
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (Some(l), Some(r)) => {
            if l.radius <= r.radius {
                l
            } else {
                r
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    /// Smallest enclosing circle among all pair-diameter and triple
    /// circumcircles, O(n^4).
    fn oracle(points: &[PlanarPoint]) -> f64 {
        if points.len() == 1 {
            return 0.0;
        }
        let encloses = |c: &Circle| points.iter().all(|p| c.center.dist(p) <= c.radius * (1.0 + 1e-9) + 1e-9);
        let mut best = f64::INFINITY;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let c = Circle::diameter(points[i], points[j]);
                if c.radius < best && encloses(&c) {
                    best = c.radius;
                }
                for k in j + 1..points.len() {
                    if let Some(c) = Circle::circumscribed(points[i], points[j], points[k]) {
                        if c.radius < best && encloses(&c) {
                            best = c.radius;
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn single_and_pair() {
        let a = PlanarPoint::new(3.0, -2.0);
        let c = minimum_enclosing_circle(&[a]).unwrap();
        assert_eq!((c.center, c.radius), (a, 0.0));

        let b = PlanarPoint::new(7.0, 1.0);
        let c = minimum_enclosing_circle(&[a, b]).unwrap();
        assert_eq!(c.center, PlanarPoint::new(5.0, -0.5));
        assert_relative_eq!(c.radius, 2.5, epsilon = 1e-12);
        assert!(minimum_enclosing_circle(&[]).is_none());
    }

    #[test]
    fn collinear_and_duplicates() {
        let pts: Vec<PlanarPoint> = (0..7).map(|i| PlanarPoint::new(i as f64, 2.0 * i as f64)).collect();
        let c = minimum_enclosing_circle(&pts).unwrap();
        assert_relative_eq!(c.radius, 0.5 * (36.0f64 + 144.0).sqrt(), epsilon = 1e-9);
        let dup = vec![PlanarPoint::new(1.0, 1.0); 5];
        assert_eq!(minimum_enclosing_circle(&dup).unwrap().radius, 0.0);
    }

    #[test]
    fn matches_oracle_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let n = rng.gen_range(1..=50);
            let pts: Vec<PlanarPoint> = (0..n)
                .map(|_| PlanarPoint::new(rng.gen_range(-1000.0..1000.0), rng.gen_range(-1000.0..1000.0)))
                .collect();
            let c = minimum_enclosing_circle(&pts).unwrap();
            assert!(pts.iter().all(|p| c.center.dist(p) <= c.radius + 1e-6));
            assert_relative_eq!(c.radius, oracle(&pts), epsilon = 1e-6);
        }
    }
}
