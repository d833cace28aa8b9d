use serde::{Deserialize, Serialize};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A point in meters on a local tangent plane (x east, y north).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &PlanarPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Equirectangular projection about a fixed origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub origin_lat: f64,
    pub origin_lon: f64,
    cos_lat: f64,
}

impl Projection {
    pub fn new(origin_lat: f64, origin_lon: f64) -> Self {
        Self { origin_lat, origin_lon, cos_lat: origin_lat.to_radians().cos() }
    }

    /// Origin at the mean of the given `(lat, lon)` pairs (0, 0 when empty).
    pub fn centered_on<I: IntoIterator<Item = (f64, f64)>>(coords: I) -> Self {
        let (mut lat, mut lon, mut n) = (0.0, 0.0, 0usize);
        for (a, b) in coords {
            lat += a;
            lon += b;
            n += 1;
        }
        if n == 0 {
            Self::new(0.0, 0.0)
        } else {
            Self::new(lat / n as f64, lon / n as f64)
        }
    }

    pub fn project(&self, lat: f64, lon: f64) -> PlanarPoint {
        PlanarPoint {
            x: EARTH_RADIUS_M * (lon - self.origin_lon).to_radians() * self.cos_lat,
            y: EARTH_RADIUS_M * (lat - self.origin_lat).to_radians(),
        }
    }
}

pub fn project(lat: f64, lon: f64, origin: &Projection) -> PlanarPoint {
    origin.project(lat, lon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn origin_maps_to_zero() {
        let p = Projection::new(40.7, -74.0);
        assert_eq!(project(40.7, -74.0, &p), PlanarPoint::new(0.0, 0.0));
    }

    #[test]
    fn one_degree_north() {
        let p = Projection::new(10.0, 20.0);
        let q = project(11.0, 20.0, &p);
        assert_eq!(q.x, 0.0);
        assert_relative_eq!(q.y, EARTH_RADIUS_M * std::f64::consts::PI / 180.0, epsilon = 1e-6);
        assert_relative_eq!(q.y, 111_194.93, epsilon = 0.01);
    }

    #[test]
    fn east_west_offsets_negate() {
        let p = Projection::new(30.0, 100.0);
        let e = project(30.0, 100.25, &p);
        let w = project(30.0, 99.75, &p);
        assert_relative_eq!(e.x, -w.x, epsilon = 1e-9);
        assert!(e.x > 0.0);
    }

    #[test]
    fn centered_on_mean() {
        let p = Projection::centered_on([(1.0, 2.0), (3.0, 6.0)]);
        assert_eq!((p.origin_lat, p.origin_lon), (2.0, 4.0));
    }
}
