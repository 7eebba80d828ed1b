use crate::geometry::Point;

const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Spherical transverse Mercator projection around a reference point, which
/// maps to the origin. Distances are in meters and accurate to well below a
/// meter per kilometer within a city-sized area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseMercator {
    lat0: f64,
    lon0: f64,
}

impl TransverseMercator {
    pub fn new(lat0: f64, lon0: f64) -> Self {
        TransverseMercator {
            lat0: lat0.to_radians(),
            lon0: lon0.to_radians(),
        }
    }

    /// Centered on the mean of the given `(lat, lon)` pairs.
    pub fn centered(coords: impl IntoIterator<Item = (f64, f64)>) -> Option<Self> {
        let (mut sl, mut so, mut n) = (0.0, 0.0, 0usize);
        for (lat, lon) in coords {
            sl += lat;
            so += lon;
            n += 1;
        }
        (n > 0).then(|| TransverseMercator::new(sl / n as f64, so / n as f64))
    }

    pub fn project(&self, lat: f64, lon: f64) -> Option<Point> {
        if !lat.is_finite() || !lon.is_finite() || lat.abs() > 90.0 || lon.abs() > 180.0 {
            return None;
        }
        let (phi, dl) = (lat.to_radians(), lon.to_radians() - self.lon0);
        let b = phi.cos() * dl.sin();
        if b.abs() >= 0.999 {
            return None;
        }
        let x = EARTH_RADIUS_M * b.atanh();
        let y = EARTH_RADIUS_M * (phi.tan().atan2(dl.cos()) - self.lat0);
        Some(Point::new(x, y))
    }

    /// `(lat, lon)` in degrees.
    pub fn unproject(&self, p: Point) -> (f64, f64) {
        let d = p.y / EARTH_RADIUS_M + self.lat0;
        let xr = p.x / EARTH_RADIUS_M;
        let lat = (d.sin() / xr.cosh()).asin();
        let lon = self.lon0 + xr.sinh().atan2(d.cos());
        (lat.to_degrees(), lon.to_degrees())
    }
}
