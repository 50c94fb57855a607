//! Geodetic primitives on a spherical Earth.
//!
//! Distances use the haversine formula on a sphere of radius 6 371 000 m;
//! the error against an ellipsoid is far below the fidelity of the
//! propagation models layered on top. Antenna heights ride along on
//! [`GeoPoint`] but are ignored by the surface operations here — slant
//! geometry is handled in the `rf` module.

use alloc::vec::Vec;
use core::fmt;

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

const DEG_TO_RAD: f64 = core::f64::consts::PI / 180.0;
const RAD_TO_DEG: f64 = 180.0 / core::f64::consts::PI;

/// Errors from geodetic construction and grid generation.
#[derive(Debug, Clone, PartialEq)]
pub enum GeoError {
    /// Latitude outside [-90, 90] or not finite.
    InvalidLatitude(f64),
    /// Longitude not finite.
    InvalidLongitude(f64),
    /// Height below zero or not finite.
    InvalidHeight(f64),
    /// Bounding box with min > max on an axis, or out-of-range corners.
    InvalidBoundingBox,
    /// Bounding box with zero span on an axis; cannot host a grid.
    DegenerateBoundingBox,
    /// Grid resolution not finite or not strictly positive.
    InvalidResolution(f64),
    /// Grid resolution exceeds the bounding-box span.
    GridUnderflow,
    /// Initial bearing requested between coincident points.
    UndefinedBearing,
}

impl fmt::Display for GeoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeoError::InvalidLatitude(v) => write!(f, "latitude {v} outside [-90, 90]"),
            GeoError::InvalidLongitude(v) => write!(f, "longitude {v} is not finite"),
            GeoError::InvalidHeight(v) => write!(f, "height {v} must be finite and >= 0"),
            GeoError::InvalidBoundingBox => write!(f, "bounding box min exceeds max"),
            GeoError::DegenerateBoundingBox => {
                write!(f, "bounding box has zero span on an axis")
            }
            GeoError::InvalidResolution(v) => {
                write!(f, "grid resolution {v} must be finite and > 0")
            }
            GeoError::GridUnderflow => write!(f, "grid underflow: resolution exceeds bbox span"),
            GeoError::UndefinedBearing => write!(f, "undefined bearing between coincident points"),
        }
    }
}

impl core::error::Error for GeoError {}

/// A point on the sphere plus an antenna height above ground.
///
/// Longitude is normalized to [-180, 180) at construction; a value of
/// exactly +180 maps to -180.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat_deg: f64,
    lon_deg: f64,
    height_m: f64,
}

impl GeoPoint {
    pub fn new(lat_deg: f64, lon_deg: f64, height_m: f64) -> Result<Self, GeoError> {
        if !lat_deg.is_finite() || !(-90.0..=90.0).contains(&lat_deg) {
            return Err(GeoError::InvalidLatitude(lat_deg));
        }
        if !lon_deg.is_finite() {
            return Err(GeoError::InvalidLongitude(lon_deg));
        }
        if !height_m.is_finite() || height_m < 0.0 {
            return Err(GeoError::InvalidHeight(height_m));
        }
        Ok(GeoPoint {
            lat_deg,
            lon_deg: wrap_longitude_deg(lon_deg),
            height_m,
        })
    }

    pub fn lat_deg(&self) -> f64 {
        self.lat_deg
    }

    pub fn lon_deg(&self) -> f64 {
        self.lon_deg
    }

    pub fn height_m(&self) -> f64 {
        self.height_m
    }

    /// Same surface position with a different antenna height.
    pub fn with_height(&self, height_m: f64) -> Result<Self, GeoError> {
        GeoPoint::new(self.lat_deg, self.lon_deg, height_m)
    }

    /// True when both points share the same surface position (heights ignored).
    pub fn same_surface_position(&self, other: &GeoPoint) -> bool {
        self.lat_deg == other.lat_deg && self.lon_deg == other.lon_deg
    }
}

/// Wrap a longitude into [-180, 180); +180 resolves to -180.
fn wrap_longitude_deg(lon: f64) -> f64 {
    let shifted = (lon + 180.0) % 360.0;
    let wrapped = if shifted < 0.0 { shifted + 360.0 } else { shifted };
    wrapped - 180.0
}

/// Great-circle distance in meters between two points, heights ignored.
///
/// Haversine on the mean-radius sphere: symmetric, nonnegative, and exact
/// to float precision for antipodal-free pairs.
pub fn great_circle_distance_m(a: &GeoPoint, b: &GeoPoint) -> f64 {
    let lat1 = a.lat_deg * DEG_TO_RAD;
    let lat2 = b.lat_deg * DEG_TO_RAD;
    let dlat = (b.lat_deg - a.lat_deg) * DEG_TO_RAD;
    let dlon = (b.lon_deg - a.lon_deg) * DEG_TO_RAD;

    let sin_half_dlat = (dlat / 2.0).sin();
    let sin_half_dlon = (dlon / 2.0).sin();
    let h = sin_half_dlat * sin_half_dlat
        + lat1.cos() * lat2.cos() * sin_half_dlon * sin_half_dlon;
    let h = h.clamp(0.0, 1.0);
    let central_angle = 2.0 * h.sqrt().atan2((1.0 - h).sqrt());
    EARTH_RADIUS_M * central_angle
}

/// Initial great-circle bearing from `a` toward `b`, degrees in [0, 360),
/// 0 = true north, clockwise. Errors for coincident surface positions.
pub fn initial_bearing_deg(a: &GeoPoint, b: &GeoPoint) -> Result<f64, GeoError> {
    if a.same_surface_position(b) {
        return Err(GeoError::UndefinedBearing);
    }
    let lat1 = a.lat_deg * DEG_TO_RAD;
    let lat2 = b.lat_deg * DEG_TO_RAD;
    let dlon = (b.lon_deg - a.lon_deg) * DEG_TO_RAD;

    let y = dlon.sin() * lat2.cos();
    let x = lat1.cos() * lat2.sin() - lat1.sin() * lat2.cos() * dlon.cos();
    let bearing = y.atan2(x) * RAD_TO_DEG;
    Ok(wrap_bearing_deg(bearing))
}

fn wrap_bearing_deg(bearing: f64) -> f64 {
    let b = bearing % 360.0;
    if b < 0.0 {
        b + 360.0
    } else {
        b
    }
}

/// Great-circle forward solution: the point `distance_m` along `bearing_deg`
/// from `origin`. Distance 0 returns the origin; the origin's height carries
/// over unchanged.
pub fn destination_point(origin: &GeoPoint, bearing_deg: f64, distance_m: f64) -> GeoPoint {
    if distance_m == 0.0 {
        return *origin;
    }
    let lat1 = origin.lat_deg * DEG_TO_RAD;
    let bearing = bearing_deg * DEG_TO_RAD;
    let angular = distance_m / EARTH_RADIUS_M;

    let lat2 = (lat1.sin() * angular.cos() + lat1.cos() * angular.sin() * bearing.cos()).asin();
    let y = bearing.sin() * angular.sin() * lat1.cos();
    let x = angular.cos() - lat1.sin() * lat2.sin();
    let lon2 = origin.lon_deg * DEG_TO_RAD + y.atan2(x);

    GeoPoint {
        lat_deg: lat2 * RAD_TO_DEG,
        lon_deg: wrap_longitude_deg(lon2 * RAD_TO_DEG),
        height_m: origin.height_m,
    }
}

/// Axis-aligned latitude/longitude box. Boxes may not cross the antimeridian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    min_lat_deg: f64,
    min_lon_deg: f64,
    max_lat_deg: f64,
    max_lon_deg: f64,
}

impl BoundingBox {
    pub fn new(
        min_lat_deg: f64,
        min_lon_deg: f64,
        max_lat_deg: f64,
        max_lon_deg: f64,
    ) -> Result<Self, GeoError> {
        for v in [min_lat_deg, max_lat_deg] {
            if !v.is_finite() || !(-90.0..=90.0).contains(&v) {
                return Err(GeoError::InvalidLatitude(v));
            }
        }
        for v in [min_lon_deg, max_lon_deg] {
            if !v.is_finite() || !(-180.0..=180.0).contains(&v) {
                return Err(GeoError::InvalidLongitude(v));
            }
        }
        if min_lat_deg > max_lat_deg || min_lon_deg > max_lon_deg {
            return Err(GeoError::InvalidBoundingBox);
        }
        Ok(BoundingBox {
            min_lat_deg,
            min_lon_deg,
            max_lat_deg,
            max_lon_deg,
        })
    }

    /// Box spanning `span_m` meters on each axis, centered on `center`.
    pub fn centered_on(center: &GeoPoint, span_m: f64) -> Result<Self, GeoError> {
        if !span_m.is_finite() || span_m <= 0.0 {
            return Err(GeoError::InvalidResolution(span_m));
        }
        let half_lat_deg = (span_m / 2.0) / EARTH_RADIUS_M * RAD_TO_DEG;
        let cos_lat = (center.lat_deg * DEG_TO_RAD).cos();
        let half_lon_deg = (span_m / 2.0) / (EARTH_RADIUS_M * cos_lat) * RAD_TO_DEG;
        BoundingBox::new(
            center.lat_deg - half_lat_deg,
            center.lon_deg - half_lon_deg,
            center.lat_deg + half_lat_deg,
            center.lon_deg + half_lon_deg,
        )
    }

    pub fn min_lat_deg(&self) -> f64 {
        self.min_lat_deg
    }

    pub fn min_lon_deg(&self) -> f64 {
        self.min_lon_deg
    }

    pub fn max_lat_deg(&self) -> f64 {
        self.max_lat_deg
    }

    pub fn max_lon_deg(&self) -> f64 {
        self.max_lon_deg
    }

    pub fn mid_lat_deg(&self) -> f64 {
        (self.min_lat_deg + self.max_lat_deg) / 2.0
    }

    /// Metric extents (latitude span, longitude span) at the box mid-latitude.
    pub fn span_m(&self) -> (f64, f64) {
        let lat_span = (self.max_lat_deg - self.min_lat_deg) * DEG_TO_RAD * EARTH_RADIUS_M;
        let cos_mid = (self.mid_lat_deg() * DEG_TO_RAD).cos();
        let lon_span = (self.max_lon_deg - self.min_lon_deg) * DEG_TO_RAD * EARTH_RADIUS_M * cos_mid;
        (lat_span, lon_span)
    }

    pub fn contains(&self, p: &GeoPoint) -> bool {
        (self.min_lat_deg..=self.max_lat_deg).contains(&p.lat_deg)
            && (self.min_lon_deg..=self.max_lon_deg).contains(&p.lon_deg)
    }
}

/// A regular lattice of sample points over a bounding box.
///
/// Rows run south to north, columns west to east; the row-major linear
/// index is `row * n_cols + col`. Corner points are included, so each axis
/// carries `ceil(span / resolution) + 1` points and the realized spacing
/// never exceeds the requested resolution at the box mid-latitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    bbox: BoundingBox,
    resolution_m: f64,
    height_m: f64,
    n_rows: usize,
    n_cols: usize,
    lat_step_deg: f64,
    lon_step_deg: f64,
}

impl Grid {
    pub fn new(bbox: BoundingBox, resolution_m: f64, height_m: f64) -> Result<Self, GeoError> {
        if !resolution_m.is_finite() || resolution_m <= 0.0 {
            return Err(GeoError::InvalidResolution(resolution_m));
        }
        if !height_m.is_finite() || height_m < 0.0 {
            return Err(GeoError::InvalidHeight(height_m));
        }
        let (lat_span_m, lon_span_m) = bbox.span_m();
        if lat_span_m <= 0.0 || lon_span_m <= 0.0 {
            return Err(GeoError::DegenerateBoundingBox);
        }
        if resolution_m > lat_span_m || resolution_m > lon_span_m {
            return Err(GeoError::GridUnderflow);
        }
        let lat_steps = (lat_span_m / resolution_m).ceil() as usize;
        let lon_steps = (lon_span_m / resolution_m).ceil() as usize;
        Ok(Grid {
            bbox,
            resolution_m,
            height_m,
            n_rows: lat_steps + 1,
            n_cols: lon_steps + 1,
            lat_step_deg: (bbox.max_lat_deg - bbox.min_lat_deg) / lat_steps as f64,
            lon_step_deg: (bbox.max_lon_deg - bbox.min_lon_deg) / lon_steps as f64,
        })
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn resolution_m(&self) -> f64 {
        self.resolution_m
    }

    pub fn height_m(&self) -> f64 {
        self.height_m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn len(&self) -> usize {
        self.n_rows * self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lat_step_deg(&self) -> f64 {
        self.lat_step_deg
    }

    pub fn lon_step_deg(&self) -> f64 {
        self.lon_step_deg
    }

    pub fn point(&self, row: usize, col: usize) -> GeoPoint {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        GeoPoint {
            lat_deg: self.bbox.min_lat_deg + row as f64 * self.lat_step_deg,
            lon_deg: self.bbox.min_lon_deg + col as f64 * self.lon_step_deg,
            height_m: self.height_m,
        }
    }

    pub fn point_at(&self, index: usize) -> GeoPoint {
        self.point(index / self.n_cols, index % self.n_cols)
    }

    /// All grid points in row-major order.
    pub fn points(&self) -> impl Iterator<Item = GeoPoint> + '_ {
        (0..self.len()).map(move |i| self.point_at(i))
    }

    /// Area of one grid cell in m², evaluated at the box mid-latitude.
    pub fn cell_area_m2(&self) -> f64 {
        let lat_step_m = self.lat_step_deg * DEG_TO_RAD * EARTH_RADIUS_M;
        let cos_mid = (self.bbox.mid_lat_deg() * DEG_TO_RAD).cos();
        let lon_step_m = self.lon_step_deg * DEG_TO_RAD * EARTH_RADIUS_M * cos_mid;
        lat_step_m * lon_step_m
    }
}

/// Row-major sample points for `bbox` at the given resolution and receiver
/// height. Convenience wrapper over [`Grid`].
pub fn make_grid(
    bbox: BoundingBox,
    resolution_m: f64,
    height_m: f64,
) -> Result<Vec<GeoPoint>, GeoError> {
    Ok(Grid::new(bbox, resolution_m, height_m)?.points().collect())
}
