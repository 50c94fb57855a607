//! Raster serialization: CSV and GeoJSON.
//!
//! Both writers are byte-deterministic for a given raster: fixed header,
//! row-major cell order, fixed float formatting.

use std::fmt::Write as _;

use psband_core::coverage::CoverageRaster;
use serde_json::{json, Value};

/// Render a raster as CSV.
///
/// Header `lat_deg,lon_deg,rx_power_dbm,covered`, one row per cell in
/// row-major order (south to north, west to east), coordinates with six
/// decimals, powers with two, covered as 0/1.
pub fn write_raster_csv(raster: &CoverageRaster) -> String {
    let grid = raster.grid();
    let mut out = String::with_capacity(raster.cells().len() * 32 + 40);
    out.push_str("lat_deg,lon_deg,rx_power_dbm,covered\n");
    for (i, cell) in raster.cells().iter().enumerate() {
        let p = grid.point_at(i);
        let _ = writeln!(
            out,
            "{:.6},{:.6},{:.2},{}",
            p.lat_deg(),
            p.lon_deg(),
            cell.rx_power_dbm,
            u8::from(cell.covered)
        );
    }
    out
}

/// Render the covered cells of a raster as a GeoJSON FeatureCollection.
///
/// Each covered cell becomes one Polygon feature: the axis-aligned quad
/// spanning half a grid step around the cell point, ring counterclockwise
/// and closed, coordinates ordered longitude first. Uncovered cells are
/// omitted, so an empty coverage yields an empty `features` array.
pub fn write_coverage_geojson(raster: &CoverageRaster) -> String {
    let grid = raster.grid();
    let half_lat = grid.lat_step_deg() / 2.0;
    let half_lon = grid.lon_step_deg() / 2.0;
    let mut features = Vec::with_capacity(raster.covered_count());
    for (i, cell) in raster.cells().iter().enumerate() {
        if !cell.covered {
            continue;
        }
        let p = grid.point_at(i);
        let (lat, lon) = (p.lat_deg(), p.lon_deg());
        let ring = vec![
            vec![lon - half_lon, lat - half_lat],
            vec![lon + half_lon, lat - half_lat],
            vec![lon + half_lon, lat + half_lat],
            vec![lon - half_lon, lat + half_lat],
            vec![lon - half_lon, lat - half_lat],
        ];
        features.push(json!({
            "type": "Feature",
            "geometry": {
                "type": "Polygon",
                "coordinates": [ring],
            },
            "properties": {
                "rx_power_dbm": cell.rx_power_dbm,
            },
        }));
    }
    let collection: Value = json!({
        "type": "FeatureCollection",
        "features": features,
    });
    collection.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use psband_core::coverage::{CoverageCell, CoverageRaster};
    use psband_core::geo::{BoundingBox, Grid};

    /// 3x3 grid (~200 m box at 100 m resolution); `covered[i]` classifies
    /// the row-major cell i.
    fn tiny_raster(covered: &[bool; 9]) -> CoverageRaster {
        let bbox = BoundingBox::new(32.0, -81.0, 32.0017, -80.9979).unwrap();
        let grid = Grid::new(bbox, 100.0, 2.0).unwrap();
        assert_eq!(grid.len(), covered.len());
        let cells = covered
            .iter()
            .enumerate()
            .map(|(i, &c)| CoverageCell { rx_power_dbm: -60.0 - i as f64, covered: c })
            .collect();
        CoverageRaster::from_parts(grid, cells).unwrap()
    }

    #[test]
    fn csv_shape_and_determinism() {
        let raster = tiny_raster(&[true, false, true, true, true, true, true, true, true]);
        let csv = write_raster_csv(&raster);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + raster.cells().len());
        assert_eq!(lines[0], "lat_deg,lon_deg,rx_power_dbm,covered");
        assert!(lines[1].ends_with(",-60.00,1"), "got {}", lines[1]);
        assert!(lines[2].ends_with(",-61.00,0"), "got {}", lines[2]);
        assert_eq!(csv, write_raster_csv(&raster));
    }

    #[test]
    fn geojson_feature_count_tracks_coverage() {
        let all = tiny_raster(&[true; 9]);
        let v: serde_json::Value = serde_json::from_str(&write_coverage_geojson(&all)).unwrap();
        assert_eq!(v["type"], "FeatureCollection");
        assert_eq!(v["features"].as_array().unwrap().len(), 9);

        let none = tiny_raster(&[false; 9]);
        let v: serde_json::Value = serde_json::from_str(&write_coverage_geojson(&none)).unwrap();
        assert_eq!(v["features"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn geojson_rings_are_closed_quads() {
        let mut covered = [false; 9];
        covered[0] = true;
        let raster = tiny_raster(&covered);
        let v: serde_json::Value = serde_json::from_str(&write_coverage_geojson(&raster)).unwrap();
        let ring = &v["features"][0]["geometry"]["coordinates"][0];
        let ring = ring.as_array().unwrap();
        assert_eq!(ring.len(), 5);
        assert_eq!(ring[0], ring[4]);
        // longitude first: matches the grid's first point
        let p = raster.grid().point_at(0);
        let lon = ring[0][0].as_f64().unwrap();
        let lat = ring[0][1].as_f64().unwrap();
        assert!((lon - (p.lon_deg() - raster.grid().lon_step_deg() / 2.0)).abs() < 1e-12);
        assert!((lat - (p.lat_deg() - raster.grid().lat_step_deg() / 2.0)).abs() < 1e-12);
    }
}
