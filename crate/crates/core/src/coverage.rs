//! Coverage rasters, per-receiver link reports, and coverage radii.
//!
//! A [`Scenario`] bundles one transmitter, optional fixed receiver sites,
//! the propagation environment, and the raster geometry. Raster cells are
//! evaluated with a *reference receiver* — isotropic, at a configurable
//! height, with the scenario sensitivity — while named receiver sites use
//! their own antenna and sensitivity.
//!
//! Cell evaluations are pure functions of the cell position, so they may
//! run in any order or in parallel; assembling results in row-major grid
//! order reproduces bit-identical rasters regardless of schedule.

use alloc::vec::Vec;
use core::fmt;

use crate::geo::{destination_point, great_circle_distance_m, BoundingBox, GeoError, GeoPoint, Grid};
use crate::rf::{
    link_budget, AntennaPattern, Environment, LinkReport, Receiver, RfError, Transmitter,
    NEAR_FIELD_LIMIT_M,
};

/// Errors from scenario assembly and coverage evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum CoverageError {
    Geo(GeoError),
    Rf(RfError),
    InvalidScenario(&'static str),
    /// Receiver-site evaluation needs at least one site.
    NoRxSites,
    InvalidBearing(f64),
    /// Raster assembly with the wrong number of cells.
    CellCountMismatch { expected: usize, got: usize },
}

impl fmt::Display for CoverageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverageError::Geo(e) => write!(f, "{e}"),
            CoverageError::Rf(e) => write!(f, "{e}"),
            CoverageError::InvalidScenario(msg) => write!(f, "invalid scenario: {msg}"),
            CoverageError::NoRxSites => write!(f, "scenario has no receiver sites"),
            CoverageError::InvalidBearing(b) => write!(f, "bearing {b} must be finite"),
            CoverageError::CellCountMismatch { expected, got } => {
                write!(f, "cell count mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl core::error::Error for CoverageError {}

impl From<GeoError> for CoverageError {
    fn from(e: GeoError) -> Self {
        CoverageError::Geo(e)
    }
}

impl From<RfError> for CoverageError {
    fn from(e: RfError) -> Self {
        CoverageError::Rf(e)
    }
}

/// A fixed receiver site. Ids are 1-based and contiguous within a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RxSite {
    pub id: usize,
    pub location: GeoPoint,
    pub sensitivity_dbm: f64,
    pub antenna: AntennaPattern,
}

/// The receiver the raster is computed for: isotropic, at a fixed height
/// above ground, with a detection threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceReceiver {
    pub height_m: f64,
    pub sensitivity_dbm: f64,
}

/// One transmitter, its receivers, the environment, and raster geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    tx: Transmitter,
    rx_sites: Vec<RxSite>,
    environment: Environment,
    bbox: BoundingBox,
    resolution_m: f64,
    reference: ReferenceReceiver,
}

impl Scenario {
    pub fn new(
        tx: Transmitter,
        rx_sites: Vec<RxSite>,
        environment: Environment,
        bbox: BoundingBox,
        resolution_m: f64,
        reference: ReferenceReceiver,
    ) -> Result<Self, CoverageError> {
        for (i, site) in rx_sites.iter().enumerate() {
            if site.id != i + 1 {
                return Err(CoverageError::InvalidScenario(
                    "rx site ids must be contiguous from 1",
                ));
            }
            if !site.sensitivity_dbm.is_finite() {
                return Err(CoverageError::InvalidScenario("rx sensitivity must be finite"));
            }
            site.antenna.validate()?;
        }
        if !reference.height_m.is_finite() || reference.height_m < 0.0 {
            return Err(CoverageError::InvalidScenario(
                "reference receiver height must be >= 0",
            ));
        }
        if !reference.sensitivity_dbm.is_finite() {
            return Err(CoverageError::InvalidScenario(
                "reference sensitivity must be finite",
            ));
        }
        if !resolution_m.is_finite() || resolution_m <= 0.0 {
            return Err(CoverageError::Geo(GeoError::InvalidResolution(resolution_m)));
        }
        Ok(Scenario { tx, rx_sites, environment, bbox, resolution_m, reference })
    }

    pub fn tx(&self) -> &Transmitter {
        &self.tx
    }

    pub fn rx_sites(&self) -> &[RxSite] {
        &self.rx_sites
    }

    pub fn environment(&self) -> &Environment {
        &self.environment
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn resolution_m(&self) -> f64 {
        self.resolution_m
    }

    pub fn reference(&self) -> &ReferenceReceiver {
        &self.reference
    }

    /// Same scenario with a different transmitter.
    pub fn with_tx(&self, tx: Transmitter) -> Scenario {
        Scenario { tx, ..self.clone() }
    }

    /// Same scenario with a different environment.
    pub fn with_environment(&self, environment: Environment) -> Scenario {
        Scenario { environment, ..self.clone() }
    }

    /// The raster lattice this scenario evaluates over.
    pub fn grid(&self) -> Result<Grid, CoverageError> {
        Ok(Grid::new(self.bbox, self.resolution_m, self.reference.height_m)?)
    }
}

/// Received power and coverage classification for one raster cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageCell {
    pub rx_power_dbm: f64,
    pub covered: bool,
}

/// A computed raster: the grid plus one cell per grid point, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRaster {
    grid: Grid,
    cells: Vec<CoverageCell>,
}

impl CoverageRaster {
    /// Assemble a raster from independently computed cells (row-major).
    pub fn from_parts(grid: Grid, cells: Vec<CoverageCell>) -> Result<Self, CoverageError> {
        if cells.len() != grid.len() {
            return Err(CoverageError::CellCountMismatch {
                expected: grid.len(),
                got: cells.len(),
            });
        }
        Ok(CoverageRaster { grid, cells })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[CoverageCell] {
        &self.cells
    }

    pub fn cell(&self, row: usize, col: usize) -> &CoverageCell {
        &self.cells[row * self.grid.n_cols() + col]
    }

    pub fn covered_count(&self) -> usize {
        self.cells.iter().filter(|c| c.covered).count()
    }
}

/// Link-budget a reference-receiver cell at `point`.
///
/// A point within the near-field limit of the transmitter (only possible
/// on the mast's own cell with near-equal heights) is evaluated just
/// outside the limit, due north, instead of failing the whole raster.
pub fn evaluate_reference_cell(
    scenario: &Scenario,
    point: &GeoPoint,
) -> Result<CoverageCell, CoverageError> {
    let tx = scenario.tx();
    let reference = scenario.reference();
    let rx = Receiver::new(
        *point,
        AntennaPattern::Isotropic,
        reference.sensitivity_dbm,
        tx.freq_mhz,
    )?;
    let report = match link_budget(tx, &rx, scenario.environment()) {
        Ok(r) => r,
        Err(RfError::DegenerateLink) => {
            let nudged = destination_point(&tx.location, 0.0, 2.0 * NEAR_FIELD_LIMIT_M)
                .with_height(point.height_m())?;
            let rx = Receiver::new(
                nudged,
                AntennaPattern::Isotropic,
                reference.sensitivity_dbm,
                tx.freq_mhz,
            )?;
            link_budget(tx, &rx, scenario.environment())?
        }
        Err(e) => return Err(e.into()),
    };
    Ok(CoverageCell { rx_power_dbm: report.rx_power_dbm, covered: report.covered })
}

/// Compute the full coverage raster, sequentially, in row-major order.
pub fn compute_coverage(scenario: &Scenario) -> Result<CoverageRaster, CoverageError> {
    let grid = scenario.grid()?;
    let mut cells = Vec::with_capacity(grid.len());
    for point in grid.points() {
        cells.push(evaluate_reference_cell(scenario, &point)?);
    }
    CoverageRaster::from_parts(grid, cells)
}

/// Link report for one receiver site.
#[derive(Debug, Clone, PartialEq)]
pub struct RxSiteReport {
    pub id: usize,
    pub report: LinkReport,
}

/// One link budget per receiver site, using each site's own antenna and
/// sensitivity. Errors if the scenario has no sites.
pub fn evaluate_rx_sites(scenario: &Scenario) -> Result<Vec<RxSiteReport>, CoverageError> {
    if scenario.rx_sites().is_empty() {
        return Err(CoverageError::NoRxSites);
    }
    let mut reports = Vec::with_capacity(scenario.rx_sites().len());
    for site in scenario.rx_sites() {
        let rx = Receiver::new(
            site.location,
            site.antenna,
            site.sensitivity_dbm,
            scenario.tx().freq_mhz,
        )?;
        let report = link_budget(scenario.tx(), &rx, scenario.environment())?;
        reports.push(RxSiteReport { id: site.id, report });
    }
    Ok(reports)
}

/// Contiguously covered distance from the transmitter along a bearing.
///
/// Probes step outward at the grid resolution with the reference receiver;
/// the radius is the largest `k * step` whose probes 1..=k are all
/// covered. The walk is capped at the raster extent (the farthest bounding
/// box corner). Returns 0 when the first probe is already uncovered.
pub fn coverage_radius_m(scenario: &Scenario, bearing_deg: f64) -> Result<f64, CoverageError> {
    if !bearing_deg.is_finite() {
        return Err(CoverageError::InvalidBearing(bearing_deg));
    }
    let step = scenario.resolution_m();
    let tx_surface = scenario.tx().location;
    let bbox = scenario.bbox();
    let corners = [
        (bbox.min_lat_deg(), bbox.min_lon_deg()),
        (bbox.min_lat_deg(), bbox.max_lon_deg()),
        (bbox.max_lat_deg(), bbox.min_lon_deg()),
        (bbox.max_lat_deg(), bbox.max_lon_deg()),
    ];
    let cap_m = corners
        .iter()
        .map(|&(lat, lon)| {
            let corner = GeoPoint::new(lat, lon, 0.0).expect("bbox corners are valid points");
            great_circle_distance_m(&tx_surface, &corner)
        })
        .fold(0.0, f64::max);

    let height = scenario.reference().height_m;
    let mut radius = 0.0;
    let mut k = 1u64;
    loop {
        let d = k as f64 * step;
        if d > cap_m {
            break;
        }
        let probe = destination_point(&tx_surface, bearing_deg, d).with_height(height)?;
        if !evaluate_reference_cell(scenario, &probe)?.covered {
            break;
        }
        radius = d;
        k += 1;
    }
    Ok(radius)
}

/// Aggregate statistics over a raster plus bearing-wise radius samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageSummary {
    pub total_cells: usize,
    pub covered_cells: usize,
    /// `covered_cells / total_cells`, in [0, 1].
    pub covered_fraction: f64,
    /// Covered cells times the cell area at the box mid-latitude.
    pub covered_area_m2: f64,
    pub max_rx_power_dbm: f64,
    pub min_rx_power_dbm: f64,
    /// (bearing_deg, radius_m) pairs as supplied by the caller.
    pub radius_samples_m: Vec<(f64, f64)>,
}

/// Summarize a raster. `radius_samples_m` pass through untouched.
pub fn summarize(raster: &CoverageRaster, radius_samples_m: Vec<(f64, f64)>) -> CoverageSummary {
    let total = raster.cells().len();
    let covered = raster.covered_count();
    let mut max_p = f64::NEG_INFINITY;
    let mut min_p = f64::INFINITY;
    for c in raster.cells() {
        max_p = max_p.max(c.rx_power_dbm);
        min_p = min_p.min(c.rx_power_dbm);
    }
    CoverageSummary {
        total_cells: total,
        covered_cells: covered,
        covered_fraction: covered as f64 / total as f64,
        covered_area_m2: covered as f64 * raster.grid().cell_area_m2(),
        max_rx_power_dbm: max_p,
        min_rx_power_dbm: min_p,
        radius_samples_m,
    }
}
