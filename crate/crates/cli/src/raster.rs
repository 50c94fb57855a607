//! Parallel coverage computation.
//!
//! Cells are pure functions of their grid index, so a parallel map that
//! collects in index order produces the same bytes as the sequential path
//! in `psband_core::coverage`, whatever the thread count.

use psband_core::coverage::{
    evaluate_reference_cell, CoverageError, CoverageRaster, Scenario,
};
use rayon::prelude::*;

/// Compute the coverage raster with `threads` worker threads (0 lets
/// rayon pick). Output is bit-identical to the sequential computation.
pub fn compute_coverage_parallel(
    scenario: &Scenario,
    threads: usize,
) -> Result<CoverageRaster, CoverageError> {
    let grid = scenario.grid()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|_| CoverageError::InvalidScenario("could not build thread pool"))?;
    let cells = pool.install(|| {
        (0..grid.len())
            .into_par_iter()
            .map(|i| evaluate_reference_cell(scenario, &grid.point_at(i)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    CoverageRaster::from_parts(grid, cells)
}
