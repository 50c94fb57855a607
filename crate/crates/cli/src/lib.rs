//! Companion crate to `psband-core`: scenario files, rasters on threads,
//! report rendering, and the `psband` binary's command surface.

mod cli;
pub mod output;
pub mod raster;
pub mod report;
pub mod scenario;

pub use cli::run;
