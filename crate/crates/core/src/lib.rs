//! Core models for secondary-use feasibility studies in the 4940–4990 MHz
//! U.S. public-safety band.
//!
//! The crate covers four layers that build on each other:
//!
//! - [`geo`] — spherical-Earth geodesy: points, great-circle distance,
//!   bearings, destination points, and rectangular sampling grids.
//! - [`regulatory`] — the 4.9 GHz band plan, channel aggregation rules,
//!   conducted-power limits, and spectral emission mask checking.
//! - [`rf`] — antenna gain patterns, free-space / two-ray / rain propagation
//!   losses, and the end-to-end link budget.
//! - [`sharing`] / [`coverage`] — incumbent protection zones with
//!   space-division feasibility verdicts, and geographic coverage rasters
//!   with per-receiver link reports.
//!
//! Everything here is pure and deterministic; values are freely shareable
//! across threads. File IO, scenario parsing, and output formats live in the
//! companion CLI crate.
//!
//! The crate is `no_std`-compatible (`alloc` required). Builds without the
//! default `std` feature must enable `libm` for float math:
//! `--no-default-features --features libm`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod coverage;
pub mod geo;
pub mod regulatory;
pub mod rf;
pub mod sharing;
