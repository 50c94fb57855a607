//! Feasibility report assembly and rendering (text and JSON lines).
//!
//! A report combines the regulatory checks, the incumbent verdict, the
//! per-receiver link budgets, and the coverage summary. Sections appear
//! only when their inputs were supplied: the verdict needs a registry, the
//! mask check needs a PSD capture, the receiver table needs sites.

use std::fmt::Write as _;

use psband_core::coverage::{
    coverage_radius_m, evaluate_rx_sites, summarize, CoverageError, CoverageSummary, RxSiteReport,
    Scenario,
};
use psband_core::regulatory::{AggregateChannel, MaskComplianceReport, PowerCheck};
use psband_core::sharing::{evaluate_site, nearest_incumbent, FeasibilityVerdict, IncumbentRegistry};
use serde_json::json;

use crate::raster::compute_coverage_parallel;

/// Bearings sampled for the coverage-radius summary, degrees.
pub const RADIUS_BEARINGS_DEG: [f64; 8] = [0.0, 45.0, 90.0, 135.0, 180.0, 225.0, 270.0, 315.0];

/// Incumbent findings for the candidate site.
#[derive(Debug, Clone, PartialEq)]
pub struct VerdictSection {
    pub verdict: FeasibilityVerdict,
    /// Name and distance of the closest zone, if the registry has any.
    pub nearest: Option<(String, f64)>,
}

/// Everything the `feasibility` subcommand reports.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub aggregate: AggregateChannel,
    pub power: PowerCheck,
    pub verdict: Option<VerdictSection>,
    pub mask: Option<MaskComplianceReport>,
    pub rx_links: Option<Vec<RxSiteReport>>,
    pub coverage: CoverageSummary,
}

/// Compute the coverage summary for a scenario: full raster plus radius
/// samples on the eight principal bearings.
pub fn coverage_summary(scenario: &Scenario, threads: usize) -> Result<CoverageSummary, CoverageError> {
    let raster = compute_coverage_parallel(scenario, threads)?;
    let mut samples = Vec::with_capacity(RADIUS_BEARINGS_DEG.len());
    for bearing in RADIUS_BEARINGS_DEG {
        samples.push((bearing, coverage_radius_m(scenario, bearing)?));
    }
    Ok(summarize(&raster, samples))
}

/// Assemble the full report. `registry` and `mask` sections are included
/// only when given; the receiver table only when the scenario has sites.
pub fn assemble(
    scenario: &Scenario,
    aggregate: AggregateChannel,
    power: PowerCheck,
    registry: Option<&IncumbentRegistry>,
    mask: Option<MaskComplianceReport>,
    threads: usize,
) -> Result<FeasibilityReport, CoverageError> {
    let verdict = registry.map(|reg| {
        let tx = scenario.tx().location;
        VerdictSection {
            verdict: evaluate_site(&tx, reg),
            nearest: nearest_incumbent(&tx, reg)
                .ok()
                .map(|(zone, d)| (zone.name().to_string(), d)),
        }
    });
    let rx_links = if scenario.rx_sites().is_empty() {
        None
    } else {
        Some(evaluate_rx_sites(scenario)?)
    };
    Ok(FeasibilityReport {
        aggregate,
        power,
        verdict,
        mask,
        rx_links,
        coverage: coverage_summary(scenario, threads)?,
    })
}

fn covered_set(links: &[RxSiteReport]) -> String {
    let ids: Vec<String> = links
        .iter()
        .filter(|l| l.report.covered)
        .map(|l| l.id.to_string())
        .collect();
    format!("{{{}}}", ids.join(", "))
}

/// Text table of per-site link budgets plus the covered id set.
pub fn render_rx_links(links: &[RxSiteReport]) -> String {
    let mut s = String::new();
    for l in links {
        let _ = writeln!(
            s,
            "rx {}: {:.0} m, {:.2} dBm, margin {:+.2} dB, {}",
            l.id,
            l.report.distance_m,
            l.report.rx_power_dbm,
            l.report.margin_db,
            if l.report.covered { "covered" } else { "NOT covered" }
        );
    }
    let _ = writeln!(s, "covered set: {}", covered_set(links));
    s
}

/// Human-readable rendering.
pub fn render_text(report: &FeasibilityReport) -> String {
    let mut s = String::new();
    let members: Vec<String> = report
        .aggregate
        .member_indices
        .iter()
        .map(|m| m.to_string())
        .collect();
    let _ = writeln!(s, "== regulatory ==");
    let _ = writeln!(
        s,
        "aggregate: channels {}, {} MHz centered {} MHz",
        members.join("+"),
        report.aggregate.total_bandwidth_mhz,
        report.aggregate.center_mhz
    );
    let p = &report.power;
    let _ = writeln!(
        s,
        "tx power: {} W vs {} W limit ({} MHz, {} power) -> {}, margin {:.2} dB",
        p.tx_power_w,
        p.limit_w,
        p.bandwidth_mhz,
        p.class,
        if p.pass { "PASS" } else { "FAIL" },
        p.margin_db
    );
    if let Some(mask) = &report.mask {
        let _ = writeln!(
            s,
            "mask {}: {} ({} out-of-band samples, {} violations, in-band peak {:.2} dBm/MHz)",
            mask.mask_name,
            if mask.compliant { "COMPLIANT" } else { "NON-COMPLIANT" },
            mask.out_of_band_samples,
            mask.violations.len(),
            mask.in_band_peak_dbm_per_mhz
        );
        for v in &mask.violations {
            let _ = writeln!(
                s,
                "  violation at {:.3} MHz (offset {:.3} MHz): {:.2} dBm/MHz, limit {:.2}, deficit {:.2} dB",
                v.freq_mhz, v.offset_mhz, v.psd_dbm_per_mhz, v.limit_dbm_per_mhz, v.deficit_db
            );
        }
    }

    if let Some(section) = &report.verdict {
        let _ = writeln!(s, "== incumbents ==");
        let _ = writeln!(s, "verdict: {}", section.verdict.status);
        if let Some((name, d)) = &section.nearest {
            let _ = writeln!(s, "nearest incumbent: {} at {:.1} km", name, d / 1000.0);
        }
        for z in section.verdict.triggered() {
            let _ = writeln!(
                s,
                "  inside {} ({}, {}): distance {:.1} km, margin {:.1} km",
                z.name,
                z.kind.as_token(),
                z.policy.as_token(),
                z.distance_m / 1000.0,
                z.margin_m / 1000.0
            );
        }
    }

    if let Some(links) = &report.rx_links {
        let _ = writeln!(s, "== rx sites ==");
        s.push_str(&render_rx_links(links));
    }

    let c = &report.coverage;
    let _ = writeln!(s, "== coverage ==");
    let _ = writeln!(
        s,
        "cells: {} covered of {} ({:.1}%), area {:.2} km^2",
        c.covered_cells,
        c.total_cells,
        c.covered_fraction * 100.0,
        c.covered_area_m2 / 1e6
    );
    let _ = writeln!(
        s,
        "rx power: max {:.2} dBm, min {:.2} dBm",
        c.max_rx_power_dbm, c.min_rx_power_dbm
    );
    let radii: Vec<String> = c
        .radius_samples_m
        .iter()
        .map(|(b, r)| format!("{b:.0} deg {:.1} km", r / 1000.0))
        .collect();
    let _ = writeln!(s, "radius by bearing: {}", radii.join(", "));
    s
}

/// Machine-readable rendering: one JSON object per line.
pub fn render_json_lines(report: &FeasibilityReport) -> String {
    let mut lines = Vec::new();
    lines.push(json!({
        "record": "aggregate",
        "members": report.aggregate.member_indices,
        "bandwidth_mhz": report.aggregate.total_bandwidth_mhz,
        "center_mhz": report.aggregate.center_mhz,
    }));
    lines.push(json!({
        "record": "power_check",
        "tx_power_w": report.power.tx_power_w,
        "limit_w": report.power.limit_w,
        "bandwidth_mhz": report.power.bandwidth_mhz,
        "class": report.power.class.to_string(),
        "margin_db": report.power.margin_db,
        "pass": report.power.pass,
    }));
    if let Some(mask) = &report.mask {
        lines.push(json!({
            "record": "mask_check",
            "mask": mask.mask_name,
            "compliant": mask.compliant,
            "in_band_peak_dbm_per_mhz": mask.in_band_peak_dbm_per_mhz,
            "out_of_band_samples": mask.out_of_band_samples,
            "violations": mask.violations.len(),
        }));
        for v in &mask.violations {
            lines.push(json!({
                "record": "mask_violation",
                "freq_mhz": v.freq_mhz,
                "offset_mhz": v.offset_mhz,
                "psd_dbm_per_mhz": v.psd_dbm_per_mhz,
                "limit_dbm_per_mhz": v.limit_dbm_per_mhz,
                "deficit_db": v.deficit_db,
            }));
        }
    }
    if let Some(section) = &report.verdict {
        lines.push(json!({
            "record": "verdict",
            "status": section.verdict.status.to_string(),
        }));
        if let Some((name, d)) = &section.nearest {
            lines.push(json!({
                "record": "nearest_incumbent",
                "name": name,
                "distance_m": d,
            }));
        }
        for z in &section.verdict.zones {
            lines.push(json!({
                "record": "zone",
                "name": z.name,
                "kind": z.kind.as_token(),
                "policy": z.policy.as_token(),
                "distance_m": z.distance_m,
                "margin_m": z.margin_m,
                "triggered": z.triggered,
            }));
        }
    }
    if let Some(links) = &report.rx_links {
        for l in links {
            lines.push(json!({
                "record": "rx_link",
                "id": l.id,
                "distance_m": l.report.distance_m,
                "path_loss_db": l.report.path_loss_db,
                "rain_loss_db": l.report.rain_loss_db,
                "tx_gain_dbi": l.report.tx_gain_dbi,
                "rx_gain_dbi": l.report.rx_gain_dbi,
                "rx_power_dbm": l.report.rx_power_dbm,
                "margin_db": l.report.margin_db,
                "covered": l.report.covered,
            }));
        }
    }
    let c = &report.coverage;
    lines.push(json!({
        "record": "coverage_summary",
        "total_cells": c.total_cells,
        "covered_cells": c.covered_cells,
        "covered_fraction": c.covered_fraction,
        "covered_area_m2": c.covered_area_m2,
        "max_rx_power_dbm": c.max_rx_power_dbm,
        "min_rx_power_dbm": c.min_rx_power_dbm,
    }));
    for (b, r) in &c.radius_samples_m {
        lines.push(json!({
            "record": "radius",
            "bearing_deg": b,
            "radius_m": r,
        }));
    }
    let mut out = String::new();
    for line in lines {
        let _ = writeln!(out, "{line}");
    }
    out
}
