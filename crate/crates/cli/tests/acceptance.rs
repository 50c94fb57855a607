//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured values. Run with
//! `cargo test -p psband-cli --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};

use psband_cli::raster::compute_coverage_parallel;
use psband_cli::scenario::{parse_scenario, AntennaKind, ScenarioFile};
use psband_core::coverage::{
    compute_coverage, coverage_radius_m, evaluate_rx_sites, ReferenceReceiver, Scenario,
};
use psband_core::geo::{BoundingBox, GeoPoint};
use psband_core::regulatory::{
    check_emission_mask, max_conducted_power_w, standard_band_plan, validate_aggregation,
    EmissionMask, PowerClass, PsdSample, RegulatoryError,
};
use psband_core::rf::{fspl_db, AntennaPattern, Environment, PropagationModel, Transmitter};
use psband_core::sharing::{
    evaluate_site, load_registry, nearest_incumbent, FeasibilityStatus, IncumbentRegistry,
    ProtectionZone, ZoneKind, ZonePolicy,
};

const MILE_M: f64 = 1609.344;

fn repo_path(rel: &str) -> PathBuf {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../..");
    p.push(rel);
    p
}

fn read_repo(rel: &str) -> String {
    let p = repo_path(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn load_scenario_file(rel: &str) -> ScenarioFile {
    parse_scenario(&read_repo(rel)).expect("bundled scenario parses")
}

fn pass(criterion: u32, detail: &str) {
    println!("criterion {criterion}: PASS - {detail}");
}

#[test]
fn criterion_01_power_table_exact() {
    let started = Instant::now();
    use PowerClass::*;
    let table = [
        (1.0, 0.005, 0.1),
        (5.0, 0.025, 0.5),
        (10.0, 0.05, 1.0),
        (15.0, 0.075, 1.5),
        (20.0, 0.1, 2.0),
    ];
    for (bw, low, high) in table {
        assert_eq!(max_conducted_power_w(bw, LowPower).unwrap(), low, "{bw} MHz low");
        assert_eq!(max_conducted_power_w(bw, HighPower).unwrap(), high, "{bw} MHz high");
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(1, &format!("all 10 power-table cells exact in {elapsed:?}"));
}

#[test]
fn criterion_02_band_plan() {
    let plan = standard_band_plan();
    let ones = plan.channels().iter().filter(|c| c.bandwidth_mhz == 1.0).count();
    let fives = plan.channels().iter().filter(|c| c.bandwidth_mhz == 5.0).count();
    assert_eq!((ones, fives), (10, 8));
    assert_eq!(plan.total_bandwidth_mhz(), 50.0);
    assert_eq!(plan.channel(1).unwrap().center_mhz, 4940.5);
    assert_eq!(plan.channel(1).unwrap().bandwidth_mhz, 1.0);
    let mut edge = 4940.0;
    for ch in plan.channels() {
        assert_eq!(ch.low_edge_mhz(), edge);
        edge = ch.high_edge_mhz();
    }
    assert_eq!(edge, 4990.0);

    let twenty = validate_aggregation(&plan, &[6, 7, 8, 9]).unwrap();
    assert_eq!(twenty.total_bandwidth_mhz, 20.0);
    assert!(matches!(
        validate_aggregation(&plan, &[6, 7, 8, 9, 10]).unwrap_err(),
        RegulatoryError::AggregationCapExceeded { .. }
    ));
    pass(2, "10x1 + 8x5 MHz contiguous plan, first center 4940.5 MHz; 25 MHz rejected, 20 MHz accepted");
}

#[test]
fn criterion_03_fspl_oracle() {
    let reference = fspl_db(4900.0, 1000.0).unwrap();
    assert!((reference - 106.25).abs() < 0.01, "got {reference}");

    let six_db = 20.0 * 2.0_f64.log10();
    let mut rng = rand::rngs::StdRng::seed_from_u64(0xf5b1);
    for _ in 0..1000 {
        let f = rng.gen_range(100.0..6000.0);
        let d = rng.gen_range(1.0..100_000.0);
        let delta = fspl_db(f, 2.0 * d).unwrap() - fspl_db(f, d).unwrap();
        assert!((delta - six_db).abs() < 0.001, "f={f} d={d}: delta {delta}");
    }
    pass(3, &format!(
        "fspl(4900 MHz, 1 km) = {reference:.4} dB; +{six_db:.4} dB per doubling over 1000 random pairs"
    ));
}

#[test]
fn criterion_04_radius_matches_budget_inversion() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x11e4);
    let mut worst = 0.0_f64;
    for trial in 0..20 {
        let freq = rng.gen_range(4940.0..4990.0);
        let power_dbm = rng.gen_range(10.0..30.0);
        let sens = -85.0;
        let res = rng.gen_range(50.0..150.0);
        let height = rng.gen_range(5.0..50.0);

        let k = 20.0 * (4.0 * std::f64::consts::PI * freq * 1e6 / 299_792_458.0).log10();
        let analytic = 10.0_f64.powf((power_dbm - sens - k) / 20.0);

        let tx_loc = GeoPoint::new(32.0, -81.0, height).unwrap();
        let tx = Transmitter::new(tx_loc, AntennaPattern::Isotropic, power_dbm, freq).unwrap();
        let env = Environment::new(PropagationModel::FreeSpace, 0.0, 0.0002162, 1.6969, 0.0)
            .unwrap();
        let scenario = Scenario::new(
            tx,
            vec![],
            env,
            BoundingBox::centered_on(&tx_loc, 3.0 * analytic).unwrap(),
            res,
            ReferenceReceiver { height_m: height, sensitivity_dbm: sens },
        )
        .unwrap();
        let bearing = rng.gen_range(0.0..360.0);
        let radius = coverage_radius_m(&scenario, bearing).unwrap();
        let miss = (radius - analytic).abs();
        assert!(
            miss <= res + 1e-6,
            "trial {trial}: radius {radius} vs analytic {analytic} (step {res})"
        );
        worst = worst.max(miss / res);
    }
    pass(4, &format!(
        "20 random free-space budgets inverted within one probe step (worst {worst:.2} steps)"
    ));
}

#[test]
fn criterion_05_antenna_comparison_on_bundled_geometry() {
    let file = load_scenario_file("data/scenarios/savannah_i16_60m.scn");
    // pinned bundled parameters
    let aggregate = file.aggregate().unwrap();
    assert_eq!(aggregate.center_mhz, 4980.0);
    assert_eq!(aggregate.total_bandwidth_mhz, 10.0);
    assert_eq!(file.tx_power_w, 1.0);
    assert_eq!(file.ref_sensitivity_dbm, -85.0);
    assert_eq!(file.tx_height_m, 60.0);
    assert_eq!(file.rx_sites.len(), 5);

    // dipole: every receiver site covered
    let mut dipole = file.clone();
    dipole.antenna = AntennaKind::Dipole;
    let scenario = dipole.build().unwrap();
    let links = evaluate_rx_sites(&scenario).unwrap();
    let covered: Vec<usize> = links.iter().filter(|l| l.report.covered).map(|l| l.id).collect();
    assert_eq!(covered, vec![1, 2, 3, 4, 5], "dipole covered set");

    // and each receiver's raster cell is covered as well
    let raster = compute_coverage(&scenario).unwrap();
    let grid = raster.grid();
    for rx in scenario.rx_sites() {
        let row = ((rx.location.lat_deg() - grid.bbox().min_lat_deg()) / grid.lat_step_deg())
            .round() as usize;
        let col = ((rx.location.lon_deg() - grid.bbox().min_lon_deg()) / grid.lon_step_deg())
            .round() as usize;
        assert!(raster.cell(row, col).covered, "rx {} cell uncovered", rx.id);
    }

    // directional toward downtown: exactly receivers 2 and 4 fall out
    let mut directional = file.clone();
    directional.antenna = AntennaKind::Directional;
    let links = evaluate_rx_sites(&directional.build().unwrap()).unwrap();
    let uncovered: Vec<usize> =
        links.iter().filter(|l| !l.report.covered).map(|l| l.id).collect();
    assert_eq!(uncovered, vec![2, 4], "directional dropout set");
    pass(5, "dipole covers {1,2,3,4,5}; directional at 60 m drops exactly {2,4} (bundled geometry)");
}

#[test]
fn criterion_06_height_effect_by_model() {
    let file = load_scenario_file("data/scenarios/savannah_i16_2m.scn");
    let bearing = file.boresight_az_deg;
    let low = file.build().unwrap();
    let tall_tx = Transmitter::new(
        low.tx().location.with_height(60.0).unwrap(),
        low.tx().antenna,
        low.tx().power_dbm,
        low.tx().freq_mhz,
    )
    .unwrap();
    let tall = low.with_tx(tall_tx);

    let two_ray = |s: &Scenario| {
        let env = Environment::new(
            PropagationModel::TwoRay,
            s.environment().rain_rate_mm_per_h,
            s.environment().rain_coeff_k,
            s.environment().rain_coeff_alpha,
            s.environment().misc_loss_db,
        )
        .unwrap();
        s.with_environment(env)
    };
    let r_low_tworay = coverage_radius_m(&two_ray(&low), bearing).unwrap();
    let r_tall_tworay = coverage_radius_m(&two_ray(&tall), bearing).unwrap();
    assert!(
        r_low_tworay < r_tall_tworay,
        "two-ray: 2 m radius {r_low_tworay} must be strictly below 60 m radius {r_tall_tworay}"
    );

    let r_low_fs = coverage_radius_m(&low, bearing).unwrap();
    let r_tall_fs = coverage_radius_m(&tall, bearing).unwrap();
    assert!(
        (r_low_fs - r_tall_fs).abs() < low.resolution_m(),
        "free space: radii {r_low_fs} vs {r_tall_fs} must agree within a probe step"
    );
    pass(6, &format!(
        "two-ray boresight radius {r_low_tworay:.0} m (2 m) < {r_tall_tworay:.0} m (60 m); \
         free-space radii agree within one step ({r_low_fs:.0} vs {r_tall_fs:.0} m)"
    ));
}

#[test]
fn criterion_07_five_mile_scale() {
    let file = load_scenario_file("data/scenarios/savannah_i16_2m.scn");
    assert_eq!(file.antenna, AntennaKind::Directional);
    assert_eq!(file.tx_height_m, 2.0);
    let scenario = file.build().unwrap();
    let radius = coverage_radius_m(&scenario, file.boresight_az_deg).unwrap();
    let miles = radius / MILE_M;
    assert!(
        (4.0..=6.0).contains(&miles),
        "boresight radius {radius:.0} m = {miles:.2} mi outside [4, 6] mi"
    );
    pass(7, &format!(
        "bundled 2 m directional scenario: boresight radius {radius:.0} m = {miles:.2} mi (calibration check)"
    ));
}

#[test]
fn criterion_08_incumbents() {
    let registry = load_registry(&read_repo("data/incumbents_us.txt")).unwrap();
    assert!(
        registry.zones().iter().any(|z| z.name() == "Atlanta"
            && z.kind() == ZoneKind::RadioAstronomySecondary),
        "bundled registry must carry the Atlanta secondary-astronomy zone"
    );

    let savannah = GeoPoint::new(32.0809, -81.0912, 0.0).unwrap();
    let (nearest, distance) = nearest_incumbent(&savannah, &registry).unwrap();
    assert_eq!(nearest.name(), "Atlanta");
    assert!(
        (distance - 359_000.0).abs() <= 2_000.0,
        "Savannah-Atlanta distance {distance} m outside 359 +/- 2 km"
    );

    // verdict severity is monotone in zone radius over randomized registries
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x8a11);
    for _ in 0..100 {
        let site = GeoPoint::new(
            rng.gen_range(-60.0..60.0),
            rng.gen_range(-179.0..179.0),
            0.0,
        )
        .unwrap();
        let mut zones = Vec::new();
        for i in 0..6 {
            let (kind, policy) = match rng.gen_range(0..3) {
                0 => (ZoneKind::RadioAstronomyPrimary, ZonePolicy::Prohibit),
                1 => (ZoneKind::RadioAstronomySecondary, ZonePolicy::RequireWaiver),
                _ => (ZoneKind::NavyCec, ZonePolicy::RequireWaiver),
            };
            zones.push(
                ProtectionZone::new(
                    &format!("zone{i}"),
                    GeoPoint::new(
                        rng.gen_range(-60.0..60.0),
                        rng.gen_range(-179.0..179.0),
                        0.0,
                    )
                    .unwrap(),
                    rng.gen_range(1_000.0..3_000_000.0),
                    kind,
                    policy,
                )
                .unwrap(),
            );
        }
        let before = evaluate_site(
            &site,
            &IncumbentRegistry::new(zones.clone(), true).unwrap(),
        )
        .status;
        let which = rng.gen_range(0..zones.len());
        zones[which] = ProtectionZone::new(
            zones[which].name(),
            *zones[which].center(),
            zones[which].radius_m() * rng.gen_range(1.0..20.0),
            zones[which].kind(),
            zones[which].policy(),
        )
        .unwrap();
        let after = evaluate_site(&site, &IncumbentRegistry::new(zones, true).unwrap()).status;
        assert!(severity(after) >= severity(before), "{before:?} relaxed to {after:?}");
    }
    pass(8, &format!(
        "nearest incumbent from Savannah is Atlanta at {:.1} km; verdict monotone over 100 randomized registries",
        distance / 1000.0
    ));
}

fn severity(s: FeasibilityStatus) -> u8 {
    match s {
        FeasibilityStatus::Clear => 0,
        FeasibilityStatus::WaiverRequired => 1,
        FeasibilityStatus::Prohibited => 2,
    }
}

#[test]
fn criterion_09_raster_determinism() {
    let started = Instant::now();
    let tx_loc = GeoPoint::new(32.077, -81.222, 60.0).unwrap();
    let tx = Transmitter::new(tx_loc, AntennaPattern::HalfWaveDipole, 30.0, 4980.0).unwrap();
    let env =
        Environment::new(PropagationModel::FreeSpace, 10.0, 0.0002162, 1.6969, 0.0).unwrap();
    // 29.85 km box at 100 m resolution: a 300 x 300 point lattice
    let scenario = Scenario::new(
        tx,
        vec![],
        env,
        BoundingBox::centered_on(&tx_loc, 29_850.0).unwrap(),
        100.0,
        ReferenceReceiver { height_m: 2.0, sensitivity_dbm: -85.0 },
    )
    .unwrap();
    let grid = scenario.grid().unwrap();
    assert_eq!((grid.n_rows(), grid.n_cols()), (300, 300));

    let reference = psband_cli::output::write_raster_csv(&compute_coverage(&scenario).unwrap());
    for threads in [1, 2, 4, 8] {
        let raster = compute_coverage_parallel(&scenario, threads).unwrap();
        let csv = psband_cli::output::write_raster_csv(&raster);
        assert_eq!(csv, reference, "thread count {threads} changed raster bytes");
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    pass(9, &format!(
        "300x300 raster byte-identical across sequential + 1/2/4/8 threads in {elapsed:?}"
    ));
}

#[test]
fn criterion_10_mask_monotonicity() {
    let mask = EmissionMask::parse("dsrc-a", &read_repo("data/masks/dsrc-a.txt")).unwrap();
    let aggregate = validate_aggregation(&standard_band_plan(), &[12, 13]).unwrap();
    let (low, high) = (aggregate.low_edge_mhz(), aggregate.high_edge_mhz());

    // boundary equality: a sample exactly on the mask line passes
    let peak = -8.0;
    let on_line = vec![
        PsdSample { freq_mhz: 4980.0, psd_dbm_per_mhz: peak },
        PsdSample {
            freq_mhz: high + 2.0,
            psd_dbm_per_mhz: peak - mask.required_attenuation_db(2.0),
        },
    ];
    assert!(check_emission_mask(&on_line, &aggregate, &mask).unwrap().compliant);

    let mut rng = rand::rngs::StdRng::seed_from_u64(0x3a5c);
    let mut compliant_seen = 0;
    for trial in 0..500 {
        // draw out-of-band levels around the mask line so both compliant
        // and violating traces appear in force
        let peak = rng.gen_range(-40.0..0.0);
        let mut samples = vec![PsdSample {
            freq_mhz: rng.gen_range(low..high),
            psd_dbm_per_mhz: peak,
        }];
        for _ in 0..rng.gen_range(4..40) {
            let freq_mhz = rng.gen_range(4950.0..5010.0);
            let offset = if freq_mhz < low {
                low - freq_mhz
            } else if freq_mhz > high {
                freq_mhz - high
            } else {
                0.0
            };
            let line = peak - mask.required_attenuation_db(offset);
            samples.push(PsdSample {
                freq_mhz,
                psd_dbm_per_mhz: line + rng.gen_range(-25.0..5.0),
            });
        }
        let before = check_emission_mask(&samples, &aggregate, &mask).unwrap();

        // lower some out-of-band samples and re-check
        let mut lowered = samples.clone();
        for s in &mut lowered {
            if (s.freq_mhz < low || s.freq_mhz > high) && rng.gen_bool(0.7) {
                s.psd_dbm_per_mhz -= rng.gen_range(0.0..40.0);
            }
        }
        let after = check_emission_mask(&lowered, &aggregate, &mask).unwrap();
        if before.compliant {
            compliant_seen += 1;
            assert!(after.compliant, "trial {trial}: lowering OOB samples broke compliance");
        }
        assert!(
            after.violations.len() <= before.violations.len(),
            "trial {trial}: lowering increased the violation count"
        );
    }
    assert!(compliant_seen > 0, "sampler never produced a compliant PSD");
    pass(10, &format!(
        "mask monotonicity held over 500 randomized PSDs ({compliant_seen} compliant before lowering); boundary equality compliant"
    ));
}
