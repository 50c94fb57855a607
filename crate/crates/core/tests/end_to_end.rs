//! Cross-module composition: a full site study against hand-composed
//! expectations, using only the public API.

use psband_core::coverage::{
    compute_coverage, coverage_radius_m, evaluate_rx_sites, summarize, ReferenceReceiver, RxSite,
    Scenario,
};
use psband_core::geo::{destination_point, BoundingBox, GeoPoint};
use psband_core::regulatory::{check_tx_power, standard_band_plan, validate_aggregation, PowerClass};
use psband_core::rf::{
    antenna_gain_dbi, fspl_db, AntennaPattern, Environment, PropagationModel, Transmitter,
};
use psband_core::sharing::{evaluate_site, load_registry, FeasibilityStatus};

#[test]
fn site_study_composes_across_modules() {
    // operating channel: the 10 MHz aggregate at 4980 MHz, 1 W high power
    let plan = standard_band_plan();
    let aggregate = validate_aggregation(&plan, &[12, 13]).unwrap();
    assert_eq!(aggregate.center_mhz, 4980.0);
    let power = check_tx_power(1.0, aggregate.total_bandwidth_mhz, PowerClass::HighPower).unwrap();
    assert!(power.pass);

    // transmitter and two receiver sites on known bearings
    let tx_loc = GeoPoint::new(32.077, -81.222, 60.0).unwrap();
    let tx = Transmitter::new(
        tx_loc,
        AntennaPattern::HalfWaveDipole,
        30.0,
        aggregate.center_mhz,
    )
    .unwrap();
    let near = destination_point(&tx_loc, 45.0, 1_500.0).with_height(2.0).unwrap();
    let far = destination_point(&tx_loc, 200.0, 6_000.0).with_height(2.0).unwrap();
    let env =
        Environment::new(PropagationModel::FreeSpace, 0.0, 0.0002162, 1.6969, 0.0).unwrap();
    let scenario = Scenario::new(
        tx,
        vec![
            RxSite {
                id: 1,
                location: near,
                sensitivity_dbm: -85.0,
                antenna: AntennaPattern::Isotropic,
            },
            RxSite {
                id: 2,
                location: far,
                sensitivity_dbm: -85.0,
                antenna: AntennaPattern::Isotropic,
            },
        ],
        env,
        BoundingBox::centered_on(&tx_loc, 10_000.0).unwrap(),
        100.0,
        ReferenceReceiver { height_m: 2.0, sensitivity_dbm: -85.0 },
    )
    .unwrap();

    // the near site's report must equal the hand-composed budget
    let links = evaluate_rx_sites(&scenario).unwrap();
    let slant = (1_500.0_f64.powi(2) + 58.0_f64.powi(2)).sqrt();
    let el_deg = (-58.0_f64).atan2(1_500.0).to_degrees();
    let expected = 30.0 + antenna_gain_dbi(&AntennaPattern::HalfWaveDipole, 45.0, el_deg).unwrap()
        - fspl_db(4980.0, slant).unwrap();
    assert!(
        (links[0].report.rx_power_dbm - expected).abs() < 0.01,
        "near site {} vs composed {expected}",
        links[0].report.rx_power_dbm
    );
    assert!(links[0].report.covered);
    assert!(!links[1].report.covered, "6 km exceeds the ~3.4 km dipole budget");

    // raster and radius agree with the link reports
    let raster = compute_coverage(&scenario).unwrap();
    let radius = coverage_radius_m(&scenario, 45.0).unwrap();
    assert!(radius > 1_500.0 && radius < 6_000.0, "radius {radius}");
    let summary = summarize(&raster, vec![(45.0, radius)]);
    assert!(summary.covered_fraction > 0.0 && summary.covered_fraction < 1.0);

    // the same site against a minimal registry: inside a 250 mi Atlanta
    // zone, waiver territory
    let registry = load_registry(
        "Atlanta radio_astronomy_secondary require_waiver 33.7490 -84.3880 402336\n",
    )
    .unwrap();
    let verdict = evaluate_site(&tx_loc, &registry);
    assert_eq!(verdict.status, FeasibilityStatus::WaiverRequired);
    assert!(verdict.zones[0].margin_m < 0.0);
}
