//! End-to-end behavior of the `psband` command surface: exit codes,
//! override semantics, echo-config identity, and output formats.

use std::path::PathBuf;

fn repo_path(rel: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../..");
    p.push(rel);
    p.to_string_lossy().into_owned()
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["psband".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = psband_cli::run(&argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).expect("stdout is utf-8"),
        String::from_utf8(err).expect("stderr is utf-8"),
    )
}

#[test]
fn bandplan_prints_18_lines() {
    let (code, out, _) = run_cli(&["bandplan"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 18);
    assert!(lines[0].contains("4940.5"), "got {}", lines[0]);
    assert!(lines[17].contains("4989.5"), "got {}", lines[17]);
}

#[test]
fn power_limit_formats_watts() {
    let (code, out, _) = run_cli(&["power-limit", "--bandwidth", "20", "--class", "high"]);
    assert_eq!(code, 0);
    assert_eq!(out, "2 W\n");
    let (code, out, _) = run_cli(&["power-limit", "--bandwidth", "1", "--class", "low"]);
    assert_eq!(code, 0);
    assert_eq!(out, "0.005 W\n");
}

#[test]
fn power_limit_rejects_unlisted_bandwidth() {
    let (code, _, err) = run_cli(&["power-limit", "--bandwidth", "7", "--class", "high"]);
    assert_eq!(code, 1);
    assert!(err.contains("no power limit defined"), "stderr: {err}");
}

#[test]
fn unknown_flag_prints_usage_and_exits_1() {
    let (code, _, err) = run_cli(&["bandplan", "--frobnicate"]);
    assert_eq!(code, 1);
    assert!(err.to_lowercase().contains("usage"), "stderr: {err}");

    let (code, _, err) = run_cli(&["no-such-subcommand"]);
    assert_eq!(code, 1);
    assert!(err.to_lowercase().contains("usage"), "stderr: {err}");
}

#[test]
fn help_exits_0() {
    let (code, out, _) = run_cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.to_lowercase().contains("usage"));
}

#[test]
fn missing_scenario_file_is_io_failure() {
    let (code, _, err) = run_cli(&["radius", "--scenario", "/nonexistent.scn", "--bearing", "0"]);
    assert_eq!(code, 2);
    assert!(err.contains("error:"), "stderr: {err}");
}

#[test]
fn invalid_scenario_is_validation_failure() {
    let path = std::env::temp_dir().join("psband_bad_power.scn");
    std::fs::write(
        &path,
        "tx.lat_deg = 32\ntx.lon_deg = -81\ntx.height_m = 60\ntx.power_w = 5\nchannel.members = 12,13\n",
    )
    .unwrap();
    let (code, _, err) = run_cli(&["rx-report", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("1 W"), "stderr should cite the limit: {err}");
}

#[test]
fn echo_config_round_trips_and_overrides_stay_local() {
    let scn = repo_path("data/scenarios/savannah_i16_60m.scn");
    let (code, base, _) = run_cli(&["rx-report", "--scenario", &scn, "--echo-config"]);
    assert_eq!(code, 0);

    // echo output reparses to the same canonical form
    let reparsed = psband_cli::scenario::parse_scenario(&base).unwrap();
    assert_eq!(reparsed.serialize(), base);

    // an override shows up in the echo, and only in its own keys
    let (code, tall, _) = run_cli(&[
        "rx-report",
        "--scenario",
        &scn,
        "--tx-height",
        "45",
        "--antenna",
        "directional",
        "--echo-config",
    ]);
    assert_eq!(code, 0);
    let base_lines: Vec<&str> = base.lines().collect();
    let tall_lines: Vec<&str> = tall.lines().collect();
    assert_eq!(base_lines.len(), tall_lines.len());
    for (b, t) in base_lines.iter().zip(&tall_lines) {
        if b.starts_with("tx.height_m") {
            assert_eq!(*t, "tx.height_m = 45");
        } else if b.starts_with("tx.antenna") {
            assert_eq!(*t, "tx.antenna = directional");
        } else {
            assert_eq!(b, t, "override leaked into unrelated key");
        }
    }
}

#[test]
fn coverage_csv_covers_all_rx_cells_with_dipole_at_60m() {
    let scn = repo_path("data/scenarios/savannah_i16_60m.scn");
    let (code, csv, _) = run_cli(&[
        "coverage",
        "--scenario",
        &scn,
        "--antenna",
        "dipole",
        "--tx-height",
        "60",
    ]);
    assert_eq!(code, 0);

    let file = psband_cli::scenario::parse_scenario(
        &std::fs::read_to_string(&scn).unwrap(),
    )
    .unwrap();
    let grid = file.build().unwrap().grid().unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), grid.len() + 1, "one row per cell plus header");
    assert_eq!(lines[0], "lat_deg,lon_deg,rx_power_dbm,covered");

    // each bundled receiver's nearest cell must be covered
    for rx in &file.rx_sites {
        let row = ((rx.lat_deg - grid.bbox().min_lat_deg()) / grid.lat_step_deg()).round() as usize;
        let col = ((rx.lon_deg - grid.bbox().min_lon_deg()) / grid.lon_step_deg()).round() as usize;
        let line = lines[1 + row * grid.n_cols() + col];
        assert!(line.ends_with(",1"), "rx {} cell not covered: {line}", rx.id);
    }
}

#[test]
fn coverage_is_byte_identical_across_thread_counts() {
    let scn = repo_path("data/scenarios/savannah_i16_60m.scn");
    // small override grid keeps this test quick
    let tmp = std::env::temp_dir().join("psband_small.scn");
    let mut file =
        psband_cli::scenario::parse_scenario(&std::fs::read_to_string(&scn).unwrap()).unwrap();
    file.grid_span_km = 4.0;
    file.grid_resolution_m = 200.0;
    std::fs::write(&tmp, file.serialize()).unwrap();

    let (code, first, _) = run_cli(&[
        "coverage", "--scenario", tmp.to_str().unwrap(), "--threads", "1",
    ]);
    assert_eq!(code, 0);
    for threads in ["2", "4"] {
        let (code, other, _) = run_cli(&[
            "coverage", "--scenario", tmp.to_str().unwrap(), "--threads", threads,
        ]);
        assert_eq!(code, 0);
        assert_eq!(first, other, "thread count {threads} changed the bytes");
    }
}

#[test]
fn mask_check_against_shipped_masks() {
    let psd = std::env::temp_dir().join("psband_psd.txt");
    std::fs::write(
        &psd,
        "4980.0 -10\n4984.0 -10\n4986.0 -45\n4990.5 -45\n5000.0 -60\n",
    )
    .unwrap();
    let mask_dir = repo_path("data/masks");
    let (code, out, _) = run_cli(&[
        "mask-check",
        "--psd",
        psd.to_str().unwrap(),
        "--mask",
        "dsrc-a",
        "--channel",
        "12,13",
        "--mask-dir",
        &mask_dir,
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("COMPLIANT"), "got {out}");

    // same capture against the stricter DSRC-C mask: the -45 dBm/MHz
    // sample 5.5 MHz out violates the interpolated 41 dB requirement
    let (code, out, _) = run_cli(&[
        "mask-check",
        "--psd",
        psd.to_str().unwrap(),
        "--mask",
        "DSRC-C",
        "--channel",
        "12,13",
        "--mask-dir",
        &mask_dir,
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("NON-COMPLIANT"), "got {out}");
}

#[test]
fn feasibility_json_lines_parse_individually() {
    let scn = repo_path("data/scenarios/savannah_i16_2m.scn");
    let registry = repo_path("data/incumbents_us.txt");
    let (code, out, _) = run_cli(&[
        "feasibility",
        "--scenario",
        &scn,
        "--registry",
        &registry,
        "--format",
        "json-lines",
    ]);
    assert_eq!(code, 0);
    let mut records = Vec::new();
    for line in out.lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("each line is JSON");
        records.push(v["record"].as_str().unwrap().to_string());
    }
    for expected in ["aggregate", "power_check", "verdict", "nearest_incumbent", "rx_link", "coverage_summary", "radius"] {
        assert!(records.iter().any(|r| r == expected), "missing record {expected}");
    }
    // the verdict for the bundled geometry: inside the Atlanta zone
    let verdict_line = out.lines().find(|l| l.contains("\"record\":\"verdict\"")).unwrap();
    assert!(verdict_line.contains("waiver_required"), "got {verdict_line}");
}

#[test]
fn feasibility_sections_track_their_inputs() {
    // no registry, no rx sites, no psd: only regulatory + coverage remain
    let tmp = std::env::temp_dir().join("psband_bare.scn");
    std::fs::write(
        &tmp,
        "tx.lat_deg = 32.077\ntx.lon_deg = -81.222\ntx.height_m = 60\ntx.power_w = 1\n\
         channel.members = 12,13\ngrid.span_km = 4\ngrid.resolution_m = 200\n",
    )
    .unwrap();
    let (code, out, _) = run_cli(&[
        "feasibility", "--scenario", tmp.to_str().unwrap(), "--format", "json-lines",
    ]);
    assert_eq!(code, 0);
    for absent in ["\"record\":\"verdict\"", "\"record\":\"rx_link\"", "\"record\":\"mask_check\""] {
        assert!(!out.contains(absent), "unexpected section {absent} in: {out}");
    }
    for present in ["\"record\":\"aggregate\"", "\"record\":\"power_check\"", "\"record\":\"coverage_summary\""] {
        assert!(out.contains(present), "missing section {present}");
    }
}
