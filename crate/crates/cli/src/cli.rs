//! The `psband` command-line surface.
//!
//! Exit codes: 0 success, 1 validation failure (including unknown flags),
//! 2 I/O failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use psband_core::coverage::coverage_radius_m;
use psband_core::regulatory::{
    check_emission_mask, max_conducted_power_w, standard_band_plan, validate_aggregation,
    EmissionMask, PowerClass,
};
use psband_core::sharing::{load_registry, IncumbentRegistry};

use crate::output::{write_coverage_geojson, write_raster_csv};
use crate::raster::compute_coverage_parallel;
use crate::report;
use crate::scenario::{parse_member_list, parse_psd, parse_scenario, AntennaKind, ScenarioFile};

const DEFAULT_MASK_DIR: &str = "data/masks";

#[derive(Debug)]
enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Io(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "psband",
    about = "4.9 GHz public-safety band planning: band plan, power limits, emission masks, \
             incumbent feasibility, and V2X coverage",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the standard band plan, one channel per line
    Bandplan,
    /// Look up the conducted-power limit for a bandwidth and power class
    PowerLimit {
        /// Aggregate bandwidth in MHz (1, 5, 10, 15, or 20)
        #[arg(long)]
        bandwidth: f64,
        /// Power class
        #[arg(long, value_parser = ["low", "high"])]
        class: String,
    },
    /// Check a PSD capture against a named emission mask
    MaskCheck {
        /// PSD capture file: `freq_mhz psd_dbm_per_mhz` per line
        #[arg(long)]
        psd: PathBuf,
        /// Mask name (file stem under the mask directory) or a mask file path
        #[arg(long)]
        mask: String,
        /// Operating channels as comma-separated band-plan ordinals, e.g. 12,13
        #[arg(long)]
        channel: String,
        /// Directory holding <name>.txt mask files
        #[arg(long, default_value = DEFAULT_MASK_DIR)]
        mask_dir: PathBuf,
    },
    /// Full feasibility report for a scenario file
    Feasibility {
        #[arg(long)]
        scenario: PathBuf,
        /// Incumbent registry file (defaults to the scenario's registry.path)
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Optional PSD capture; adds the emission-mask section
        #[arg(long)]
        psd: Option<PathBuf>,
        /// Mask name for --psd (defaults to the scenario's mask.name)
        #[arg(long)]
        mask: Option<String>,
        #[arg(long, default_value = DEFAULT_MASK_DIR)]
        mask_dir: PathBuf,
        /// Output format
        #[arg(long, default_value = "text", value_parser = ["text", "json-lines"])]
        format: String,
        /// Worker threads for the raster (0 = automatic)
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Print the canonical scenario instead of running
        #[arg(long)]
        echo_config: bool,
    },
    /// Link budgets for the scenario's receiver sites
    RxReport {
        #[arg(long)]
        scenario: PathBuf,
        /// Override the transmitter antenna height in meters
        #[arg(long)]
        tx_height: Option<f64>,
        /// Override the transmitter antenna type
        #[arg(long, value_parser = ["isotropic", "dipole", "directional"])]
        antenna: Option<String>,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the canonical scenario instead of running
        #[arg(long)]
        echo_config: bool,
    },
    /// Coverage raster as CSV (optionally GeoJSON)
    Coverage {
        #[arg(long)]
        scenario: PathBuf,
        /// Override the transmitter antenna height in meters
        #[arg(long)]
        tx_height: Option<f64>,
        /// Override the transmitter antenna type
        #[arg(long, value_parser = ["isotropic", "dipole", "directional"])]
        antenna: Option<String>,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write covered cells as GeoJSON to this path
        #[arg(long)]
        geojson: Option<PathBuf>,
        /// Worker threads for the raster (0 = automatic)
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Print the canonical scenario instead of running
        #[arg(long)]
        echo_config: bool,
    },
    /// Contiguously covered distance from the transmitter along a bearing
    Radius {
        #[arg(long)]
        scenario: PathBuf,
        /// Bearing in degrees, 0 = true north, clockwise
        #[arg(long)]
        bearing: f64,
    },
}

/// Parse `argv` (including the program name) and run. Output goes to
/// `out`, diagnostics to `err`; the return value is the process exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Bandplan => cmd_bandplan(out),
        Command::PowerLimit { bandwidth, class } => cmd_power_limit(bandwidth, &class, out),
        Command::MaskCheck { psd, mask, channel, mask_dir } => {
            cmd_mask_check(&psd, &mask, &channel, &mask_dir, out)
        }
        Command::Feasibility {
            scenario,
            registry,
            psd,
            mask,
            mask_dir,
            format,
            threads,
            echo_config,
        } => cmd_feasibility(
            &scenario, registry.as_deref(), psd.as_deref(), mask.as_deref(), &mask_dir, &format,
            threads, echo_config, out,
        ),
        Command::RxReport { scenario, tx_height, antenna, out: out_path, echo_config } => {
            cmd_rx_report(&scenario, tx_height, antenna.as_deref(), out_path.as_deref(), echo_config, out)
        }
        Command::Coverage {
            scenario,
            tx_height,
            antenna,
            out: out_path,
            geojson,
            threads,
            echo_config,
        } => cmd_coverage(
            &scenario, tx_height, antenna.as_deref(), out_path.as_deref(), geojson.as_deref(),
            threads, echo_config, out,
        ),
        Command::Radius { scenario, bearing } => cmd_radius(&scenario, bearing, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("write failed: {e}")))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => emit(out, text),
    }
}

fn load_scenario(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = read_file(path)?;
    parse_scenario(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn apply_overrides(
    file: &mut ScenarioFile,
    tx_height: Option<f64>,
    antenna: Option<&str>,
) -> Result<(), CliError> {
    if let Some(h) = tx_height {
        file.tx_height_m = h;
    }
    if let Some(token) = antenna {
        file.antenna = AntennaKind::from_token(token)
            .ok_or_else(|| CliError::Validation(format!("unknown antenna {token:?}")))?;
    }
    file.validate(None)
        .map_err(|e| CliError::Validation(e.to_string()))
}

/// Resolve a mask by literal file path first, then as `<dir>/<name>.txt`
/// with a case-insensitive stem.
fn load_mask(name_or_path: &str, mask_dir: &Path) -> Result<EmissionMask, CliError> {
    let direct = Path::new(name_or_path);
    let (path, stem) = if direct.is_file() {
        let stem = direct
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(name_or_path)
            .to_string();
        (direct.to_path_buf(), stem)
    } else {
        let stem = name_or_path.to_lowercase();
        let candidate = mask_dir.join(format!("{stem}.txt"));
        if !candidate.is_file() {
            return Err(CliError::Validation(format!(
                "unknown mask {name_or_path:?}: no file at {}",
                candidate.display()
            )));
        }
        (candidate, stem)
    };
    let text = read_file(&path)?;
    EmissionMask::parse(&stem, &text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn load_registry_file(path: &Path) -> Result<IncumbentRegistry, CliError> {
    let text = read_file(path)?;
    load_registry(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn cmd_bandplan(out: &mut dyn Write) -> Result<(), CliError> {
    let plan = standard_band_plan();
    let mut text = String::new();
    for ch in plan.channels() {
        text.push_str(&format!(
            "ch {:>2}  center {:>6.1} MHz  bw {} MHz  span {:.1}-{:.1} MHz\n",
            ch.index,
            ch.center_mhz,
            ch.bandwidth_mhz,
            ch.low_edge_mhz(),
            ch.high_edge_mhz()
        ));
    }
    emit(out, &text)
}

fn cmd_power_limit(bandwidth: f64, class: &str, out: &mut dyn Write) -> Result<(), CliError> {
    let class = if class == "low" { PowerClass::LowPower } else { PowerClass::HighPower };
    let limit = max_conducted_power_w(bandwidth, class)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    emit(out, &format!("{limit} W\n"))
}

fn cmd_mask_check(
    psd_path: &Path,
    mask_name: &str,
    channel_spec: &str,
    mask_dir: &Path,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let members = parse_member_list(channel_spec)
        .map_err(|msg| CliError::Validation(format!("--channel: {msg}")))?;
    let aggregate = validate_aggregation(&standard_band_plan(), &members)
        .map_err(|e| CliError::Validation(format!("--channel: {e}")))?;
    let mask = load_mask(mask_name, mask_dir)?;
    let samples = parse_psd(&read_file(psd_path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", psd_path.display())))?;
    let check = check_emission_mask(&samples, &aggregate, &mask)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let mut text = format!(
        "mask {} vs {} MHz aggregate at {} MHz: {}\n",
        check.mask_name,
        aggregate.total_bandwidth_mhz,
        aggregate.center_mhz,
        if check.compliant { "COMPLIANT" } else { "NON-COMPLIANT" }
    );
    text.push_str(&format!(
        "in-band peak {:.2} dBm/MHz, {} out-of-band samples, {} violations\n",
        check.in_band_peak_dbm_per_mhz,
        check.out_of_band_samples,
        check.violations.len()
    ));
    for v in &check.violations {
        text.push_str(&format!(
            "violation at {:.3} MHz (offset {:.3} MHz): {:.2} dBm/MHz over limit {:.2} by {:.2} dB\n",
            v.freq_mhz, v.offset_mhz, v.psd_dbm_per_mhz, v.limit_dbm_per_mhz, v.deficit_db
        ));
    }
    emit(out, &text)
}

#[allow(clippy::too_many_arguments)]
fn cmd_feasibility(
    scenario_path: &Path,
    registry_path: Option<&Path>,
    psd_path: Option<&Path>,
    mask_name: Option<&str>,
    mask_dir: &Path,
    format: &str,
    threads: usize,
    echo_config: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let file = load_scenario(scenario_path)?;
    if echo_config {
        return emit(out, &file.serialize());
    }
    let scenario = file
        .build()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let aggregate = file
        .aggregate()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let power = psband_core::regulatory::check_tx_power(
        file.tx_power_w,
        aggregate.total_bandwidth_mhz,
        file.power_class,
    )
    .map_err(|e| CliError::Validation(e.to_string()))?;

    // registry: explicit flag first, then the scenario's registry.path
    let registry = match registry_path {
        Some(p) => Some(load_registry_file(p)?),
        None => match &file.registry_path {
            Some(p) => Some(load_registry_file(Path::new(p))?),
            None => None,
        },
    };

    let mask_report = match psd_path {
        None => None,
        Some(psd) => {
            let name = mask_name
                .map(str::to_string)
                .or_else(|| file.mask_name.clone())
                .ok_or_else(|| {
                    CliError::Validation(
                        "--psd given but no mask named (--mask or scenario mask.name)".to_string(),
                    )
                })?;
            let mask = load_mask(&name, mask_dir)?;
            let samples = parse_psd(&read_file(psd)?)
                .map_err(|e| CliError::Validation(format!("{}: {e}", psd.display())))?;
            Some(
                check_emission_mask(&samples, &aggregate, &mask)
                    .map_err(|e| CliError::Validation(e.to_string()))?,
            )
        }
    };

    let report = report::assemble(&scenario, aggregate, power, registry.as_ref(), mask_report, threads)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let rendered = match format {
        "json-lines" => report::render_json_lines(&report),
        _ => report::render_text(&report),
    };
    emit(out, &rendered)
}

fn cmd_rx_report(
    scenario_path: &Path,
    tx_height: Option<f64>,
    antenna: Option<&str>,
    out_path: Option<&Path>,
    echo_config: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut file = load_scenario(scenario_path)?;
    apply_overrides(&mut file, tx_height, antenna)?;
    if echo_config {
        return emit(out, &file.serialize());
    }
    let scenario = file
        .build()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let links = psband_core::coverage::evaluate_rx_sites(&scenario)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    write_output(out_path, &report::render_rx_links(&links), out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_coverage(
    scenario_path: &Path,
    tx_height: Option<f64>,
    antenna: Option<&str>,
    out_path: Option<&Path>,
    geojson_path: Option<&Path>,
    threads: usize,
    echo_config: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut file = load_scenario(scenario_path)?;
    apply_overrides(&mut file, tx_height, antenna)?;
    if echo_config {
        return emit(out, &file.serialize());
    }
    let scenario = file
        .build()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let raster = compute_coverage_parallel(&scenario, threads)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    if let Some(path) = geojson_path {
        let geojson = write_coverage_geojson(&raster);
        fs::write(path, geojson).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    write_output(out_path, &write_raster_csv(&raster), out)
}

fn cmd_radius(scenario_path: &Path, bearing: f64, out: &mut dyn Write) -> Result<(), CliError> {
    let file = load_scenario(scenario_path)?;
    let scenario = file
        .build()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let radius = coverage_radius_m(&scenario, bearing)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    emit(out, &format!("{radius:.1} m\n"))
}
