//! The flat key/value scenario file format.
//!
//! Scenario files are UTF-8 text with one `section.key = value` assignment
//! per line and `#` comments. Parsing applies and materializes every
//! default, so a parsed scenario carries no hidden state: serializing it
//! back out (`--echo-config`) produces a canonical file that parses to an
//! identical scenario. See `docs/scenario_schema.md` for the key table.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use psband_core::coverage::{ReferenceReceiver, RxSite, Scenario};
use psband_core::geo::{BoundingBox, GeoPoint};
use psband_core::regulatory::{
    check_tx_power, standard_band_plan, validate_aggregation, AggregateChannel, PowerClass,
    PsdSample,
};
use psband_core::rf::{AntennaPattern, Environment, PropagationModel, Transmitter};

/// ITU-R P.838-3 specific-attenuation coefficients at 5 GHz, horizontal
/// polarization. Scenario files normally pin these explicitly; the
/// defaults only cover files that omit the keys.
pub const DEFAULT_RAIN_COEFF_K: f64 = 0.0002162;
pub const DEFAULT_RAIN_COEFF_ALPHA: f64 = 1.6969;

/// A scenario-file problem, with the offending line and key when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ScenarioError {
    fn keyed(key: &str, message: String) -> Self {
        ScenarioError { line: None, key: Some(key.to_string()), message }
    }

    fn at(line: usize, key: &str, message: String) -> Self {
        ScenarioError { line: Some(line), key: Some(key.to_string()), message }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(line), Some(key)) => write!(f, "line {line}, {key}: {}", self.message),
            (Some(line), None) => write!(f, "line {line}: {}", self.message),
            (None, Some(key)) => write!(f, "{key}: {}", self.message),
            (None, None) => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ScenarioError {}

/// Antenna selector as spelled in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntennaKind {
    Isotropic,
    Dipole,
    Directional,
}

impl AntennaKind {
    pub fn as_token(&self) -> &'static str {
        match self {
            AntennaKind::Isotropic => "isotropic",
            AntennaKind::Dipole => "dipole",
            AntennaKind::Directional => "directional",
        }
    }

    pub fn from_token(tok: &str) -> Option<Self> {
        match tok {
            "isotropic" => Some(AntennaKind::Isotropic),
            "dipole" => Some(AntennaKind::Dipole),
            "directional" => Some(AntennaKind::Directional),
            _ => None,
        }
    }
}

/// One receiver site as configured in the file. Heights and sensitivities
/// are materialized (defaults already applied).
#[derive(Debug, Clone, PartialEq)]
pub struct RxSpec {
    pub id: usize,
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub height_m: f64,
    pub sensitivity_dbm: f64,
    pub antenna: AntennaKind,
}

/// A fully parsed, fully validated scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub tx_lat_deg: f64,
    pub tx_lon_deg: f64,
    pub tx_height_m: f64,
    pub tx_power_w: f64,
    pub power_class: PowerClass,
    pub antenna: AntennaKind,
    pub boresight_az_deg: f64,
    pub az_beamwidth_deg: f64,
    pub el_beamwidth_deg: f64,
    pub max_gain_dbi: f64,
    pub front_to_back_db: f64,
    pub airborne: bool,
    pub channel_members: Vec<usize>,
    pub rx_sites: Vec<RxSpec>,
    pub ref_height_m: f64,
    pub ref_sensitivity_dbm: f64,
    pub model: PropagationModel,
    pub rain_rate_mm_per_h: f64,
    pub rain_coeff_k: f64,
    pub rain_coeff_alpha: f64,
    pub misc_loss_db: f64,
    pub grid_span_km: f64,
    pub grid_resolution_m: f64,
    pub registry_path: Option<String>,
    pub mask_name: Option<String>,
}

struct RawFile {
    /// key -> (value, 1-based line)
    entries: BTreeMap<String, (String, usize)>,
}

impl RawFile {
    fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            let Some(eq) = line.find('=') else {
                return Err(ScenarioError {
                    line: Some(lineno),
                    key: None,
                    message: format!("expected `key = value`, got {line:?}"),
                });
            };
            let key = line[..eq].trim().to_string();
            let value = line[eq + 1..].trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(ScenarioError {
                    line: Some(lineno),
                    key: None,
                    message: format!("expected `key = value`, got {line:?}"),
                });
            }
            if let Some((_, first)) = entries.get(&key) {
                return Err(ScenarioError::at(
                    lineno,
                    &key,
                    format!("duplicate key (first set on line {first})"),
                ));
            }
            entries.insert(key, (value, lineno));
        }
        Ok(RawFile { entries })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<(f64, usize)>, ScenarioError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<f64>()
                .map(|x| Some((x, line)))
                .map_err(|_| ScenarioError::at(line, key, format!("not a number: {v:?}"))),
        }
    }

    fn require_f64(&mut self, key: &str) -> Result<(f64, usize), ScenarioError> {
        self.take_f64(key)?
            .ok_or_else(|| ScenarioError::keyed(key, "missing required key".to_string()))
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, ScenarioError> {
        Ok(self.take_f64(key)?.map(|(v, _)| v).unwrap_or(default))
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool, ScenarioError> {
        match self.take(key) {
            None => Ok(default),
            Some((v, line)) => match v.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(ScenarioError::at(line, key, format!("expected true/false, got {v:?}"))),
            },
        }
    }
}

/// Parse and validate a scenario file.
///
/// Every key is checked, every default is applied, and the transmit power
/// is verified against the conducted-power table for the selected
/// aggregate. Unknown keys, missing required keys, and invariant
/// violations all name the key (and line, where one exists).
pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let mut raw = RawFile::parse(text)?;

    // required keys, probed in a fixed order so the first missing one is
    // the one reported
    let (tx_lat_deg, _) = raw.require_f64("tx.lat_deg")?;
    let (tx_lon_deg, _) = raw.require_f64("tx.lon_deg")?;
    let (tx_height_m, _) = raw.require_f64("tx.height_m")?;
    let (tx_power_w, power_line) = raw.require_f64("tx.power_w")?;
    let (members_str, members_line) = raw
        .take("channel.members")
        .ok_or_else(|| ScenarioError::keyed("channel.members", "missing required key".into()))?;

    let power_class = match raw.take("tx.power_class") {
        None => PowerClass::HighPower,
        Some((v, line)) => match v.as_str() {
            "low" => PowerClass::LowPower,
            "high" => PowerClass::HighPower,
            _ => {
                return Err(ScenarioError::at(
                    line,
                    "tx.power_class",
                    format!("expected low|high, got {v:?}"),
                ))
            }
        },
    };
    let antenna = match raw.take("tx.antenna") {
        None => AntennaKind::Dipole,
        Some((v, line)) => AntennaKind::from_token(&v).ok_or_else(|| {
            ScenarioError::at(
                line,
                "tx.antenna",
                format!("expected isotropic|dipole|directional, got {v:?}"),
            )
        })?,
    };
    let boresight_az_deg = raw.f64_or("tx.boresight_az_deg", 0.0)?;
    let az_beamwidth_deg = raw.f64_or("tx.az_beamwidth_deg", 65.0)?;
    let el_beamwidth_deg = raw.f64_or("tx.el_beamwidth_deg", 10.0)?;
    let max_gain_dbi = raw.f64_or("tx.max_gain_dbi", 15.0)?;
    let front_to_back_db = raw.f64_or("tx.front_to_back_db", 25.0)?;
    let airborne = raw.bool_or("tx.airborne", false)?;

    let channel_members = parse_member_list(&members_str)
        .map_err(|msg| ScenarioError::at(members_line, "channel.members", msg))?;

    let ref_height_m = raw.f64_or("ref.height_m", 2.0)?;
    let ref_sensitivity_dbm = raw.f64_or("ref.sensitivity_dbm", -85.0)?;

    let model = match raw.take("env.model") {
        None => PropagationModel::FreeSpace,
        Some((v, line)) => match v.as_str() {
            "free_space" => PropagationModel::FreeSpace,
            "two_ray" => PropagationModel::TwoRay,
            _ => {
                return Err(ScenarioError::at(
                    line,
                    "env.model",
                    format!("expected free_space|two_ray, got {v:?}"),
                ))
            }
        },
    };
    let rain_rate_mm_per_h = raw.f64_or("env.rain_rate_mm_per_h", 0.0)?;
    let rain_coeff_k = raw.f64_or("env.rain_coeff_k", DEFAULT_RAIN_COEFF_K)?;
    let rain_coeff_alpha = raw.f64_or("env.rain_coeff_alpha", DEFAULT_RAIN_COEFF_ALPHA)?;
    let misc_loss_db = raw.f64_or("env.misc_loss_db", 0.0)?;

    let grid_span_km = raw.f64_or("grid.span_km", 30.0)?;
    let grid_resolution_m = raw.f64_or("grid.resolution_m", 100.0)?;

    let registry_path = raw.take("registry.path").map(|(v, _)| v);
    let mask_name = raw.take("mask.name").map(|(v, _)| v);

    let rx_count = match raw.take_f64("rx.count")? {
        None => 0,
        Some((v, line)) => {
            if v < 0.0 || v.fract() != 0.0 || v > 256.0 {
                return Err(ScenarioError::at(
                    line,
                    "rx.count",
                    format!("expected a small nonnegative integer, got {v}"),
                ));
            }
            v as usize
        }
    };
    let mut rx_sites = Vec::with_capacity(rx_count);
    for id in 1..=rx_count {
        let (lat_deg, _) = raw.require_f64(&format!("rx.{id}.lat_deg"))?;
        let (lon_deg, _) = raw.require_f64(&format!("rx.{id}.lon_deg"))?;
        let height_m = raw.f64_or(&format!("rx.{id}.height_m"), ref_height_m)?;
        let sensitivity_dbm =
            raw.f64_or(&format!("rx.{id}.sensitivity_dbm"), ref_sensitivity_dbm)?;
        let antenna = match raw.take(&format!("rx.{id}.antenna")) {
            None => AntennaKind::Isotropic,
            Some((v, line)) => match AntennaKind::from_token(&v) {
                Some(AntennaKind::Directional) | None => {
                    return Err(ScenarioError::at(
                        line,
                        &format!("rx.{id}.antenna"),
                        format!("expected isotropic|dipole, got {v:?}"),
                    ))
                }
                Some(kind) => kind,
            },
        };
        rx_sites.push(RxSpec { id, lat_deg, lon_deg, height_m, sensitivity_dbm, antenna });
    }

    // anything left in the map is an unknown key
    if let Some((key, (_, line))) = raw.entries.iter().next() {
        return Err(ScenarioError::at(*line, key, "unknown key".to_string()));
    }

    let file = ScenarioFile {
        tx_lat_deg,
        tx_lon_deg,
        tx_height_m,
        tx_power_w,
        power_class,
        antenna,
        boresight_az_deg,
        az_beamwidth_deg,
        el_beamwidth_deg,
        max_gain_dbi,
        front_to_back_db,
        airborne,
        channel_members,
        rx_sites,
        ref_height_m,
        ref_sensitivity_dbm,
        model,
        rain_rate_mm_per_h,
        rain_coeff_k,
        rain_coeff_alpha,
        misc_loss_db,
        grid_span_km,
        grid_resolution_m,
        registry_path,
        mask_name,
    };
    file.validate(Some(power_line))?;
    Ok(file)
}

pub(crate) fn parse_member_list(s: &str) -> Result<Vec<usize>, String> {
    let mut members = Vec::new();
    for tok in s.split(',') {
        let tok = tok.trim();
        let idx: usize = tok
            .parse()
            .map_err(|_| format!("bad channel index {tok:?}"))?;
        members.push(idx);
    }
    Ok(members)
}

impl ScenarioFile {
    /// Re-run all semantic validation. `power_line` attributes power-limit
    /// failures to the file line carrying `tx.power_w`, when known.
    pub fn validate(&self, power_line: Option<usize>) -> Result<(), ScenarioError> {
        GeoPoint::new(self.tx_lat_deg, self.tx_lon_deg, self.tx_height_m)
            .map_err(|e| ScenarioError::keyed("tx.lat_deg", e.to_string()))?;
        if !self.tx_power_w.is_finite() || self.tx_power_w <= 0.0 {
            return Err(ScenarioError::keyed(
                "tx.power_w",
                format!("power must be > 0 W, got {}", self.tx_power_w),
            ));
        }
        if self.airborne {
            return Err(ScenarioError::keyed(
                "tx.airborne",
                "airborne operation is prohibited across the 4.9 GHz band".to_string(),
            ));
        }

        let aggregate = self.aggregate()?;
        let check = check_tx_power(self.tx_power_w, aggregate.total_bandwidth_mhz, self.power_class)
            .map_err(|e| ScenarioError::keyed("tx.power_w", e.to_string()))?;
        if !check.pass {
            return Err(ScenarioError {
                line: power_line,
                key: Some("tx.power_w".to_string()),
                message: format!(
                    "{} W exceeds the {} W conducted-power limit for {} MHz ({} power class)",
                    check.tx_power_w, check.limit_w, check.bandwidth_mhz, check.class
                ),
            });
        }

        self.tx_antenna_pattern()
            .map_err(|e| ScenarioError::keyed("tx.antenna", e.to_string()))?;
        for rx in &self.rx_sites {
            GeoPoint::new(rx.lat_deg, rx.lon_deg, rx.height_m)
                .map_err(|e| ScenarioError::keyed(&format!("rx.{}.lat_deg", rx.id), e.to_string()))?;
            if !rx.sensitivity_dbm.is_finite() {
                return Err(ScenarioError::keyed(
                    &format!("rx.{}.sensitivity_dbm", rx.id),
                    "sensitivity must be finite".to_string(),
                ));
            }
        }
        if !self.ref_height_m.is_finite() || self.ref_height_m < 0.0 {
            return Err(ScenarioError::keyed(
                "ref.height_m",
                "reference height must be >= 0".to_string(),
            ));
        }
        if !self.ref_sensitivity_dbm.is_finite() {
            return Err(ScenarioError::keyed(
                "ref.sensitivity_dbm",
                "reference sensitivity must be finite".to_string(),
            ));
        }
        self.environment()
            .map_err(|e| ScenarioError::keyed("env.rain_rate_mm_per_h", e.to_string()))?;
        if !self.grid_span_km.is_finite() || self.grid_span_km <= 0.0 {
            return Err(ScenarioError::keyed(
                "grid.span_km",
                "span must be > 0 km".to_string(),
            ));
        }
        if !self.grid_resolution_m.is_finite() || self.grid_resolution_m <= 0.0 {
            return Err(ScenarioError::keyed(
                "grid.resolution_m",
                "resolution must be > 0 m".to_string(),
            ));
        }
        if self.grid_resolution_m > self.grid_span_km * 1000.0 {
            return Err(ScenarioError::keyed(
                "grid.resolution_m",
                "resolution exceeds the grid span".to_string(),
            ));
        }
        Ok(())
    }

    /// The operating aggregate selected by `channel.members`.
    pub fn aggregate(&self) -> Result<AggregateChannel, ScenarioError> {
        validate_aggregation(&standard_band_plan(), &self.channel_members)
            .map_err(|e| ScenarioError::keyed("channel.members", e.to_string()))
    }

    pub fn tx_antenna_pattern(&self) -> Result<AntennaPattern, psband_core::rf::RfError> {
        match self.antenna {
            AntennaKind::Isotropic => Ok(AntennaPattern::Isotropic),
            AntennaKind::Dipole => Ok(AntennaPattern::HalfWaveDipole),
            AntennaKind::Directional => AntennaPattern::sector(
                self.boresight_az_deg,
                self.az_beamwidth_deg,
                self.el_beamwidth_deg,
                self.max_gain_dbi,
                self.front_to_back_db,
            ),
        }
    }

    pub fn environment(&self) -> Result<Environment, psband_core::rf::RfError> {
        Environment::new(
            self.model,
            self.rain_rate_mm_per_h,
            self.rain_coeff_k,
            self.rain_coeff_alpha,
            self.misc_loss_db,
        )
    }

    pub fn tx_power_dbm(&self) -> f64 {
        10.0 * (self.tx_power_w * 1000.0).log10()
    }

    /// Assemble the simulation scenario: transmitter on the selected
    /// aggregate's center frequency, receiver sites, environment, and a
    /// grid box centered on the transmitter.
    pub fn build(&self) -> Result<Scenario, ScenarioError> {
        let aggregate = self.aggregate()?;
        let tx_location = GeoPoint::new(self.tx_lat_deg, self.tx_lon_deg, self.tx_height_m)
            .map_err(|e| ScenarioError::keyed("tx.lat_deg", e.to_string()))?;
        let tx = Transmitter::new(
            tx_location,
            self.tx_antenna_pattern()
                .map_err(|e| ScenarioError::keyed("tx.antenna", e.to_string()))?,
            self.tx_power_dbm(),
            aggregate.center_mhz,
        )
        .map_err(|e| ScenarioError::keyed("tx.power_w", e.to_string()))?;

        let mut sites = Vec::with_capacity(self.rx_sites.len());
        for rx in &self.rx_sites {
            let antenna = match rx.antenna {
                AntennaKind::Isotropic => AntennaPattern::Isotropic,
                AntennaKind::Dipole => AntennaPattern::HalfWaveDipole,
                AntennaKind::Directional => unreachable!("rejected at parse"),
            };
            sites.push(RxSite {
                id: rx.id,
                location: GeoPoint::new(rx.lat_deg, rx.lon_deg, rx.height_m).map_err(|e| {
                    ScenarioError::keyed(&format!("rx.{}.lat_deg", rx.id), e.to_string())
                })?,
                sensitivity_dbm: rx.sensitivity_dbm,
                antenna,
            });
        }

        let environment = self
            .environment()
            .map_err(|e| ScenarioError::keyed("env.rain_rate_mm_per_h", e.to_string()))?;
        let bbox = BoundingBox::centered_on(&tx_location, self.grid_span_km * 1000.0)
            .map_err(|e| ScenarioError::keyed("grid.span_km", e.to_string()))?;
        Scenario::new(
            tx,
            sites,
            environment,
            bbox,
            self.grid_resolution_m,
            ReferenceReceiver {
                height_m: self.ref_height_m,
                sensitivity_dbm: self.ref_sensitivity_dbm,
            },
        )
        .map_err(|e| ScenarioError::keyed("grid.resolution_m", e.to_string()))
    }

    /// Canonical serialization: every key, fixed order, defaults
    /// materialized. `parse_scenario(serialize(s)) == s`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tx.lat_deg = {}", self.tx_lat_deg);
        let _ = writeln!(s, "tx.lon_deg = {}", self.tx_lon_deg);
        let _ = writeln!(s, "tx.height_m = {}", self.tx_height_m);
        let _ = writeln!(s, "tx.power_w = {}", self.tx_power_w);
        let _ = writeln!(s, "tx.power_class = {}", self.power_class);
        let _ = writeln!(s, "tx.antenna = {}", self.antenna.as_token());
        let _ = writeln!(s, "tx.boresight_az_deg = {}", self.boresight_az_deg);
        let _ = writeln!(s, "tx.az_beamwidth_deg = {}", self.az_beamwidth_deg);
        let _ = writeln!(s, "tx.el_beamwidth_deg = {}", self.el_beamwidth_deg);
        let _ = writeln!(s, "tx.max_gain_dbi = {}", self.max_gain_dbi);
        let _ = writeln!(s, "tx.front_to_back_db = {}", self.front_to_back_db);
        let _ = writeln!(s, "tx.airborne = {}", self.airborne);
        let members: Vec<String> = self.channel_members.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(s, "channel.members = {}", members.join(","));
        let _ = writeln!(s, "rx.count = {}", self.rx_sites.len());
        for rx in &self.rx_sites {
            let _ = writeln!(s, "rx.{}.lat_deg = {}", rx.id, rx.lat_deg);
            let _ = writeln!(s, "rx.{}.lon_deg = {}", rx.id, rx.lon_deg);
            let _ = writeln!(s, "rx.{}.height_m = {}", rx.id, rx.height_m);
            let _ = writeln!(s, "rx.{}.sensitivity_dbm = {}", rx.id, rx.sensitivity_dbm);
            let _ = writeln!(s, "rx.{}.antenna = {}", rx.id, rx.antenna.as_token());
        }
        let _ = writeln!(s, "ref.height_m = {}", self.ref_height_m);
        let _ = writeln!(s, "ref.sensitivity_dbm = {}", self.ref_sensitivity_dbm);
        let _ = writeln!(s, "env.model = {}", self.model);
        let _ = writeln!(s, "env.rain_rate_mm_per_h = {}", self.rain_rate_mm_per_h);
        let _ = writeln!(s, "env.rain_coeff_k = {}", self.rain_coeff_k);
        let _ = writeln!(s, "env.rain_coeff_alpha = {}", self.rain_coeff_alpha);
        let _ = writeln!(s, "env.misc_loss_db = {}", self.misc_loss_db);
        let _ = writeln!(s, "grid.span_km = {}", self.grid_span_km);
        let _ = writeln!(s, "grid.resolution_m = {}", self.grid_resolution_m);
        if let Some(path) = &self.registry_path {
            let _ = writeln!(s, "registry.path = {path}");
        }
        if let Some(name) = &self.mask_name {
            let _ = writeln!(s, "mask.name = {name}");
        }
        s
    }
}

/// Parse a PSD capture file: one `freq_mhz psd_dbm_per_mhz` pair per
/// line, `#` comments. `-inf` is accepted as a PSD value.
pub fn parse_psd(text: &str) -> Result<Vec<PsdSample>, ScenarioError> {
    let mut samples = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ScenarioError {
            line: Some(lineno + 1),
            key: None,
            message: msg,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(format!(
                "expected `freq_mhz psd_dbm_per_mhz`, got {} fields",
                fields.len()
            )));
        }
        let freq_mhz: f64 = fields[0]
            .parse()
            .map_err(|_| err(format!("bad frequency {:?}", fields[0])))?;
        let psd_dbm_per_mhz: f64 = match fields[1] {
            "-inf" => f64::NEG_INFINITY,
            v => v.parse().map_err(|_| err(format!("bad PSD value {v:?}")))?,
        };
        samples.push(PsdSample { freq_mhz, psd_dbm_per_mhz });
    }
    Ok(samples)
}
