//! Antenna patterns, propagation losses, and the end-to-end link budget.
//!
//! Everything works in dB domain: received power is
//! `Ptx + Gtx + Grx - path_loss - rain_loss - misc_loss`, compared against
//! the receiver sensitivity. Distances below 1 m are rejected outright —
//! none of the models is valid in the near field.

use core::fmt;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::geo::{great_circle_distance_m, initial_bearing_deg, GeoPoint};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Boresight gain of a lossless half-wave dipole, dBi.
pub const DIPOLE_PEAK_GAIN_DBI: f64 = 2.15;

/// The dipole axis null is floored 40 dB below peak instead of -inf.
pub const DIPOLE_NULL_FLOOR_DB: f64 = 40.0;

/// Shortest distance any propagation model here accepts, in meters.
pub const NEAR_FIELD_LIMIT_M: f64 = 1.0;

/// Errors from antenna, propagation, and link-budget evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum RfError {
    /// Azimuth outside [0, 360) or elevation outside [-90, 90].
    InvalidDirection { az_deg: f64, el_deg: f64 },
    /// Antenna pattern parameter out of range.
    InvalidPattern(&'static str),
    /// Distance below the 1 m near-field limit.
    NearField(f64),
    InvalidFrequency(f64),
    /// Two-ray model needs both antenna heights strictly positive.
    NonPositiveHeight(f64),
    /// Environment or endpoint parameter out of range.
    InvalidParameter(&'static str),
    /// Link endpoints closer than the near-field limit.
    DegenerateLink,
    FrequencyMismatch { tx_mhz: f64, rx_mhz: f64 },
}

impl fmt::Display for RfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RfError::InvalidDirection { az_deg, el_deg } => {
                write!(f, "invalid direction: az {az_deg}, el {el_deg}")
            }
            RfError::InvalidPattern(msg) => write!(f, "invalid antenna pattern: {msg}"),
            RfError::NearField(d) => {
                write!(f, "near-field singularity: distance {d} m below 1 m limit")
            }
            RfError::InvalidFrequency(v) => write!(f, "frequency {v} MHz must be finite and > 0"),
            RfError::NonPositiveHeight(h) => {
                write!(f, "two-ray requires positive heights, got {h} m")
            }
            RfError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            RfError::DegenerateLink => write!(f, "degenerate link: endpoints coincide"),
            RfError::FrequencyMismatch { tx_mhz, rx_mhz } => {
                write!(f, "frequency mismatch: tx {tx_mhz} MHz vs rx {rx_mhz} MHz")
            }
        }
    }
}

impl core::error::Error for RfError {}

/// Antenna gain model.
///
/// `DirectionalSector` is the usual parametric sector pattern: attenuation
/// below peak is `12 * ((daz/az_bw)^2 + (el/el_bw)^2)` dB, capped at the
/// front-to-back ratio, so the 3 dB point falls at half the beamwidth on
/// each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AntennaPattern {
    Isotropic,
    /// Vertical half-wave dipole: omnidirectional in azimuth,
    /// `2.15 + 20 log10(|cos((pi/2) sin el) / cos el|)` dBi in elevation.
    HalfWaveDipole,
    DirectionalSector {
        boresight_az_deg: f64,
        az_beamwidth_deg: f64,
        el_beamwidth_deg: f64,
        max_gain_dbi: f64,
        front_to_back_db: f64,
    },
}

impl AntennaPattern {
    /// Validated sector-pattern constructor.
    pub fn sector(
        boresight_az_deg: f64,
        az_beamwidth_deg: f64,
        el_beamwidth_deg: f64,
        max_gain_dbi: f64,
        front_to_back_db: f64,
    ) -> Result<Self, RfError> {
        let pattern = AntennaPattern::DirectionalSector {
            boresight_az_deg,
            az_beamwidth_deg,
            el_beamwidth_deg,
            max_gain_dbi,
            front_to_back_db,
        };
        pattern.validate()?;
        Ok(pattern)
    }

    pub fn validate(&self) -> Result<(), RfError> {
        if let AntennaPattern::DirectionalSector {
            boresight_az_deg,
            az_beamwidth_deg,
            el_beamwidth_deg,
            max_gain_dbi,
            front_to_back_db,
        } = self
        {
            if !boresight_az_deg.is_finite() {
                return Err(RfError::InvalidPattern("boresight azimuth must be finite"));
            }
            for bw in [az_beamwidth_deg, el_beamwidth_deg] {
                if !bw.is_finite() || *bw <= 0.0 || *bw >= 360.0 {
                    return Err(RfError::InvalidPattern("beamwidth must lie in (0, 360)"));
                }
            }
            if !max_gain_dbi.is_finite() {
                return Err(RfError::InvalidPattern("max gain must be finite"));
            }
            if !front_to_back_db.is_finite() || *front_to_back_db < 0.0 {
                return Err(RfError::InvalidPattern("front-to-back ratio must be >= 0"));
            }
        }
        Ok(())
    }
}

/// Smallest absolute angular difference `a - b`, wrapped into [-180, 180].
fn wrap_angle_diff_deg(a: f64, b: f64) -> f64 {
    let d = (a - b) % 360.0;
    if d > 180.0 {
        d - 360.0
    } else if d < -180.0 {
        d + 360.0
    } else {
        d
    }
}

/// Gain of `pattern` toward (azimuth, elevation), in dBi.
///
/// Azimuth is compass-style: [0, 360), 0 = north, clockwise. Elevation is
/// [-90, 90], positive above the horizon.
pub fn antenna_gain_dbi(pattern: &AntennaPattern, az_deg: f64, el_deg: f64) -> Result<f64, RfError> {
    if !az_deg.is_finite()
        || !el_deg.is_finite()
        || !(0.0..360.0).contains(&az_deg)
        || !(-90.0..=90.0).contains(&el_deg)
    {
        return Err(RfError::InvalidDirection { az_deg, el_deg });
    }
    match pattern {
        AntennaPattern::Isotropic => Ok(0.0),
        AntennaPattern::HalfWaveDipole => {
            let floor = DIPOLE_PEAK_GAIN_DBI - DIPOLE_NULL_FLOOR_DB;
            if el_deg.abs() >= 90.0 {
                return Ok(floor);
            }
            let el = el_deg.to_radians();
            let factor = (core::f64::consts::FRAC_PI_2 * el.sin()).cos() / el.cos();
            let gain = DIPOLE_PEAK_GAIN_DBI + 20.0 * factor.abs().log10();
            Ok(gain.max(floor))
        }
        AntennaPattern::DirectionalSector {
            boresight_az_deg,
            az_beamwidth_deg,
            el_beamwidth_deg,
            max_gain_dbi,
            front_to_back_db,
        } => {
            let daz = wrap_angle_diff_deg(az_deg, *boresight_az_deg);
            let az_term = daz / az_beamwidth_deg;
            let el_term = el_deg / el_beamwidth_deg;
            let attenuation = 12.0 * (az_term * az_term + el_term * el_term);
            Ok(max_gain_dbi - attenuation.min(*front_to_back_db))
        }
    }
}

/// Free-space path loss `20 log10(4 pi d f / c)` in dB.
pub fn fspl_db(freq_mhz: f64, distance_m: f64) -> Result<f64, RfError> {
    if !freq_mhz.is_finite() || freq_mhz <= 0.0 {
        return Err(RfError::InvalidFrequency(freq_mhz));
    }
    if !distance_m.is_finite() || distance_m < NEAR_FIELD_LIMIT_M {
        return Err(RfError::NearField(distance_m));
    }
    let freq_hz = freq_mhz * 1e6;
    Ok(20.0
        * (4.0 * core::f64::consts::PI * distance_m * freq_hz / SPEED_OF_LIGHT_M_PER_S).log10())
}

/// Two-ray ground-reflection loss in dB.
///
/// Below the crossover distance `d_c = 4 h_tx h_rx / lambda` the model
/// falls back to free space; beyond it the flat-earth asymptote
/// `40 log10(d) - 20 log10(h_tx h_rx)` applies. The piecewise join is not
/// forced continuous.
pub fn two_ray_loss_db(
    freq_mhz: f64,
    distance_m: f64,
    h_tx_m: f64,
    h_rx_m: f64,
) -> Result<f64, RfError> {
    if !freq_mhz.is_finite() || freq_mhz <= 0.0 {
        return Err(RfError::InvalidFrequency(freq_mhz));
    }
    for h in [h_tx_m, h_rx_m] {
        if !h.is_finite() || h <= 0.0 {
            return Err(RfError::NonPositiveHeight(h));
        }
    }
    if !distance_m.is_finite() || distance_m < NEAR_FIELD_LIMIT_M {
        return Err(RfError::NearField(distance_m));
    }
    let lambda_m = SPEED_OF_LIGHT_M_PER_S / (freq_mhz * 1e6);
    let crossover_m = 4.0 * h_tx_m * h_rx_m / lambda_m;
    if distance_m <= crossover_m {
        fspl_db(freq_mhz, distance_m)
    } else {
        Ok(40.0 * distance_m.log10() - 20.0 * (h_tx_m * h_rx_m).log10())
    }
}

/// Propagation model selector for a scenario environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationModel {
    FreeSpace,
    TwoRay,
}

impl fmt::Display for PropagationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropagationModel::FreeSpace => write!(f, "free_space"),
            PropagationModel::TwoRay => write!(f, "two_ray"),
        }
    }
}

/// Propagation environment: model choice, rain, and a flat extra loss.
///
/// Rain uses the specific-attenuation power law `gamma = k R^alpha` dB/km;
/// the coefficients come from the scenario configuration, not from here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    pub propagation_model: PropagationModel,
    pub rain_rate_mm_per_h: f64,
    pub rain_coeff_k: f64,
    pub rain_coeff_alpha: f64,
    pub misc_loss_db: f64,
}

impl Environment {
    pub fn new(
        propagation_model: PropagationModel,
        rain_rate_mm_per_h: f64,
        rain_coeff_k: f64,
        rain_coeff_alpha: f64,
        misc_loss_db: f64,
    ) -> Result<Self, RfError> {
        if !rain_rate_mm_per_h.is_finite() || rain_rate_mm_per_h < 0.0 {
            return Err(RfError::InvalidParameter("rain rate must be >= 0"));
        }
        if !rain_coeff_k.is_finite() || rain_coeff_k <= 0.0 {
            return Err(RfError::InvalidParameter("rain coefficient k must be > 0"));
        }
        if !rain_coeff_alpha.is_finite() || rain_coeff_alpha <= 0.0 {
            return Err(RfError::InvalidParameter("rain coefficient alpha must be > 0"));
        }
        if !misc_loss_db.is_finite() || misc_loss_db < 0.0 {
            return Err(RfError::InvalidParameter("misc loss must be >= 0"));
        }
        Ok(Environment {
            propagation_model,
            rain_rate_mm_per_h,
            rain_coeff_k,
            rain_coeff_alpha,
            misc_loss_db,
        })
    }
}

/// Rain attenuation over a path: `k R^alpha` dB/km times the path length.
/// Zero rain or zero distance gives zero loss.
pub fn rain_attenuation_db(env: &Environment, distance_m: f64) -> f64 {
    if distance_m <= 0.0 || env.rain_rate_mm_per_h == 0.0 {
        return 0.0;
    }
    let gamma_db_per_km = env.rain_coeff_k * env.rain_rate_mm_per_h.powf(env.rain_coeff_alpha);
    gamma_db_per_km * distance_m / 1000.0
}

/// A transmitting station. `location.height_m` is the antenna height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmitter {
    pub location: GeoPoint,
    pub antenna: AntennaPattern,
    pub power_dbm: f64,
    pub freq_mhz: f64,
}

impl Transmitter {
    pub fn new(
        location: GeoPoint,
        antenna: AntennaPattern,
        power_dbm: f64,
        freq_mhz: f64,
    ) -> Result<Self, RfError> {
        antenna.validate()?;
        if !power_dbm.is_finite() {
            return Err(RfError::InvalidParameter("tx power must be finite"));
        }
        if !freq_mhz.is_finite() || freq_mhz <= 0.0 {
            return Err(RfError::InvalidFrequency(freq_mhz));
        }
        Ok(Transmitter { location, antenna, power_dbm, freq_mhz })
    }
}

/// A receiving station with a detection threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Receiver {
    pub location: GeoPoint,
    pub antenna: AntennaPattern,
    pub sensitivity_dbm: f64,
    pub freq_mhz: f64,
}

impl Receiver {
    pub fn new(
        location: GeoPoint,
        antenna: AntennaPattern,
        sensitivity_dbm: f64,
        freq_mhz: f64,
    ) -> Result<Self, RfError> {
        antenna.validate()?;
        if !sensitivity_dbm.is_finite() {
            return Err(RfError::InvalidParameter("sensitivity must be finite"));
        }
        if !freq_mhz.is_finite() || freq_mhz <= 0.0 {
            return Err(RfError::InvalidFrequency(freq_mhz));
        }
        Ok(Receiver { location, antenna, sensitivity_dbm, freq_mhz })
    }
}

/// Everything the link budget produced for one Tx–Rx pair.
///
/// `rx_power_dbm` satisfies the identity
/// `tx_power + tx_gain + rx_gain - path_loss - rain_loss - misc_loss`
/// exactly; `covered` means `rx_power_dbm >= sensitivity` (equality counts).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkReport {
    /// Slant distance between the antennas, meters.
    pub distance_m: f64,
    pub path_loss_db: f64,
    pub rain_loss_db: f64,
    pub misc_loss_db: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub rx_power_dbm: f64,
    pub covered: bool,
    pub margin_db: f64,
}

/// Aim angles from one endpoint toward the other.
///
/// When the endpoints share a surface position the azimuth is undefined;
/// 0 is used and the elevation saturates at +-90.
fn aim_angles_deg(
    from: &GeoPoint,
    to: &GeoPoint,
    ground_m: f64,
) -> Result<(f64, f64), RfError> {
    let dh = to.height_m() - from.height_m();
    if from.same_surface_position(to) {
        let el = if dh >= 0.0 { 90.0 } else { -90.0 };
        return Ok((0.0, el));
    }
    let az = initial_bearing_deg(from, to).map_err(|_| RfError::DegenerateLink)?;
    let el = dh.atan2(ground_m).to_degrees();
    Ok((az, el))
}

/// Full link budget between a transmitter and a receiver.
///
/// The path length is the slant distance `sqrt(ground^2 + dh^2)`; each
/// antenna is evaluated toward the other endpoint; the loss follows the
/// environment's propagation model plus rain and misc losses.
pub fn link_budget(
    tx: &Transmitter,
    rx: &Receiver,
    env: &Environment,
) -> Result<LinkReport, RfError> {
    if tx.freq_mhz != rx.freq_mhz {
        return Err(RfError::FrequencyMismatch { tx_mhz: tx.freq_mhz, rx_mhz: rx.freq_mhz });
    }
    let ground_m = great_circle_distance_m(&tx.location, &rx.location);
    let dh = rx.location.height_m() - tx.location.height_m();
    let slant_m = (ground_m * ground_m + dh * dh).sqrt();
    if slant_m < NEAR_FIELD_LIMIT_M {
        return Err(RfError::DegenerateLink);
    }

    let (tx_az, tx_el) = aim_angles_deg(&tx.location, &rx.location, ground_m)?;
    let (rx_az, rx_el) = aim_angles_deg(&rx.location, &tx.location, ground_m)?;
    let tx_gain_dbi = antenna_gain_dbi(&tx.antenna, tx_az, tx_el)?;
    let rx_gain_dbi = antenna_gain_dbi(&rx.antenna, rx_az, rx_el)?;

    let path_loss_db = match env.propagation_model {
        PropagationModel::FreeSpace => fspl_db(tx.freq_mhz, slant_m)?,
        PropagationModel::TwoRay => two_ray_loss_db(
            tx.freq_mhz,
            slant_m,
            tx.location.height_m(),
            rx.location.height_m(),
        )?,
    };
    let rain_loss_db = rain_attenuation_db(env, slant_m);

    let rx_power_dbm = tx.power_dbm + tx_gain_dbi + rx_gain_dbi
        - path_loss_db
        - rain_loss_db
        - env.misc_loss_db;
    Ok(LinkReport {
        distance_m: slant_m,
        path_loss_db,
        rain_loss_db,
        misc_loss_db: env.misc_loss_db,
        tx_gain_dbi,
        rx_gain_dbi,
        rx_power_dbm,
        covered: rx_power_dbm >= rx.sensitivity_dbm,
        margin_db: rx_power_dbm - rx.sensitivity_dbm,
    })
}
