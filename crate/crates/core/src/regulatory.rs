//! The 4940–4990 MHz band plan and its operating rules.
//!
//! The band carries ten 1 MHz channels and eight 5 MHz channels tiling
//! 50 MHz exactly. Contiguous channels may be aggregated up to 20 MHz,
//! conducted power is capped per aggregate bandwidth and power class, and
//! out-of-band emissions must stay under a named spectral emission mask.
//! Masks are data-driven: breakpoints are read from a mask file, never
//! hard-coded here.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Band edges in MHz.
pub const BAND_LOW_MHZ: f64 = 4940.0;
pub const BAND_HIGH_MHZ: f64 = 4990.0;

/// Aggregate widths with a defined power limit, in MHz.
pub const ALLOWED_AGGREGATE_MHZ: [f64; 5] = [1.0, 5.0, 10.0, 15.0, 20.0];

/// Conducted-power cap in MHz for any aggregate.
pub const AGGREGATION_CAP_MHZ: f64 = 20.0;

/// (bandwidth MHz, low-power max W, high-power max W)
const POWER_LIMIT_TABLE_W: [(f64, f64, f64); 5] = [
    (1.0, 0.005, 0.1),
    (5.0, 0.025, 0.5),
    (10.0, 0.05, 1.0),
    (15.0, 0.075, 1.5),
    (20.0, 0.1, 2.0),
];

/// Errors from band-plan, power-limit, and mask operations.
#[derive(Debug, Clone, PartialEq)]
pub enum RegulatoryError {
    UnknownChannelIndex(usize),
    DuplicateChannelIndex(usize),
    EmptyAggregate,
    FragmentedAggregate,
    AggregationCapExceeded { total_mhz: f64 },
    DisallowedAggregateWidth { total_mhz: f64 },
    NoPowerLimitDefined { bandwidth_mhz: f64 },
    InvalidPower(f64),
    ReferencePsdUndefined,
    InvalidPsdSample { freq_mhz: f64 },
    MaskParse { line: usize, reason: String },
    InvalidMask(String),
    InvalidBandPlan(String),
}

impl fmt::Display for RegulatoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegulatoryError::UnknownChannelIndex(i) => write!(f, "unknown channel index {i}"),
            RegulatoryError::DuplicateChannelIndex(i) => write!(f, "duplicate channel index {i}"),
            RegulatoryError::EmptyAggregate => write!(f, "aggregate needs at least one channel"),
            RegulatoryError::FragmentedAggregate => write!(f, "fragmented aggregate"),
            RegulatoryError::AggregationCapExceeded { total_mhz } => {
                write!(f, "aggregation cap exceeded: {total_mhz} MHz > 20 MHz")
            }
            RegulatoryError::DisallowedAggregateWidth { total_mhz } => {
                write!(f, "disallowed aggregate width: {total_mhz} MHz")
            }
            RegulatoryError::NoPowerLimitDefined { bandwidth_mhz } => {
                write!(f, "no power limit defined for {bandwidth_mhz} MHz")
            }
            RegulatoryError::InvalidPower(p) => {
                write!(f, "transmit power {p} W must be finite and > 0")
            }
            RegulatoryError::ReferencePsdUndefined => write!(f, "reference PSD undefined"),
            RegulatoryError::InvalidPsdSample { freq_mhz } => {
                write!(f, "PSD sample at {freq_mhz} MHz has a non-finite value")
            }
            RegulatoryError::MaskParse { line, reason } => {
                write!(f, "mask file line {line}: {reason}")
            }
            RegulatoryError::InvalidMask(msg) => write!(f, "invalid mask: {msg}"),
            RegulatoryError::InvalidBandPlan(msg) => write!(f, "invalid band plan: {msg}"),
        }
    }
}

impl core::error::Error for RegulatoryError {}

/// One channel of the band plan. `index` is the 1-based ordinal within the
/// plan, counted from the low band edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub index: usize,
    pub center_mhz: f64,
    pub bandwidth_mhz: f64,
}

impl Channel {
    pub fn low_edge_mhz(&self) -> f64 {
        self.center_mhz - self.bandwidth_mhz / 2.0
    }

    pub fn high_edge_mhz(&self) -> f64 {
        self.center_mhz + self.bandwidth_mhz / 2.0
    }
}

/// The full channelization of the band.
#[derive(Debug, Clone, PartialEq)]
pub struct BandPlan {
    channels: Vec<Channel>,
}

impl BandPlan {
    /// Validates the channelization invariants: ten 1 MHz plus eight 5 MHz
    /// channels, contiguous and non-overlapping, tiling [4940, 4990] MHz.
    pub fn new(channels: Vec<Channel>) -> Result<Self, RegulatoryError> {
        let n_one = channels.iter().filter(|c| c.bandwidth_mhz == 1.0).count();
        let n_five = channels.iter().filter(|c| c.bandwidth_mhz == 5.0).count();
        if n_one != 10 || n_five != 8 || channels.len() != 18 {
            return Err(RegulatoryError::InvalidBandPlan(String::from(
                "expected ten 1 MHz and eight 5 MHz channels",
            )));
        }
        let mut edge = BAND_LOW_MHZ;
        for (i, ch) in channels.iter().enumerate() {
            if ch.index != i + 1 {
                return Err(RegulatoryError::InvalidBandPlan(String::from(
                    "channel ordinals must run 1..=18 in frequency order",
                )));
            }
            if ch.low_edge_mhz() != edge {
                return Err(RegulatoryError::InvalidBandPlan(String::from(
                    "channels must tile the band without gaps or overlap",
                )));
            }
            edge = ch.high_edge_mhz();
        }
        if edge != BAND_HIGH_MHZ {
            return Err(RegulatoryError::InvalidBandPlan(String::from(
                "channels must end at the 4990 MHz band edge",
            )));
        }
        Ok(BandPlan { channels })
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// Look up a channel by its 1-based ordinal.
    pub fn channel(&self, index: usize) -> Result<&Channel, RegulatoryError> {
        if index == 0 || index > self.channels.len() {
            return Err(RegulatoryError::UnknownChannelIndex(index));
        }
        Ok(&self.channels[index - 1])
    }

    pub fn total_bandwidth_mhz(&self) -> f64 {
        self.channels.iter().map(|c| c.bandwidth_mhz).sum()
    }
}

/// The standard channelization: five 1 MHz channels centered 4940.5–4944.5,
/// eight 5 MHz channels centered 4947.5–4982.5, five 1 MHz channels
/// centered 4985.5–4989.5.
pub fn standard_band_plan() -> BandPlan {
    let mut channels = Vec::with_capacity(18);
    let mut index = 1;
    for i in 0..5 {
        channels.push(Channel {
            index,
            center_mhz: 4940.5 + i as f64,
            bandwidth_mhz: 1.0,
        });
        index += 1;
    }
    for i in 0..8 {
        channels.push(Channel {
            index,
            center_mhz: 4947.5 + 5.0 * i as f64,
            bandwidth_mhz: 5.0,
        });
        index += 1;
    }
    for i in 0..5 {
        channels.push(Channel {
            index,
            center_mhz: 4985.5 + i as f64,
            bandwidth_mhz: 1.0,
        });
        index += 1;
    }
    BandPlan::new(channels).expect("standard plan satisfies its own invariants")
}

/// A contiguous block of aggregated channels.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateChannel {
    /// Member ordinals sorted by frequency.
    pub member_indices: Vec<usize>,
    pub total_bandwidth_mhz: f64,
    pub center_mhz: f64,
}

impl AggregateChannel {
    pub fn low_edge_mhz(&self) -> f64 {
        self.center_mhz - self.total_bandwidth_mhz / 2.0
    }

    pub fn high_edge_mhz(&self) -> f64 {
        self.center_mhz + self.total_bandwidth_mhz / 2.0
    }
}

/// Validate a channel aggregation request against the plan.
///
/// Members must be frequency-contiguous and total one of the widths with a
/// defined power limit (1, 5, 10, 15, or 20 MHz). The order of `indices`
/// does not matter.
pub fn validate_aggregation(
    plan: &BandPlan,
    indices: &[usize],
) -> Result<AggregateChannel, RegulatoryError> {
    if indices.is_empty() {
        return Err(RegulatoryError::EmptyAggregate);
    }
    let mut members: Vec<&Channel> = Vec::with_capacity(indices.len());
    for &i in indices {
        members.push(plan.channel(i)?);
    }
    members.sort_by(|a, b| a.center_mhz.total_cmp(&b.center_mhz));
    for pair in members.windows(2) {
        if pair[0].index == pair[1].index {
            return Err(RegulatoryError::DuplicateChannelIndex(pair[0].index));
        }
        if pair[0].high_edge_mhz() != pair[1].low_edge_mhz() {
            return Err(RegulatoryError::FragmentedAggregate);
        }
    }
    let total_mhz: f64 = members.iter().map(|c| c.bandwidth_mhz).sum();
    if total_mhz > AGGREGATION_CAP_MHZ {
        return Err(RegulatoryError::AggregationCapExceeded { total_mhz });
    }
    if !ALLOWED_AGGREGATE_MHZ.contains(&total_mhz) {
        return Err(RegulatoryError::DisallowedAggregateWidth { total_mhz });
    }
    let low = members[0].low_edge_mhz();
    let high = members[members.len() - 1].high_edge_mhz();
    Ok(AggregateChannel {
        member_indices: members.iter().map(|c| c.index).collect(),
        total_bandwidth_mhz: total_mhz,
        center_mhz: (low + high) / 2.0,
    })
}

/// Station power class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerClass {
    LowPower,
    HighPower,
}

impl fmt::Display for PowerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PowerClass::LowPower => write!(f, "low"),
            PowerClass::HighPower => write!(f, "high"),
        }
    }
}

/// Maximum conducted power in watts for a channel bandwidth and power
/// class. Exact table lookup; unlisted bandwidths have no defined limit.
pub fn max_conducted_power_w(
    bandwidth_mhz: f64,
    class: PowerClass,
) -> Result<f64, RegulatoryError> {
    for &(bw, low, high) in &POWER_LIMIT_TABLE_W {
        if bw == bandwidth_mhz {
            return Ok(match class {
                PowerClass::LowPower => low,
                PowerClass::HighPower => high,
            });
        }
    }
    Err(RegulatoryError::NoPowerLimitDefined { bandwidth_mhz })
}

/// Outcome of a conducted-power check.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCheck {
    pub tx_power_w: f64,
    pub limit_w: f64,
    pub bandwidth_mhz: f64,
    pub class: PowerClass,
    /// Headroom below the limit, `10 log10(limit / power)`. Negative when
    /// over the limit.
    pub margin_db: f64,
    pub pass: bool,
}

/// Check a transmit power against the conducted-power table. Equality with
/// the limit passes: the rule is "must not exceed".
pub fn check_tx_power(
    tx_power_w: f64,
    bandwidth_mhz: f64,
    class: PowerClass,
) -> Result<PowerCheck, RegulatoryError> {
    if !tx_power_w.is_finite() || tx_power_w <= 0.0 {
        return Err(RegulatoryError::InvalidPower(tx_power_w));
    }
    let limit_w = max_conducted_power_w(bandwidth_mhz, class)?;
    Ok(PowerCheck {
        tx_power_w,
        limit_w,
        bandwidth_mhz,
        class,
        margin_db: 10.0 * (limit_w / tx_power_w).log10(),
        pass: tx_power_w <= limit_w,
    })
}

/// A power spectral density reading. `psd_dbm_per_mhz` may be `-inf`
/// (no measurable energy) but not NaN or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdSample {
    pub freq_mhz: f64,
    pub psd_dbm_per_mhz: f64,
}

/// One breakpoint of an emission mask: required attenuation below the
/// in-band peak PSD at a given offset from the channel edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskBreakpoint {
    pub offset_mhz: f64,
    pub attenuation_db: f64,
}

/// A named spectral emission mask, offsets measured from the channel edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionMask {
    name: String,
    breakpoints: Vec<MaskBreakpoint>,
}

impl EmissionMask {
    /// Breakpoint offsets must be nonnegative and strictly increasing;
    /// attenuations nonnegative and nondecreasing.
    pub fn new(name: &str, breakpoints: Vec<MaskBreakpoint>) -> Result<Self, RegulatoryError> {
        if breakpoints.is_empty() {
            return Err(RegulatoryError::InvalidMask(String::from(
                "mask needs at least one breakpoint",
            )));
        }
        for bp in &breakpoints {
            if !bp.offset_mhz.is_finite() || bp.offset_mhz < 0.0 {
                return Err(RegulatoryError::InvalidMask(String::from(
                    "offsets must be finite and >= 0",
                )));
            }
            if !bp.attenuation_db.is_finite() || bp.attenuation_db < 0.0 {
                return Err(RegulatoryError::InvalidMask(String::from(
                    "attenuations must be finite and >= 0",
                )));
            }
        }
        for pair in breakpoints.windows(2) {
            if pair[1].offset_mhz <= pair[0].offset_mhz {
                return Err(RegulatoryError::InvalidMask(String::from(
                    "offsets must be strictly increasing",
                )));
            }
            if pair[1].attenuation_db < pair[0].attenuation_db {
                return Err(RegulatoryError::InvalidMask(String::from(
                    "attenuations must be nondecreasing with offset",
                )));
            }
        }
        Ok(EmissionMask {
            name: String::from(name),
            breakpoints,
        })
    }

    /// Parse the plain-text mask format: one `offset_mhz attenuation_db`
    /// pair per line, `#` comments. The mask name comes from the caller
    /// (conventionally the file stem).
    pub fn parse(name: &str, text: &str) -> Result<Self, RegulatoryError> {
        let mut breakpoints = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let parse_f64 = |tok: Option<&str>| -> Result<f64, RegulatoryError> {
                tok.and_then(|t| t.parse::<f64>().ok())
                    .ok_or(RegulatoryError::MaskParse {
                        line: lineno + 1,
                        reason: String::from("expected `offset_mhz attenuation_db`"),
                    })
            };
            let offset_mhz = parse_f64(fields.next())?;
            let attenuation_db = parse_f64(fields.next())?;
            if fields.next().is_some() {
                return Err(RegulatoryError::MaskParse {
                    line: lineno + 1,
                    reason: String::from("trailing fields after attenuation"),
                });
            }
            breakpoints.push(MaskBreakpoint {
                offset_mhz,
                attenuation_db,
            });
        }
        EmissionMask::new(name, breakpoints)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn breakpoints(&self) -> &[MaskBreakpoint] {
        &self.breakpoints
    }

    /// Required attenuation at an edge offset: linear interpolation between
    /// breakpoints, clamped to the first/last value outside their range.
    pub fn required_attenuation_db(&self, offset_mhz: f64) -> f64 {
        let bps = &self.breakpoints;
        if offset_mhz <= bps[0].offset_mhz {
            return bps[0].attenuation_db;
        }
        if offset_mhz >= bps[bps.len() - 1].offset_mhz {
            return bps[bps.len() - 1].attenuation_db;
        }
        for pair in bps.windows(2) {
            if offset_mhz <= pair[1].offset_mhz {
                let t = (offset_mhz - pair[0].offset_mhz)
                    / (pair[1].offset_mhz - pair[0].offset_mhz);
                return pair[0].attenuation_db
                    + t * (pair[1].attenuation_db - pair[0].attenuation_db);
            }
        }
        bps[bps.len() - 1].attenuation_db
    }
}

/// An out-of-band sample exceeding the mask line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskViolation {
    pub freq_mhz: f64,
    pub offset_mhz: f64,
    pub psd_dbm_per_mhz: f64,
    pub limit_dbm_per_mhz: f64,
    /// How far above the mask line the sample sits, in dB.
    pub deficit_db: f64,
}

/// Result of checking a PSD trace against an emission mask.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskComplianceReport {
    pub mask_name: String,
    pub in_band_peak_dbm_per_mhz: f64,
    pub out_of_band_samples: usize,
    pub violations: Vec<MaskViolation>,
    pub compliant: bool,
}

/// Check PSD samples against a mask for a given operating aggregate.
///
/// The in-band peak PSD is the reference level; every sample outside the
/// aggregate must sit at least the interpolated mask attenuation below it.
/// A sample exactly on the mask line is compliant.
pub fn check_emission_mask(
    samples: &[PsdSample],
    channel: &AggregateChannel,
    mask: &EmissionMask,
) -> Result<MaskComplianceReport, RegulatoryError> {
    let low = channel.low_edge_mhz();
    let high = channel.high_edge_mhz();

    for s in samples {
        if !s.freq_mhz.is_finite() || s.psd_dbm_per_mhz.is_nan() || s.psd_dbm_per_mhz == f64::INFINITY
        {
            return Err(RegulatoryError::InvalidPsdSample { freq_mhz: s.freq_mhz });
        }
    }

    let peak = samples
        .iter()
        .filter(|s| s.freq_mhz >= low && s.freq_mhz <= high)
        .map(|s| s.psd_dbm_per_mhz)
        .max_by(f64::total_cmp)
        .ok_or(RegulatoryError::ReferencePsdUndefined)?;

    let mut violations = Vec::new();
    let mut out_of_band = 0;
    for s in samples {
        if s.freq_mhz >= low && s.freq_mhz <= high {
            continue;
        }
        out_of_band += 1;
        let offset_mhz = if s.freq_mhz < low {
            low - s.freq_mhz
        } else {
            s.freq_mhz - high
        };
        let limit = peak - mask.required_attenuation_db(offset_mhz);
        if s.psd_dbm_per_mhz > limit {
            violations.push(MaskViolation {
                freq_mhz: s.freq_mhz,
                offset_mhz,
                psd_dbm_per_mhz: s.psd_dbm_per_mhz,
                limit_dbm_per_mhz: limit,
                deficit_db: s.psd_dbm_per_mhz - limit,
            });
        }
    }
    Ok(MaskComplianceReport {
        mask_name: String::from(mask.name()),
        in_band_peak_dbm_per_mhz: peak,
        out_of_band_samples: out_of_band,
        compliant: violations.is_empty(),
        violations,
    })
}
