//! Incumbent protection zones and space-division feasibility.
//!
//! Protection here is purely geometric: a candidate transmitter site is
//! judged by which circular zones contain it, never by interference power.
//! A zone's policy decides whether containment prohibits operation or
//! requires a waiver; sitting exactly on the boundary counts as inside.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::geo::{great_circle_distance_m, GeoPoint};

/// Errors from registry loading and incumbent queries.
#[derive(Debug, Clone, PartialEq)]
pub enum SharingError {
    Parse { line: usize, reason: String },
    DuplicateZoneName(String),
    InvalidZone { name: String, reason: &'static str },
    /// Query against a registry with no zones.
    NoIncumbents,
}

impl fmt::Display for SharingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SharingError::Parse { line, reason } => {
                write!(f, "registry file line {line}: {reason}")
            }
            SharingError::DuplicateZoneName(name) => write!(f, "duplicate zone name {name:?}"),
            SharingError::InvalidZone { name, reason } => write!(f, "zone {name:?}: {reason}"),
            SharingError::NoIncumbents => write!(f, "no incumbents loaded"),
        }
    }
}

impl core::error::Error for SharingError {}

/// What kind of incumbent a zone protects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoneKind {
    /// Radio astronomy in its primary allocation (adjacent 4990–5000 MHz).
    RadioAstronomyPrimary,
    /// One of the observatory sites operating 4950–4990 MHz on a
    /// secondary basis.
    RadioAstronomySecondary,
    /// Navy Cooperative Engagement Capability training areas.
    NavyCec,
}

impl ZoneKind {
    pub fn as_token(&self) -> &'static str {
        match self {
            ZoneKind::RadioAstronomyPrimary => "radio_astronomy_primary",
            ZoneKind::RadioAstronomySecondary => "radio_astronomy_secondary",
            ZoneKind::NavyCec => "navy_cec",
        }
    }

    fn from_token(tok: &str) -> Option<Self> {
        match tok {
            "radio_astronomy_primary" => Some(ZoneKind::RadioAstronomyPrimary),
            "radio_astronomy_secondary" => Some(ZoneKind::RadioAstronomySecondary),
            "navy_cec" => Some(ZoneKind::NavyCec),
            _ => None,
        }
    }
}

/// The consequence of siting inside a zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZonePolicy {
    Prohibit,
    RequireWaiver,
}

impl ZonePolicy {
    pub fn as_token(&self) -> &'static str {
        match self {
            ZonePolicy::Prohibit => "prohibit",
            ZonePolicy::RequireWaiver => "require_waiver",
        }
    }

    fn from_token(tok: &str) -> Option<Self> {
        match tok {
            "prohibit" => Some(ZonePolicy::Prohibit),
            "require_waiver" => Some(ZonePolicy::RequireWaiver),
            _ => None,
        }
    }
}

/// A circular exclusion zone around an incumbent site.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtectionZone {
    name: String,
    center: GeoPoint,
    radius_m: f64,
    kind: ZoneKind,
    policy: ZonePolicy,
}

impl ProtectionZone {
    /// Kind constrains the admissible policy: Navy CEC areas are waiver
    /// territory, primary radio astronomy is a hard prohibition, and
    /// secondary astronomy sites may carry either policy.
    pub fn new(
        name: &str,
        center: GeoPoint,
        radius_m: f64,
        kind: ZoneKind,
        policy: ZonePolicy,
    ) -> Result<Self, SharingError> {
        if name.is_empty() {
            return Err(SharingError::InvalidZone {
                name: name.to_string(),
                reason: "zone name must not be empty",
            });
        }
        if !radius_m.is_finite() || radius_m <= 0.0 {
            return Err(SharingError::InvalidZone {
                name: name.to_string(),
                reason: "radius must be finite and > 0",
            });
        }
        let pairing_ok = match kind {
            ZoneKind::NavyCec => policy == ZonePolicy::RequireWaiver,
            ZoneKind::RadioAstronomyPrimary => policy == ZonePolicy::Prohibit,
            ZoneKind::RadioAstronomySecondary => true,
        };
        if !pairing_ok {
            return Err(SharingError::InvalidZone {
                name: name.to_string(),
                reason: "policy not admissible for this zone kind",
            });
        }
        Ok(ProtectionZone {
            name: name.to_string(),
            center,
            radius_m,
            kind,
            policy,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn center(&self) -> &GeoPoint {
        &self.center
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_m
    }

    pub fn kind(&self) -> ZoneKind {
        self.kind
    }

    pub fn policy(&self) -> ZonePolicy {
        self.policy
    }

    /// Distance from the zone center; boundary equality counts as inside.
    pub fn contains(&self, p: &GeoPoint) -> bool {
        great_circle_distance_m(&self.center, p) <= self.radius_m
    }
}

/// All incumbent zones plus the band-wide airborne prohibition flag.
#[derive(Debug, Clone, PartialEq)]
pub struct IncumbentRegistry {
    zones: Vec<ProtectionZone>,
    airborne_prohibited: bool,
}

impl IncumbentRegistry {
    pub fn new(zones: Vec<ProtectionZone>, airborne_prohibited: bool) -> Result<Self, SharingError> {
        for (i, a) in zones.iter().enumerate() {
            for b in &zones[i + 1..] {
                if a.name == b.name {
                    return Err(SharingError::DuplicateZoneName(a.name.clone()));
                }
            }
        }
        Ok(IncumbentRegistry { zones, airborne_prohibited })
    }

    pub fn empty() -> Self {
        IncumbentRegistry { zones: Vec::new(), airborne_prohibited: true }
    }

    pub fn zones(&self) -> &[ProtectionZone] {
        &self.zones
    }

    pub fn airborne_prohibited(&self) -> bool {
        self.airborne_prohibited
    }
}

/// Parse the plain-text registry format: one zone per line as
/// `name kind policy lat_deg lon_deg radius_m`, `#` comments. Zone names
/// use underscores instead of spaces. Airborne use of the band is always
/// prohibited, so the flag loads as `true`.
pub fn load_registry(text: &str) -> Result<IncumbentRegistry, SharingError> {
    let mut zones = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let line_err = |reason: String| SharingError::Parse { line: lineno + 1, reason };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(line_err(format!(
                "expected 6 fields `name kind policy lat lon radius_m`, got {}",
                fields.len()
            )));
        }
        let name = fields[0];
        let kind = ZoneKind::from_token(fields[1])
            .ok_or_else(|| line_err(format!("unknown zone kind {:?}", fields[1])))?;
        let policy = ZonePolicy::from_token(fields[2])
            .ok_or_else(|| line_err(format!("unknown policy {:?}", fields[2])))?;
        let num = |tok: &str, what: &str| -> Result<f64, SharingError> {
            tok.parse::<f64>()
                .map_err(|_| line_err(format!("bad {what} {tok:?}")))
        };
        let lat = num(fields[3], "latitude")?;
        let lon = num(fields[4], "longitude")?;
        let radius_m = num(fields[5], "radius")?;
        let center = GeoPoint::new(lat, lon, 0.0)
            .map_err(|e| line_err(format!("bad center: {e}")))?;
        zones.push(ProtectionZone::new(name, center, radius_m, kind, policy)?);
    }
    IncumbentRegistry::new(zones, true)
}

/// Site feasibility, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FeasibilityStatus {
    Clear,
    WaiverRequired,
    Prohibited,
}

impl fmt::Display for FeasibilityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeasibilityStatus::Clear => write!(f, "clear"),
            FeasibilityStatus::WaiverRequired => write!(f, "waiver_required"),
            FeasibilityStatus::Prohibited => write!(f, "prohibited"),
        }
    }
}

/// Distance bookkeeping for one zone against a candidate site.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneAssessment {
    pub name: String,
    pub kind: ZoneKind,
    pub policy: ZonePolicy,
    pub distance_m: f64,
    /// `distance - radius`: negative or zero when the site is inside.
    pub margin_m: f64,
    pub triggered: bool,
}

/// Verdict for a candidate site: the most severe policy among the zones
/// containing it, plus per-zone distances and margins.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityVerdict {
    pub status: FeasibilityStatus,
    pub zones: Vec<ZoneAssessment>,
}

impl FeasibilityVerdict {
    pub fn triggered(&self) -> impl Iterator<Item = &ZoneAssessment> {
        self.zones.iter().filter(|z| z.triggered)
    }
}

/// Evaluate a ground-based candidate site against every zone.
///
/// Prohibited if any `Prohibit` zone contains the site, else waiver
/// required if any `RequireWaiver` zone does, else clear. Airborne use is
/// a scenario-level attribute rejected at scenario validation, not here.
pub fn evaluate_site(tx: &GeoPoint, registry: &IncumbentRegistry) -> FeasibilityVerdict {
    let mut status = FeasibilityStatus::Clear;
    let mut zones = Vec::with_capacity(registry.zones().len());
    for zone in registry.zones() {
        let distance_m = great_circle_distance_m(zone.center(), tx);
        let triggered = distance_m <= zone.radius_m();
        if triggered {
            let severity = match zone.policy() {
                ZonePolicy::Prohibit => FeasibilityStatus::Prohibited,
                ZonePolicy::RequireWaiver => FeasibilityStatus::WaiverRequired,
            };
            status = status.max(severity);
        }
        zones.push(ZoneAssessment {
            name: zone.name().to_string(),
            kind: zone.kind(),
            policy: zone.policy(),
            distance_m,
            margin_m: distance_m - zone.radius_m(),
            triggered,
        });
    }
    FeasibilityVerdict { status, zones }
}

/// The zone with the smallest center distance; ties break toward the
/// lexicographically first name.
pub fn nearest_incumbent<'a>(
    tx: &GeoPoint,
    registry: &'a IncumbentRegistry,
) -> Result<(&'a ProtectionZone, f64), SharingError> {
    registry
        .zones()
        .iter()
        .map(|z| (z, great_circle_distance_m(z.center(), tx)))
        .min_by(|(za, da), (zb, db)| da.total_cmp(db).then_with(|| za.name().cmp(zb.name())))
        .ok_or(SharingError::NoIncumbents)
}
