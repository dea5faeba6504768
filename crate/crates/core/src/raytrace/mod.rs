//! Deterministic propagation-path enumeration and path loss.
//!
//! Reflections are found with the image method (exact for planar facets),
//! diffraction with a single knife-edge interaction at convex or free facet
//! edges. Antennas are isotropic and facets are opaque, double-sided and
//! infinitely thin.

mod channel;
mod fresnel;
mod tracer;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use channel::{build_channel_matrix, ChannelEntry, ChannelMatrix};
pub use fresnel::{complex_permittivity, reflection_coefficient, Polarization};
pub use tracer::{knife_edge_loss_db, trace_paths, Tracer};

use crate::error::{Error, Result};
use crate::geometry::Point3;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const MAX_SUPPORTED_REFLECTIONS: u8 = 3;
pub const MAX_SUPPORTED_DIFFRACTION_ORDER: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    /// Complex field sum at the carrier frequency.
    #[default]
    Coherent,
    /// Sum of per-path powers.
    #[serde(alias = "power")]
    PowerSum,
}

impl std::str::FromStr for CombineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherent" => Ok(Self::Coherent),
            "power" | "power_sum" => Ok(Self::PowerSum),
            other => Err(Error::Config(format!("unknown combine mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceConfig {
    pub max_reflections: u8,
    pub max_diffraction_order: u8,
    /// Hz
    pub carrier_frequency: f64,
    pub combine_mode: CombineMode,
    pub polarization: Polarization,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            max_reflections: 3,
            max_diffraction_order: 1,
            carrier_frequency: 3.75e9,
            combine_mode: CombineMode::Coherent,
            polarization: Polarization::Te,
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_reflections > MAX_SUPPORTED_REFLECTIONS {
            return Err(Error::Config(format!(
                "max_reflections {} exceeds supported {MAX_SUPPORTED_REFLECTIONS}",
                self.max_reflections
            )));
        }
        if self.max_diffraction_order > MAX_SUPPORTED_DIFFRACTION_ORDER {
            return Err(Error::Config(format!(
                "max_diffraction_order {} exceeds supported {MAX_SUPPORTED_DIFFRACTION_ORDER}",
                self.max_diffraction_order
            )));
        }
        if !(self.carrier_frequency > 0.0 && self.carrier_frequency.is_finite()) {
            return Err(Error::Config("carrier frequency must be > 0".into()));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathKind {
    LineOfSight,
    Reflected(u8),
    Diffracted,
}

impl PathKind {
    pub(crate) fn rank(self) -> u8 {
        match self {
            PathKind::LineOfSight => 0,
            PathKind::Reflected(k) => k,
            PathKind::Diffracted => u8::MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayPath {
    pub kind: PathKind,
    pub interaction_points: Vec<Point3>,
    /// Facet index of each interaction; a diffracting edge reports the facets sharing it.
    pub facets: Vec<usize>,
    /// m
    pub length: f64,
    pub complex_gain: Complex64,
}

/// Isotropic free-space amplitude gain `lambda / (4 pi d)`.
pub fn free_space_gain(distance: f64, frequency: f64) -> f64 {
    SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * distance * frequency)
}

/// Free-space amplitude with the propagation phase `exp(-j k d)`.
pub(crate) fn propagate(distance: f64, frequency: f64) -> Complex64 {
    let k = 2.0 * std::f64::consts::PI * frequency / SPEED_OF_LIGHT;
    Complex64::from_polar(free_space_gain(distance, frequency), -k * distance)
}

/// Combined path loss in dB; `+inf` when there is no path.
pub fn path_loss(paths: &[RayPath], cfg: &TraceConfig) -> f64 {
    if paths.is_empty() {
        return f64::INFINITY;
    }
    let loss = match cfg.combine_mode {
        CombineMode::Coherent => {
            let sum: Complex64 = paths.iter().map(|p| p.complex_gain).sum();
            -20.0 * sum.norm().log10()
        }
        CombineMode::PowerSum => {
            let power: f64 = paths.iter().map(|p| p.complex_gain.norm_sqr()).sum();
            -10.0 * power.log10()
        }
    };
    // total destructive interference reads as blockage
    if loss.is_nan() {
        f64::INFINITY
    } else {
        loss
    }
}
