//! Downlink link budget: RSSI, thermal noise and SINR.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raytrace::ChannelMatrix;

pub const BOLTZMANN: f64 = 1.380_649e-23;
/// SINR assigned to a UE with no usable link when averaging scores.
pub const DEFAULT_SINR_FLOOR_DB: f64 = -30.0;
pub const MAX_ATTENUATION_DB: f64 = 50.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RuConfig {
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
    pub attenuation_db: f64,
    /// Informational; the scalar budget ignores array geometry.
    pub antenna_spacing_m: f64,
    pub height_m: f64,
}

impl Default for RuConfig {
    fn default() -> Self {
        Self {
            tx_power_dbm: 24.0,
            antenna_gain_dbi: 5.0,
            attenuation_db: 0.0,
            antenna_spacing_m: 0.25,
            height_m: 2.2,
        }
    }
}

impl RuConfig {
    pub fn with_attenuation(self, attenuation_db: f64) -> Self {
        Self {
            attenuation_db,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=MAX_ATTENUATION_DB).contains(&self.attenuation_db) {
            return Err(Error::Config(format!(
                "RU attenuation {} dB outside [0, {MAX_ATTENUATION_DB}]",
                self.attenuation_db
            )));
        }
        if !self.tx_power_dbm.is_finite() || !self.antenna_gain_dbi.is_finite() {
            return Err(Error::Config("RU power and gain must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UeConfig {
    pub antenna_gain_dbi: f64,
    pub noise_figure_db: f64,
    pub antenna_spacing_m: f64,
    pub height_m: f64,
}

impl Default for UeConfig {
    fn default() -> Self {
        Self {
            antenna_gain_dbi: 1.1,
            noise_figure_db: 5.0,
            antenna_spacing_m: 0.07,
            height_m: 0.8,
        }
    }
}

impl UeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_figure_db >= 0.0) {
            return Err(Error::Config("UE noise figure must be >= 0 dB".into()));
        }
        if !self.antenna_gain_dbi.is_finite() {
            return Err(Error::Config("UE antenna gain must be finite".into()));
        }
        Ok(())
    }
}

/// Thermal noise over the receiver bandwidth. The noise power is always
/// derived from the current fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub bandwidth_hz: f64,
    pub temperature_k: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            bandwidth_hz: 100e6,
            temperature_k: 290.0,
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0 && self.temperature_k > 0.0) {
            return Err(Error::Config("noise bandwidth and temperature must be > 0".into()));
        }
        Ok(())
    }

    /// kTB in dBm.
    pub fn thermal_noise_dbm(&self) -> f64 {
        linear_to_db(BOLTZMANN * self.temperature_k * self.bandwidth_hz / 1e-3)
    }

    /// Noise floor seen after the UE front end, `N * F`, in mW.
    pub fn effective_noise_mw(&self, ue: &UeConfig) -> f64 {
        db_to_linear(self.thermal_noise_dbm() + ue.noise_figure_db)
    }
}

pub fn noise_power(model: &NoiseModel) -> f64 {
    model.thermal_noise_dbm()
}

/// `P_RU + G_RU - A_RU - PL + G_UE` in dBm; an infinite path loss yields `-inf`.
pub fn rssi(ru: &RuConfig, ue: &UeConfig, path_loss_db: f64) -> f64 {
    if path_loss_db == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    ru.tx_power_dbm + ru.antenna_gain_dbi - ru.attenuation_db - path_loss_db + ue.antenna_gain_dbi
}

/// RSSI per (RU, UE) pair in dBm with a linear (mW) mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct RssiMatrix {
    n_ru: usize,
    n_ue: usize,
    dbm: Vec<f64>,
    mw: Vec<f64>,
}

impl RssiMatrix {
    pub fn from_dbm(n_ru: usize, n_ue: usize, dbm: Vec<f64>) -> Result<Self> {
        if dbm.len() != n_ru * n_ue {
            return Err(Error::DimensionMismatch {
                expected: n_ru * n_ue,
                actual: dbm.len(),
            });
        }
        let mw = dbm.iter().map(|&r| db_to_linear(r)).collect();
        Ok(Self { n_ru, n_ue, dbm, mw })
    }

    pub fn n_ru(&self) -> usize {
        self.n_ru
    }

    pub fn n_ue(&self) -> usize {
        self.n_ue
    }

    pub fn dbm(&self, ru: usize, ue: usize) -> f64 {
        self.dbm[ru * self.n_ue + ue]
    }

    pub fn mw(&self, ru: usize, ue: usize) -> f64 {
        self.mw[ru * self.n_ue + ue]
    }

    /// Same matrix with every RU's attenuation raised by `delta_db`.
    pub fn attenuated(&self, delta_db: f64) -> Self {
        let dbm: Vec<f64> = self.dbm.iter().map(|r| r - delta_db).collect();
        Self::from_dbm(self.n_ru, self.n_ue, dbm).expect("same shape")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "tx_index,rx_index,rssi_dbm")?;
        for i in 0..self.n_ru {
            for j in 0..self.n_ue {
                writeln!(w, "{i},{j},{}", self.dbm(i, j))?;
            }
        }
        Ok(())
    }
}

/// Applies [`rssi`] to every channel entry, one RU configuration per TX row.
pub fn build_rssi_matrix(channel: &ChannelMatrix, rus: &[RuConfig], ue: &UeConfig) -> Result<RssiMatrix> {
    if rus.len() != channel.n_tx() {
        return Err(Error::DimensionMismatch {
            expected: channel.n_tx(),
            actual: rus.len(),
        });
    }
    let dbm = (0..channel.n_tx())
        .flat_map(|i| (0..channel.n_rx()).map(move |j| (i, j)))
        .map(|(i, j)| rssi(&rus[i], ue, channel.path_loss(i, j)))
        .collect();
    RssiMatrix::from_dbm(channel.n_tx(), channel.n_rx(), dbm)
}

/// Linear SINR of `ue` served by `serving` with every other deployed RU
/// interfering. Assumes `serving` is deployed.
pub(crate) fn sinr_linear(ue: usize, serving: usize, deployed: &[usize], rssi: &RssiMatrix, noise_mw: f64) -> f64 {
    let interference: f64 = deployed
        .iter()
        .filter(|&&u| u != serving)
        .map(|&u| rssi.mw(u, ue))
        .sum();
    rssi.mw(serving, ue) / (noise_mw + interference)
}

/// SINR in dB for `ue` served by `serving` among the `deployed` RUs.
pub fn sinr(
    ue_index: usize,
    serving: usize,
    deployed: &[usize],
    rssi: &RssiMatrix,
    noise: &NoiseModel,
    ue: &UeConfig,
) -> Result<f64> {
    if !deployed.contains(&serving) {
        return Err(Error::ServingNotDeployed { serving });
    }
    Ok(linear_to_db(sinr_linear(
        ue_index,
        serving,
        deployed,
        rssi,
        noise.effective_noise_mw(ue),
    )))
}
