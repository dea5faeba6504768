//! Scenario files: one TOML document binding the scene, node layout, radio
//! parameters, capacity configuration and simulator knobs.
//!
//! Every key is optional; omitted sections take the reference defaults (24
//! RUs on a 2 x 12 grid at 2.2 m, 52 UEs on a 4 x 13 grid at 0.8 m, 100 MHz
//! n78 at 30 kHz, DDDSU). Relative paths resolve against the scenario file.
//!
//! ```toml
//! scene = "lab.scene"                  # omitted: free space
//! attenuation_sweep = [0, 10, 20, 30, 40, 50]
//!
//! [ru_grid]                            # or: ru_points = [[x, y, z], ...]
//! origin = [0.5, 0.5, 0.0]
//! rows = 2
//! cols = 12
//! row_step = 4.0
//! col_step = 0.9
//! height = 2.2
//!
//! [ue_grid]                            # or: ue_points = [...]
//! [ru]        # tx_power_dbm, antenna_gain_dbi, attenuation_db, ...
//! [ue]        # antenna_gain_dbi, noise_figure_db, ...
//! [noise]     # bandwidth_hz, temperature_k
//! [trace]     # max_reflections, max_diffraction_order, carrier_frequency, combine_mode, polarization
//! [placement] # sinr_floor_db, averaging = "db" | "linear"
//! [carrier]   # bandwidth_hz, numerology, n_prb, band
//! [tdd]       # pattern = "DDDSU", special_usable
//! [link]      # layers_dl, layers_ul, modulation_order, code_rate, overhead_dl, overhead_ul
//! [harq]      # ack_bits_per_ue
//! [sim]       # n_slots, ue_count, traffic, l2_latency_s, deadline_budget_s, seed, feedback, script, threaded
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::capacity::{CarrierConfig, HarqConstraint, LinkConfig, TddPattern};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::linkbudget::{NoiseModel, RuConfig, UeConfig, MAX_ATTENUATION_DB};
use crate::placement::{ScoreOptions, DEFAULT_SWEEP_DB};
use crate::raytrace::TraceConfig;
use crate::scene::{generate_grid, load_scene, GridSpec, Scene};
use crate::slotsim::{SimConfig, SimParams};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub scene: Option<PathBuf>,
    pub ru_grid: Option<GridSpec>,
    pub ru_points: Option<Vec<[f64; 3]>>,
    pub ue_grid: Option<GridSpec>,
    pub ue_points: Option<Vec<[f64; 3]>>,
    pub ru: RuConfig,
    pub ue: UeConfig,
    pub noise: NoiseModel,
    pub trace: TraceConfig,
    pub placement: ScoreOptions,
    pub attenuation_sweep: Vec<f64>,
    pub carrier: CarrierConfig,
    pub tdd: TddPattern,
    pub link: LinkConfig,
    pub harq: HarqConstraint,
    pub sim: SimParams,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            scene: None,
            ru_grid: None,
            ru_points: None,
            ue_grid: None,
            ue_points: None,
            ru: RuConfig::default(),
            ue: UeConfig::default(),
            noise: NoiseModel::default(),
            trace: TraceConfig::default(),
            placement: ScoreOptions::default(),
            attenuation_sweep: DEFAULT_SWEEP_DB.to_vec(),
            carrier: CarrierConfig::default(),
            tdd: TddPattern::default(),
            link: LinkConfig::default(),
            harq: HarqConstraint::default(),
            sim: SimParams::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

pub fn default_ru_grid() -> GridSpec {
    GridSpec {
        origin: [0.5, 0.5, 0.0],
        rows: 2,
        cols: 12,
        row_step: 4.0,
        col_step: 0.9,
        height: 2.2,
    }
}

pub fn default_ue_grid() -> GridSpec {
    GridSpec {
        origin: [0.4, 0.6, 0.0],
        rows: 4,
        cols: 13,
        row_step: 1.3,
        col_step: 0.85,
        height: 0.8,
    }
}

fn layout(grid: &Option<GridSpec>, points: &Option<Vec<[f64; 3]>>, default: GridSpec, what: &str) -> Result<Vec<Point3>> {
    match (grid, points) {
        (Some(_), Some(_)) => Err(Error::Config(format!("give either {what}_grid or {what}_points, not both"))),
        (None, Some(p)) if p.is_empty() => Err(Error::Config(format!("{what}_points is empty"))),
        (None, Some(p)) => {
            if p.iter().flatten().any(|c| !c.is_finite()) {
                return Err(Error::Config(format!("{what}_points has a non-finite coordinate")));
            }
            Ok(p.iter().map(|&[x, y, z]| Point3::new(x, y, z)).collect())
        }
        (g, None) => {
            let g = g.clone().unwrap_or(default);
            g.validate()?;
            Ok(generate_grid(&g))
        }
    }
}

impl Scenario {
    /// Parses `text`; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut s: Scenario = toml::from_str(text).map_err(|e| Error::Config(format!("scenario: {e}")))?;
        s.base_dir = base_dir.to_path_buf();
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
        Self::parse(&text, &base).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn scene_path(&self) -> Option<PathBuf> {
        self.scene.as_ref().map(|p| self.base_dir.join(p))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.scene_path() {
            if !p.is_file() {
                return Err(Error::Config(format!("scene file {} not found", p.display())));
            }
        }
        self.ru_points()?;
        self.ue_points()?;
        self.ru.validate()?;
        self.ue.validate()?;
        self.noise.validate()?;
        self.trace.validate()?;
        self.carrier.validate()?;
        self.link.validate()?;
        if let Some(v) = self
            .attenuation_sweep
            .iter()
            .find(|v| !(0.0..=MAX_ATTENUATION_DB).contains(*v))
        {
            return Err(Error::Config(format!("attenuation {v} dB outside [0, {MAX_ATTENUATION_DB}]")));
        }
        self.sim_config().validate()
    }

    pub fn ru_points(&self) -> Result<Vec<Point3>> {
        layout(&self.ru_grid, &self.ru_points, default_ru_grid(), "ru")
    }

    pub fn ue_points(&self) -> Result<Vec<Point3>> {
        layout(&self.ue_grid, &self.ue_points, default_ue_grid(), "ue")
    }

    /// The scene file, or an empty (free-space) scene when none is given.
    pub fn load_scene(&self) -> Result<Scene> {
        match self.scene_path() {
            Some(p) => load_scene(p),
            None => Ok(Scene::empty()),
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            carrier: self.carrier.clone(),
            pattern: self.tdd.clone(),
            link: self.link,
            harq: self.harq,
            params: self.sim.clone(),
        }
    }
}
