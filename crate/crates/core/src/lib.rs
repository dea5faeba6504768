//! Planning and protocol-simulation toolkit for private 5G O-RAN deployments.
//!
//! The crate covers the deployment pipeline end to end: indoor scenes are
//! ray-traced into a channel matrix ([`raytrace`]), turned into RSSI and SINR
//! ([`linkbudget`]), and searched for the best radio-unit placement
//! ([`placement`]). TDD capacity is computed in [`capacity`], the per-slot
//! L1/L2 FAPI exchange is simulated in [`slotsim`], and experiment logs are
//! summarized in [`measure`].

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod error;
pub mod geometry;
pub mod linkbudget;
pub mod measure;
pub mod placement;
pub mod raytrace;
pub mod scenario;
pub mod scene;
pub mod slotsim;

pub use capacity::{CapacityReport, CarrierConfig, LinkConfig, TddPattern};
pub use error::{Error, Result};
pub use geometry::{Aabb, Point3, Vec3};
pub use linkbudget::{NoiseModel, RssiMatrix, RuConfig, UeConfig};
pub use placement::{Deployment, ScoreOptions};
pub use raytrace::{ChannelMatrix, CombineMode, TraceConfig};
pub use scenario::Scenario;
pub use scene::{Material, Scene};
pub use slotsim::{SimConfig, SimOutput, SimStats};
