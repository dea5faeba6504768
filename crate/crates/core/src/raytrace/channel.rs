use std::io::Write;

use rayon::prelude::*;

use super::{path_loss, RayPath, TraceConfig, Tracer};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::scene::Scene;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEntry {
    pub tx_index: usize,
    pub rx_index: usize,
    pub paths: Vec<RayPath>,
    /// dB; `+inf` when no path exists.
    pub path_loss: f64,
}

/// Dense `n_tx x n_rx` grid of traced links, row-major by TX.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    n_tx: usize,
    n_rx: usize,
    entries: Vec<ChannelEntry>,
    config: TraceConfig,
}

impl ChannelMatrix {
    /// Builds a matrix directly from path-loss values (no geometry); used for
    /// synthetic instances and imported measurements.
    pub fn from_path_loss(n_tx: usize, n_rx: usize, path_loss_db: &[f64], config: TraceConfig) -> Result<Self> {
        if path_loss_db.len() != n_tx * n_rx {
            return Err(Error::DimensionMismatch {
                expected: n_tx * n_rx,
                actual: path_loss_db.len(),
            });
        }
        let entries = path_loss_db
            .iter()
            .enumerate()
            .map(|(k, &pl)| ChannelEntry {
                tx_index: k / n_rx,
                rx_index: k % n_rx,
                paths: Vec::new(),
                path_loss: pl,
            })
            .collect();
        Ok(Self {
            n_tx,
            n_rx,
            entries,
            config,
        })
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn config(&self) -> &TraceConfig {
        &self.config
    }

    pub fn entry(&self, tx: usize, rx: usize) -> &ChannelEntry {
        &self.entries[tx * self.n_rx + rx]
    }

    pub fn path_loss(&self, tx: usize, rx: usize) -> f64 {
        self.entry(tx, rx).path_loss
    }

    pub fn entries(&self) -> &[ChannelEntry] {
        &self.entries
    }

    /// CSV with columns `tx_index,rx_index,path_loss_db,n_paths`; blocked links
    /// are written as `inf`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "tx_index,rx_index,path_loss_db,n_paths")?;
        for e in &self.entries {
            writeln!(w, "{},{},{},{}", e.tx_index, e.rx_index, e.path_loss, e.paths.len())?;
        }
        Ok(())
    }
}

/// Traces every (TX, RX) pair in parallel. The result does not depend on
/// evaluation order.
pub fn build_channel_matrix(
    scene: &Scene,
    tx_points: &[Point3],
    rx_points: &[Point3],
    cfg: &TraceConfig,
) -> Result<ChannelMatrix> {
    if tx_points.is_empty() || rx_points.is_empty() {
        return Err(Error::Config("channel matrix needs non-empty TX and RX point lists".into()));
    }
    let tracer = Tracer::new(scene, *cfg)?;
    let n_rx = rx_points.len();
    let entries = (0..tx_points.len() * n_rx)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n_rx, k % n_rx);
            let paths = tracer
                .trace(&tx_points[i], &rx_points[j])
                .map_err(|e| Error::Pair {
                    tx: i,
                    rx: j,
                    source: Box::new(e),
                })?;
            Ok(ChannelEntry {
                tx_index: i,
                rx_index: j,
                path_loss: path_loss(&paths, cfg),
                paths,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelMatrix {
        n_tx: tx_points.len(),
        n_rx,
        entries,
        config: *cfg,
    })
}
