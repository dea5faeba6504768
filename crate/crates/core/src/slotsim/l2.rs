use log::{debug, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fapi::{Body, ErrorCode, FapiMessage, Grant, PhyConfig};
use crate::capacity::{Direction, TddPattern};
use crate::error::{Error, Result};

/// Per-UE offered load.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrafficModel {
    /// Queues never drain.
    #[default]
    FullBuffer,
    /// Fixed arrival rate in each direction.
    Constant { dl_bps: f64, ul_bps: f64 },
    /// Per-slot arrivals uniform on `[0, 2 * mean]`, drawn from the seeded
    /// simulation RNG.
    Random { mean_dl_bps: f64, mean_ul_bps: f64 },
}

impl TrafficModel {
    pub fn validate(&self) -> Result<()> {
        let rates = match *self {
            TrafficModel::FullBuffer => return Ok(()),
            TrafficModel::Constant { dl_bps, ul_bps } => [dl_bps, ul_bps],
            TrafficModel::Random { mean_dl_bps, mean_ul_bps } => [mean_dl_bps, mean_ul_bps],
        };
        if rates.iter().all(|r| r.is_finite() && *r >= 0.0) {
            Ok(())
        } else {
            Err(Error::Config(format!("traffic rates must be finite and >= 0: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UeContext {
    pub ue_id: u16,
    pub dl_backlog: u64,
    pub ul_backlog: u64,
    /// Never exceeds the HARQ feedback budget; reset at each period start.
    pub dl_slots_used_this_period: u32,
    pub delivered_dl: u64,
    pub delivered_ul: u64,
    pub dl_slots_total: u64,
    pub acked_tbs: u64,
}

impl UeContext {
    pub fn new(ue_id: u16) -> Self {
        Self {
            ue_id,
            dl_backlog: 0,
            ul_backlog: 0,
            dl_slots_used_this_period: 0,
            delivered_dl: 0,
            delivered_ul: 0,
            dl_slots_total: 0,
            acked_tbs: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Fresh,
    AwaitParam,
    AwaitConfig,
    Running,
    Stopped,
}

/// Parameters the scheduler needs from the simulation config.
#[derive(Debug, Clone)]
pub struct L2Setup {
    pub phy: PhyConfig,
    pub pattern: TddPattern,
    pub max_dl_slots_per_period: u32,
    pub dl_tb_bits: u32,
    pub ul_tb_bits: u32,
    pub slot_seconds: f64,
    pub traffic: Vec<TrafficModel>,
    pub seed: u64,
    pub stop_at: Option<u64>,
}

/// MAC scheduler side of the slot procedure: single UE per slot, round robin
/// in each direction.
#[derive(Debug, Clone)]
pub struct L2 {
    setup: L2Setup,
    phase: Phase,
    ues: Vec<UeContext>,
    carry: Vec<[f64; 2]>,
    rng: ChaCha8Rng,
    rr_dl: usize,
    rr_ul: usize,
    /// Slot indications received so far.
    abs_slot: u64,
    pub error_indications: u64,
    pub rach_preambles: u64,
    pub srs_reports: u64,
}

impl L2 {
    pub fn new(setup: L2Setup) -> Result<Self> {
        let n = setup.phy.ue_ids.len();
        if setup.traffic.len() != n {
            return Err(Error::Config(format!("{} traffic models for {n} UEs", setup.traffic.len())));
        }
        Ok(Self {
            ues: setup.phy.ue_ids.iter().map(|&id| UeContext::new(id)).collect(),
            carry: vec![[0.0; 2]; n],
            rng: ChaCha8Rng::seed_from_u64(setup.seed),
            setup,
            phase: Phase::Fresh,
            rr_dl: 0,
            rr_ul: 0,
            abs_slot: 0,
            error_indications: 0,
            rach_preambles: 0,
            srs_reports: 0,
        })
    }

    pub fn ues(&self) -> &[UeContext] {
        &self.ues
    }

    /// Reacts to everything L1 delivered since the last call. An empty batch
    /// before the handshake starts it.
    pub fn respond(&mut self, inbound: &[FapiMessage]) -> Result<Vec<FapiMessage>> {
        let mut out = Vec::new();
        if self.phase == Phase::Fresh {
            self.phase = Phase::AwaitParam;
            out.push(FapiMessage::new(0, 0, Body::ParamRequest));
        }
        for msg in inbound {
            match (&msg.body, self.phase) {
                (Body::ParamResponse { error: ErrorCode::Ok }, Phase::AwaitParam) => {
                    self.phase = Phase::AwaitConfig;
                    out.push(FapiMessage::new(0, 0, Body::ConfigRequest(self.setup.phy.clone())));
                }
                (Body::ConfigResponse { error: ErrorCode::Ok }, Phase::AwaitConfig) => {
                    self.phase = Phase::Running;
                    out.push(FapiMessage::new(0, 0, Body::StartRequest));
                }
                (Body::ParamResponse { error } | Body::ConfigResponse { error }, _) => {
                    return Err(Error::Protocol(format!("{} with {error:?} during handshake", msg.kind())));
                }
                (Body::SlotIndication, Phase::Running) => out.extend(self.schedule(msg.sfn, msg.slot)),
                (Body::SlotIndication, _) => return Err(Error::Protocol("slot indication before start".into())),
                (Body::RxDataIndication(grants), _) => {
                    for g in grants {
                        if let Some(ue) = self.ues.iter_mut().find(|u| u.ue_id == g.ue_id) {
                            ue.delivered_ul += u64::from(g.tb_bits);
                        }
                    }
                }
                (Body::UciIndication(reports), _) => {
                    for r in reports {
                        if let Some(ue) = self.ues.iter_mut().find(|u| u.ue_id == r.ue_id) {
                            ue.acked_tbs += u64::from((r.ack_bitmap & mask(r.n_bits)).count_ones());
                        }
                    }
                }
                (Body::RachIndication(p), _) => self.rach_preambles += p.len() as u64,
                (Body::SrsIndication(s), _) => self.srs_reports += s.len() as u64,
                (Body::ErrorIndication { offending, error }, _) => {
                    warn!("L1 reported {error:?} for message {offending:#04x}");
                    self.error_indications += 1;
                }
                (Body::CrcIndication(_), _) => {}
                (other, _) => debug!("L2 ignores {:?}", other.kind()),
            }
        }
        Ok(out)
    }

    fn arrivals(&mut self) {
        let dt = self.setup.slot_seconds;
        for (k, ue) in self.ues.iter_mut().enumerate() {
            let rates = match self.setup.traffic[k] {
                TrafficModel::FullBuffer => {
                    ue.dl_backlog = u64::MAX;
                    ue.ul_backlog = u64::MAX;
                    continue;
                }
                TrafficModel::Constant { dl_bps, ul_bps } => [dl_bps * dt, ul_bps * dt],
                TrafficModel::Random { mean_dl_bps, mean_ul_bps } => [
                    2.0 * mean_dl_bps * dt * self.rng.gen::<f64>(),
                    2.0 * mean_ul_bps * dt * self.rng.gen::<f64>(),
                ],
            };
            for (d, bits) in rates.into_iter().enumerate() {
                let total = self.carry[k][d] + bits;
                let whole = total.floor();
                self.carry[k][d] = total - whole;
                let backlog = if d == 0 { &mut ue.dl_backlog } else { &mut ue.ul_backlog };
                *backlog = backlog.saturating_add(whole as u64);
            }
        }
    }

    fn pick(&self, start: usize, eligible: impl Fn(&UeContext) -> bool) -> Option<usize> {
        let n = self.ues.len();
        (0..n).map(|k| (start + k) % n).find(|&k| eligible(&self.ues[k]))
    }

    /// Responses to the SLOT.indication at `(sfn, slot)`.
    pub fn schedule(&mut self, sfn: u16, slot: u16) -> Vec<FapiMessage> {
        let abs = self.abs_slot;
        self.abs_slot += 1;
        let pattern = &self.setup.pattern;
        if abs.is_multiple_of(pattern.len() as u64) {
            for ue in &mut self.ues {
                ue.dl_slots_used_this_period = 0;
            }
        }
        self.arrivals();
        let kind = self.setup.pattern.kind_at(abs);
        let dl = self.setup.pattern.carries(kind, Direction::Downlink);
        let ul = self.setup.pattern.carries(kind, Direction::Uplink);
        let mut out = Vec::new();

        if dl || !ul {
            let mut grants = Vec::new();
            let cap = self.setup.max_dl_slots_per_period;
            if dl {
                if let Some(k) = self.pick(self.rr_dl, |u| u.dl_backlog > 0 && u.dl_slots_used_this_period < cap) {
                    let ue = &mut self.ues[k];
                    let tb = ue.dl_backlog.min(u64::from(self.setup.dl_tb_bits)) as u32;
                    ue.dl_backlog -= u64::from(tb);
                    ue.dl_slots_used_this_period += 1;
                    ue.dl_slots_total += 1;
                    ue.delivered_dl += u64::from(tb);
                    grants.push(Grant { ue_id: ue.ue_id, tb_bits: tb });
                    self.rr_dl = k + 1;
                }
            }
            out.push(FapiMessage::new(sfn, slot, Body::DlTtiRequest(grants.clone())));
            if !grants.is_empty() {
                out.push(FapiMessage::new(sfn, slot, Body::TxDataRequest(grants)));
            }
        }
        if ul {
            let mut grants = Vec::new();
            if let Some(k) = self.pick(self.rr_ul, |u| u.ul_backlog > 0) {
                let ue = &mut self.ues[k];
                let tb = ue.ul_backlog.min(u64::from(self.setup.ul_tb_bits)) as u32;
                ue.ul_backlog -= u64::from(tb);
                grants.push(Grant { ue_id: ue.ue_id, tb_bits: tb });
                self.rr_ul = k + 1;
            }
            out.push(FapiMessage::new(sfn, slot, Body::UlTtiRequest(grants)));
        }
        if self.setup.stop_at == Some(abs) {
            self.phase = Phase::Stopped;
            out.push(FapiMessage::new(sfn, slot, Body::StopRequest));
        }
        out
    }
}

fn mask(n_bits: u8) -> u8 {
    if n_bits >= 8 {
        u8::MAX
    } else {
        (1u8 << n_bits) - 1
    }
}
