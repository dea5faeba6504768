//! L1/L2 slot-procedure simulator.
//!
//! L1 is the master: every slot it sends a SLOT.indication plus any due
//! indications, and L2 answers with the DL/UL requests for that slot. The two
//! actors exchange [`FapiMessage`]s over an ordered, lossless channel. In the
//! default mode both run in one thread driven by the simulated clock;
//! [`run_threaded`] puts L2 on its own thread and yields the same trace.
//!
//! Message identifiers use the SCF 5G FAPI numbering, listed in
//! [`fapi::MessageKind`].

pub mod clock;
pub mod fapi;
pub mod l1;
pub mod l2;
pub mod pcap;

use std::collections::BTreeMap;
use std::sync::mpsc;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::capacity::{tb_bits_per_slot, CarrierConfig, Direction, HarqConstraint, LinkConfig, TddPattern};
use crate::error::{Error, Result};
pub use clock::SlotClock;
pub use fapi::{Body, FapiMessage, Grant, MessageKind};
pub use l1::{FeedbackTiming, Injection, L1State, L1};
pub use l2::{TrafficModel, UeContext, L2};
pub use pcap::{export_pcap, write_pcap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScriptAction {
    Rach { preamble: u8 },
    Srs { ue_id: u16 },
    /// L2 sends STOP.request after its responses for the slot.
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEvent {
    /// Absolute slot index, counted from the first SLOT.indication.
    pub slot: u64,
    #[serde(flatten)]
    pub action: ScriptAction,
}

/// Simulator knobs; radio parameters come from the capacity configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    pub n_slots: u64,
    pub ue_count: u16,
    /// One model for every UE, or one per UE.
    pub traffic: Vec<TrafficModel>,
    pub l2_latency_s: f64,
    /// Defaults to one slot.
    pub deadline_budget_s: Option<f64>,
    pub seed: u64,
    pub feedback: FeedbackTiming,
    pub script: Vec<ScriptEvent>,
    pub threaded: bool,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            n_slots: 10_000,
            ue_count: 4,
            traffic: vec![TrafficModel::FullBuffer],
            l2_latency_s: 100e-6,
            deadline_budget_s: None,
            seed: 0,
            feedback: FeedbackTiming::NextUplinkSlot,
            script: Vec::new(),
            threaded: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimConfig {
    pub carrier: CarrierConfig,
    pub pattern: TddPattern,
    pub link: LinkConfig,
    pub harq: HarqConstraint,
    pub params: SimParams,
}

impl SimConfig {
    pub fn full_buffer(ue_count: u16, n_slots: u64) -> Self {
        Self {
            params: SimParams {
                ue_count,
                n_slots,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.carrier.validate()?;
        self.link.validate()?;
        let p = &self.params;
        if p.n_slots == 0 {
            return Err(Error::Config("n_slots must be >= 1".into()));
        }
        if p.ue_count == 0 || p.ue_count == u16::MAX {
            return Err(Error::Config(format!("ue_count {} out of range", p.ue_count)));
        }
        if p.traffic.len() != 1 && p.traffic.len() != usize::from(p.ue_count) {
            return Err(Error::Config(format!(
                "traffic needs 1 or {} entries, got {}",
                p.ue_count,
                p.traffic.len()
            )));
        }
        p.traffic.iter().try_for_each(TrafficModel::validate)?;
        if !(p.l2_latency_s.is_finite() && p.l2_latency_s >= 0.0) {
            return Err(Error::Config(format!("l2_latency_s must be >= 0, got {}", p.l2_latency_s)));
        }
        if let Some(b) = p.deadline_budget_s {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::Config(format!("deadline_budget_s must be > 0, got {b}")));
            }
        }
        if self.pattern.eligible_slots(Direction::Downlink) == 0 {
            return Err(Error::Config(format!("pattern {} has no downlink slot", self.pattern)));
        }
        match p.feedback {
            FeedbackTiming::Delay(0) => return Err(Error::Config("feedback delay must be >= 1 slot".into())),
            FeedbackTiming::NextUplinkSlot if !self.pattern.slots().contains(&crate::capacity::SlotKind::U) => {
                return Err(Error::Config(format!("pattern {} has no uplink slot for feedback", self.pattern)));
            }
            _ => {}
        }
        for ev in &p.script {
            if let ScriptAction::Srs { ue_id } = ev.action {
                if ue_id == 0 || ue_id > p.ue_count {
                    return Err(Error::Config(format!("script SRS for unknown UE {ue_id}")));
                }
            }
        }
        if p.l2_latency_s >= self.carrier.slot_duration() {
            warn!(
                "L2 latency {} s is not below the slot duration {} s",
                p.l2_latency_s,
                self.carrier.slot_duration()
            );
        }
        Ok(())
    }

    pub fn ue_ids(&self) -> Vec<u16> {
        (1..=self.params.ue_count).collect()
    }

    fn l2_setup(&self) -> l2::L2Setup {
        let p = &self.params;
        l2::L2Setup {
            phy: fapi::PhyConfig {
                numerology: self.carrier.numerology.mu(),
                n_prb: self.carrier.n_prb as u16,
                tdd_pattern: self.pattern.to_string().into_bytes(),
                special_usable: self.pattern.special_usable,
                ue_ids: self.ue_ids(),
            },
            pattern: self.pattern.clone(),
            max_dl_slots_per_period: self.harq.max_dl_slots_per_ue(&self.pattern) as u32,
            dl_tb_bits: tb_bits_per_slot(&self.carrier, &self.link, Direction::Downlink),
            ul_tb_bits: tb_bits_per_slot(&self.carrier, &self.link, Direction::Uplink),
            slot_seconds: self.carrier.slot_duration(),
            traffic: if p.traffic.len() == 1 {
                vec![p.traffic[0]; usize::from(p.ue_count)]
            } else {
                p.traffic.clone()
            },
            seed: p.seed,
            stop_at: p
                .script
                .iter()
                .filter(|e| e.action == ScriptAction::Stop)
                .map(|e| e.slot)
                .min(),
        }
    }

    fn budget_ns(&self) -> u64 {
        let s = self.params.deadline_budget_s.unwrap_or_else(|| self.carrier.slot_duration());
        seconds_to_ns(s)
    }
}

fn seconds_to_ns(s: f64) -> u64 {
    (s * 1e9).round() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Actor {
    L1,
    L2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub timestamp_ns: u64,
    /// Sender.
    pub actor: Actor,
    pub message: FapiMessage,
}

/// All messages exchanged, in channel order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SlotTrace {
    records: Vec<TraceRecord>,
}

impl SlotTrace {
    pub fn push(&mut self, rec: TraceRecord) {
        self.records.push(rec);
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, kind: MessageKind) -> usize {
        self.records.iter().filter(|r| r.message.kind() == kind).count()
    }

    pub fn message_counts(&self) -> BTreeMap<MessageKind, usize> {
        let mut m = BTreeMap::new();
        for r in &self.records {
            *m.entry(r.message.kind()).or_insert(0) += 1;
        }
        m
    }

    /// Delivered bits per UE recomputed from the trace: DL from TX_DATA.request,
    /// UL from RX_DATA.indication.
    pub fn delivered_bits(&self) -> BTreeMap<u16, (u64, u64)> {
        let mut m = BTreeMap::new();
        for r in &self.records {
            let dl = match r.message.body {
                Body::TxDataRequest(_) => true,
                Body::RxDataIndication(_) => false,
                _ => continue,
            };
            for g in r.message.body.grants() {
                let e = m.entry(g.ue_id).or_insert((0, 0));
                if dl {
                    e.0 += u64::from(g.tb_bits);
                } else {
                    e.1 += u64::from(g.tb_bits);
                }
            }
        }
        m
    }
}

/// Counts DL_TTI/UL_TTI requests that arrive more than `budget_s` after the
/// SLOT.indication they answer.
pub fn deadline_audit(trace: &SlotTrace, budget_s: f64) -> Result<usize> {
    if !(budget_s.is_finite() && budget_s > 0.0) {
        return Err(Error::Config(format!("deadline budget must be > 0, got {budget_s}")));
    }
    Ok(audit_ns(trace, seconds_to_ns(budget_s)))
}

fn audit_ns(trace: &SlotTrace, budget_ns: u64) -> usize {
    let mut indication: Option<(u16, u16, u64)> = None;
    let mut misses = 0;
    for r in trace.records() {
        let m = &r.message;
        match m.kind() {
            MessageKind::SlotIndication => indication = Some((m.sfn, m.slot, r.timestamp_ns)),
            MessageKind::DlTtiRequest | MessageKind::UlTtiRequest => {
                if let Some((sfn, slot, t0)) = indication {
                    if (sfn, slot) == (m.sfn, m.slot) && r.timestamp_ns.saturating_sub(t0) > budget_ns {
                        misses += 1;
                    }
                }
            }
            _ => {}
        }
    }
    misses
}

#[derive(Debug, Clone, PartialEq)]
pub struct UeStats {
    pub ue_id: u16,
    pub dl_bits: u64,
    pub ul_bits: u64,
    pub dl_slots: u64,
    pub acked_tbs: u64,
    pub dl_bps: f64,
    pub ul_bps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    pub per_ue: Vec<UeStats>,
    pub slots: u64,
    pub simulated_seconds: f64,
    /// Sum of the per-UE rates.
    pub dl_bps: f64,
    pub ul_bps: f64,
    pub deadline_misses: usize,
    pub message_counts: BTreeMap<MessageKind, usize>,
    pub error_indications: u64,
}

impl SimStats {
    fn collect(l2: &L2, slots: u64, slot_seconds: f64, trace: &SlotTrace, budget_ns: u64) -> Self {
        let t = slots as f64 * slot_seconds;
        let per_ue: Vec<UeStats> = l2
            .ues()
            .iter()
            .map(|u| UeStats {
                ue_id: u.ue_id,
                dl_bits: u.delivered_dl,
                ul_bits: u.delivered_ul,
                dl_slots: u.dl_slots_total,
                acked_tbs: u.acked_tbs,
                dl_bps: u.delivered_dl as f64 / t,
                ul_bps: u.delivered_ul as f64 / t,
            })
            .collect();
        Self {
            dl_bps: per_ue.iter().map(|u| u.dl_bps).sum(),
            ul_bps: per_ue.iter().map(|u| u.ul_bps).sum(),
            per_ue,
            slots,
            simulated_seconds: t,
            deadline_misses: audit_ns(trace, budget_ns),
            message_counts: trace.message_counts(),
            error_indications: l2.error_indications,
        }
    }

    pub fn to_table(&self) -> String {
        let mut s = format!(
            "slots {}  simulated {:.6} s  deadline misses {}\n",
            self.slots, self.simulated_seconds, self.deadline_misses
        );
        s.push_str(&format!("{:>6} {:>14} {:>14} {:>9}\n", "ue", "dl_mbps", "ul_mbps", "dl_slots"));
        for u in &self.per_ue {
            s.push_str(&format!(
                "{:>6} {:>14.3} {:>14.3} {:>9}\n",
                u.ue_id,
                u.dl_bps / 1e6,
                u.ul_bps / 1e6,
                u.dl_slots
            ));
        }
        s.push_str(&format!("{:>6} {:>14.3} {:>14.3}\n", "all", self.dl_bps / 1e6, self.ul_bps / 1e6));
        for (k, n) in &self.message_counts {
            s.push_str(&format!("{k} {n}\n"));
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub stats: SimStats,
    pub trace: SlotTrace,
}

/// Runs the L1 side and records the trace. `exchange` hands a batch of L1
/// messages to L2 and returns L2's replies.
fn drive<F>(cfg: &SimConfig, mut exchange: F) -> Result<(SlotTrace, u64)>
where
    F: FnMut(Vec<FapiMessage>) -> Result<Vec<FapiMessage>>,
{
    let mut l1 = L1::new(cfg.carrier.numerology, cfg.params.feedback);
    for ev in &cfg.params.script {
        match ev.action {
            ScriptAction::Rach { preamble } => l1.inject(ev.slot, Injection::Rach { preamble }),
            ScriptAction::Srs { ue_id } => l1.inject(ev.slot, Injection::Srs { ue_id }),
            ScriptAction::Stop => {}
        }
    }
    let latency = seconds_to_ns(cfg.params.l2_latency_s);
    let mut trace = SlotTrace::default();
    let record = |trace: &mut SlotTrace, t, actor, message| trace.push(TraceRecord { timestamp_ns: t, actor, message });

    let mut inbound = Vec::new();
    while l1.state() != L1State::Running {
        let out = exchange(std::mem::take(&mut inbound))?;
        if out.is_empty() {
            return Err(Error::Protocol("handshake stalled".into()));
        }
        for m in out {
            let replies = l1.handle(&m);
            record(&mut trace, 0, Actor::L2, m);
            for r in replies {
                record(&mut trace, 0, Actor::L1, r.clone());
                inbound.push(r);
            }
        }
        if l1.state() == L1State::Halted {
            return Err(Error::Protocol("PHY halted during handshake".into()));
        }
    }

    let mut slots = 0;
    let mut pending = Vec::new();
    for _ in 0..cfg.params.n_slots {
        let Some(ind) = l1.tick() else { break };
        let t = l1.clock().now_ns();
        let mut batch = vec![ind];
        batch.extend(l1.indicate());
        for m in &batch {
            record(&mut trace, t, Actor::L1, m.clone());
        }
        batch.append(&mut pending);
        for m in exchange(batch)? {
            let replies = l1.handle(&m);
            record(&mut trace, t + latency, Actor::L2, m);
            for r in replies {
                record(&mut trace, t + latency, Actor::L1, r.clone());
                pending.push(r);
            }
        }
        slots += 1;
        l1.end_slot();
    }
    if l1.state() == L1State::Halted {
        warn!("PHY halted after {slots} slots");
    }
    Ok((trace, slots))
}

/// Deterministic single-threaded run.
pub fn run(cfg: &SimConfig) -> Result<SimOutput> {
    cfg.validate()?;
    let mut l2 = L2::new(cfg.l2_setup())?;
    let (trace, slots) = drive(cfg, |batch| l2.respond(&batch))?;
    info!("simulated {slots} slots, {} messages", trace.len());
    let stats = SimStats::collect(&l2, slots, cfg.carrier.slot_duration(), &trace, cfg.budget_ns());
    Ok(SimOutput { stats, trace })
}

/// L2 on its own thread behind a pair of channels. Timestamps still come from
/// the simulated clock, so the trace equals the one from [`run`].
pub fn run_threaded(cfg: &SimConfig) -> Result<SimOutput> {
    cfg.validate()?;
    let mut l2 = L2::new(cfg.l2_setup())?;
    let (to_l2, l2_rx) = mpsc::channel::<Vec<FapiMessage>>();
    let (l2_tx, from_l2) = mpsc::channel::<Result<Vec<FapiMessage>>>();
    let worker = std::thread::spawn(move || {
        for batch in l2_rx {
            if l2_tx.send(l2.respond(&batch)).is_err() {
                break;
            }
        }
        l2
    });
    let result = drive(cfg, |batch| {
        to_l2
            .send(batch)
            .map_err(|_| Error::Protocol("L2 channel closed".into()))?;
        from_l2
            .recv()
            .map_err(|_| Error::Protocol("L2 channel closed".into()))?
    });
    drop(to_l2);
    let l2 = worker
        .join()
        .map_err(|_| Error::Protocol("L2 thread panicked".into()))?;
    let (trace, slots) = result?;
    let stats = SimStats::collect(&l2, slots, cfg.carrier.slot_duration(), &trace, cfg.budget_ns());
    Ok(SimOutput { stats, trace })
}

/// Dispatches on `params.threaded`.
pub fn simulate(cfg: &SimConfig) -> Result<SimOutput> {
    if cfg.params.threaded {
        run_threaded(cfg)
    } else {
        run(cfg)
    }
}
