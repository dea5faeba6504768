use std::collections::BTreeMap;

use log::warn;

use super::clock::SlotClock;
use super::fapi::{Body, CrcReport, ErrorCode, FapiMessage, Grant, PhyConfig, UciReport};
use crate::capacity::{slots_in_period, Direction, Numerology, SlotKind, TddPattern};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L1State {
    Idle,
    Configured,
    Running,
    Stopped,
    /// Protocol violation; every further message is rejected.
    Halted,
}

/// When HARQ feedback for a DL transport block is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackTiming {
    /// First uplink slot after the assignment.
    #[default]
    NextUplinkSlot,
    /// Fixed number of slots after the assignment.
    Delay(u32),
}

/// Indications injected by a scenario script.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Injection {
    Rach { preamble: u8 },
    Srs { ue_id: u16 },
}

/// PHY (master) side of the slot procedure.
#[derive(Debug, Clone)]
pub struct L1 {
    state: L1State,
    mu: Numerology,
    clock: SlotClock,
    pattern: Option<TddPattern>,
    attached: Vec<u16>,
    feedback: FeedbackTiming,
    /// Indications due at an absolute slot.
    due_rx: BTreeMap<u64, Vec<Grant>>,
    due_uci: BTreeMap<u64, BTreeMap<u16, UciReport>>,
    injections: BTreeMap<u64, Vec<Injection>>,
}

impl L1 {
    pub fn new(mu: Numerology, feedback: FeedbackTiming) -> Self {
        Self {
            state: L1State::Idle,
            mu,
            clock: SlotClock::new(mu),
            pattern: None,
            attached: Vec::new(),
            feedback,
            due_rx: BTreeMap::new(),
            due_uci: BTreeMap::new(),
            injections: BTreeMap::new(),
        }
    }

    pub fn state(&self) -> L1State {
        self.state
    }

    pub fn clock(&self) -> &SlotClock {
        &self.clock
    }

    pub fn inject(&mut self, abs_slot: u64, what: Injection) {
        self.injections.entry(abs_slot).or_default().push(what);
    }

    fn reply(&self, body: Body) -> FapiMessage {
        FapiMessage::new(self.clock.sfn(), self.clock.slot(), body)
    }

    fn reject(&mut self, msg: &FapiMessage, error: ErrorCode, halt: bool) -> Vec<FapiMessage> {
        warn!("L1 rejects {} in state {:?}: {error:?}", msg.kind(), self.state);
        if halt {
            self.state = L1State::Halted;
        }
        vec![self.reply(Body::ErrorIndication {
            offending: msg.kind().id(),
            error,
        })]
    }

    fn configure(&mut self, cfg: &PhyConfig) -> Result<()> {
        if cfg.numerology != self.mu.mu() {
            return Err(Error::Protocol(format!(
                "numerology {} does not match PHY numerology {}",
                cfg.numerology,
                self.mu.mu()
            )));
        }
        let text = String::from_utf8(cfg.tdd_pattern.clone()).map_err(|e| Error::Protocol(e.to_string()))?;
        let mut pattern: TddPattern = text.parse()?;
        pattern.special_usable = cfg.special_usable;
        match self.feedback {
            FeedbackTiming::NextUplinkSlot if slots_in_period(&pattern, SlotKind::U) == 0 => {
                return Err(Error::Protocol("feedback needs an uplink slot in the pattern".into()));
            }
            FeedbackTiming::Delay(0) => return Err(Error::Protocol("feedback delay must be at least one slot".into())),
            _ => {}
        }
        self.pattern = Some(pattern);
        self.attached = cfg.ue_ids.clone();
        Ok(())
    }

    /// Processes one message from L2 and returns the immediate replies.
    pub fn handle(&mut self, msg: &FapiMessage) -> Vec<FapiMessage> {
        use L1State::*;
        match (self.state, &msg.body) {
            (Halted, _) => self.reject(msg, ErrorCode::InvalidState, true),
            (Idle | Configured | Stopped, Body::ParamRequest) => vec![self.reply(Body::ParamResponse { error: ErrorCode::Ok })],
            (Idle | Configured | Stopped, Body::ConfigRequest(cfg)) => {
                let error = match self.configure(cfg) {
                    Ok(()) => {
                        self.state = Configured;
                        ErrorCode::Ok
                    }
                    Err(e) => {
                        warn!("CONFIG.request rejected: {e}");
                        ErrorCode::InvalidConfig
                    }
                };
                vec![self.reply(Body::ConfigResponse { error })]
            }
            (Configured | Stopped, Body::StartRequest) => {
                self.state = Running;
                Vec::new()
            }
            (Running, Body::StopRequest) => {
                self.state = Stopped;
                Vec::new()
            }
            (Running, Body::DlTtiRequest(_) | Body::UlTtiRequest(_) | Body::UlDciRequest(_) | Body::TxDataRequest(_)) => {
                self.accept_slot_request(msg)
            }
            _ => self.reject(msg, ErrorCode::InvalidState, true),
        }
    }

    fn accept_slot_request(&mut self, msg: &FapiMessage) -> Vec<FapiMessage> {
        if (msg.sfn, msg.slot) != (self.clock.sfn(), self.clock.slot()) {
            return self.reject(msg, ErrorCode::InvalidState, true);
        }
        if msg.validate(self.mu.slots_per_frame(), &self.attached).is_err() {
            return self.reject(msg, ErrorCode::InvalidPdu, false);
        }
        let pattern = self.pattern.as_ref().expect("running implies configured");
        let kind = pattern.kind_at(self.clock.abs_slot());
        let now = self.clock.abs_slot();
        match &msg.body {
            Body::DlTtiRequest(grants) if !grants.is_empty() => {
                if !pattern.carries(kind, Direction::Downlink) {
                    return self.reject(msg, ErrorCode::InvalidPdu, false);
                }
                let due = self.feedback_slot(now);
                let reports = self.due_uci.entry(due).or_default();
                for g in grants {
                    let r = reports.entry(g.ue_id).or_insert(UciReport {
                        ue_id: g.ue_id,
                        n_bits: 0,
                        ack_bitmap: 0,
                    });
                    // Ideal PHY: every TB is acknowledged.
                    r.ack_bitmap |= 1 << (r.n_bits % 8);
                    r.n_bits = r.n_bits.saturating_add(1);
                }
            }
            Body::UlTtiRequest(grants) if !grants.is_empty() => {
                if !pattern.carries(kind, Direction::Uplink) {
                    return self.reject(msg, ErrorCode::InvalidPdu, false);
                }
                self.due_rx.entry(now + 1).or_default().extend_from_slice(grants);
            }
            _ => {}
        }
        Vec::new()
    }

    fn feedback_slot(&self, abs: u64) -> u64 {
        match self.feedback {
            FeedbackTiming::Delay(k) => abs + u64::from(k),
            FeedbackTiming::NextUplinkSlot => {
                let pattern = self.pattern.as_ref().expect("configured");
                (abs + 1..)
                    .find(|&s| pattern.kind_at(s) == SlotKind::U)
                    .expect("pattern has an uplink slot")
            }
        }
    }

    /// SLOT.indication for the current slot, or `None` unless running.
    pub fn tick(&mut self) -> Option<FapiMessage> {
        (self.state == L1State::Running).then(|| self.reply(Body::SlotIndication))
    }

    /// Indications due in the current slot: data and CRC for last slot's UL
    /// grants, HARQ feedback, and scripted RACH/SRS.
    pub fn indicate(&mut self) -> Vec<FapiMessage> {
        let now = self.clock.abs_slot();
        let mut out = Vec::new();
        if let Some(grants) = self.due_rx.remove(&now) {
            let crcs = grants.iter().map(|g| CrcReport { ue_id: g.ue_id, pass: true }).collect();
            out.push(self.reply(Body::RxDataIndication(grants)));
            out.push(self.reply(Body::CrcIndication(crcs)));
        }
        if let Some(reports) = self.due_uci.remove(&now) {
            out.push(self.reply(Body::UciIndication(reports.into_values().collect())));
        }
        if let Some(items) = self.injections.remove(&now) {
            let preambles: Vec<u8> = items
                .iter()
                .filter_map(|i| match i {
                    Injection::Rach { preamble } => Some(*preamble),
                    _ => None,
                })
                .collect();
            let srs: Vec<u16> = items
                .iter()
                .filter_map(|i| match i {
                    Injection::Srs { ue_id } => Some(*ue_id),
                    _ => None,
                })
                .collect();
            if !preambles.is_empty() {
                out.push(self.reply(Body::RachIndication(preambles)));
            }
            if !srs.is_empty() {
                out.push(self.reply(Body::SrsIndication(srs)));
            }
        }
        out
    }

    /// Closes the current slot.
    pub fn end_slot(&mut self) {
        self.clock.advance();
    }
}
