//! Typed L1/L2 messages and their binary encoding.
//!
//! Message identifiers follow the SCF 5G FAPI numbering. Every encoded
//! message starts with a 12-byte little-endian header:
//!
//! | offset | size | field                |
//! |--------|------|----------------------|
//! | 0      | 2    | message id           |
//! | 2      | 4    | body length in bytes |
//! | 6      | 2    | SFN                  |
//! | 8      | 2    | slot                 |
//! | 10     | 2    | reserved (zero)      |
//!
//! Bodies are little-endian too. PDU lists start with a 16-bit count; a grant
//! is `ue_id: u16, tb_bits: u32`.

use crate::error::{Error, Result};

pub const HEADER_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u16)]
pub enum MessageKind {
    ParamRequest = 0x00,
    ParamResponse = 0x01,
    ConfigRequest = 0x02,
    ConfigResponse = 0x03,
    StartRequest = 0x04,
    StopRequest = 0x05,
    ErrorIndication = 0x07,
    DlTtiRequest = 0x80,
    UlTtiRequest = 0x81,
    SlotIndication = 0x82,
    UlDciRequest = 0x83,
    TxDataRequest = 0x84,
    RxDataIndication = 0x85,
    CrcIndication = 0x86,
    UciIndication = 0x87,
    SrsIndication = 0x88,
    RachIndication = 0x89,
}

impl MessageKind {
    pub const ALL: [MessageKind; 17] = [
        MessageKind::ParamRequest,
        MessageKind::ParamResponse,
        MessageKind::ConfigRequest,
        MessageKind::ConfigResponse,
        MessageKind::StartRequest,
        MessageKind::StopRequest,
        MessageKind::ErrorIndication,
        MessageKind::DlTtiRequest,
        MessageKind::UlTtiRequest,
        MessageKind::SlotIndication,
        MessageKind::UlDciRequest,
        MessageKind::TxDataRequest,
        MessageKind::RxDataIndication,
        MessageKind::CrcIndication,
        MessageKind::UciIndication,
        MessageKind::SrsIndication,
        MessageKind::RachIndication,
    ];

    pub fn id(self) -> u16 {
        self as u16
    }

    pub fn from_id(id: u16) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.id() == id)
    }

    pub fn name(self) -> &'static str {
        match self {
            MessageKind::ParamRequest => "PARAM.request",
            MessageKind::ParamResponse => "PARAM.response",
            MessageKind::ConfigRequest => "CONFIG.request",
            MessageKind::ConfigResponse => "CONFIG.response",
            MessageKind::StartRequest => "START.request",
            MessageKind::StopRequest => "STOP.request",
            MessageKind::ErrorIndication => "ERROR.indication",
            MessageKind::DlTtiRequest => "DL_TTI.request",
            MessageKind::UlTtiRequest => "UL_TTI.request",
            MessageKind::SlotIndication => "SLOT.indication",
            MessageKind::UlDciRequest => "UL_DCI.request",
            MessageKind::TxDataRequest => "TX_DATA.request",
            MessageKind::RxDataIndication => "RX_DATA.indication",
            MessageKind::CrcIndication => "CRC.indication",
            MessageKind::UciIndication => "UCI.indication",
            MessageKind::SrsIndication => "SRS.indication",
            MessageKind::RachIndication => "RACH.indication",
        }
    }
}

impl std::fmt::Display for MessageKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ErrorCode {
    Ok = 0,
    InvalidState = 1,
    InvalidConfig = 2,
    UnknownUe = 3,
    InvalidPdu = 4,
}

impl ErrorCode {
    fn from_u8(v: u8) -> Result<Self> {
        Ok(match v {
            0 => ErrorCode::Ok,
            1 => ErrorCode::InvalidState,
            2 => ErrorCode::InvalidConfig,
            3 => ErrorCode::UnknownUe,
            4 => ErrorCode::InvalidPdu,
            other => return Err(Error::Codec(format!("unknown error code {other}"))),
        })
    }
}

/// PHY configuration carried by CONFIG.request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhyConfig {
    pub numerology: u8,
    pub n_prb: u16,
    /// Pattern as `D`/`S`/`U` bytes.
    pub tdd_pattern: Vec<u8>,
    pub special_usable: bool,
    pub ue_ids: Vec<u16>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grant {
    pub ue_id: u16,
    pub tb_bits: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrcReport {
    pub ue_id: u16,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UciReport {
    pub ue_id: u16,
    /// Number of HARQ feedback bits reported.
    pub n_bits: u8,
    /// Bit k set means ACK for the k-th reported transport block.
    pub ack_bitmap: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    ParamRequest,
    ParamResponse { error: ErrorCode },
    ConfigRequest(PhyConfig),
    ConfigResponse { error: ErrorCode },
    StartRequest,
    StopRequest,
    ErrorIndication { offending: u16, error: ErrorCode },
    SlotIndication,
    DlTtiRequest(Vec<Grant>),
    UlTtiRequest(Vec<Grant>),
    UlDciRequest(Vec<Grant>),
    TxDataRequest(Vec<Grant>),
    RxDataIndication(Vec<Grant>),
    CrcIndication(Vec<CrcReport>),
    UciIndication(Vec<UciReport>),
    SrsIndication(Vec<u16>),
    RachIndication(Vec<u8>),
}

impl Body {
    pub fn kind(&self) -> MessageKind {
        match self {
            Body::ParamRequest => MessageKind::ParamRequest,
            Body::ParamResponse { .. } => MessageKind::ParamResponse,
            Body::ConfigRequest(_) => MessageKind::ConfigRequest,
            Body::ConfigResponse { .. } => MessageKind::ConfigResponse,
            Body::StartRequest => MessageKind::StartRequest,
            Body::StopRequest => MessageKind::StopRequest,
            Body::ErrorIndication { .. } => MessageKind::ErrorIndication,
            Body::SlotIndication => MessageKind::SlotIndication,
            Body::DlTtiRequest(_) => MessageKind::DlTtiRequest,
            Body::UlTtiRequest(_) => MessageKind::UlTtiRequest,
            Body::UlDciRequest(_) => MessageKind::UlDciRequest,
            Body::TxDataRequest(_) => MessageKind::TxDataRequest,
            Body::RxDataIndication(_) => MessageKind::RxDataIndication,
            Body::CrcIndication(_) => MessageKind::CrcIndication,
            Body::UciIndication(_) => MessageKind::UciIndication,
            Body::SrsIndication(_) => MessageKind::SrsIndication,
            Body::RachIndication(_) => MessageKind::RachIndication,
        }
    }

    pub fn grants(&self) -> &[Grant] {
        match self {
            Body::DlTtiRequest(g)
            | Body::UlTtiRequest(g)
            | Body::UlDciRequest(g)
            | Body::TxDataRequest(g)
            | Body::RxDataIndication(g) => g,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FapiMessage {
    pub sfn: u16,
    pub slot: u16,
    pub body: Body,
}

impl FapiMessage {
    pub fn new(sfn: u16, slot: u16, body: Body) -> Self {
        Self { sfn, slot, body }
    }

    pub fn kind(&self) -> MessageKind {
        self.body.kind()
    }

    /// Checks the slot range for the numerology, that scheduling requests
    /// address attached UEs only, and that transport blocks are non-empty.
    pub fn validate(&self, slots_per_frame: u16, attached: &[u16]) -> Result<()> {
        if self.sfn >= 1024 || self.slot >= slots_per_frame {
            return Err(Error::Protocol(format!(
                "{} at sfn {} slot {} out of range",
                self.kind(),
                self.sfn,
                self.slot
            )));
        }
        for g in self.body.grants() {
            if g.tb_bits == 0 {
                return Err(Error::Protocol(format!("{} with empty transport block", self.kind())));
            }
            if matches!(self.body, Body::DlTtiRequest(_) | Body::UlTtiRequest(_)) && !attached.contains(&g.ue_id) {
                return Err(Error::Protocol(format!("{} for unattached UE {}", self.kind(), g.ue_id)));
            }
        }
        Ok(())
    }

    pub fn encode_body(&self) -> Vec<u8> {
        let mut b = Vec::new();
        let put_grants = |b: &mut Vec<u8>, gs: &[Grant]| {
            b.extend_from_slice(&(gs.len() as u16).to_le_bytes());
            for g in gs {
                b.extend_from_slice(&g.ue_id.to_le_bytes());
                b.extend_from_slice(&g.tb_bits.to_le_bytes());
            }
        };
        match &self.body {
            Body::ParamRequest | Body::StartRequest | Body::StopRequest | Body::SlotIndication => {}
            Body::ParamResponse { error } | Body::ConfigResponse { error } => b.push(*error as u8),
            Body::ErrorIndication { offending, error } => {
                b.extend_from_slice(&offending.to_le_bytes());
                b.push(*error as u8);
            }
            Body::ConfigRequest(c) => {
                b.push(c.numerology);
                b.extend_from_slice(&c.n_prb.to_le_bytes());
                b.push(c.special_usable as u8);
                b.push(c.tdd_pattern.len() as u8);
                b.extend_from_slice(&c.tdd_pattern);
                b.extend_from_slice(&(c.ue_ids.len() as u16).to_le_bytes());
                for id in &c.ue_ids {
                    b.extend_from_slice(&id.to_le_bytes());
                }
            }
            Body::DlTtiRequest(g)
            | Body::UlTtiRequest(g)
            | Body::UlDciRequest(g)
            | Body::TxDataRequest(g)
            | Body::RxDataIndication(g) => put_grants(&mut b, g),
            Body::CrcIndication(rs) => {
                b.extend_from_slice(&(rs.len() as u16).to_le_bytes());
                for r in rs {
                    b.extend_from_slice(&r.ue_id.to_le_bytes());
                    b.push(r.pass as u8);
                }
            }
            Body::UciIndication(rs) => {
                b.extend_from_slice(&(rs.len() as u16).to_le_bytes());
                for r in rs {
                    b.extend_from_slice(&r.ue_id.to_le_bytes());
                    b.push(r.n_bits);
                    b.push(r.ack_bitmap);
                }
            }
            Body::SrsIndication(ids) => {
                b.extend_from_slice(&(ids.len() as u16).to_le_bytes());
                for id in ids {
                    b.extend_from_slice(&id.to_le_bytes());
                }
            }
            Body::RachIndication(preambles) => {
                b.extend_from_slice(&(preambles.len() as u16).to_le_bytes());
                b.extend_from_slice(preambles);
            }
        }
        b
    }

    /// Header plus body.
    pub fn encode(&self) -> Vec<u8> {
        let body = self.encode_body();
        let mut out = Vec::with_capacity(HEADER_LEN + body.len());
        out.extend_from_slice(&self.kind().id().to_le_bytes());
        out.extend_from_slice(&(body.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.sfn.to_le_bytes());
        out.extend_from_slice(&self.slot.to_le_bytes());
        out.extend_from_slice(&0u16.to_le_bytes());
        out.extend_from_slice(&body);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { buf: bytes, pos: 0 };
        let id = r.u16()?;
        let kind = MessageKind::from_id(id).ok_or_else(|| Error::Codec(format!("unknown message id {id:#04x}")))?;
        let len = r.u32()? as usize;
        let sfn = r.u16()?;
        let slot = r.u16()?;
        let _reserved = r.u16()?;
        if bytes.len() != HEADER_LEN + len {
            return Err(Error::Codec(format!(
                "{kind}: body length {len} does not match {} payload bytes",
                bytes.len() - HEADER_LEN
            )));
        }
        let grants = |r: &mut Reader| -> Result<Vec<Grant>> {
            let n = r.u16()?;
            (0..n)
                .map(|_| {
                    Ok(Grant {
                        ue_id: r.u16()?,
                        tb_bits: r.u32()?,
                    })
                })
                .collect()
        };
        let body = match kind {
            MessageKind::ParamRequest => Body::ParamRequest,
            MessageKind::StartRequest => Body::StartRequest,
            MessageKind::StopRequest => Body::StopRequest,
            MessageKind::SlotIndication => Body::SlotIndication,
            MessageKind::ParamResponse => Body::ParamResponse {
                error: ErrorCode::from_u8(r.u8()?)?,
            },
            MessageKind::ConfigResponse => Body::ConfigResponse {
                error: ErrorCode::from_u8(r.u8()?)?,
            },
            MessageKind::ErrorIndication => Body::ErrorIndication {
                offending: r.u16()?,
                error: ErrorCode::from_u8(r.u8()?)?,
            },
            MessageKind::ConfigRequest => {
                let numerology = r.u8()?;
                let n_prb = r.u16()?;
                let special_usable = r.u8()? != 0;
                let n = r.u8()? as usize;
                let tdd_pattern = r.take(n)?.to_vec();
                let n_ues = r.u16()?;
                let ue_ids = (0..n_ues).map(|_| r.u16()).collect::<Result<_>>()?;
                Body::ConfigRequest(PhyConfig {
                    numerology,
                    n_prb,
                    tdd_pattern,
                    special_usable,
                    ue_ids,
                })
            }
            MessageKind::DlTtiRequest => Body::DlTtiRequest(grants(&mut r)?),
            MessageKind::UlTtiRequest => Body::UlTtiRequest(grants(&mut r)?),
            MessageKind::UlDciRequest => Body::UlDciRequest(grants(&mut r)?),
            MessageKind::TxDataRequest => Body::TxDataRequest(grants(&mut r)?),
            MessageKind::RxDataIndication => Body::RxDataIndication(grants(&mut r)?),
            MessageKind::CrcIndication => {
                let n = r.u16()?;
                Body::CrcIndication(
                    (0..n)
                        .map(|_| {
                            Ok(CrcReport {
                                ue_id: r.u16()?,
                                pass: r.u8()? != 0,
                            })
                        })
                        .collect::<Result<_>>()?,
                )
            }
            MessageKind::UciIndication => {
                let n = r.u16()?;
                Body::UciIndication(
                    (0..n)
                        .map(|_| {
                            Ok(UciReport {
                                ue_id: r.u16()?,
                                n_bits: r.u8()?,
                                ack_bitmap: r.u8()?,
                            })
                        })
                        .collect::<Result<_>>()?,
                )
            }
            MessageKind::SrsIndication => {
                let n = r.u16()?;
                Body::SrsIndication((0..n).map(|_| r.u16()).collect::<Result<_>>()?)
            }
            MessageKind::RachIndication => {
                let n = r.u16()? as usize;
                Body::RachIndication(r.take(n)?.to_vec())
            }
        };
        if r.pos != bytes.len() {
            return Err(Error::Codec(format!("{kind}: {} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(Self { sfn, slot, body })
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let s = self
            .buf
            .get(self.pos..end)
            .ok_or_else(|| Error::Codec("truncated message".into()))?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ids_follow_scf_numbering() {
        assert_eq!(MessageKind::ConfigRequest.id(), 0x02);
        assert_eq!(MessageKind::DlTtiRequest.id(), 0x80);
        assert_eq!(MessageKind::UlTtiRequest.id(), 0x81);
        assert_eq!(MessageKind::SlotIndication.id(), 0x82);
        assert_eq!(MessageKind::TxDataRequest.id(), 0x84);
        assert_eq!(MessageKind::RxDataIndication.id(), 0x85);
        assert_eq!(MessageKind::CrcIndication.id(), 0x86);
        assert_eq!(MessageKind::UciIndication.id(), 0x87);
        assert_eq!(MessageKind::SrsIndication.id(), 0x88);
        assert_eq!(MessageKind::RachIndication.id(), 0x89);
        for k in MessageKind::ALL {
            assert_eq!(MessageKind::from_id(k.id()), Some(k));
        }
    }

    #[test]
    fn slot_indication_layout() {
        let m = FapiMessage::new(0x0102, 19, Body::SlotIndication);
        assert_eq!(m.encode(), vec![0x82, 0x00, 0, 0, 0, 0, 0x02, 0x01, 19, 0, 0, 0]);
    }

    #[test]
    fn grant_layout() {
        let m = FapiMessage::new(1, 4, Body::UlTtiRequest(vec![Grant { ue_id: 7, tb_bits: 234_379 }]));
        let bytes = m.encode();
        assert_eq!(bytes.len(), HEADER_LEN + 8);
        assert_eq!(&bytes[2..6], &8u32.to_le_bytes());
        assert_eq!(&bytes[12..], &[1, 0, 7, 0, 0x8B, 0x93, 0x03, 0x00]);
    }

    #[test]
    fn validation() {
        let ok = FapiMessage::new(0, 19, Body::DlTtiRequest(vec![Grant { ue_id: 1, tb_bits: 10 }]));
        assert!(ok.validate(20, &[1]).is_ok());
        assert!(ok.validate(10, &[1]).is_err());
        assert!(ok.validate(20, &[2]).is_err());
        let empty_tb = FapiMessage::new(0, 0, Body::TxDataRequest(vec![Grant { ue_id: 1, tb_bits: 0 }]));
        assert!(empty_tb.validate(20, &[1]).is_err());
        assert!(FapiMessage::new(1024, 0, Body::SlotIndication).validate(20, &[]).is_err());
    }

    #[test]
    fn malformed_input() {
        assert!(FapiMessage::decode(&[0x82, 0]).is_err());
        let mut bytes = FapiMessage::new(0, 0, Body::SlotIndication).encode();
        bytes[0] = 0x42;
        assert!(FapiMessage::decode(&bytes).is_err());
        let mut bytes = FapiMessage::new(0, 0, Body::SlotIndication).encode();
        bytes.push(0);
        assert!(FapiMessage::decode(&bytes).is_err());
    }

    fn grants() -> impl Strategy<Value = Vec<Grant>> {
        proptest::collection::vec((any::<u16>(), 1u32..).prop_map(|(ue_id, tb_bits)| Grant { ue_id, tb_bits }), 0..6)
    }

    fn body() -> impl Strategy<Value = Body> {
        prop_oneof![
            Just(Body::ParamRequest),
            Just(Body::SlotIndication),
            Just(Body::StopRequest),
            (0u8..5).prop_map(|e| Body::ConfigResponse { error: ErrorCode::from_u8(e).unwrap() }),
            (any::<u16>(), 0u8..5).prop_map(|(o, e)| Body::ErrorIndication { offending: o, error: ErrorCode::from_u8(e).unwrap() }),
            (0u8..4, any::<u16>(), "[DSU]{1,10}", any::<bool>(), proptest::collection::vec(any::<u16>(), 0..5)).prop_map(
                |(numerology, n_prb, p, special_usable, ue_ids)| Body::ConfigRequest(PhyConfig {
                    numerology, n_prb, tdd_pattern: p.into_bytes(), special_usable, ue_ids
                })
            ),
            grants().prop_map(Body::DlTtiRequest),
            grants().prop_map(Body::UlTtiRequest),
            grants().prop_map(Body::TxDataRequest),
            grants().prop_map(Body::RxDataIndication),
            proptest::collection::vec((any::<u16>(), any::<bool>()).prop_map(|(ue_id, pass)| CrcReport { ue_id, pass }), 0..4)
                .prop_map(Body::CrcIndication),
            proptest::collection::vec((any::<u16>(), 0u8..3, any::<u8>()).prop_map(|(ue_id, n_bits, ack_bitmap)| UciReport { ue_id, n_bits, ack_bitmap }), 0..4)
                .prop_map(Body::UciIndication),
            proptest::collection::vec(any::<u16>(), 0..4).prop_map(Body::SrsIndication),
            proptest::collection::vec(0u8..64, 0..4).prop_map(Body::RachIndication),
        ]
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(sfn in 0u16..1024, slot in 0u16..80, body in body()) {
            let m = FapiMessage::new(sfn, slot, body);
            let bytes = m.encode();
            prop_assert_eq!(bytes.len(), HEADER_LEN + m.encode_body().len());
            prop_assert_eq!(FapiMessage::decode(&bytes).unwrap(), m);
        }
    }
}
