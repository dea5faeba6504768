//! Classic libpcap export. One record per FAPI message; the record payload is
//! the encoded message (header plus body) and the record time is the
//! simulated clock. Link type 147 (`USER_0`) lets a Wireshark dissector be
//! bound to the payload.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::SlotTrace;
use crate::error::{Error, Result};

pub const PCAP_MAGIC: u32 = 0xA1B2_C3D4;
pub const PCAP_VERSION: (u16, u16) = (2, 4);
pub const PCAP_SNAPLEN: u32 = 65_535;
pub const LINKTYPE_USER0: u32 = 147;
pub const GLOBAL_HEADER_LEN: usize = 24;
pub const RECORD_HEADER_LEN: usize = 16;

pub fn write_pcap<W: Write>(trace: &SlotTrace, mut w: W) -> std::io::Result<()> {
    w.write_all(&PCAP_MAGIC.to_le_bytes())?;
    w.write_all(&PCAP_VERSION.0.to_le_bytes())?;
    w.write_all(&PCAP_VERSION.1.to_le_bytes())?;
    w.write_all(&0i32.to_le_bytes())?; // thiszone
    w.write_all(&0u32.to_le_bytes())?; // sigfigs
    w.write_all(&PCAP_SNAPLEN.to_le_bytes())?;
    w.write_all(&LINKTYPE_USER0.to_le_bytes())?;
    for rec in trace.records() {
        let payload = rec.message.encode();
        let incl = payload.len().min(PCAP_SNAPLEN as usize);
        let ts_sec = (rec.timestamp_ns / 1_000_000_000) as u32;
        let ts_usec = ((rec.timestamp_ns % 1_000_000_000) / 1_000) as u32;
        w.write_all(&ts_sec.to_le_bytes())?;
        w.write_all(&ts_usec.to_le_bytes())?;
        w.write_all(&(incl as u32).to_le_bytes())?;
        w.write_all(&(payload.len() as u32).to_le_bytes())?;
        w.write_all(&payload[..incl])?;
    }
    w.flush()
}

pub fn export_pcap(trace: &SlotTrace, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_pcap(trace, BufWriter::new(f)).map_err(|e| Error::io(path, e))
}
