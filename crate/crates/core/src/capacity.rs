//! Theoretical TDD cell and per-UE throughput.
//!
//! Rates follow the approximate-data-rate structure: layers x modulation
//! order x code rate x resource elements per slot x (1 - overhead), times
//! the number of eligible slots per second. Transport-block quantization is
//! not modelled.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SUBCARRIERS_PER_PRB: u32 = 12;
pub const SYMBOLS_PER_SLOT: u32 = 14;

/// Subcarrier-spacing index; slots last `1 ms / 2^mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Numerology(u8);

impl Numerology {
    pub fn new(mu: u8) -> Result<Self> {
        if mu <= 3 {
            Ok(Self(mu))
        } else {
            Err(Error::Config(format!("numerology {mu} outside 0..=3")))
        }
    }

    pub fn mu(self) -> u8 {
        self.0
    }

    pub fn scs_khz(self) -> u32 {
        15 << self.0
    }

    pub fn slots_per_frame(self) -> u16 {
        10 << self.0
    }

    /// Slot length in nanoseconds (exact for every supported numerology).
    pub fn slot_duration_ns(self) -> u64 {
        1_000_000 >> self.0
    }
}

impl TryFrom<u8> for Numerology {
    type Error = Error;

    fn try_from(mu: u8) -> Result<Self> {
        Self::new(mu)
    }
}

impl From<Numerology> for u8 {
    fn from(n: Numerology) -> u8 {
        n.0
    }
}

/// Slot length in seconds.
pub fn slot_duration(mu: Numerology) -> f64 {
    1e-3 / f64::from(1u32 << mu.0)
}

/// Maximum transmission bandwidth configuration (PRBs) per channel bandwidth.
pub fn prb_table(mu: Numerology, bandwidth_mhz: u32) -> Option<u32> {
    let table: &[(u32, u32)] = match mu.0 {
        0 => &[(5, 25), (10, 52), (15, 79), (20, 106), (25, 133), (30, 160), (40, 216), (50, 270)],
        1 => &[
            (5, 11),
            (10, 24),
            (15, 38),
            (20, 51),
            (25, 65),
            (30, 78),
            (40, 106),
            (50, 133),
            (60, 162),
            (70, 189),
            (80, 217),
            (90, 245),
            (100, 273),
        ],
        2 => &[
            (10, 11),
            (15, 18),
            (20, 24),
            (25, 31),
            (30, 38),
            (40, 51),
            (50, 65),
            (60, 79),
            (70, 93),
            (80, 107),
            (90, 121),
            (100, 135),
        ],
        _ => &[(50, 32), (100, 66), (200, 132), (400, 264)],
    };
    table.iter().find(|(bw, _)| *bw == bandwidth_mhz).map(|(_, n)| *n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarrierConfig {
    pub bandwidth_hz: f64,
    pub numerology: Numerology,
    pub n_prb: u32,
    pub band: String,
}

impl Default for CarrierConfig {
    fn default() -> Self {
        Self {
            bandwidth_hz: 100e6,
            numerology: Numerology(1),
            n_prb: 273,
            band: "n78".into(),
        }
    }
}

impl CarrierConfig {
    /// Same carrier at another numerology, with the PRB count looked up.
    pub fn with_numerology(&self, mu: Numerology) -> Result<Self> {
        let mhz = (self.bandwidth_hz / 1e6).round() as u32;
        let n_prb = prb_table(mu, mhz).ok_or_else(|| {
            Error::Config(format!("no PRB allocation for {mhz} MHz at {} kHz", mu.scs_khz()))
        })?;
        Ok(Self {
            numerology: mu,
            n_prb,
            ..self.clone()
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_prb == 0 {
            return Err(Error::Config("n_prb must be >= 1".into()));
        }
        let mhz = self.bandwidth_hz / 1e6;
        if (mhz - mhz.round()).abs() < 1e-9 {
            if let Some(expected) = prb_table(self.numerology, mhz.round() as u32) {
                if expected != self.n_prb {
                    return Err(Error::Config(format!(
                        "{mhz} MHz at {} kHz has {expected} PRBs, not {}",
                        self.numerology.scs_khz(),
                        self.n_prb
                    )));
                }
                return Ok(());
            }
        }
        // bandwidths outside the table: the PRBs must at least fit
        let occupied = f64::from(self.n_prb * SUBCARRIERS_PER_PRB) * f64::from(self.numerology.scs_khz()) * 1e3;
        if occupied > self.bandwidth_hz {
            return Err(Error::Config(format!(
                "{} PRBs occupy {occupied} Hz, more than the {} Hz carrier",
                self.n_prb, self.bandwidth_hz
            )));
        }
        Ok(())
    }

    pub fn slot_duration(&self) -> f64 {
        slot_duration(self.numerology)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SlotKind {
    D,
    S,
    U,
}

impl SlotKind {
    pub fn symbol(self) -> char {
        match self {
            SlotKind::D => 'D',
            SlotKind::S => 'S',
            SlotKind::U => 'U',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Downlink,
    Uplink,
}

/// Repeating TDD slot pattern. The period is the pattern length times the
/// slot duration of the carrier numerology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TddPatternDef", into = "TddPatternDef")]
pub struct TddPattern {
    slots: Vec<SlotKind>,
    /// Whether the special slot carries data in either direction.
    pub special_usable: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TddPatternDef {
    #[serde(default = "default_pattern")]
    pattern: String,
    #[serde(default)]
    special_usable: bool,
}

fn default_pattern() -> String {
    "DDDSU".into()
}

impl TryFrom<TddPatternDef> for TddPattern {
    type Error = Error;

    fn try_from(def: TddPatternDef) -> Result<Self> {
        let mut p: TddPattern = def.pattern.parse()?;
        p.special_usable = def.special_usable;
        Ok(p)
    }
}

impl From<TddPattern> for TddPatternDef {
    fn from(p: TddPattern) -> Self {
        Self {
            pattern: p.to_string(),
            special_usable: p.special_usable,
        }
    }
}

impl Default for TddPattern {
    fn default() -> Self {
        Self {
            slots: vec![SlotKind::D, SlotKind::D, SlotKind::D, SlotKind::S, SlotKind::U],
            special_usable: false,
        }
    }
}

impl std::str::FromStr for TddPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let slots = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'D' => Ok(SlotKind::D),
                'S' => Ok(SlotKind::S),
                'U' => Ok(SlotKind::U),
                other => Err(Error::Config(format!("invalid TDD slot `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(slots, false)
    }
}

impl std::fmt::Display for TddPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.slots.iter().try_for_each(|s| write!(f, "{}", s.symbol()))
    }
}

impl TddPattern {
    pub fn new(slots: Vec<SlotKind>, special_usable: bool) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::Config("TDD pattern must have at least one slot".into()));
        }
        Ok(Self { slots, special_usable })
    }

    pub fn slots(&self) -> &[SlotKind] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Slot kind of an absolute slot index.
    pub fn kind_at(&self, abs_slot: u64) -> SlotKind {
        self.slots[(abs_slot % self.slots.len() as u64) as usize]
    }

    pub fn period(&self, mu: Numerology) -> f64 {
        self.slots.len() as f64 * slot_duration(mu)
    }

    pub fn carries(&self, kind: SlotKind, dir: Direction) -> bool {
        match (kind, dir) {
            (SlotKind::D, Direction::Downlink) | (SlotKind::U, Direction::Uplink) => true,
            (SlotKind::S, _) => self.special_usable,
            _ => false,
        }
    }

    pub fn eligible_slots(&self, dir: Direction) -> usize {
        self.slots.iter().filter(|&&k| self.carries(k, dir)).count()
    }
}

pub fn slots_in_period(pattern: &TddPattern, kind: SlotKind) -> usize {
    pattern.slots().iter().filter(|&&k| k == kind).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub layers_dl: u32,
    pub layers_ul: u32,
    /// Bits per modulation symbol.
    pub modulation_order: u32,
    pub code_rate: f64,
    pub overhead_dl: f64,
    pub overhead_ul: f64,
}

impl Default for LinkConfig {
    /// 64QAM at code rate 948/1024; reproduces 525/94 Mbps for the 100 MHz
    /// DDDSU carrier.
    fn default() -> Self {
        Self {
            layers_dl: 2,
            layers_ul: 1,
            modulation_order: 6,
            code_rate: 948.0 / 1024.0,
            overhead_dl: 0.14,
            overhead_ul: 0.08,
        }
    }
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        for layers in [self.layers_dl, self.layers_ul] {
            if !(1..=4).contains(&layers) {
                return Err(Error::Config(format!("layer count {layers} outside 1..=4")));
            }
        }
        if !(self.code_rate > 0.0 && self.code_rate < 1.0) {
            return Err(Error::Config("code rate must lie in (0, 1)".into()));
        }
        for oh in [self.overhead_dl, self.overhead_ul] {
            if !(0.0..1.0).contains(&oh) {
                return Err(Error::Config("overhead must lie in [0, 1)".into()));
            }
        }
        if self.modulation_order == 0 || self.modulation_order > 10 {
            return Err(Error::Config("modulation order must lie in 1..=10".into()));
        }
        Ok(())
    }

    fn layers(&self, dir: Direction) -> u32 {
        match dir {
            Direction::Downlink => self.layers_dl,
            Direction::Uplink => self.layers_ul,
        }
    }

    fn overhead(&self, dir: Direction) -> f64 {
        match dir {
            Direction::Downlink => self.overhead_dl,
            Direction::Uplink => self.overhead_ul,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarqConstraint {
    pub ack_bits_per_ue: u32,
}

impl Default for HarqConstraint {
    fn default() -> Self {
        Self { ack_bits_per_ue: 2 }
    }
}

impl HarqConstraint {
    /// DL slots one UE can be scheduled in per TDD period.
    pub fn max_dl_slots_per_ue(&self, pattern: &TddPattern) -> usize {
        (self.ack_bits_per_ue as usize).min(pattern.eligible_slots(Direction::Downlink))
    }
}

/// Data bits carried by one full-bandwidth slot in `dir`.
pub fn bits_per_slot(carrier: &CarrierConfig, link: &LinkConfig, dir: Direction) -> f64 {
    let res = f64::from(carrier.n_prb * SUBCARRIERS_PER_PRB * SYMBOLS_PER_SLOT);
    f64::from(link.layers(dir)) * f64::from(link.modulation_order) * link.code_rate * res * (1.0 - link.overhead(dir))
}

/// Whole-bit transport block for one slot (the fractional bit is dropped).
pub fn tb_bits_per_slot(carrier: &CarrierConfig, link: &LinkConfig, dir: Direction) -> u32 {
    bits_per_slot(carrier, link, dir).floor() as u32
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakRate {
    pub dl_bps: f64,
    pub ul_bps: f64,
}

pub fn peak_rate(carrier: &CarrierConfig, pattern: &TddPattern, link: &LinkConfig) -> PeakRate {
    let period = pattern.period(carrier.numerology);
    let rate = |dir| bits_per_slot(carrier, link, dir) * pattern.eligible_slots(dir) as f64 / period;
    PeakRate {
        dl_bps: rate(Direction::Downlink),
        ul_bps: rate(Direction::Uplink),
    }
}

/// Single-UE DL ceiling imposed by the per-period HARQ feedback budget.
pub fn per_ue_cap(cell_dl_bps: f64, pattern: &TddPattern, harq: &HarqConstraint) -> Result<f64> {
    let dl_slots = pattern.eligible_slots(Direction::Downlink);
    if dl_slots == 0 {
        return Err(Error::Config("pattern has no downlink slot".into()));
    }
    Ok(cell_dl_bps * (harq.max_dl_slots_per_ue(pattern) as f64 / dl_slots as f64))
}

pub fn aggregate_vs_single(ue_count: u32, cell_dl_bps: f64, per_ue_cap_bps: f64) -> Result<f64> {
    if ue_count == 0 {
        return Err(Error::Config("ue_count must be >= 1".into()));
    }
    Ok((f64::from(ue_count) * per_ue_cap_bps).min(cell_dl_bps))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    pub carrier: CarrierConfig,
    pub pattern: TddPattern,
    pub rate: PeakRate,
    pub per_ue_dl_bps: f64,
    pub dl_tb_bits: u32,
    pub ul_tb_bits: u32,
}

impl CapacityReport {
    pub fn compute(
        carrier: &CarrierConfig,
        pattern: &TddPattern,
        link: &LinkConfig,
        harq: &HarqConstraint,
    ) -> Result<Self> {
        carrier.validate()?;
        link.validate()?;
        let rate = peak_rate(carrier, pattern, link);
        Ok(Self {
            carrier: carrier.clone(),
            pattern: pattern.clone(),
            rate,
            per_ue_dl_bps: per_ue_cap(rate.dl_bps, pattern, harq)?,
            dl_tb_bits: tb_bits_per_slot(carrier, link, Direction::Downlink),
            ul_tb_bits: tb_bits_per_slot(carrier, link, Direction::Uplink),
        })
    }

    pub fn to_table(&self) -> String {
        let c = &self.carrier;
        let mut s = String::new();
        let mut row = |k: &str, v: String| {
            let _ = writeln!(s, "{k:<32} {v}");
        };
        row("Frequency band", c.band.clone());
        row("Bandwidth", format!("{} MHz", c.bandwidth_hz / 1e6));
        row("Subcarrier spacing", format!("{} kHz", c.numerology.scs_khz()));
        row("PRBs", c.n_prb.to_string());
        row("Slot duration", format!("{} us", c.slot_duration() * 1e6));
        row(
            "TDD config",
            format!(
                "{} ({} ms{})",
                self.pattern,
                self.pattern.period(c.numerology) * 1e3,
                if self.pattern.special_usable { ", special slot used" } else { ", special slot unused" }
            ),
        );
        row(
            "Max theoretical cell throughput",
            format!("{:.2} Mbps DL, {:.2} Mbps UL", self.rate.dl_bps / 1e6, self.rate.ul_bps / 1e6),
        );
        row("Max single-UE DL throughput", format!("{:.2} Mbps", self.per_ue_dl_bps / 1e6));
        s
    }

    pub fn to_kv(&self) -> String {
        let c = &self.carrier;
        format!(
            "band={}\nbandwidth_hz={}\nnumerology={}\nn_prb={}\nslot_duration_s={}\ntdd_pattern={}\nspecial_usable={}\ndl_bps={}\nul_bps={}\nper_ue_dl_bps={}\ndl_tb_bits={}\nul_tb_bits={}\n",
            c.band,
            c.bandwidth_hz,
            c.numerology.mu(),
            c.n_prb,
            c.slot_duration(),
            self.pattern,
            self.pattern.special_usable,
            self.rate.dl_bps,
            self.rate.ul_bps,
            self.per_ue_dl_bps,
            self.dl_tb_bits,
            self.ul_tb_bits
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mu(m: u8) -> Numerology {
        Numerology::new(m).unwrap()
    }

    #[test]
    fn slot_durations() {
        assert_eq!(slot_duration(mu(1)), 500e-6);
        assert_eq!(slot_duration(mu(0)), 1e-3);
        assert_eq!(slot_duration(mu(2)), 250e-6);
        assert_eq!(mu(3).slot_duration_ns(), 125_000);
        assert!(Numerology::new(4).is_err());
    }

    #[test]
    fn dddsu_counts() {
        let p = TddPattern::default();
        assert_eq!(p.to_string(), "DDDSU");
        assert_eq!(slots_in_period(&p, SlotKind::D), 3);
        assert_eq!(slots_in_period(&p, SlotKind::U), 1);
        assert_eq!(slots_in_period(&p, SlotKind::S), 1);
        assert!((p.period(mu(1)) - 2.5e-3).abs() < 1e-15);
        assert!("DDXU".parse::<TddPattern>().is_err());
        assert!("".parse::<TddPattern>().is_err());
    }

    // Frozen from an independent evaluation of the rate formula:
    // 2 * 6 * 948/1024 * 273*12*14 * 0.86 bits/slot, 3 slots per 2.5 ms.
    #[test]
    fn reference_rates() {
        let r = peak_rate(&CarrierConfig::default(), &TddPattern::default(), &LinkConfig::default());
        assert!((r.dl_bps - 525_825_027.0).abs() < 1e-3);
        assert!((r.ul_bps - 93_751_749.0).abs() < 1e-3);
        assert!((r.dl_bps / 525e6 - 1.0).abs() < 0.01);
        assert!((r.ul_bps / 94e6 - 1.0).abs() < 0.01);
        let dl_bits = bits_per_slot(&CarrierConfig::default(), &LinkConfig::default(), Direction::Downlink);
        assert!((dl_bits - 438_187.522_5).abs() < 1e-6);
        assert_eq!(tb_bits_per_slot(&CarrierConfig::default(), &LinkConfig::default(), Direction::Uplink), 234_379);
    }

    #[test]
    fn hand_arithmetic_rate() {
        let carrier = CarrierConfig {
            bandwidth_hz: 5e6,
            n_prb: 1,
            ..Default::default()
        };
        let link = LinkConfig {
            layers_dl: 1,
            modulation_order: 2,
            code_rate: 0.5,
            overhead_dl: 0.0,
            ..Default::default()
        };
        let p: TddPattern = "D".parse().unwrap();
        assert_eq!(bits_per_slot(&carrier, &link, Direction::Downlink), 168.0);
        assert!((peak_rate(&carrier, &p, &link).dl_bps - 336e3).abs() < 1e-9);
    }

    #[test]
    fn per_ue_cap_examples() {
        let p = TddPattern::default();
        let h = HarqConstraint::default();
        let cell = 525_825_027.0;
        let cap = per_ue_cap(cell, &p, &h).unwrap();
        assert!((cap - 350_550_018.0).abs() < 1e-3);
        assert!((cap / 350e6 - 1.0).abs() < 0.01);
        assert!((cap / cell - 2.0 / 3.0).abs() < 1e-15);
        let unconstrained = HarqConstraint { ack_bits_per_ue: 3 };
        assert_eq!(per_ue_cap(cell, &p, &unconstrained).unwrap(), cell);
        let single_d: TddPattern = "DSUUU".parse().unwrap();
        assert_eq!(per_ue_cap(cell, &single_d, &h).unwrap(), cell);
        assert!(per_ue_cap(cell, &"UUU".parse().unwrap(), &h).is_err());
    }

    #[test]
    fn aggregate_examples() {
        let (cell, cap) = (525_825_027.0, 350_550_018.0);
        assert_eq!(aggregate_vs_single(1, cell, cap).unwrap(), cap);
        assert_eq!(aggregate_vs_single(2, cell, cap).unwrap(), cell);
        assert_eq!(aggregate_vs_single(3, 0.0, 0.0).unwrap(), 0.0);
        assert!(aggregate_vs_single(0, cell, cap).is_err());
    }

    #[test]
    fn special_slot_and_numerology() {
        let c = CarrierConfig::default();
        let l = LinkConfig::default();
        let off = peak_rate(&c, &TddPattern::default(), &l);
        let p = TddPattern {
            special_usable: true,
            ..Default::default()
        };
        let on = peak_rate(&c, &p, &l);
        assert!(on.dl_bps > off.dl_bps && on.ul_bps > off.ul_bps);

        // 100 MHz has no 15 kHz allocation in the table
        assert!(c.with_numerology(mu(0)).is_err());
        let c0 = CarrierConfig {
            numerology: mu(0),
            ..c.clone()
        };
        c0.validate().unwrap();
        let slow = peak_rate(&c0, &TddPattern::default(), &l);
        assert!((slow.dl_bps - off.dl_bps / 2.0).abs() < 1e-6);
        let c50 = CarrierConfig {
            bandwidth_hz: 50e6,
            ..c.clone()
        }
        .with_numerology(mu(0))
        .unwrap();
        assert_eq!(c50.n_prb, 270);
    }

    #[test]
    fn carrier_validation() {
        assert!(CarrierConfig::default().validate().is_ok());
        let bad = CarrierConfig {
            n_prb: 270,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(LinkConfig { code_rate: 1.0, ..Default::default() }.validate().is_err());
        assert!(LinkConfig { layers_dl: 5, ..Default::default() }.validate().is_err());
        assert!(LinkConfig { overhead_ul: 1.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn report_formats() {
        let r = CapacityReport::compute(
            &CarrierConfig::default(),
            &TddPattern::default(),
            &LinkConfig::default(),
            &HarqConstraint::default(),
        )
        .unwrap();
        let kv = r.to_kv();
        assert!(kv.contains("tdd_pattern=DDDSU\n"));
        assert!(kv.lines().all(|l| l.contains('=')));
        assert!(r.to_table().contains("525.83 Mbps DL, 93.75 Mbps UL"));
    }

    proptest! {
        #[test]
        fn rate_is_linear(k in 1u32..4, scale in 0.1f64..0.9) {
            let c = CarrierConfig { n_prb: 10, bandwidth_hz: 5e6, numerology: mu(0), ..Default::default() };
            let l = LinkConfig { layers_dl: 1, layers_ul: 1, modulation_order: 2, code_rate: 0.5, overhead_dl: 0.0, overhead_ul: 0.0 };
            let p = TddPattern::default();
            let base = peak_rate(&c, &p, &l);
            let more_prb = peak_rate(&CarrierConfig { n_prb: 10 * k, ..c.clone() }, &p, &l);
            prop_assert!((more_prb.dl_bps - base.dl_bps * f64::from(k)).abs() < 1e-6 * more_prb.dl_bps);
            let more_layers = peak_rate(&c, &p, &LinkConfig { layers_dl: k, ..l });
            prop_assert!((more_layers.dl_bps - base.dl_bps * f64::from(k)).abs() < 1e-6 * more_layers.dl_bps);
            let more_qm = peak_rate(&c, &p, &LinkConfig { modulation_order: 2 * k, ..l });
            prop_assert!((more_qm.dl_bps - base.dl_bps * f64::from(k)).abs() < 1e-6 * more_qm.dl_bps);
            let rate = peak_rate(&c, &p, &LinkConfig { code_rate: scale, ..l });
            prop_assert!((rate.dl_bps - base.dl_bps * scale / 0.5).abs() < 1e-6 * base.dl_bps);
            let oh = peak_rate(&c, &p, &LinkConfig { overhead_dl: 1.0 - scale, ..l });
            prop_assert!((oh.dl_bps - base.dl_bps * scale).abs() < 1e-6 * base.dl_bps);
        }

        #[test]
        fn cap_never_exceeds_cell(pattern in "[DSU]{1,10}", ack in 0u32..6, cell in 1.0f64..1e9) {
            let p: TddPattern = pattern.parse().unwrap();
            prop_assume!(p.eligible_slots(Direction::Downlink) > 0);
            let h = HarqConstraint { ack_bits_per_ue: ack };
            let cap = per_ue_cap(cell, &p, &h).unwrap();
            prop_assert!(cap <= cell);
            prop_assert_eq!(cap == cell, ack as usize >= p.eligible_slots(Direction::Downlink));
        }
    }
}
