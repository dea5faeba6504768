use crate::capacity::Numerology;

pub const SFN_MODULUS: u16 = 1024;

/// Simulated slot clock. Time is an integer number of nanoseconds since the
/// first slot so traces are exact and reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotClock {
    mu: Numerology,
    sfn: u16,
    slot: u16,
    abs_slot: u64,
}

impl SlotClock {
    pub fn new(mu: Numerology) -> Self {
        Self {
            mu,
            sfn: 0,
            slot: 0,
            abs_slot: 0,
        }
    }

    /// Clock positioned at `(sfn, slot)`; the absolute index counts from
    /// sfn 0 slot 0 of the first frame cycle.
    pub fn at(mu: Numerology, sfn: u16, slot: u16) -> Option<Self> {
        (sfn < SFN_MODULUS && slot < mu.slots_per_frame()).then(|| Self {
            mu,
            sfn,
            slot,
            abs_slot: u64::from(sfn) * u64::from(mu.slots_per_frame()) + u64::from(slot),
        })
    }

    pub fn numerology(&self) -> Numerology {
        self.mu
    }

    pub fn sfn(&self) -> u16 {
        self.sfn
    }

    pub fn slot(&self) -> u16 {
        self.slot
    }

    pub fn abs_slot(&self) -> u64 {
        self.abs_slot
    }

    pub fn tick_ns(&self) -> u64 {
        self.mu.slot_duration_ns()
    }

    pub fn tick_seconds(&self) -> f64 {
        self.tick_ns() as f64 * 1e-9
    }

    /// Start time of the current slot.
    pub fn now_ns(&self) -> u64 {
        self.abs_slot * self.tick_ns()
    }

    pub fn advance(&mut self) {
        self.abs_slot += 1;
        self.slot += 1;
        if self.slot == self.mu.slots_per_frame() {
            self.slot = 0;
            self.sfn = (self.sfn + 1) % SFN_MODULUS;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu1() -> Numerology {
        Numerology::new(1).unwrap()
    }

    #[test]
    fn slot_wraps_into_next_frame() {
        let mut c = SlotClock::at(mu1(), 0, 19).unwrap();
        c.advance();
        assert_eq!((c.sfn(), c.slot()), (1, 0));
    }

    #[test]
    fn sfn_wraps_at_1024() {
        let mut c = SlotClock::at(mu1(), 1023, 19).unwrap();
        c.advance();
        assert_eq!((c.sfn(), c.slot()), (0, 0));
        assert_eq!(c.abs_slot(), 1024 * 20);
    }

    #[test]
    fn elapsed_time() {
        let mut c = SlotClock::new(mu1());
        assert_eq!(c.tick_ns(), 500_000);
        for _ in 0..5000 {
            c.advance();
        }
        assert_eq!(c.now_ns(), 2_500_000_000);
        assert!(SlotClock::at(mu1(), 0, 20).is_none());
        assert!(SlotClock::at(mu1(), 1024, 0).is_none());
    }
}
