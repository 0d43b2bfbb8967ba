//! Downlink bearer queues fed by constant-bit-rate sources.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrafficModel {
    /// One packet of `packet_bits` every `period_slots` slots.
    Cbr { packet_bits: u64, period_slots: u64 },
    /// Always backlogged.
    FullBuffer,
    None,
}

impl Default for TrafficModel {
    fn default() -> Self {
        TrafficModel::Cbr {
            packet_bits: 4096,
            period_slots: 4,
        }
    }
}

impl TrafficModel {
    /// Offered load in bit/s for a slot of `slot_s` seconds.
    pub fn offered_bps(&self, slot_s: f64) -> f64 {
        match *self {
            TrafficModel::Cbr {
                packet_bits,
                period_slots,
            } => packet_bits as f64 / (period_slots as f64 * slot_s),
            TrafficModel::FullBuffer => f64::INFINITY,
            TrafficModel::None => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Packet {
    pub arrival_tti: u64,
    pub remaining_bits: u64,
}

/// FIFO of one UE's downlink packets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BearerQueue {
    pub packets: VecDeque<Packet>,
    pub full_buffer: bool,
    /// Phase of the CBR source in slots.
    pub phase: u64,
}

impl BearerQueue {
    pub fn new(phase: u64, full_buffer: bool) -> Self {
        Self {
            packets: VecDeque::new(),
            full_buffer,
            phase,
        }
    }

    pub fn is_backlogged(&self) -> bool {
        self.full_buffer || !self.packets.is_empty()
    }

    pub fn queued_bits(&self) -> u64 {
        self.packets.iter().map(|p| p.remaining_bits).sum()
    }

    /// Adds this slot's arrivals.
    pub fn arrive(&mut self, model: &TrafficModel, tti: u64) {
        if let TrafficModel::Cbr {
            packet_bits,
            period_slots,
        } = *model
        {
            if period_slots > 0 && tti % period_slots == self.phase % period_slots {
                self.packets.push_back(Packet {
                    arrival_tti: tti,
                    remaining_bits: packet_bits,
                });
            }
        }
    }

    /// Removes up to `bits` from the head of the queue and returns how many
    /// were actually delivered.
    pub fn serve(&mut self, bits: u64) -> u64 {
        if self.full_buffer {
            return bits;
        }
        let mut left = bits;
        while left > 0 {
            let Some(head) = self.packets.front_mut() else {
                break;
            };
            if head.remaining_bits <= left {
                left -= head.remaining_bits;
                self.packets.pop_front();
            } else {
                head.remaining_bits -= left;
                left = 0;
            }
        }
        bits - left
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cbr_offered_load() {
        assert_abs_diff_eq!(TrafficModel::default().offered_bps(0.25e-3), 4.096e6, epsilon = 1e-6);
        assert_eq!(TrafficModel::None.offered_bps(0.25e-3), 0.0);
    }

    #[test]
    fn arrivals_follow_phase() {
        let mut q = BearerQueue::new(2, false);
        let m = TrafficModel::default();
        for t in 0..12 {
            q.arrive(&m, t);
        }
        let arrivals: Vec<u64> = q.packets.iter().map(|p| p.arrival_tti).collect();
        assert_eq!(arrivals, vec![2, 6, 10]);
        assert_eq!(q.queued_bits(), 3 * 4096);
    }

    #[test]
    fn serve_is_fifo_and_partial() {
        let mut q = BearerQueue::new(0, false);
        let m = TrafficModel::default();
        q.arrive(&m, 0);
        q.arrive(&m, 4);
        assert_eq!(q.serve(5000), 5000);
        assert_eq!(q.packets.len(), 1);
        assert_eq!(q.packets[0].remaining_bits, 8192 - 5000);
        assert_eq!(q.serve(10_000), 8192 - 5000);
        assert!(!q.is_backlogged());
        let mut fb = BearerQueue::new(0, true);
        assert!(fb.is_backlogged());
        assert_eq!(fb.serve(777), 777);
    }
}
