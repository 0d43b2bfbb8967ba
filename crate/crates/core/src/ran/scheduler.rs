//! Round-robin RB allocation by waiting time.

/// Ordering key of a bearer in the round-robin: the bearer with the smallest
/// key has waited longest. Ties go to the lowest UE id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct WaitKey {
    pub since_tti: u64,
    pub seq: u64,
}

/// Round-robin state across TTIs.
#[derive(Debug, Clone, Default)]
pub struct RoundRobin {
    keys: Vec<Option<WaitKey>>,
    seq: u64,
}

impl RoundRobin {
    pub fn new(n_ues: usize) -> Self {
        Self {
            keys: vec![None; n_ues],
            seq: 0,
        }
    }

    /// Registers queue state at the start of a TTI: bearers that became
    /// backlogged start waiting at `head_arrival`, bearers that drained drop
    /// out.
    pub fn update(&mut self, ue: usize, backlogged: bool, head_arrival: u64) {
        match (backlogged, self.keys[ue]) {
            (true, None) => {
                self.keys[ue] = Some(WaitKey {
                    since_tti: head_arrival,
                    seq: self.next_seq(),
                })
            }
            (false, Some(_)) => self.keys[ue] = None,
            _ => {}
        }
    }

    fn next_seq(&mut self) -> u64 {
        self.seq += 1;
        self.seq
    }

    /// Assigns RBs in index order, each to the longest-waiting backlogged
    /// bearer, whose wait then restarts at `tti`. Returns the UE per RB.
    pub fn schedule(&mut self, tti: u64, n_rbs: usize) -> Vec<Option<usize>> {
        let mut out = Vec::with_capacity(n_rbs);
        for _ in 0..n_rbs {
            let pick = self
                .keys
                .iter()
                .enumerate()
                .filter_map(|(ue, k)| k.map(|k| (k, ue)))
                .min();
            match pick {
                Some((_, ue)) => {
                    let seq = self.next_seq();
                    self.keys[ue] = Some(WaitKey { since_tti: tti, seq });
                    out.push(Some(ue));
                }
                None => out.push(None),
            }
        }
        out
    }
}

/// One-shot scheduling of `n_rbs` over bearers given their arrival order
/// (`None` for empty queues).
pub fn rr_schedule(head_arrivals: &[Option<u64>], n_rbs: usize, tti: u64) -> Vec<Option<usize>> {
    let mut rr = RoundRobin::new(head_arrivals.len());
    for (ue, a) in head_arrivals.iter().enumerate() {
        if let Some(t) = a {
            rr.update(ue, true, *t);
        }
    }
    rr.schedule(tti, n_rbs)
}
