//! MCS selection with an outer-loop offset, and a threshold error model.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McsRow {
    pub index: usize,
    pub threshold_db: f64,
    pub spectral_efficiency: f64,
}

/// Rows sorted by strictly increasing SINR threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct McsTable {
    rows: Vec<McsRow>,
}

/// Representative 15-entry CQI-like table; thresholds are for a 10% BLER
/// operating point and are not normative.
pub const DEFAULT_MCS_CSV: &str = include_str!("../../../../configs/mcs_table.csv");

impl McsTable {
    pub fn new(rows: Vec<McsRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("MCS table"));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.index != i {
                return Err(Error::invalid(format!("MCS row {i} has index {}", r.index)));
            }
            if !r.threshold_db.is_finite() || !(r.spectral_efficiency > 0.0) {
                return Err(Error::invalid(format!("MCS row {i} has invalid values")));
            }
        }
        for w in rows.windows(2) {
            if w[1].threshold_db <= w[0].threshold_db || w[1].spectral_efficiency <= w[0].spectral_efficiency {
                return Err(Error::invalid(format!(
                    "MCS rows {} and {} are not increasing",
                    w[0].index, w[1].index
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Parses `index,threshold_db,spectral_efficiency` CSV.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let rows = rdr.deserialize().collect::<std::result::Result<Vec<McsRow>, _>>()?;
        Self::new(rows)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn rows(&self) -> &[McsRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, mcs: usize) -> &McsRow {
        &self.rows[mcs]
    }
}

impl Default for McsTable {
    fn default() -> Self {
        Self::from_csv(DEFAULT_MCS_CSV.as_bytes()).expect("bundled MCS table is valid")
    }
}

/// Outer-loop link adaptation offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OllaState {
    pub offset_db: f64,
    pub step_up: f64,
    pub step_down: f64,
}

impl Default for OllaState {
    fn default() -> Self {
        Self {
            offset_db: 0.0,
            step_up: 0.1,
            step_down: -1.0,
        }
    }
}

impl OllaState {
    /// NACK fraction at which the loop is stationary: `up / (up - down)`.
    pub fn target_bler(&self) -> f64 {
        self.step_up / (self.step_up - self.step_down)
    }
}

/// Highest MCS whose threshold is at or below `sinr_est + offset`; MCS 0 if
/// none is.
pub fn link_adapt(sinr_est_db: f64, olla: &OllaState, table: &McsTable) -> usize {
    let eff = sinr_est_db + olla.offset_db;
    table
        .rows
        .iter()
        .rposition(|r| r.threshold_db <= eff)
        .unwrap_or(0)
}

pub fn olla_update(olla: &OllaState, ack: bool) -> OllaState {
    let step = if ack { olla.step_up } else { olla.step_down };
    OllaState {
        offset_db: olla.offset_db + step,
        ..*olla
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TxOutcome {
    pub ack: bool,
    /// Transport block size in bits when the transmission succeeds.
    pub tb_bits: u64,
}

/// Threshold error model: the block is received iff the actual SINR reaches
/// the MCS threshold. `bits_per_rb_per_se` is `RB bandwidth x slot duration`.
pub fn transmit(
    mcs: usize,
    sinr_actual_db: f64,
    table: &McsTable,
    n_rbs: usize,
    bits_per_rb_per_se: f64,
) -> TxOutcome {
    let row = table.row(mcs);
    let ack = sinr_actual_db >= row.threshold_db;
    let tb = (row.spectral_efficiency * bits_per_rb_per_se * n_rbs as f64).floor() as u64;
    TxOutcome {
        ack,
        tb_bits: if ack { tb } else { 0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn bundled_table() {
        let t = McsTable::default();
        assert_eq!(t.len(), 15);
        assert!(t.rows()[0].threshold_db < -6.0);
        assert!(t.rows()[14].threshold_db > 22.0);
        assert_abs_diff_eq!(t.rows()[14].spectral_efficiency, 7.4063);
    }

    #[test]
    fn table_validation() {
        assert!(McsTable::new(Vec::new()).is_err());
        let bad = "index,threshold_db,spectral_efficiency\n0,1.0,0.5\n1,0.5,1.0\n";
        assert!(McsTable::from_csv(bad.as_bytes()).is_err());
        let gap = "index,threshold_db,spectral_efficiency\n0,1.0,0.5\n2,2.0,1.0\n";
        assert!(McsTable::from_csv(gap.as_bytes()).is_err());
        assert!(McsTable::from_csv("index,threshold_db\n0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn link_adapt_examples() {
        let t = McsTable::default();
        let o = OllaState::default();
        assert_eq!(link_adapt(-30.0, &o, &t), 0);
        for r in t.rows() {
            assert_eq!(link_adapt(r.threshold_db, &o, &t), r.index);
        }
        assert_eq!(link_adapt(100.0, &o, &t), 14);
        let shifted = OllaState { offset_db: -3.0, ..o };
        for x in [-5.0, 0.0, 3.3, 9.9, 17.0, 24.0] {
            assert_eq!(link_adapt(x, &shifted, &t), link_adapt(x - 3.0, &o, &t));
        }
    }

    #[test]
    fn olla_examples() {
        let mut o = OllaState::default();
        assert_abs_diff_eq!(olla_update(&o, true).offset_db, 0.1);
        o = olla_update(&o, false);
        for _ in 0..10 {
            o = olla_update(&o, true);
        }
        assert_abs_diff_eq!(o.offset_db, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(o.target_bler(), 1.0 / 11.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_loop_nack_fraction() {
        // stationary SINR inside the table range
        let t = McsTable::default();
        let mut o = OllaState::default();
        let sinr = 9.37;
        let n = 100_000;
        let mut nacks = 0;
        for _ in 0..n {
            let mcs = link_adapt(sinr, &o, &t);
            let out = transmit(mcs, sinr, &t, 1, 180.0);
            if !out.ack {
                nacks += 1;
            }
            o = olla_update(&o, out.ack);
        }
        let frac = nacks as f64 / n as f64;
        assert!((frac - 1.0 / 11.0).abs() < 0.02, "{frac}");
    }

    #[test]
    fn transmit_examples() {
        let t = McsTable::default();
        let top = transmit(14, 60.0, &t, 2, 180.0);
        assert!(top.ack);
        assert_eq!(top.tb_bits, (7.4063f64 * 360.0).floor() as u64);
        let thr = t.row(7).threshold_db;
        let miss = transmit(7, thr - 0.1, &t, 5, 180.0);
        assert_eq!(miss, TxOutcome { ack: false, tb_bits: 0 });
        assert!(transmit(7, thr, &t, 5, 180.0).ack);
    }

    proptest! {
        #[test]
        fn selected_mcs_is_feasible_and_maximal(sinr in -20.0f64..40.0, off in -10.0f64..10.0) {
            let t = McsTable::default();
            let o = OllaState { offset_db: off, ..OllaState::default() };
            let m = link_adapt(sinr, &o, &t);
            let eff = sinr + off;
            if m > 0 {
                prop_assert!(t.row(m).threshold_db <= eff);
            }
            if m + 1 < t.len() {
                prop_assert!(t.row(m + 1).threshold_db > eff);
            }
        }
    }
}
