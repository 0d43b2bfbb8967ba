//! Statistics over transmission records: throughput, percentiles, CDFs and
//! MCS usage.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ran::KpiRecord;

/// Delivered bits per UE divided by `duration_s`. UEs without records get 0.
pub fn ue_throughput(records: &[KpiRecord], n_ues: usize, duration_s: f64) -> Result<Vec<f64>> {
    if !(duration_s > 0.0) {
        return Err(Error::invalid(format!("duration {duration_s} s must be positive")));
    }
    let mut bits = vec![0u64; n_ues];
    for r in records {
        let slot = bits
            .get_mut(r.ue)
            .ok_or_else(|| Error::invalid(format!("record for UE {} but only {n_ues} UEs", r.ue)))?;
        *slot += r.bits;
    }
    Ok(bits.into_iter().map(|b| b as f64 / duration_s).collect())
}

/// Nearest-rank percentile: the smallest sample such that at least `p`% of
/// the samples are at or below it. `p = 0` gives the minimum.
pub fn percentile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("percentile series"));
    }
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::invalid(format!("percentile {p} outside [0, 100]")));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let rank = ((p / 100.0) * n as f64).ceil() as usize;
    Ok(v[rank.clamp(1, n) - 1])
}

/// 10th, 50th and 90th percentiles.
pub fn deciles(values: &[f64]) -> Result<[f64; 3]> {
    Ok([percentile(values, 10.0)?, percentile(values, 50.0)?, percentile(values, 90.0)?])
}

/// Empirical CDF: `probabilities[i] = (i + 1) / n` at `values[i]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfSeries {
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl CdfSeries {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("CDF samples"));
        }
        let mut values = samples.to_vec();
        values.sort_by(f64::total_cmp);
        let n = values.len() as f64;
        let probabilities = (1..=values.len()).map(|i| i as f64 / n).collect();
        Ok(Self { values, probabilities })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Share of transmissions that were ACKed at each MCS, plus the NACK share.
/// The shares and the NACK fraction sum to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McsHistogram {
    pub ack_counts: Vec<u64>,
    pub nack_count: u64,
    pub shares: Vec<f64>,
    pub nack_fraction: f64,
}

impl McsHistogram {
    pub fn total(&self) -> u64 {
        self.ack_counts.iter().sum::<u64>() + self.nack_count
    }
}

pub fn mcs_histogram(records: &[KpiRecord], n_mcs: usize) -> Result<McsHistogram> {
    let mut ack_counts = vec![0u64; n_mcs];
    let mut nack_count = 0;
    for r in records {
        if r.ack {
            *ack_counts
                .get_mut(r.mcs)
                .ok_or_else(|| Error::invalid(format!("MCS {} outside table of {n_mcs}", r.mcs)))? += 1;
        } else {
            nack_count += 1;
        }
    }
    let total = (ack_counts.iter().sum::<u64>() + nack_count) as f64;
    let share = |c: u64| if total > 0.0 { c as f64 / total } else { 0.0 };
    Ok(McsHistogram {
        shares: ack_counts.iter().map(|&c| share(c)).collect(),
        nack_fraction: share(nack_count),
        ack_counts,
        nack_count,
    })
}

pub fn nack_fraction(records: &[KpiRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    records.iter().filter(|r| !r.ack).count() as f64 / records.len() as f64
}

/// Per-run summary row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KpiSummary {
    pub throughput_p10: f64,
    pub throughput_p50: f64,
    pub throughput_p90: f64,
    pub sinr_p10: f64,
    pub sinr_p50: f64,
    pub sinr_p90: f64,
    pub nack_fraction: f64,
    pub transmissions: usize,
    pub delivered_bits: u64,
}

pub fn summarize(records: &[KpiRecord], n_ues: usize, duration_s: f64) -> Result<KpiSummary> {
    let tput = deciles(&ue_throughput(records, n_ues, duration_s)?)?;
    let sinr: Vec<f64> = records.iter().map(|r| r.sinr_db).collect();
    let s = if sinr.is_empty() {
        [f64::NAN; 3]
    } else {
        deciles(&sinr)?
    };
    Ok(KpiSummary {
        throughput_p10: tput[0],
        throughput_p50: tput[1],
        throughput_p90: tput[2],
        sinr_p10: s[0],
        sinr_p50: s[1],
        sinr_p90: s[2],
        nack_fraction: nack_fraction(records),
        transmissions: records.len(),
        delivered_bits: records.iter().map(|r| r.bits).sum(),
    })
}
