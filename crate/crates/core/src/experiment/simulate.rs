//! The system-level drop matrix: array sizes x frequency offsets x modes x
//! drops, with KPI summaries.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::info;
use rayon::prelude::*;
use serde::Serialize;

use super::write_csv;
use crate::beamforming::ElementPattern;
use crate::config::{ArraySpec, SimulationConfig};
use crate::error::Result;
use crate::kpi::{deciles, mcs_histogram, nack_fraction, summarize, ue_throughput, CdfSeries, KpiSummary};
use crate::ran::sim::scenario_seed;
use crate::ran::{KpiRecord, McsTable, Mode, Panel, Simulation};
use crate::scenario::build_scenario;

/// Key of one cell of the matrix. Offsets are kept in integer hertz so the
/// key is totally ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub array_elements: usize,
    pub delta_f_hz: i64,
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryRow {
    pub array_elements: usize,
    pub delta_f_hz: i64,
    pub mode: Mode,
    pub drop: Option<u32>,
    pub throughput_p10_bps: f64,
    pub throughput_p50_bps: f64,
    pub throughput_p90_bps: f64,
    pub sinr_p10_db: f64,
    pub sinr_p50_db: f64,
    pub sinr_p90_db: f64,
    pub nack_fraction: f64,
    pub transmissions: usize,
    pub delivered_bits: u64,
}

impl SummaryRow {
    fn new(key: &CellKey, drop: Option<u32>, s: &KpiSummary) -> Self {
        Self {
            array_elements: key.array_elements,
            delta_f_hz: key.delta_f_hz,
            mode: key.mode,
            drop,
            throughput_p10_bps: s.throughput_p10,
            throughput_p50_bps: s.throughput_p50,
            throughput_p90_bps: s.throughput_p90,
            sinr_p10_db: s.sinr_p10,
            sinr_p50_db: s.sinr_p50,
            sinr_p90_db: s.sinr_p90,
            nack_fraction: s.nack_fraction,
            transmissions: s.transmissions,
            delivered_bits: s.delivered_bits,
        }
    }
}

#[derive(Debug, Serialize)]
struct CdfRow {
    array_elements: usize,
    delta_f_hz: i64,
    mode: Mode,
    throughput_bps: f64,
    probability: f64,
}

#[derive(Debug, Serialize)]
struct PercentileRow {
    metric: &'static str,
    array_elements: usize,
    delta_f_hz: i64,
    mode: Mode,
    p10: f64,
    p50: f64,
    p90: f64,
}

#[derive(Debug, Serialize)]
struct HistRow {
    array_elements: usize,
    delta_f_hz: i64,
    mode: Mode,
    bin: String,
    count: u64,
    share: f64,
}

/// Everything a run produced, in memory.
#[derive(Debug, Clone)]
pub struct SimulationOutput {
    /// One row per matrix cell, pooled over drops.
    pub summary: Vec<SummaryRow>,
    /// One row per matrix cell and drop.
    pub per_drop: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

impl SimulationOutput {
    pub fn cell(&self, n: usize, delta_f_hz: f64, mode: Mode) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.array_elements == n && r.delta_f_hz == delta_f_hz.round() as i64 && r.mode == mode)
    }

    pub fn cell_drop(&self, n: usize, delta_f_hz: f64, mode: Mode, drop: u32) -> Option<&SummaryRow> {
        self.per_drop.iter().find(|r| {
            r.array_elements == n && r.delta_f_hz == delta_f_hz.round() as i64 && r.mode == mode && r.drop == Some(drop)
        })
    }
}

/// `n`-element ULA panel with a DFT codebook designed at `f1`.
pub fn ula_panel(n: usize, pattern: ElementPattern, f1: f64) -> Result<Panel> {
    let spec = ArraySpec::Ula { elements: n };
    Panel::new(spec.geometry(f1)?, pattern, spec.codebook(1, f1)?)
}

/// Runs the matrix and writes all CSV outputs into `out`.
pub fn run_simulation(cfg: &SimulationConfig, out: &Path) -> Result<SimulationOutput> {
    std::fs::create_dir_all(out)?;
    let table = Arc::new(match &cfg.mcs_table {
        Some(p) => McsTable::from_path(p)?,
        None => McsTable::default(),
    });
    // (gNB, NCR) panels per size; shared when the element patterns agree
    let radio = &cfg.model.radio;
    let mut panels = BTreeMap::new();
    for &n in &cfg.array_sizes {
        if !panels.contains_key(&n) {
            info!("building {n}-element panels");
            let gnb = Arc::new(ula_panel(n, radio.gnb.pattern, cfg.model.f1_hz)?);
            let ncr = if radio.ncr.pattern == radio.gnb.pattern {
                gnb.clone()
            } else {
                Arc::new(ula_panel(n, radio.ncr.pattern, cfg.model.f1_hz)?)
            };
            panels.insert(n, (gnb, ncr));
        }
    }

    let mut jobs = Vec::new();
    for &n in &cfg.array_sizes {
        for &df in &cfg.delta_f_hz {
            for &mode in &cfg.modes {
                for drop in 0..cfg.drops {
                    jobs.push((n, df, mode, drop));
                }
            }
        }
    }
    info!("running {} simulations", jobs.len());
    let results: Vec<Vec<KpiRecord>> = jobs
        .par_iter()
        .map(|&(n, df, mode, drop)| {
            let (gnb, ncr) = panels[&n].clone();
            let mut sim = Simulation::new(&cfg.model, mode, df, gnb, ncr, table.clone(), cfg.seed, drop)?;
            let r = sim.run()?;
            info!("done: {n} elements, df {df} Hz, {mode}, drop {drop}");
            Ok(r)
        })
        .collect::<Result<_>>()?;

    let mut files = Vec::new();
    for drop in 0..cfg.drops {
        let sc = build_scenario(&cfg.model.scenario, scenario_seed(cfg.seed, drop))?;
        let path = out.join(format!("nodes_drop{drop}.csv"));
        sc.write_node_table(BufWriter::new(File::create(&path)?))?;
        files.push(path);
    }

    let n_ues = cfg.model.scenario.n_ues;
    let duration = cfg.model.n_ttis as f64 * cfg.model.radio.slot_duration_s;
    let mut cells: BTreeMap<CellKey, Vec<(u32, Vec<KpiRecord>)>> = BTreeMap::new();
    for (&(n, df, mode, drop), recs) in jobs.iter().zip(results) {
        let key = CellKey {
            array_elements: n,
            delta_f_hz: df.round() as i64,
            mode,
        };
        cells.entry(key).or_default().push((drop, recs));
    }

    if cfg.write_records {
        let dir = out.join("records");
        std::fs::create_dir_all(&dir)?;
        for (key, drops) in &cells {
            let path = dir.join(format!("ula{}_df{}_{}.csv", key.array_elements, key.delta_f_hz, key.mode));
            write_csv(&path, drops.iter().flat_map(|(_, r)| r.iter()))?;
            files.push(path);
        }
    }

    let mut summary = Vec::new();
    let mut per_drop = Vec::new();
    let mut cdf = Vec::new();
    let mut pct = Vec::new();
    let mut hist = Vec::new();
    for (key, drops) in &cells {
        let mut tput = Vec::new();
        let mut sinr = Vec::new();
        let mut all = Vec::new();
        for (drop, recs) in drops {
            per_drop.push(SummaryRow::new(key, Some(*drop), &summarize(recs, n_ues, duration)?));
            tput.extend(ue_throughput(recs, n_ues, duration)?);
            sinr.extend(recs.iter().map(|r| r.sinr_db));
            all.extend_from_slice(recs);
        }
        let s = summarize_pooled(&all, &tput, &sinr)?;
        summary.push(SummaryRow::new(key, None, &s));
        let c = CdfSeries::from_samples(&tput)?;
        cdf.extend(c.values.iter().zip(&c.probabilities).map(|(&v, &p)| CdfRow {
            array_elements: key.array_elements,
            delta_f_hz: key.delta_f_hz,
            mode: key.mode,
            throughput_bps: v,
            probability: p,
        }));
        for (metric, d) in [
            ("throughput_bps", [s.throughput_p10, s.throughput_p50, s.throughput_p90]),
            ("sinr_db", [s.sinr_p10, s.sinr_p50, s.sinr_p90]),
        ] {
            pct.push(PercentileRow {
                metric,
                array_elements: key.array_elements,
                delta_f_hz: key.delta_f_hz,
                mode: key.mode,
                p10: d[0],
                p50: d[1],
                p90: d[2],
            });
        }
        let h = mcs_histogram(&all, table.len())?;
        for (i, (&c, &sh)) in h.ack_counts.iter().zip(&h.shares).enumerate() {
            hist.push(HistRow {
                array_elements: key.array_elements,
                delta_f_hz: key.delta_f_hz,
                mode: key.mode,
                bin: i.to_string(),
                count: c,
                share: sh,
            });
        }
        hist.push(HistRow {
            array_elements: key.array_elements,
            delta_f_hz: key.delta_f_hz,
            mode: key.mode,
            bin: "nack".into(),
            count: h.nack_count,
            share: h.nack_fraction,
        });
    }
    // summaries grouped by array, then mode, then offset
    pct.sort_by_key(|r| (r.metric, r.array_elements, r.mode, r.delta_f_hz));

    for (name, written) in [
        ("summary.csv", write_csv(&out.join("summary.csv"), &summary)),
        ("summary_per_drop.csv", write_csv(&out.join("summary_per_drop.csv"), &per_drop)),
        ("cdf_throughput.csv", write_csv(&out.join("cdf_throughput.csv"), &cdf)),
        ("percentiles_vs_offset.csv", write_csv(&out.join("percentiles_vs_offset.csv"), &pct)),
        ("mcs_hist.csv", write_csv(&out.join("mcs_hist.csv"), &hist)),
    ] {
        written?;
        files.push(out.join(name));
    }
    Ok(SimulationOutput {
        summary,
        per_drop,
        files,
    })
}

fn summarize_pooled(all: &[KpiRecord], tput: &[f64], sinr: &[f64]) -> Result<KpiSummary> {
    let t = deciles(tput)?;
    let s = if sinr.is_empty() { [f64::NAN; 3] } else { deciles(sinr)? };
    Ok(KpiSummary {
        throughput_p10: t[0],
        throughput_p50: t[1],
        throughput_p90: t[2],
        sinr_p10: s[0],
        sinr_p50: s[1],
        sinr_p90: s[2],
        nack_fraction: nack_fraction(all),
        transmissions: all.len(),
        delivered_bits: all.iter().map(|r| r.bits).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimulationConfig {
        let mut cfg = SimulationConfig {
            drops: 2,
            array_sizes: vec![16],
            delta_f_hz: vec![0.0, 1e9],
            ..SimulationConfig::default()
        };
        cfg.model.scenario.n_ues = 3;
        cfg.model.n_ttis = 60;
        cfg
    }

    #[test]
    fn matrix_shape_and_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_simulation(&small(), dir.path()).unwrap();
        assert_eq!(out.summary.len(), 2 * 3);
        assert_eq!(out.per_drop.len(), 2 * 3 * 2);
        for name in [
            "summary.csv",
            "summary_per_drop.csv",
            "cdf_throughput.csv",
            "percentiles_vs_offset.csv",
            "mcs_hist.csv",
            "nodes_drop0.csv",
            "nodes_drop1.csv",
            "records/ula16_df1000000000_squint.csv",
        ] {
            assert!(dir.path().join(name).is_file(), "{name}");
        }
        let header = std::fs::read_to_string(dir.path().join("records/ula16_df0_baseline.csv")).unwrap();
        assert!(header.starts_with("drop,tti,ue,path,mode,n_rbs,sinr_db,mcs,ack,bits\n"));
        let pct = std::fs::read_to_string(dir.path().join("percentiles_vs_offset.csv")).unwrap();
        assert!(pct.starts_with("metric,array_elements,delta_f_hz,mode,p10,p50,p90\n"));
        assert_eq!(pct.lines().count(), 1 + 2 * 6);
    }

    #[test]
    fn zero_offset_summaries_match_across_modes() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_simulation(&small(), dir.path()).unwrap();
        let base = out.cell(16, 0.0, Mode::Baseline).unwrap();
        for m in [Mode::Squint, Mode::Compensated] {
            let r = out.cell(16, 0.0, m).unwrap();
            assert_eq!(SummaryRow { mode: base.mode, ..*r }, *base);
        }
    }
}
