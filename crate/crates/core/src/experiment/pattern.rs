//! Gain-versus-angle traces of codebook entries at several frequencies,
//! with and without squint compensation.

use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::Serialize;

use super::{to_db, write_csv};
use crate::beamforming::{find_peak, hpbw, BeamWeights};
use crate::config::{ArraySpec, PatternConfig};
use crate::error::Result;
use crate::squint::{apply_compensation, compensation_vector, cut_samples, intended_direction, predict_squint, Cut, FrequencyPlan};

#[derive(Debug, Serialize)]
struct TraceRow {
    azimuth_deg: f64,
    zenith_deg: f64,
    gain_db: f64,
}

#[derive(Debug, Serialize)]
pub struct PeakRow {
    pub beam: usize,
    pub frequency_hz: f64,
    pub compensated: bool,
    pub peak_azimuth_deg: f64,
    pub peak_zenith_deg: f64,
    pub peak_gain_db: f64,
    pub shift_deg: f64,
    pub predicted_shift_deg: Option<f64>,
    pub hpbw_deg: Option<f64>,
    pub file: String,
}

/// Sorted union of a coarse grid over the front half-plane and fine grids
/// around each centre.
fn angle_grid(coarse: f64, fine: f64, window: f64, centres: &[f64]) -> Vec<f64> {
    let steps = |from: f64, to: f64, step: f64| {
        let n = ((to - from) / step).round() as i64;
        (0..=n).map(move |i| from + i as f64 * step)
    };
    let mut g: Vec<f64> = steps(-90.0, 90.0, coarse).collect();
    for &c in centres {
        let lo = (c - window).max(-90.0);
        let hi = (c + window).min(90.0);
        if lo < hi {
            g.extend(steps(lo, hi, fine).filter(|x| *x <= hi + 1e-9));
        }
    }
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    g
}

/// Writes one trace per (beam, frequency, compensation) and a summary of
/// the peaks to `pattern_peaks.csv`. Returns the files written.
pub fn run_pattern(cfg: &PatternConfig, out: &Path) -> Result<Vec<PathBuf>> {
    if cfg.frequencies_hz.is_empty() {
        warn!("pattern: empty frequency list, nothing to do");
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(out)?;
    let f1 = cfg.design_frequency_hz;
    let geom = cfg.array.geometry(f1)?;
    let book = cfg.array.codebook(cfg.oversampling, f1)?;
    let linear = matches!(cfg.array, ArraySpec::Ula { .. });
    let grid_step = if linear { 0.1 } else { 1.0 };
    let label = cfg.array.label();
    let mut files = Vec::new();
    let mut peaks = Vec::new();
    for &beam in &cfg.beams {
        let w1 = &book.entries[beam];
        let u_star = intended_direction(&geom, &cfg.element, w1, f1, None)?;
        let p1 = find_peak(&geom, &cfg.element, w1, f1, grid_step)?;
        for &f in &cfg.frequencies_hz {
            let mut variants: Vec<(bool, BeamWeights)> = vec![(false, w1.clone())];
            if cfg.compensate && f != f1 {
                let plan = FrequencyPlan::new(f1, f - f1)?;
                let c = compensation_vector(&geom, &plan, &u_star)?;
                variants.push((true, apply_compensation(w1, &c)?));
            }
            for (comp, w) in variants {
                let peak = find_peak(&geom, &cfg.element, &w, f, grid_step)?;
                let grid = angle_grid(
                    cfg.coarse_step_deg,
                    cfg.fine_step_deg,
                    cfg.fine_window_deg,
                    &[p1.azimuth(), peak.azimuth()],
                );
                let rows: Vec<TraceRow> = grid
                    .iter()
                    .flat_map(|&az| {
                        cut_samples(&geom, &cfg.element, &w, f, peak.zenith(), az, az, 1.0, Cut::Azimuth)
                    })
                    .map(|(d, p)| TraceRow {
                        azimuth_deg: d.azimuth(),
                        zenith_deg: d.zenith(),
                        gain_db: to_db(p),
                    })
                    .collect();
                let name = format!(
                    "pattern_{label}_b{beam}_f{:.0}_{}.csv",
                    f,
                    if comp { "comp" } else { "plain" }
                );
                let path = out.join(&name);
                write_csv(&path, rows)?;
                let gain = crate::beamforming::pattern_power(&geom, &cfg.element, &w, f, &peak)?;
                peaks.push(PeakRow {
                    beam,
                    frequency_hz: f,
                    compensated: comp,
                    peak_azimuth_deg: peak.azimuth(),
                    peak_zenith_deg: peak.zenith(),
                    peak_gain_db: to_db(gain),
                    shift_deg: peak.azimuth() - p1.azimuth(),
                    predicted_shift_deg: if linear && !comp {
                        predict_squint(p1.azimuth(), f1, f - f1).ok()
                    } else {
                        None
                    },
                    hpbw_deg: hpbw(&geom, &cfg.element, &w, f, &peak).ok(),
                    file: name,
                });
                info!("pattern: beam {beam} at {f} Hz{} -> {}", if comp { " (compensated)" } else { "" }, peak);
                files.push(path);
            }
        }
    }
    let summary = out.join("pattern_peaks.csv");
    write_csv(&summary, peaks)?;
    files.push(summary);
    Ok(files)
}
