//! Array gain toward the design direction as the carrier moves away from
//! the design frequency.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{to_db, write_csv};
use crate::beamforming::{pattern_power, BeamWeights};
use crate::config::SweepOffsetConfig;
use crate::error::Result;
use crate::geometry::Direction;
use crate::squint::{apply_compensation, compensation_vector, FrequencyPlan};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OffsetRow {
    pub beam_azimuth_deg: f64,
    pub delta_f_hz: f64,
    pub compensated: bool,
    pub gain_db: f64,
}

/// Offsets from `min` to `max` inclusive in steps of `step`.
pub fn offset_grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let n = ((max - min) / step + 1e-9).floor() as i64;
    (0..=n).map(|i| min + i as f64 * step).collect()
}

pub fn sweep_offset_rows(cfg: &SweepOffsetConfig) -> Result<Vec<OffsetRow>> {
    let f1 = cfg.design_frequency_hz;
    let geom = cfg.array.geometry(f1)?;
    let offsets = offset_grid(cfg.delta_f_min_hz, cfg.delta_f_max_hz, cfg.delta_f_step_hz);
    let mut rows = Vec::new();
    for &az in &cfg.beam_azimuths_deg {
        let dir = Direction::new(az, 90.0)?;
        let w = BeamWeights::conjugate_steering(&geom, f1, &dir)?.normalized();
        for &df in &offsets {
            let plan = FrequencyPlan::new(f1, df)?;
            let plain = pattern_power(&geom, &cfg.element, &w, plan.f2(), &dir)?;
            let comp_w = apply_compensation(&w, &compensation_vector(&geom, &plan, &dir)?)?;
            let comp = pattern_power(&geom, &cfg.element, &comp_w, plan.f2(), &dir)?;
            for (compensated, g) in [(false, plain), (true, comp)] {
                rows.push(OffsetRow {
                    beam_azimuth_deg: az,
                    delta_f_hz: df,
                    compensated,
                    gain_db: to_db(g),
                });
            }
        }
    }
    Ok(rows)
}

/// Writes `sweep_offset.csv`.
pub fn run_sweep_offset(cfg: &SweepOffsetConfig, out: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out)?;
    let path = out.join("sweep_offset.csv");
    write_csv(&path, sweep_offset_rows(cfg)?)?;
    Ok(vec![path])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gains(rows: &[OffsetRow], az: f64, comp: bool) -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r.beam_azimuth_deg == az && r.compensated == comp)
            .map(|r| (r.delta_f_hz, r.gain_db))
            .collect()
    }

    #[test]
    fn grid_includes_both_ends() {
        let g = offset_grid(-1e9, 1e9, 10e6);
        assert_eq!(g.len(), 201);
        assert_eq!(g[100], 0.0);
        assert_eq!(*g.last().unwrap(), 1e9);
    }

    #[test]
    fn wide_beams_lose_more_and_compensation_is_flat() {
        let cfg = SweepOffsetConfig {
            delta_f_step_hz: 100e6,
            ..SweepOffsetConfig::default()
        };
        let rows = sweep_offset_rows(&cfg).unwrap();
        for &az in &cfg.beam_azimuths_deg {
            let plain = gains(&rows, az, false);
            let comp = gains(&rows, az, true);
            let zero = plain.iter().find(|(df, _)| *df == 0.0).unwrap().1;
            assert_eq!(zero, comp.iter().find(|(df, _)| *df == 0.0).unwrap().1);
            let (lo, hi) = comp
                .iter()
                .fold((f64::MAX, f64::MIN), |(lo, hi), (_, g)| (lo.min(*g), hi.max(*g)));
            assert!(hi - lo <= 0.2, "compensated spread {} dB at {az}", hi - lo);
        }
        let loss = |az: f64| {
            let p = gains(&rows, az, false);
            let zero = p.iter().find(|(df, _)| *df == 0.0).unwrap().1;
            zero - p.iter().find(|(df, _)| *df == 5e8).unwrap().1
        };
        assert!(loss(66.0) > loss(15.0));
    }
}
