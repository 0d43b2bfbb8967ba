//! Network snapshot, SSB/CSI-RS beam sweeps and serving decisions.

use serde::{Deserialize, Serialize};

use super::panel::Panel;
use super::sinr::{direct_sinr, via_ncr_sinr, RbPowers, SinrBreakdown};
use crate::beamforming::BeamWeights;
use crate::channel::{link_gain, watt_to_dbm, PathLossModel, RadioNode};
use crate::error::{Error, Result};
use crate::geometry::{sub, Direction};

/// Path-loss parameters per link class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkModels {
    /// gNB <-> NCR.
    pub backhaul: PathLossModel,
    /// NCR <-> UE.
    pub access: PathLossModel,
    /// gNB <-> UE.
    pub direct: PathLossModel,
}

/// Backhaul: LOS rooftop link. Access: street-level link around the
/// repeater, UMi street-canyon NLOS. Direct: the gNB is several blocks away,
/// UMa NLOS.
impl Default for LinkModels {
    fn default() -> Self {
        Self {
            backhaul: PathLossModel::default(),
            access: PathLossModel {
                a: 32.4,
                b: 31.9,
                c: 20.0,
            },
            direct: PathLossModel {
                a: 13.54,
                b: 39.08,
                c: 20.0,
            },
        }
    }
}

/// Shadowing (dB) of every link in the snapshot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinkShadowing {
    pub backhaul_db: f64,
    pub direct_db: Vec<f64>,
    pub access_db: Vec<f64>,
}

/// Positioned nodes, panels and link parameters at one instant.
#[derive(Debug, Clone)]
pub struct Network<'a> {
    pub gnb: RadioNode,
    pub ncr_backhaul: RadioNode,
    pub ncr_access: RadioNode,
    pub ues: Vec<RadioNode>,
    pub gnb_panel: &'a Panel,
    pub ncr_panel: &'a Panel,
    pub links: LinkModels,
    pub shadowing: LinkShadowing,
    pub powers: RbPowers,
    pub subcarriers_per_rb: usize,
    pub ncr_enabled: bool,
}

impl Network<'_> {
    pub fn direct_gain(&self, ue: usize, w: &BeamWeights, f: f64) -> Result<f64> {
        Ok(link_gain(
            &self.gnb,
            &self.ues[ue],
            f,
            Some(w),
            None,
            &self.links.direct,
            self.shadowing.direct_db[ue],
        )?
        .effective_gain)
    }

    pub fn access_gain(&self, ue: usize, w: &BeamWeights, f: f64) -> Result<f64> {
        Ok(link_gain(
            &self.ncr_access,
            &self.ues[ue],
            f,
            Some(w),
            None,
            &self.links.access,
            self.shadowing.access_db[ue],
        )?
        .effective_gain)
    }

    pub fn backhaul_gain(&self, w_gnb: &BeamWeights, w_ncr: &BeamWeights, f: f64) -> Result<f64> {
        Ok(link_gain(
            &self.gnb,
            &self.ncr_backhaul,
            f,
            Some(w_gnb),
            Some(w_ncr),
            &self.links.backhaul,
            self.shadowing.backhaul_db,
        )?
        .effective_gain)
    }

    /// Direction of `to` in the array frame of `from`.
    pub fn local_direction(from: &RadioNode, to: &RadioNode) -> Result<Direction> {
        from.local_direction(&sub(&to.position, &from.position))
    }

    /// Reference-signal power per resource element of the gNB (W).
    pub fn rs_power_w(&self) -> f64 {
        self.powers.p_tx_w / self.subcarriers_per_rb as f64
    }

    pub fn direct_sinr(&self, ue: usize, w: &BeamWeights, f: f64) -> Result<SinrBreakdown> {
        Ok(direct_sinr(self.direct_gain(ue, w, f)?, &self.powers, 0.0))
    }

    pub fn via_ncr_sinr(
        &self,
        ue: usize,
        w_gnb: &BeamWeights,
        w_ncr_bh: &BeamWeights,
        w_access: &BeamWeights,
        f: f64,
    ) -> Result<SinrBreakdown> {
        let gamma = self.backhaul_gain(w_gnb, w_ncr_bh, f)?;
        let access = self.access_gain(ue, w_access, f)?;
        Ok(via_ncr_sinr(gamma, access, &self.powers, 0.0))
    }
}

/// Result of the gNB-NCR sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackhaulReport {
    pub gnb_beam: usize,
    pub ncr_beam: usize,
    pub gamma: f64,
    pub rsrp_dbm: f64,
}

/// Best beam pair for the backhaul. The LOS link is rank one, so the two
/// ends are optimised independently.
pub fn backhaul_sweep(net: &Network, f: f64) -> Result<BackhaulReport> {
    let (gnb_beam, _) = net
        .gnb_panel
        .best_beam(&Network::local_direction(&net.gnb, &net.ncr_backhaul)?, f);
    let (ncr_beam, _) = net
        .ncr_panel
        .best_beam(&Network::local_direction(&net.ncr_backhaul, &net.gnb)?, f);
    let gamma = net.backhaul_gain(
        net.gnb_panel.weights(gnb_beam),
        net.ncr_panel.weights(ncr_beam),
        f,
    )?;
    Ok(BackhaulReport {
        gnb_beam,
        ncr_beam,
        gamma,
        rsrp_dbm: watt_to_dbm(net.rs_power_w() * gamma),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamRsrp {
    pub beam: usize,
    pub rsrp_dbm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeReport {
    pub ue: usize,
    pub direct: BeamRsrp,
    /// Best NCR access beam, forwarded over the current backhaul pair.
    pub via_ncr: Option<BeamRsrp>,
}

/// RSRP of the best direct beam and the best repeater access beam for each
/// UE, measured at `f`.
pub fn beam_sweep(net: &Network, backhaul: &BackhaulReport, f: f64) -> Result<Vec<UeReport>> {
    let p_re = net.rs_power_w();
    let g_ncr = super::ncr::ncr_gain(
        net.powers.p_ncr_w,
        net.powers.noise_ncr_w,
        backhaul.gamma,
        net.powers.p_tx_w,
        net.powers.ncr_fixed_gain_db,
    );
    (0..net.ues.len())
        .map(|ue| {
            let (beam, _) = net
                .gnb_panel
                .best_beam(&Network::local_direction(&net.gnb, &net.ues[ue])?, f);
            let g = net.direct_gain(ue, net.gnb_panel.weights(beam), f)?;
            let direct = BeamRsrp {
                beam,
                rsrp_dbm: watt_to_dbm(p_re * g),
            };
            let via_ncr = if net.ncr_enabled {
                let (beam, _) = net
                    .ncr_panel
                    .best_beam(&Network::local_direction(&net.ncr_access, &net.ues[ue])?, f);
                let a = net.access_gain(ue, net.ncr_panel.weights(beam), f)?;
                Some(BeamRsrp {
                    beam,
                    rsrp_dbm: watt_to_dbm(p_re * backhaul.gamma * g_ncr * a),
                })
            } else {
                None
            };
            Ok(UeReport { ue, direct, via_ncr })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServingPath {
    Direct,
    ViaNcr,
}

impl ServingPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            ServingPath::Direct => "direct",
            ServingPath::ViaNcr => "via_ncr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServingDecision {
    pub path: ServingPath,
    /// Direct beam, or the backhaul beam when served through the repeater.
    pub gnb_beam: usize,
    pub ncr_access_beam: Option<usize>,
}

/// Highest-RSRP option for `ue`. Equal RSRPs go to the lower beam index,
/// then to the direct path.
pub fn serving_decision(reports: &[UeReport], backhaul: &BackhaulReport, ue: usize) -> Result<ServingDecision> {
    let r = reports
        .iter()
        .find(|r| r.ue == ue)
        .ok_or(Error::MissingReport(ue))?;
    match r.via_ncr {
        Some(v)
            if v.rsrp_dbm > r.direct.rsrp_dbm
                || (v.rsrp_dbm == r.direct.rsrp_dbm && v.beam < r.direct.beam) =>
        {
            Ok(ServingDecision {
                path: ServingPath::ViaNcr,
                gnb_beam: backhaul.gnb_beam,
                ncr_access_beam: Some(v.beam),
            })
        }
        _ => Ok(ServingDecision {
            path: ServingPath::Direct,
            gnb_beam: r.direct.beam,
            ncr_access_beam: None,
        }),
    }
}
