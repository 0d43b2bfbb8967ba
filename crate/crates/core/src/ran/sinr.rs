//! Per-RB SINR of the direct and repeater-assisted downlink chains.

use super::ncr::ncr_gain;

/// Linear per-RB powers shared by all links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbPowers {
    /// gNB transmit power per RB (W).
    pub p_tx_w: f64,
    /// Repeater output power per RB (W).
    pub p_ncr_w: f64,
    /// Noise at the repeater input per RB (W).
    pub noise_ncr_w: f64,
    /// Noise at the UE per RB (W).
    pub noise_ue_w: f64,
    pub ncr_fixed_gain_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrBreakdown {
    pub signal_w: f64,
    /// Repeater input noise after amplification and the access link.
    pub forwarded_noise_w: f64,
    pub interference_w: f64,
    pub noise_w: f64,
    /// Repeater gain applied, 0 for direct links.
    pub ncr_gain: f64,
}

impl SinrBreakdown {
    pub fn sinr(&self) -> f64 {
        self.signal_w / (self.forwarded_noise_w + self.interference_w + self.noise_w)
    }

    pub fn sinr_db(&self) -> f64 {
        10.0 * self.sinr().log10()
    }
}

/// gNB -> UE with effective link gain `g_direct`.
pub fn direct_sinr(g_direct: f64, powers: &RbPowers, interference_w: f64) -> SinrBreakdown {
    SinrBreakdown {
        signal_w: powers.p_tx_w * g_direct,
        forwarded_noise_w: 0.0,
        interference_w,
        noise_w: powers.noise_ue_w,
        ncr_gain: 0.0,
    }
}

/// gNB -> NCR -> UE with backhaul gain `gamma` and access gain `access`.
/// The repeater amplifies its own input noise together with the signal.
pub fn via_ncr_sinr(gamma: f64, access: f64, powers: &RbPowers, interference_w: f64) -> SinrBreakdown {
    let g = ncr_gain(
        powers.p_ncr_w,
        powers.noise_ncr_w,
        gamma,
        powers.p_tx_w,
        powers.ncr_fixed_gain_db,
    );
    SinrBreakdown {
        signal_w: g * gamma * powers.p_tx_w * access,
        forwarded_noise_w: g * powers.noise_ncr_w * access,
        interference_w,
        noise_w: powers.noise_ue_w,
        ncr_gain: g,
    }
}
