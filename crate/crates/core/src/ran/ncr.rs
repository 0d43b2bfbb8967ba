//! Amplify-and-forward repeater gain.

/// Per-RB gain of the repeater: the fixed gain, reduced when the amplified
/// input `noise + gamma p_tx` would exceed the per-RB output power.
/// All powers are linear (W).
pub fn ncr_gain(p_ncr_w: f64, noise_w: f64, gamma: f64, p_tx_w: f64, fixed_gain_db: f64) -> f64 {
    let fixed = 10f64.powf(fixed_gain_db / 10.0);
    let input = noise_w + gamma * p_tx_w;
    if input <= 0.0 {
        return fixed;
    }
    fixed.min(p_ncr_w / input)
}

/// Repeater state after the latest sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcrState {
    pub fixed_gain_db: f64,
    pub max_output_power_dbm: f64,
    pub fwd_backhaul_beam: Option<usize>,
    pub fwd_access_beam: Option<usize>,
    /// Per-RB gain, equal on all RBs.
    pub gain: f64,
}

impl NcrState {
    pub fn new(fixed_gain_db: f64, max_output_power_dbm: f64) -> Self {
        Self {
            fixed_gain_db,
            max_output_power_dbm,
            fwd_backhaul_beam: None,
            fwd_access_beam: None,
            gain: 10f64.powf(fixed_gain_db / 10.0),
        }
    }
}

/// Output power per RB after amplification.
pub fn ncr_output_power(gain: f64, noise_w: f64, gamma: f64, p_tx_w: f64) -> f64 {
    gain * (noise_w + gamma * p_tx_w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(ncr_gain(1e-3, 1e-20, 1e-15, 1e-3, 60.0), 1e6);
        assert_relative_eq!(ncr_gain(1e-3, 1e-13, 0.0, 1.0, 110.0), 1e10, max_relative = 1e-12);
        assert_eq!(ncr_gain(1e-3, 1e-13, 0.0, 1.0, 60.0), 1e6);
        let g = ncr_gain(1e-3, 1e-13, 1e-9, 1.0, 60.0);
        assert_relative_eq!(g, 1e-3 / 1.0001e-9, max_relative = 1e-12);
        assert!(g < 1e6 && g > 9.99e5);
    }

    proptest! {
        #[test]
        fn output_never_exceeds_limit(
            p in 1e-6f64..1.0, n in 1e-16f64..1e-10, gamma in 0.0f64..1e-6, ptx in 0.0f64..10.0, fixed in 0.0f64..80.0,
        ) {
            let g = ncr_gain(p, n, gamma, ptx, fixed);
            prop_assert!(g <= 10f64.powf(fixed / 10.0) * (1.0 + 1e-12));
            prop_assert!(ncr_output_power(g, n, gamma, ptx) <= p * (1.0 + 1e-12));
        }
    }
}
