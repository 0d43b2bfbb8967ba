//! Large-scale link model: path loss, lognormal shadowing, thermal noise and
//! the beamformed gain of a line-of-sight link.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::beamforming::{element_gain, power_unchecked, BeamWeights, ElementPattern};
use crate::error::{Error, Result};
use crate::geometry::{norm, sub, ArrayGeometry, Direction, Mounting, Vec3};

/// Thermal noise density at 290 K.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// `L = a + b log10(d / 1 m) + c log10(f / 1 GHz)` in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self {
            a: 28.0,
            b: 22.0,
            c: 20.0,
        }
    }
}

impl PathLossModel {
    pub fn path_loss(&self, d3d: f64, f_hz: f64) -> Result<f64> {
        path_loss(self, d3d, f_hz)
    }
}

pub fn path_loss(model: &PathLossModel, d3d: f64, f_hz: f64) -> Result<f64> {
    if !(d3d > 0.0) {
        return Err(Error::invalid(format!("distance {d3d} m must be positive")));
    }
    if !(f_hz > 0.0) {
        return Err(Error::invalid(format!("frequency {f_hz} Hz must be positive")));
    }
    Ok(model.a + model.b * d3d.log10() + model.c * (f_hz / 1e9).log10())
}

/// Extra loss at `f1 + delta_f` relative to `f1`: `c log10(1 + df/f1)`.
/// Negative offsets give a negative delta.
pub fn path_loss_delta(c_coeff: f64, f1: f64, delta_f: f64) -> f64 {
    c_coeff * (1.0 + delta_f / f1).log10()
}

/// `-174 dBm/Hz + 10 log10(n scs) + NF`.
pub fn noise_power_dbm(n_subcarriers: usize, scs_hz: f64, noise_figure_db: f64) -> f64 {
    THERMAL_NOISE_DBM_PER_HZ + 10.0 * (n_subcarriers as f64 * scs_hz).log10() + noise_figure_db
}

pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watt_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Number of random Fourier components in a [`ShadowingField`].
pub const SHADOWING_COMPONENTS: usize = 2048;

/// Stationary Gaussian field on the horizontal plane with exponential
/// autocorrelation `exp(-|dx| / d_corr)`.
///
/// Built as a sum of random cosines whose wavevectors follow a bivariate
/// Cauchy law of scale `1 / d_corr`, whose characteristic function is exactly
/// the exponential kernel.
#[derive(Debug, Clone)]
pub struct ShadowingField {
    sigma_db: f64,
    waves: Vec<([f64; 2], f64)>,
}

impl ShadowingField {
    pub fn new(seed: u64, decorrelation_distance: f64, sigma_db: f64) -> Result<Self> {
        if !(sigma_db >= 0.0) {
            return Err(Error::invalid(format!("shadowing sigma {sigma_db} dB must be >= 0")));
        }
        if !(decorrelation_distance > 0.0) {
            return Err(Error::invalid(format!(
                "decorrelation distance {decorrelation_distance} m must be positive"
            )));
        }
        if sigma_db == 0.0 {
            return Ok(Self {
                sigma_db,
                waves: Vec::new(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let waves = (0..SHADOWING_COMPONENTS)
            .map(|_| {
                let zx: f64 = StandardNormal.sample(&mut rng);
                let zy: f64 = StandardNormal.sample(&mut rng);
                let mut chi: f64 = StandardNormal.sample(&mut rng);
                if chi == 0.0 {
                    chi = f64::MIN_POSITIVE;
                }
                let scale = 1.0 / (chi.abs() * decorrelation_distance);
                let phase = rng.random_range(0.0..2.0 * PI);
                ([zx * scale, zy * scale], phase)
            })
            .collect();
        Ok(Self { sigma_db, waves })
    }

    pub fn sigma_db(&self) -> f64 {
        self.sigma_db
    }

    /// Shadowing in dB at a horizontal position (z is ignored).
    pub fn sample(&self, pos: &Vec3) -> f64 {
        if self.waves.is_empty() {
            return 0.0;
        }
        let amp = self.sigma_db * (2.0 / self.waves.len() as f64).sqrt();
        amp * self
            .waves
            .iter()
            .map(|(k, phase)| (k[0] * pos[0] + k[1] * pos[1] + phase).cos())
            .sum::<f64>()
    }
}

/// A radio node as seen by the channel: position, optional antenna array,
/// element pattern and mounting.
#[derive(Debug, Clone)]
pub struct RadioNode {
    pub id: usize,
    pub position: Vec3,
    pub array: Option<ArrayGeometry>,
    pub pattern: ElementPattern,
    pub mounting: Mounting,
}

impl RadioNode {
    /// Direction of the global vector `v` in this node's array frame.
    pub fn local_direction(&self, v: &Vec3) -> Result<Direction> {
        Direction::from_vector(&self.mounting.to_local(v))
    }

    /// Antenna power gain toward the global vector `v`.
    pub fn antenna_gain(&self, v: &Vec3, f: f64, w: Option<&BeamWeights>) -> Result<f64> {
        let dir = self.local_direction(v)?;
        match (&self.array, w) {
            (None, _) => Ok(element_gain(&self.pattern, &dir)),
            (Some(geom), Some(w)) => {
                if w.len() != geom.len() {
                    return Err(Error::LengthMismatch {
                        expected: geom.len(),
                        actual: w.len(),
                    });
                }
                Ok(power_unchecked(geom, &self.pattern, w.as_slice(), f, &dir))
            }
            (Some(_), None) => Err(Error::invalid(format!(
                "node {} has an array but no weights were given",
                self.id
            ))),
        }
    }
}

/// Large-scale state of one directed link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub tx: usize,
    pub rx: usize,
    pub distance_3d: f64,
    pub shadowing_db: f64,
    pub effective_gain: f64,
}

/// `|B_tx(u_tx->rx)|^2 |B_rx(u_rx->tx)|^2 10^(-(L + S)/10)` for a LOS link.
pub fn link_gain(
    tx: &RadioNode,
    rx: &RadioNode,
    f: f64,
    tx_w: Option<&BeamWeights>,
    rx_w: Option<&BeamWeights>,
    model: &PathLossModel,
    shadowing_db: f64,
) -> Result<LinkState> {
    let v = sub(&rx.position, &tx.position);
    let d = norm(&v);
    if d == 0.0 {
        return Err(Error::CoincidentNodes(tx.id, rx.id));
    }
    let back = [-v[0], -v[1], -v[2]];
    let g_tx = tx.antenna_gain(&v, f, tx_w)?;
    let g_rx = rx.antenna_gain(&back, f, rx_w)?;
    let loss = path_loss(model, d, f)? + shadowing_db;
    Ok(LinkState {
        tx: tx.id,
        rx: rx.id,
        distance_3d: d,
        shadowing_db,
        effective_gain: g_tx * g_rx * db_to_linear(-loss),
    })
}
