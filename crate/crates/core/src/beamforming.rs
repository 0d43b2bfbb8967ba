//! Array response, beam patterns and DFT codebooks.
//!
//! The complex field radiated by an array with weights `w` toward `u` at
//! frequency `f` is `B(u) = sqrt(a(u)) * sum_n w_n exp(j 2 pi f / c u.R_n)`,
//! where `a(u)` is the linear power gain of a single element. All peak and
//! beamwidth searches work on `|B|^2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, unit_vector, ArrayGeometry, Direction, SPEED_OF_LIGHT};

/// Complex per-element weights.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamWeights(Vec<Complex64>);

impl BeamWeights {
    pub fn new(weights: Vec<Complex64>) -> Self {
        Self(weights)
    }

    /// Unit-modulus weights co-phasing the array toward `dir` at `f`.
    pub fn conjugate_steering(geom: &ArrayGeometry, f: f64, dir: &Direction) -> Result<Self> {
        Ok(Self(
            steering_vector(geom, f, dir)?
                .into_iter()
                .map(|p| p.conj())
                .collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Scales the weights to unit total power.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        Self(self.0.iter().map(|w| w / n).collect())
    }
}

/// Radiation pattern of a single element.
///
/// `Sector3gpp` is the usual 3D sector model: horizontal and vertical
/// parabolic cuts in dB with 3-dB widths `hpbw_*`, each capped at
/// `side_lobe_db`, and the sum capped at `front_back_db`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementPattern {
    Omni {
        #[serde(default)]
        gain_dbi: f64,
    },
    Sector3gpp {
        #[serde(default = "default_max_gain")]
        max_gain_dbi: f64,
        #[serde(default = "default_sector_width")]
        hpbw_horizontal_deg: f64,
        #[serde(default = "default_sector_width")]
        hpbw_vertical_deg: f64,
        #[serde(default = "default_floor")]
        front_back_db: f64,
        #[serde(default = "default_floor")]
        side_lobe_db: f64,
    },
}

fn default_max_gain() -> f64 {
    8.0
}
fn default_sector_width() -> f64 {
    65.0
}
fn default_floor() -> f64 {
    30.0
}

impl ElementPattern {
    pub const OMNI: ElementPattern = ElementPattern::Omni { gain_dbi: 0.0 };

    /// Sector element with the given peak gain and the standard 65°/30 dB shape.
    pub fn sector(max_gain_dbi: f64) -> Self {
        ElementPattern::Sector3gpp {
            max_gain_dbi,
            hpbw_horizontal_deg: 65.0,
            hpbw_vertical_deg: 65.0,
            front_back_db: 30.0,
            side_lobe_db: 30.0,
        }
    }

    pub fn gain_db(&self, dir: &Direction) -> f64 {
        match *self {
            ElementPattern::Omni { gain_dbi } => gain_dbi,
            ElementPattern::Sector3gpp {
                max_gain_dbi,
                hpbw_horizontal_deg,
                hpbw_vertical_deg,
                front_back_db,
                side_lobe_db,
            } => {
                let v = (dir.zenith() - 90.0) / hpbw_vertical_deg;
                let h = dir.azimuth() / hpbw_horizontal_deg;
                let att_v = (12.0 * v * v).min(side_lobe_db);
                let att_h = (12.0 * h * h).min(front_back_db);
                max_gain_dbi - (att_v + att_h).min(front_back_db)
            }
        }
    }
}

impl Default for ElementPattern {
    fn default() -> Self {
        ElementPattern::sector(8.0)
    }
}

/// Linear power gain of one element toward `dir` (array frame).
pub fn element_gain(pattern: &ElementPattern, dir: &Direction) -> f64 {
    10f64.powf(pattern.gain_db(dir) / 10.0)
}

fn check_frequency(f: f64) -> Result<()> {
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::invalid(format!("frequency {f} Hz must be positive")));
    }
    Ok(())
}

/// `psi_n = exp(j 2 pi f / c * u.R_n)`.
pub fn steering_vector(geom: &ArrayGeometry, f: f64, dir: &Direction) -> Result<Vec<Complex64>> {
    check_frequency(f)?;
    let u = unit_vector(dir);
    let k = 2.0 * PI * f / SPEED_OF_LIGHT;
    Ok(geom
        .positions()
        .iter()
        .map(|r| Complex64::from_polar(1.0, k * dot(&u, r)))
        .collect())
}

fn check_len(geom: &ArrayGeometry, w: &BeamWeights) -> Result<()> {
    if w.len() != geom.len() {
        return Err(Error::LengthMismatch {
            expected: geom.len(),
            actual: w.len(),
        });
    }
    Ok(())
}

/// `sum_n w_n exp(j k u.R_n)` without element pattern or validation.
pub(crate) fn array_factor(geom: &ArrayGeometry, w: &[Complex64], f: f64, dir: &Direction) -> Complex64 {
    let u = unit_vector(dir);
    let k = 2.0 * PI * f / SPEED_OF_LIGHT;
    geom.positions()
        .iter()
        .zip(w)
        .map(|(r, wn)| wn * Complex64::from_polar(1.0, k * dot(&u, r)))
        .sum()
}

/// Complex field `B(u)` of the weighted array at frequency `f`.
pub fn beam_pattern(
    geom: &ArrayGeometry,
    pattern: &ElementPattern,
    w: &BeamWeights,
    f: f64,
    dir: &Direction,
) -> Result<Complex64> {
    check_len(geom, w)?;
    check_frequency(f)?;
    Ok(element_gain(pattern, dir).sqrt() * array_factor(geom, w.as_slice(), f, dir))
}

/// The same field at `f1 + delta_f`, written as the `f1` response with the
/// per-element phase deviation `d_n(u) = exp(j 2 pi delta_f / c u.R_n)`
/// factored out.
pub fn beam_pattern_with_deviation(
    geom: &ArrayGeometry,
    pattern: &ElementPattern,
    w: &BeamWeights,
    f1: f64,
    delta_f: f64,
    dir: &Direction,
) -> Result<Complex64> {
    check_len(geom, w)?;
    check_frequency(f1)?;
    check_frequency(f1 + delta_f)?;
    let u = unit_vector(dir);
    let k1 = 2.0 * PI * f1 / SPEED_OF_LIGHT;
    let kd = 2.0 * PI * delta_f / SPEED_OF_LIGHT;
    let sum: Complex64 = geom
        .positions()
        .iter()
        .zip(w.as_slice())
        .map(|(r, wn)| {
            let proj = dot(&u, r);
            let base = wn * Complex64::from_polar(1.0, k1 * proj);
            base * Complex64::from_polar(1.0, kd * proj)
        })
        .sum();
    Ok(element_gain(pattern, dir).sqrt() * sum)
}

/// `|B(u)|^2`, the beamformed power gain.
pub fn pattern_power(
    geom: &ArrayGeometry,
    pattern: &ElementPattern,
    w: &BeamWeights,
    f: f64,
    dir: &Direction,
) -> Result<f64> {
    beam_pattern(geom, pattern, w, f, dir).map(|b| b.norm_sqr())
}

pub(crate) fn power_unchecked(
    geom: &ArrayGeometry,
    pattern: &ElementPattern,
    w: &[Complex64],
    f: f64,
    dir: &Direction,
) -> f64 {
    element_gain(pattern, dir) * array_factor(geom, w, f, dir).norm_sqr()
}

/// Angular domain searched for beam maxima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanRegion {
    /// Azimuth sweep at a fixed zenith.
    AzimuthCut { zenith: f64, az_min: f64, az_max: f64 },
    /// Full azimuth x zenith rectangle.
    Rectangle {
        az_min: f64,
        az_max: f64,
        zen_min: f64,
        zen_max: f64,
    },
}

impl ScanRegion {
    /// Front half-space of the array. Linear arrays on the y axis have no
    /// zenith resolution and are scanned on the horizon cut.
    pub fn front(geom: &ArrayGeometry) -> Self {
        if geom.is_linear_along_y() {
            ScanRegion::AzimuthCut {
                zenith: 90.0,
                az_min: -90.0,
                az_max: 90.0,
            }
        } else {
            ScanRegion::Rectangle {
                az_min: -90.0,
                az_max: 90.0,
                zen_min: 0.0,
                zen_max: 180.0,
            }
        }
    }

    fn az_bounds(&self) -> (f64, f64) {
        match *self {
            ScanRegion::AzimuthCut { az_min, az_max, .. } => (az_min, az_max),
            ScanRegion::Rectangle { az_min, az_max, .. } => (az_min, az_max),
        }
    }
}

pub(crate) fn grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let n = ((max - min) / step).round() as usize;
    let mut out: Vec<f64> = (0..=n).map(|i| min + i as f64 * step).collect();
    if let Some(last) = out.last_mut() {
        if *last > max {
            *last = max;
        }
    }
    if out.last().is_none_or(|&l| l < max - 1e-9) {
        out.push(max);
    }
    out
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of `f` on `[a, b]`.
pub(crate) fn golden_max(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

const REFINE_TOL_DEG: f64 = 1e-6;

/// Polishes a coarse maximum by alternating golden-section searches on
/// azimuth and zenith inside one grid cell of the start point.
pub(crate) fn refine_peak(
    region: &ScanRegion,
    start: Direction,
    step: f64,
    power: &impl Fn(&Direction) -> f64,
) -> Direction {
    let (az_lo, az_hi) = region.az_bounds();
    match *region {
        ScanRegion::AzimuthCut { zenith, .. } => {
            let a = (start.azimuth() - step).max(az_lo);
            let b = (start.azimuth() + step).min(az_hi);
            let az = golden_max(a, b, REFINE_TOL_DEG, |az| power(&Direction::wrapped(az, zenith)));
            pick_better(start, Direction::wrapped(az, zenith), power)
        }
        ScanRegion::Rectangle { zen_min, zen_max, .. } => {
            let mut az = start.azimuth();
            let mut zen = start.zenith();
            let mut width = step;
            for _ in 0..30 {
                let a = (az - width).max(az_lo);
                let b = (az + width).min(az_hi);
                let new_az = golden_max(a, b, REFINE_TOL_DEG, |x| power(&Direction::wrapped(x, zen)));
                let a = (zen - width).max(zen_min);
                let b = (zen + width).min(zen_max);
                let new_zen = golden_max(a, b, REFINE_TOL_DEG, |x| power(&Direction::wrapped(new_az, x)));
                let moved = (new_az - az).abs().max((new_zen - zen).abs());
                az = new_az;
                zen = new_zen;
                if moved < 1e-5 {
                    break;
                }
                width = (moved * 4.0).clamp(1e-3, step);
            }
            pick_better(start, Direction::wrapped(az, zen), power)
        }
    }
}

fn pick_better(a: Direction, b: Direction, power: &impl Fn(&Direction) -> f64) -> Direction {
    if power(&b) >= power(&a) {
        b
    } else {
        a
    }
}

/// Coarse scan of the region; returns the grid samples as (direction, power)
/// in scan order (azimuth outer, zenith inner) together with the grid shape.
pub(crate) fn scan(
    region: &ScanRegion,
    step: f64,
    power: &impl Fn(&Direction) -> f64,
) -> (Vec<(Direction, f64)>, usize, usize) {
    match *region {
        ScanRegion::AzimuthCut {
            zenith,
            az_min,
            az_max,
        } => {
            let az = grid(az_min, az_max, step);
            let n = az.len();
            let samples = az
                .into_iter()
                .map(|a| {
                    let d = Direction::wrapped(a, zenith);
                    (d, power(&d))
                })
                .collect();
            (samples, n, 1)
        }
        ScanRegion::Rectangle {
            az_min,
            az_max,
            zen_min,
            zen_max,
        } => {
            let az = grid(az_min, az_max, step);
            let zen = grid(zen_min, zen_max, step);
            let (na, nz) = (az.len(), zen.len());
            let mut samples = Vec::with_capacity(na * nz);
            for &a in &az {
                for &z in &zen {
                    let d = Direction::wrapped(a, z);
                    samples.push((d, power(&d)));
                }
            }
            (samples, na, nz)
        }
    }
}

/// Direction of maximum `|B|` over the array's front region: coarse grid at
/// `grid_step` degrees, then local refinement well below 0.01°. Ties on the
/// grid go to the smallest azimuth, then the smallest zenith.
pub fn find_peak(
    geom: &ArrayGeometry,
    pattern: &ElementPattern,
    w: &BeamWeights,
    f: f64,
    grid_step: f64,
) -> Result<Direction> {
    find_peak_in(&ScanRegion::front(geom), geom, pattern, w, f, grid_step)
}

pub fn find_peak_in(
    region: &ScanRegion,
    geom: &ArrayGeometry,
    pattern: &ElementPattern,
    w: &BeamWeights,
    f: f64,
    grid_step: f64,
) -> Result<Direction> {
    check_len(geom, w)?;
    check_frequency(f)?;
    if !(grid_step > 0.0) {
        return Err(Error::invalid(format!("grid step {grid_step} must be positive")));
    }
    let power = |d: &Direction| power_unchecked(geom, pattern, w.as_slice(), f, d);
    let (samples, _, _) = scan(region, grid_step, &power);
    let mut best = samples[0];
    for s in &samples[1..] {
        if s.1 > best.1 {
            best = *s;
        }
    }
    Ok(refine_peak(region, best.0, grid_step, &power))
}

const HPBW_WALK_STEP_DEG: f64 = 0.002;
const HPBW_LIMIT_DEG: f64 = 90.0;

/// Half-power beamwidth of the main lobe around `peak`, measured along
/// azimuth at the peak zenith. Each crossing is located by walking outward
/// and then bisecting.
pub fn hpbw(
    geom: &ArrayGeometry,
    pattern: &ElementPattern,
    w: &BeamWeights,
    f: f64,
    peak: &Direction,
) -> Result<f64> {
    check_len(geom, w)?;
    check_frequency(f)?;
    let zen = peak.zenith();
    let power = |az: f64| power_unchecked(geom, pattern, w.as_slice(), f, &Direction::wrapped(az, zen));
    let half = power(peak.azimuth()) / 2.0;
    let crossing = |sign: f64| -> Result<f64> {
        let mut inside = peak.azimuth();
        loop {
            let next = inside + sign * HPBW_WALK_STEP_DEG;
            if (next - peak.azimuth()).abs() > HPBW_LIMIT_DEG {
                return Err(Error::NotBracketed {
                    limit_deg: HPBW_LIMIT_DEG,
                });
            }
            if power(next) < half {
                let (mut a, mut b) = (inside, next);
                while (b - a).abs() > 1e-9 {
                    let m = 0.5 * (a + b);
                    if power(m) >= half {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                return Ok(0.5 * (a + b));
            }
            inside = next;
        }
    };
    let right = crossing(1.0)?;
    let left = crossing(-1.0)?;
    Ok(right - left)
}

/// An ordered set of beams.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub entries: Vec<BeamWeights>,
    pub design_frequency: f64,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// DFT codebook for an N-element ULA: `oversampling * N` entries with
/// `w_k[n] = exp(-j 2 pi k n / (O N)) / sqrt(N)`, n = 0..N-1. Entry `k`
/// steers a half-wavelength ULA toward `sin(az) = 2k / (O N)` (wrapped into
/// [-1, 1)).
pub fn dft_codebook(n: usize, oversampling: usize, design_frequency_hz: f64) -> Result<Codebook> {
    if n == 0 || oversampling == 0 {
        return Err(Error::invalid(format!(
            "DFT codebook needs N >= 1 and oversampling >= 1, got {n} and {oversampling}"
        )));
    }
    let size = n * oversampling;
    let scale = 1.0 / (n as f64).sqrt();
    let entries = (0..size)
        .map(|k| {
            BeamWeights::new(
                (0..n)
                    .map(|i| {
                        // reduce k*i mod size first so the phase stays exact
                        let m = (k * i) % size;
                        Complex64::from_polar(scale, -2.0 * PI * m as f64 / size as f64)
                    })
                    .collect(),
            )
        })
        .collect();
    Ok(Codebook {
        entries,
        design_frequency: design_frequency_hz,
    })
}

/// Two-dimensional DFT codebook matching [`crate::geometry::ura_positions`]
/// enumeration. Entry `kr * (O cols) + kc` has weight
/// `exp(-j 2 pi (kr r / (O rows) + kc c / (O cols))) / sqrt(rows cols)` on
/// element `(r, c)`.
pub fn dft_codebook_2d(
    rows: usize,
    cols: usize,
    oversampling: usize,
    design_frequency_hz: f64,
) -> Result<Codebook> {
    let row_book = dft_codebook(rows, oversampling, design_frequency_hz)?;
    let col_book = dft_codebook(cols, oversampling, design_frequency_hz)?;
    let mut entries = Vec::with_capacity(row_book.len() * col_book.len());
    for wr in &row_book.entries {
        for wc in &col_book.entries {
            entries.push(BeamWeights::new(
                wr.as_slice()
                    .iter()
                    .flat_map(|a| wc.as_slice().iter().map(move |b| a * b))
                    .collect(),
            ));
        }
    }
    Ok(Codebook {
        entries,
        design_frequency: design_frequency_hz,
    })
}

/// Nominal `sin(azimuth)` steered by ULA DFT entry `k`.
pub fn dft_nominal_sine(k: usize, n: usize, oversampling: usize) -> f64 {
    let size = (n * oversampling) as f64;
    let s = 2.0 * k as f64 / size;
    if s >= 1.0 {
        s - 2.0
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::wavelength;
    use approx::assert_abs_diff_eq;

    const F: f64 = 28e9;

    fn az(a: f64) -> Direction {
        Direction::new(a, 90.0).unwrap()
    }

    #[test]
    fn steering_vector_boresight_is_all_ones() {
        let geom = ArrayGeometry::ura(4, 3, F).unwrap();
        for p in steering_vector(&geom, F, &Direction::BORESIGHT).unwrap() {
            assert_abs_diff_eq!(p.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(p.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn steering_vector_quarter_wave_pair() {
        let geom = ArrayGeometry::ula(2, F).unwrap();
        let sv = steering_vector(&geom, F, &az(90.0)).unwrap();
        assert_abs_diff_eq!(sv[0].arg(), -PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sv[1].arg(), PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn steering_vector_matches_scalar_evaluation() {
        let geom = ArrayGeometry::ula(4, F).unwrap();
        let f = 29e9;
        let sv = steering_vector(&geom, f, &az(35.0)).unwrap();
        let lambda_c = SPEED_OF_LIGHT / F;
        for (i, p) in sv.iter().enumerate() {
            let n = (i + 1) as f64;
            let y = (n - 2.5) * lambda_c / 2.0;
            let phase = 2.0 * PI * f / SPEED_OF_LIGHT * 35f64.to_radians().sin() * y;
            assert_abs_diff_eq!(p.re, phase.cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(p.im, phase.sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(p.norm(), 1.0, epsilon = 1e-14);
        }
        assert!(steering_vector(&geom, 0.0, &az(0.0)).is_err());
    }

    #[test]
    fn element_gain_examples() {
        assert_eq!(element_gain(&ElementPattern::OMNI, &az(123.0)), 1.0);
        let sector = ElementPattern::sector(8.0);
        assert_abs_diff_eq!(element_gain(&sector, &Direction::BORESIGHT), 6.309_573_444_8, epsilon = 1e-9);
        let mut prev = f64::INFINITY;
        for a in 0..=90 {
            let g = element_gain(&sector, &az(a as f64));
            assert!(g <= prev);
            prev = g;
        }
        // 30 dB floor behind the panel
        assert_abs_diff_eq!(sector.gain_db(&az(180.0)), 8.0 - 30.0, epsilon = 1e-12);
    }

    #[test]
    fn single_element_field_is_sqrt_gain() {
        let geom = ArrayGeometry::ula(1, F).unwrap();
        let w = BeamWeights::new(vec![Complex64::new(1.0, 0.0)]);
        let p = ElementPattern::sector(8.0);
        let d = Direction::new(20.0, 80.0).unwrap();
        let b = beam_pattern(&geom, &p, &w, 31e9, &d).unwrap();
        assert_abs_diff_eq!(b.re, element_gain(&p, &d).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(b.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn matched_filter_is_coherent() {
        let geom = ArrayGeometry::ula(256, F).unwrap();
        let p = ElementPattern::sector(8.0);
        let d = az(35.0);
        let w = BeamWeights::conjugate_steering(&geom, F, &d).unwrap();
        let power = pattern_power(&geom, &p, &w, F, &d).unwrap();
        assert_abs_diff_eq!(power / (256.0 * 256.0 * element_gain(&p, &d)), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let geom = ArrayGeometry::ula(4, F).unwrap();
        let w = BeamWeights::new(vec![Complex64::new(1.0, 0.0); 3]);
        assert!(matches!(
            beam_pattern(&geom, &ElementPattern::OMNI, &w, F, &az(0.0)),
            Err(Error::LengthMismatch { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn factored_field_matches_direct_evaluation() {
        let geom = ArrayGeometry::ula(64, F).unwrap();
        let p = ElementPattern::sector(8.0);
        let book = dft_codebook(64, 1, F).unwrap();
        for (k, w) in book.entries.iter().enumerate().step_by(7) {
            for df in [-1e9, -1e8, 3e8, 1e9] {
                for a in (-90..=90).map(f64::from) {
                    let d = az(a);
                    let direct = beam_pattern(&geom, &p, w, F + df, &d).unwrap().norm_sqr();
                    let factored = beam_pattern_with_deviation(&geom, &p, w, F, df, &d)
                        .unwrap()
                        .norm_sqr();
                    let scale = direct.max(1e-12);
                    assert!(
                        (direct - factored).abs() / scale < 1e-10,
                        "k={k} df={df} az={a}: {direct} vs {factored}"
                    );
                }
            }
        }
    }

    #[test]
    fn find_peak_recovers_steering_direction() {
        let geom = ArrayGeometry::ula(256, F).unwrap();
        let w = BeamWeights::conjugate_steering(&geom, F, &az(35.0)).unwrap();
        let peak = find_peak(&geom, &ElementPattern::OMNI, &w, F, 0.1).unwrap();
        assert!((peak.azimuth() - 35.0).abs() <= 0.01, "{peak}");
        assert!(find_peak(&geom, &ElementPattern::OMNI, &w, F, 0.0).is_err());
    }

    #[test]
    fn find_peak_on_ura() {
        let geom = ArrayGeometry::ura(8, 8, F).unwrap();
        let target = Direction::new(-25.0, 70.0).unwrap();
        let w = BeamWeights::conjugate_steering(&geom, F, &target).unwrap();
        let peak = find_peak(&geom, &ElementPattern::OMNI, &w, F, 1.0).unwrap();
        assert!((peak.azimuth() + 25.0).abs() < 0.01, "{peak}");
        assert!((peak.zenith() - 70.0).abs() < 0.01, "{peak}");
    }

    #[test]
    fn hpbw_of_broadside_ula() {
        // closed-form array factor |sin(N x) / (N sin x)|^2, x = (pi/2) sin(az)
        let n = 64;
        let geom = ArrayGeometry::ula(n, F).unwrap();
        let w = BeamWeights::conjugate_steering(&geom, F, &Direction::BORESIGHT).unwrap();
        let width = hpbw(&geom, &ElementPattern::OMNI, &w, F, &Direction::BORESIGHT).unwrap();
        let af = |az: f64| {
            let x = PI / 2.0 * az.to_radians().sin();
            let nf = n as f64;
            ((nf * x).sin() / (nf * x.sin())).powi(2)
        };
        let (mut lo, mut hi) = (1e-6, 2.0);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if af(m) >= 0.5 {
                lo = m;
            } else {
                hi = m;
            }
        }
        assert_abs_diff_eq!(width, 2.0 * lo, epsilon = 1e-6);
        let _ = wavelength(F);
    }

    #[test]
    fn dft_codebook_examples() {
        let one = dft_codebook(1, 1, F).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.entries[0].as_slice(), &[Complex64::new(1.0, 0.0)]);

        let book = dft_codebook(4, 1, F).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let ip: Complex64 = book.entries[i]
                    .as_slice()
                    .iter()
                    .zip(book.entries[j].as_slice())
                    .map(|(a, b)| a * b.conj())
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(ip.norm(), expected, epsilon = 1e-12);
            }
        }
        let over = dft_codebook(8, 4, F).unwrap();
        assert_eq!(over.len(), 32);
        for w in &over.entries {
            for x in w.as_slice() {
                assert_abs_diff_eq!(x.norm(), 1.0 / 8f64.sqrt(), epsilon = 1e-15);
            }
            assert_abs_diff_eq!(w.norm(), 1.0, epsilon = 1e-12);
        }
        assert!(dft_codebook(0, 1, F).is_err());
        assert!(dft_codebook(4, 0, F).is_err());
    }

    #[test]
    fn dft_entries_point_at_nominal_sine() {
        let n = 32;
        let geom = ArrayGeometry::ula(n, F).unwrap();
        let book = dft_codebook(n, 1, F).unwrap();
        for k in [0usize, 3, 9, 23, 30] {
            let s = dft_nominal_sine(k, n, 1);
            let peak = find_peak(&geom, &ElementPattern::OMNI, &book.entries[k], F, 0.1).unwrap();
            assert!((peak.azimuth() - s.asin().to_degrees()).abs() < 0.01, "k={k}");
        }
    }

    #[test]
    fn dft_2d_matches_kronecker_steering() {
        let geom = ArrayGeometry::ura(4, 4, F).unwrap();
        let book = dft_codebook_2d(4, 4, 1, F).unwrap();
        assert_eq!(book.len(), 16);
        // entry (0, 0) is broadside
        let peak = find_peak(&geom, &ElementPattern::OMNI, &book.entries[0], F, 1.0).unwrap();
        assert!(peak.azimuth().abs() < 0.01 && (peak.zenith() - 90.0).abs() < 0.01);
    }
}
