//! Beam squint prediction and phase-only compensation.
//!
//! A beam designed with weights `W1` at `f1` and reused at `f2 = f1 + df`
//! steers away from its design direction. Multiplying the weights elementwise
//! by `c_n = exp(-j 2 pi df / c u*.R_n)` removes the excess phase toward the
//! intended direction `u*`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::beamforming::{
    grid, power_unchecked, refine_peak, scan, BeamWeights, ElementPattern, ScanRegion,
};
use crate::error::{Error, Result};
use crate::geometry::{dot, unit_vector, ArrayGeometry, Direction, SPEED_OF_LIGHT};

/// Measurement subband centre `f1` and signed data offset `delta_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPlan {
    f1: f64,
    delta_f: f64,
}

impl FrequencyPlan {
    pub fn new(f1: f64, delta_f: f64) -> Result<Self> {
        if !(f1.is_finite() && f1 > 0.0) || !delta_f.is_finite() || f1 + delta_f <= 0.0 {
            return Err(Error::invalid(format!(
                "frequency plan f1={f1} Hz, delta_f={delta_f} Hz needs f1 > 0 and f1 + delta_f > 0"
            )));
        }
        Ok(Self { f1, delta_f })
    }

    pub fn f1(&self) -> f64 {
        self.f1
    }

    pub fn delta_f(&self) -> f64 {
        self.delta_f
    }

    pub fn f2(&self) -> f64 {
        self.f1 + self.delta_f
    }
}

/// Unit-modulus per-element correction toward `target_direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompensationVector {
    pub entries: Vec<Complex64>,
    pub target_direction: Direction,
}

impl CompensationVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// First-order main-lobe shift in degrees, `-tan(theta1) df / f1` (radians
/// converted to degrees).
pub fn predict_squint(theta1_deg: f64, f1: f64, delta_f: f64) -> Result<f64> {
    if !theta1_deg.is_finite() || theta1_deg.abs() >= 90.0 {
        return Err(Error::invalid(format!(
            "squint prediction needs |theta1| < 90°, got {theta1_deg}"
        )));
    }
    if !(f1 > 0.0) {
        return Err(Error::invalid(format!("f1 {f1} Hz must be positive")));
    }
    Ok((-theta1_deg.to_radians().tan() * delta_f / f1).to_degrees())
}

/// `c_n = exp(-j 2 pi df / c u*.R_n)` for the array's own element positions.
pub fn compensation_vector(
    geom: &ArrayGeometry,
    plan: &FrequencyPlan,
    u_star: &Direction,
) -> Result<CompensationVector> {
    if geom.is_empty() {
        return Err(Error::EmptyInput("array geometry"));
    }
    let u = unit_vector(u_star);
    let k = 2.0 * PI * plan.delta_f() / SPEED_OF_LIGHT;
    Ok(CompensationVector {
        entries: geom
            .positions()
            .iter()
            .map(|r| Complex64::from_polar(1.0, -k * dot(&u, r)))
            .collect(),
        target_direction: *u_star,
    })
}

/// Hadamard product `W2 = W1 ⊙ C`.
pub fn apply_compensation(w: &BeamWeights, comp: &CompensationVector) -> Result<BeamWeights> {
    if w.len() != comp.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            actual: comp.len(),
        });
    }
    Ok(BeamWeights::new(
        w.as_slice()
            .iter()
            .zip(&comp.entries)
            .map(|(a, b)| a * b)
            .collect(),
    ))
}

/// Closed form for a half-wavelength ULA designed at `f1`:
/// `c_n = exp(-j pi (df/f1) n sin(theta*))`, n = 1..N. Differs from
/// [`compensation_vector`] only by a global phase.
pub fn ula_compensation(
    n: usize,
    f1: f64,
    delta_f: f64,
    theta_star_deg: f64,
) -> Result<CompensationVector> {
    if n == 0 {
        return Err(Error::EmptyInput("ULA element count"));
    }
    let plan = FrequencyPlan::new(f1, delta_f)?;
    let step = -PI * plan.delta_f() / plan.f1() * theta_star_deg.to_radians().sin();
    Ok(CompensationVector {
        entries: (1..=n)
            .map(|i| Complex64::from_polar(1.0, step * i as f64))
            .collect(),
        target_direction: Direction::new(theta_star_deg, 90.0)?,
    })
}

/// Closed form for a half-wavelength URA designed at `f1`, enumerated
/// row-major like [`crate::geometry::ura_positions`] (rows along y, columns
/// along z): `c = exp(-j pi (df/f1) (n_r sin(phi*) sin(theta*) + n_c cos(phi*)))`.
pub fn ura_compensation(
    rows: usize,
    cols: usize,
    f1: f64,
    delta_f: f64,
    theta_star_deg: f64,
    phi_star_deg: f64,
) -> Result<CompensationVector> {
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyInput("URA dimensions"));
    }
    let plan = FrequencyPlan::new(f1, delta_f)?;
    let target = Direction::new(theta_star_deg, phi_star_deg)?;
    let ratio = -PI * plan.delta_f() / plan.f1();
    let (st, _) = theta_star_deg.to_radians().sin_cos();
    let (sp, cp) = phi_star_deg.to_radians().sin_cos();
    let mut entries = Vec::with_capacity(rows * cols);
    for r in 1..=rows {
        for c in 1..=cols {
            let phase = ratio * (r as f64 * sp * st + c as f64 * cp);
            entries.push(Complex64::from_polar(1.0, phase));
        }
    }
    Ok(CompensationVector {
        entries,
        target_direction: target,
    })
}

/// Candidate closest (chordal distance) to `estimated`; ties keep list order.
pub fn disambiguate_peak(candidates: &[Direction], estimated: &Direction) -> Result<Direction> {
    let mut best: Option<(Direction, f64)> = None;
    for c in candidates {
        let d = c.chordal_distance(estimated);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((*c, d));
        }
    }
    best.map(|(c, _)| c).ok_or(Error::EmptyInput("candidate directions"))
}

/// Coarse grid used by [`find_all_main_directions`] on horizon cuts.
pub const MAIN_DIRECTION_STEP_CUT_DEG: f64 = 0.1;
/// Coarse grid used by [`find_all_main_directions`] on 2D scans.
pub const MAIN_DIRECTION_STEP_2D_DEG: f64 = 1.0;

/// All local maxima of `|B|` in the array's front region whose power is
/// within `threshold_db` of the global maximum, strongest first.
pub fn find_all_main_directions(
    geom: &ArrayGeometry,
    pattern: &ElementPattern,
    w: &BeamWeights,
    f: f64,
    threshold_db: f64,
) -> Result<Vec<Direction>> {
    if !(threshold_db > 0.0) {
        return Err(Error::invalid(format!(
            "threshold {threshold_db} dB must be positive"
        )));
    }
    if w.len() != geom.len() {
        return Err(Error::LengthMismatch {
            expected: geom.len(),
            actual: w.len(),
        });
    }
    if !(f > 0.0) {
        return Err(Error::invalid(format!("frequency {f} Hz must be positive")));
    }
    let region = ScanRegion::front(geom);
    let step = match region {
        ScanRegion::AzimuthCut { .. } => MAIN_DIRECTION_STEP_CUT_DEG,
        ScanRegion::Rectangle { .. } => MAIN_DIRECTION_STEP_2D_DEG,
    };
    let power = |d: &Direction| power_unchecked(geom, pattern, w.as_slice(), f, d);
    let (samples, na, nz) = scan(&region, step, &power);
    let at = |i: usize, j: usize| samples[i * nz + j].1;
    let coarse_max = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    if coarse_max <= 0.0 {
        return Ok(Vec::new());
    }
    // one extra dB of slack so coarse samples of lobes that refine upward survive
    let coarse_floor = coarse_max * 10f64.powf(-(threshold_db + 1.0) / 10.0);

    let mut peaks: Vec<(Direction, f64)> = Vec::new();
    for i in 0..na {
        for j in 0..nz {
            let p = at(i, j);
            if p < coarse_floor {
                continue;
            }
            let mut is_max = true;
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= na as i64 || jj >= nz as i64 {
                        continue;
                    }
                    let q = at(ii as usize, jj as usize);
                    // earlier neighbours must be strictly lower so plateaus yield one sample
                    let earlier = (ii as usize, jj as usize) < (i, j);
                    if (earlier && q >= p) || (!earlier && q > p) {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                let refined = refine_peak(&region, samples[i * nz + j].0, step, &power);
                peaks.push((refined, power(&refined)));
            }
        }
    }

    let global = peaks.iter().map(|p| p.1).fold(0.0, f64::max);
    let floor = global * 10f64.powf(-threshold_db / 10.0);
    peaks.retain(|p| p.1 >= floor);
    peaks.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(a.0.azimuth().total_cmp(&b.0.azimuth()))
            .then(a.0.zenith().total_cmp(&b.0.zenith()))
    });
    let mut out: Vec<Direction> = Vec::new();
    for (d, _) in peaks {
        // neighbouring coarse maxima can converge onto the same lobe
        if out.iter().all(|o| o.chordal_distance(&d) > (step * 0.5).to_radians()) {
            out.push(d);
        }
    }
    Ok(out)
}

/// True when more than one main direction lies within 3 dB of the maximum.
pub fn is_ambiguous(
    geom: &ArrayGeometry,
    pattern: &ElementPattern,
    w: &BeamWeights,
    f: f64,
) -> Result<bool> {
    Ok(find_all_main_directions(geom, pattern, w, f, 3.0)?.len() > 1)
}

/// Angular cut through a peak.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cut {
    Azimuth,
    Zenith,
}

const NULL_WALK_STEP_DEG: f64 = 0.002;
const NULL_WALK_LIMIT_DEG: f64 = 90.0;

/// First minimum of `|B|^2` on each side of `peak` along the chosen cut,
/// as `(lower, upper)` angles in degrees. A side is `None` if the pattern
/// keeps decreasing up to 90° away from the peak or the edge of the zenith
/// range.
pub fn first_nulls(
    geom: &ArrayGeometry,
    pattern: &ElementPattern,
    w: &BeamWeights,
    f: f64,
    peak: &Direction,
    cut: Cut,
) -> Result<(Option<f64>, Option<f64>)> {
    if w.len() != geom.len() {
        return Err(Error::LengthMismatch {
            expected: geom.len(),
            actual: w.len(),
        });
    }
    let (start, bounds) = match cut {
        Cut::Azimuth => (peak.azimuth(), (f64::NEG_INFINITY, f64::INFINITY)),
        Cut::Zenith => (peak.zenith(), (0.0, 180.0)),
    };
    let eval = |x: f64| {
        let d = match cut {
            Cut::Azimuth => Direction::wrapped(x, peak.zenith()),
            Cut::Zenith => Direction::wrapped(peak.azimuth(), x),
        };
        power_unchecked(geom, pattern, w.as_slice(), f, &d)
    };
    let side = |sign: f64| -> Option<f64> {
        let mut prev = eval(start);
        let mut x = start;
        loop {
            let next = x + sign * NULL_WALK_STEP_DEG;
            if (next - start).abs() > NULL_WALK_LIMIT_DEG || next < bounds.0 || next > bounds.1 {
                return None;
            }
            let p = eval(next);
            if p > prev {
                // minimum bracketed by [x - step, next]
                let (a, b) = if sign > 0.0 {
                    (x - NULL_WALK_STEP_DEG, next)
                } else {
                    (next, x + NULL_WALK_STEP_DEG)
                };
                let m = crate::beamforming::golden_max(a, b, 1e-7, |t| -eval(t));
                return Some(m);
            }
            prev = p;
            x = next;
        }
    };
    Ok((side(-1.0), side(1.0)))
}

/// Samples `|B|^2` on a regular grid along a cut, for reporting.
pub fn cut_samples(
    geom: &ArrayGeometry,
    pattern: &ElementPattern,
    w: &BeamWeights,
    f: f64,
    fixed: f64,
    from: f64,
    to: f64,
    step: f64,
    cut: Cut,
) -> Vec<(Direction, f64)> {
    grid(from, to, step)
        .into_iter()
        .map(|x| {
            let d = match cut {
                Cut::Azimuth => Direction::wrapped(x, fixed),
                Cut::Zenith => Direction::wrapped(fixed, x),
            };
            (d, power_unchecked(geom, pattern, w.as_slice(), f, &d))
        })
        .collect()
}

/// Main direction `u*` of `w` at `f1`. With several main directions the one
/// closest to `estimate` is used; without an estimate the strongest wins.
pub fn intended_direction(
    geom: &ArrayGeometry,
    pattern: &ElementPattern,
    w: &BeamWeights,
    f1: f64,
    estimate: Option<&Direction>,
) -> Result<Direction> {
    let mains = find_all_main_directions(geom, pattern, w, f1, 3.0)?;
    match (mains.len(), estimate) {
        (0, _) => Err(Error::EmptyInput("main directions")),
        (1, _) | (_, None) => Ok(mains[0]),
        (_, Some(e)) => disambiguate_peak(&mains, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::{dft_codebook, find_peak, pattern_power};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const F1: f64 = 28e9;

    fn az(a: f64) -> Direction {
        Direction::new(a, 90.0).unwrap()
    }

    #[test]
    fn predict_squint_examples() {
        assert_eq!(predict_squint(0.0, F1, 1e9).unwrap(), 0.0);
        assert_abs_diff_eq!(predict_squint(15.0, F1, 1e9).unwrap(), -0.548_298_5, epsilon = 1e-6);
        // independent: tan(35°)/28 rad
        let expected = -(35f64.to_radians().tan() / 28.0).to_degrees();
        assert_abs_diff_eq!(predict_squint(35.0, F1, 1e9).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, -1.433, epsilon = 1e-3);
        assert!(predict_squint(90.0, F1, 1e9).is_err());
        assert!(predict_squint(-95.0, F1, 1e9).is_err());
    }

    #[test]
    fn frequency_plan_validation() {
        assert!(FrequencyPlan::new(F1, -F1).is_err());
        assert!(FrequencyPlan::new(0.0, 1e9).is_err());
        assert_eq!(FrequencyPlan::new(F1, 1e9).unwrap().f2(), 29e9);
    }

    #[test]
    fn compensation_identity_cases() {
        let geom = ArrayGeometry::ula(16, F1).unwrap();
        let zero = compensation_vector(&geom, &FrequencyPlan::new(F1, 0.0).unwrap(), &az(40.0)).unwrap();
        let bore =
            compensation_vector(&geom, &FrequencyPlan::new(F1, 1e9).unwrap(), &Direction::BORESIGHT).unwrap();
        for c in zero.entries.iter().chain(&bore.entries) {
            assert_abs_diff_eq!(c.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-15);
        }
    }

    fn collinearity(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>().norm()
    }

    #[test]
    fn ula_closed_form_matches_generic_up_to_global_phase() {
        let geom = ArrayGeometry::ula(256, F1).unwrap();
        let plan = FrequencyPlan::new(F1, 1e9).unwrap();
        let generic = compensation_vector(&geom, &plan, &az(35.0)).unwrap();
        let ula = ula_compensation(256, F1, 1e9, 35.0).unwrap();
        assert_abs_diff_eq!(collinearity(&generic.entries, &ula.entries), 256.0, epsilon = 1e-9);
    }

    #[test]
    fn ula_compensation_examples() {
        for c in ula_compensation(8, F1, 1e9, 0.0).unwrap().entries {
            assert_abs_diff_eq!(c.re, 1.0, epsilon = 1e-15);
        }
        let two = ula_compensation(2, F1, 1e9, 90.0).unwrap();
        let step = (two.entries[1] / two.entries[0]).arg();
        assert_abs_diff_eq!(step, -PI / 28.0, epsilon = 1e-12);
        assert!(ula_compensation(0, F1, 1e9, 10.0).is_err());
    }

    #[test]
    fn ura_compensation_reduces_to_ula_and_matches_generic() {
        let ura = ura_compensation(12, 1, F1, 7e8, 33.0, 90.0).unwrap();
        let ula = ula_compensation(12, F1, 7e8, 33.0).unwrap();
        for (a, b) in ura.entries.iter().zip(&ula.entries) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
        for c in ura_compensation(4, 4, F1, 1e9, 0.0, 90.0).unwrap().entries {
            assert_abs_diff_eq!(c.re, 1.0, epsilon = 1e-12);
        }
        let geom = ArrayGeometry::ura(6, 5, F1).unwrap();
        let plan = FrequencyPlan::new(F1, -5e8).unwrap();
        let d = Direction::new(-20.0, 60.0).unwrap();
        let generic = compensation_vector(&geom, &plan, &d).unwrap();
        let closed = ura_compensation(6, 5, F1, -5e8, -20.0, 60.0).unwrap();
        assert_abs_diff_eq!(collinearity(&generic.entries, &closed.entries), 30.0, epsilon = 1e-9);
    }

    #[test]
    fn apply_compensation_examples() {
        let book = dft_codebook(8, 1, F1).unwrap();
        let w = &book.entries[3];
        let ones = CompensationVector {
            entries: vec![Complex64::new(1.0, 0.0); 8],
            target_direction: Direction::BORESIGHT,
        };
        assert_eq!(&apply_compensation(w, &ones).unwrap(), w);
        let c = ula_compensation(8, F1, 1e9, 50.0).unwrap();
        let w2 = apply_compensation(w, &c).unwrap();
        assert_abs_diff_eq!(w2.norm(), w.norm(), epsilon = 1e-14);
        assert!(apply_compensation(w, &ula_compensation(7, F1, 1e9, 5.0).unwrap()).is_err());
    }

    #[test]
    fn intermediate_beam_of_256_ula_is_restored() {
        let geom = ArrayGeometry::ula(256, F1).unwrap();
        let book = dft_codebook(256, 1, F1).unwrap();
        // entry 73 steers sin(az) = 146/256, az ≈ 34.77°
        let w1 = &book.entries[73];
        let p = ElementPattern::sector(8.0);
        let peak1 = find_peak(&geom, &p, w1, F1, 0.1).unwrap();
        assert!((peak1.azimuth() - 34.7).abs() < 0.1);
        let plan = FrequencyPlan::new(F1, 1e9).unwrap();
        let w2 = apply_compensation(w1, &compensation_vector(&geom, &plan, &peak1).unwrap()).unwrap();
        let peak2 = find_peak(&geom, &p, &w2, plan.f2(), 0.1).unwrap();
        assert!((peak2.azimuth() - peak1.azimuth()).abs() < 0.05);
    }

    #[test]
    fn disambiguation_examples() {
        assert_eq!(disambiguate_peak(&[az(12.0)], &az(-70.0)).unwrap(), az(12.0));
        assert_eq!(disambiguate_peak(&[az(85.0), az(-85.0)], &az(80.0)).unwrap(), az(85.0));
        assert_eq!(disambiguate_peak(&[az(10.0), az(-10.0)], &az(0.0)).unwrap(), az(10.0));
        assert!(disambiguate_peak(&[], &az(0.0)).is_err());
    }

    #[test]
    fn main_directions_interior_and_endfire() {
        let geom = ArrayGeometry::ula(64, F1).unwrap();
        let p = ElementPattern::sector(8.0);
        let w = BeamWeights::conjugate_steering(&geom, F1, &az(35.0)).unwrap();
        assert_eq!(find_all_main_directions(&geom, &p, &w, F1, 3.0).unwrap().len(), 1);
        let tight = find_all_main_directions(&geom, &p, &w, F1, 1e-9).unwrap();
        assert_eq!(tight.len(), 1);
        assert!((tight[0].azimuth() - 35.0).abs() < 0.05);

        let book = dft_codebook(64, 1, F1).unwrap();
        let mains = find_all_main_directions(&geom, &p, &book.entries[32], F1, 3.0).unwrap();
        assert_eq!(mains.len(), 2, "{mains:?}");
        for m in &mains {
            assert!((80.0..=90.0).contains(&m.azimuth().abs()), "{m}");
        }
        assert!(find_all_main_directions(&geom, &p, &w, F1, 0.0).is_err());
    }

    #[test]
    fn first_nulls_of_broadside_ula() {
        // nulls of an N-element half-wave ULA at broadside: sin(az) = ±2/N
        let n = 32;
        let geom = ArrayGeometry::ula(n, F1).unwrap();
        let w = BeamWeights::conjugate_steering(&geom, F1, &Direction::BORESIGHT).unwrap();
        let (lo, hi) =
            first_nulls(&geom, &ElementPattern::OMNI, &w, F1, &Direction::BORESIGHT, Cut::Azimuth).unwrap();
        let expected = (2.0 / n as f64).asin().to_degrees();
        assert_abs_diff_eq!(hi.unwrap(), expected, epsilon = 1e-5);
        assert_abs_diff_eq!(lo.unwrap(), -expected, epsilon = 1e-5);
    }

    #[test]
    fn compensation_restores_gain_at_target() {
        let geom = ArrayGeometry::ula(128, F1).unwrap();
        let p = ElementPattern::sector(8.0);
        let w1 = BeamWeights::conjugate_steering(&geom, F1, &az(60.0)).unwrap();
        let plan = FrequencyPlan::new(F1, 1e9).unwrap();
        let g1 = pattern_power(&geom, &p, &w1, F1, &az(60.0)).unwrap();
        let squinted = pattern_power(&geom, &p, &w1, plan.f2(), &az(60.0)).unwrap();
        let w2 = apply_compensation(&w1, &compensation_vector(&geom, &plan, &az(60.0)).unwrap()).unwrap();
        let g2 = pattern_power(&geom, &p, &w2, plan.f2(), &az(60.0)).unwrap();
        assert!(squinted < 0.5 * g1);
        assert_abs_diff_eq!(g2 / g1, 1.0, epsilon = 1e-9);
    }

    proptest! {
        #[test]
        fn compensation_is_unit_modulus_and_phase_only(
            n in 1usize..64, df in -2e9f64..2e9, a in -89.0f64..89.0, z in 1.0f64..179.0,
        ) {
            let geom = ArrayGeometry::ula(n, F1).unwrap();
            let plan = FrequencyPlan::new(F1, df).unwrap();
            let c = compensation_vector(&geom, &plan, &Direction::new(a, z).unwrap()).unwrap();
            for e in &c.entries {
                prop_assert!((e.norm() - 1.0).abs() < 1e-12);
            }
            let book = dft_codebook(n, 2, F1).unwrap();
            let w = &book.entries[n / 2];
            let w2 = apply_compensation(w, &c).unwrap();
            for (x, y) in w.as_slice().iter().zip(w2.as_slice()) {
                prop_assert!((x.norm() - y.norm()).abs() < 1e-15);
            }
        }

        #[test]
        fn opposite_offsets_cancel(
            n in 1usize..48, df in 1e6f64..2e9, a in -89.0f64..89.0,
        ) {
            let geom = ArrayGeometry::ula(n, F1).unwrap();
            let d = Direction::new(a, 90.0).unwrap();
            let up = compensation_vector(&geom, &FrequencyPlan::new(F1, df).unwrap(), &d).unwrap();
            let down = compensation_vector(&geom, &FrequencyPlan::new(F1, -df).unwrap(), &d).unwrap();
            let w = BeamWeights::conjugate_steering(&geom, F1, &d).unwrap();
            let back = apply_compensation(&apply_compensation(&w, &up).unwrap(), &down).unwrap();
            for (x, y) in w.as_slice().iter().zip(back.as_slice()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }
    }
}
