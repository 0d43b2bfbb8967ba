//! Angular coordinates, direction vectors and antenna element placement.
//!
//! Conventions: azimuth is measured from +x toward +y and lies in (-180, 180];
//! zenith is measured from +z and lies in [0, 180]. Boresight of every array
//! built here is +x, i.e. (azimuth 0, zenith 90). At the poles the azimuth is
//! undefined and is reported as 0.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub type Vec3 = [f64; 3];

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// A pointing direction in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    azimuth: f64,
    zenith: f64,
}

impl Direction {
    /// Boresight of an array whose face normal is +x.
    pub const BORESIGHT: Direction = Direction {
        azimuth: 0.0,
        zenith: 90.0,
    };

    pub fn new(azimuth_deg: f64, zenith_deg: f64) -> Result<Self> {
        if !azimuth_deg.is_finite() || azimuth_deg <= -180.0 || azimuth_deg > 180.0 {
            return Err(Error::invalid(format!(
                "azimuth {azimuth_deg} outside (-180, 180]"
            )));
        }
        if !zenith_deg.is_finite() || !(0.0..=180.0).contains(&zenith_deg) {
            return Err(Error::invalid(format!(
                "zenith {zenith_deg} outside [0, 180]"
            )));
        }
        let azimuth = if zenith_deg == 0.0 || zenith_deg == 180.0 {
            0.0
        } else {
            azimuth_deg
        };
        Ok(Self {
            azimuth,
            zenith: zenith_deg,
        })
    }

    /// Builds a direction after wrapping the azimuth into (-180, 180] and
    /// clamping the zenith into [0, 180]. Used by angular scans that step
    /// across the azimuth seam.
    pub fn wrapped(azimuth_deg: f64, zenith_deg: f64) -> Self {
        let mut az = azimuth_deg % 360.0;
        if az <= -180.0 {
            az += 360.0;
        } else if az > 180.0 {
            az -= 360.0;
        }
        let zen = zenith_deg.clamp(0.0, 180.0);
        let azimuth = if zen == 0.0 || zen == 180.0 { 0.0 } else { az };
        Self {
            azimuth,
            zenith: zen,
        }
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    pub fn zenith(&self) -> f64 {
        self.zenith
    }

    pub fn unit_vector(&self) -> Vec3 {
        unit_vector(self)
    }

    /// Recovers the direction of a non-zero vector.
    pub fn from_vector(v: &Vec3) -> Result<Self> {
        let r = norm(v);
        if r == 0.0 || !r.is_finite() {
            return Err(Error::invalid("zero-length vector has no direction"));
        }
        let zen = (v[2] / r).clamp(-1.0, 1.0).acos().to_degrees();
        let horizontal = v[0].hypot(v[1]);
        if horizontal <= r * 1e-15 {
            return Ok(Self {
                azimuth: 0.0,
                zenith: if v[2] > 0.0 { 0.0 } else { 180.0 },
            });
        }
        Ok(Self::wrapped(v[1].atan2(v[0]).to_degrees(), zen))
    }

    /// Chordal (Euclidean) distance between the two unit vectors.
    pub fn chordal_distance(&self, other: &Direction) -> f64 {
        norm(&sub(&self.unit_vector(), &other.unit_vector()))
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(az {:.4}°, zen {:.4}°)", self.azimuth, self.zenith)
    }
}

/// `[sin(zen) cos(az), sin(zen) sin(az), cos(zen)]`.
pub fn unit_vector(dir: &Direction) -> Vec3 {
    let az = dir.azimuth.to_radians();
    let zen = dir.zenith.to_radians();
    let (sz, cz) = zen.sin_cos();
    let (sa, ca) = az.sin_cos();
    [sz * ca, sz * sa, cz]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArrayKind {
    Ula { elements: usize },
    /// `rows` run along y, `cols` along z.
    Ura { rows: usize, cols: usize },
    Arbitrary,
}

/// Element placement of an antenna array in its own frame (boresight +x).
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    kind: ArrayKind,
    positions: Vec<Vec3>,
    design_frequency: f64,
}

impl ArrayGeometry {
    pub fn ula(elements: usize, design_frequency_hz: f64) -> Result<Self> {
        Ok(Self {
            kind: ArrayKind::Ula { elements },
            positions: ula_positions(elements, design_frequency_hz)?,
            design_frequency: design_frequency_hz,
        })
    }

    pub fn ura(rows: usize, cols: usize, design_frequency_hz: f64) -> Result<Self> {
        Ok(Self {
            kind: ArrayKind::Ura { rows, cols },
            positions: ura_positions(rows, cols, design_frequency_hz)?,
            design_frequency: design_frequency_hz,
        })
    }

    pub fn arbitrary(positions: Vec<Vec3>, design_frequency_hz: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptyInput("array element positions"));
        }
        check_frequency(design_frequency_hz)?;
        Ok(Self {
            kind: ArrayKind::Arbitrary,
            positions,
            design_frequency: design_frequency_hz,
        })
    }

    pub fn kind(&self) -> ArrayKind {
        self.kind
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn design_frequency(&self) -> f64 {
        self.design_frequency
    }

    /// True when every element sits on the y axis, so the array has no
    /// angular resolution in zenith.
    pub fn is_linear_along_y(&self) -> bool {
        self.positions.iter().all(|p| p[0] == 0.0 && p[2] == 0.0)
    }
}

fn check_frequency(f: f64) -> Result<()> {
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::invalid(format!("frequency {f} Hz must be positive")));
    }
    Ok(())
}

/// Half-wavelength ULA on the y axis centred on the origin:
/// `y_n = (n - (N+1)/2) * lambda/2` for n = 1..=N.
pub fn ula_positions(elements: usize, design_frequency_hz: f64) -> Result<Vec<Vec3>> {
    if elements == 0 {
        return Err(Error::invalid("ULA needs at least one element"));
    }
    check_frequency(design_frequency_hz)?;
    let half = wavelength(design_frequency_hz) / 2.0;
    let centre = (elements as f64 + 1.0) / 2.0;
    Ok((1..=elements)
        .map(|n| [0.0, (n as f64 - centre) * half, 0.0])
        .collect())
}

/// Half-wavelength URA on the yz plane. Enumeration is row-major: the row
/// index `n_r` (y coordinate) is the outer loop and the column index `n_c`
/// (z coordinate) the inner one, so element `(n_r, n_c)` is at
/// `(n_r - 1) * cols + (n_c - 1)`.
pub fn ura_positions(rows: usize, cols: usize, design_frequency_hz: f64) -> Result<Vec<Vec3>> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid(format!("URA dimensions {rows}x{cols}")));
    }
    check_frequency(design_frequency_hz)?;
    let half = wavelength(design_frequency_hz) / 2.0;
    let rc = (rows as f64 + 1.0) / 2.0;
    let cc = (cols as f64 + 1.0) / 2.0;
    let mut out = Vec::with_capacity(rows * cols);
    for nr in 1..=rows {
        for nc in 1..=cols {
            out.push([0.0, (nr as f64 - rc) * half, (nc as f64 - cc) * half]);
        }
    }
    Ok(out)
}

/// Fixed mechanical orientation of an array: a yaw about +z followed by a
/// downtilt about the rotated y axis. Positive tilt points boresight below
/// the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mounting {
    pub yaw_deg: f64,
    pub tilt_deg: f64,
}

impl Mounting {
    pub fn yaw(yaw_deg: f64) -> Self {
        Self {
            yaw_deg,
            tilt_deg: 0.0,
        }
    }

    /// Rotates a vector from the array frame into the global frame.
    pub fn to_global(&self, v: &Vec3) -> Vec3 {
        let (st, ct) = self.tilt_deg.to_radians().sin_cos();
        let tilted = [ct * v[0] + st * v[2], v[1], -st * v[0] + ct * v[2]];
        let (sy, cy) = self.yaw_deg.to_radians().sin_cos();
        [
            cy * tilted[0] - sy * tilted[1],
            sy * tilted[0] + cy * tilted[1],
            tilted[2],
        ]
    }

    /// Rotates a vector from the global frame into the array frame.
    pub fn to_local(&self, v: &Vec3) -> Vec3 {
        let (sy, cy) = self.yaw_deg.to_radians().sin_cos();
        let unyawed = [cy * v[0] + sy * v[1], -sy * v[0] + cy * v[1], v[2]];
        let (st, ct) = self.tilt_deg.to_radians().sin_cos();
        [
            ct * unyawed[0] - st * unyawed[2],
            unyawed[1],
            st * unyawed[0] + ct * unyawed[2],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unit_vector_examples() {
        let v = unit_vector(&Direction::new(0.0, 90.0).unwrap());
        assert_abs_diff_eq!(v[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[2], 0.0, epsilon = 1e-15);

        let v = unit_vector(&Direction::new(90.0, 90.0).unwrap());
        assert_abs_diff_eq!(v[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1], 1.0, epsilon = 1e-15);

        let v = unit_vector(&Direction::new(35.0, 90.0).unwrap());
        assert_abs_diff_eq!(v[0], 0.819_152_044_3, epsilon = 1e-9);
        assert_abs_diff_eq!(v[1], 0.573_576_436_4, epsilon = 1e-9);
        assert_abs_diff_eq!(v[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn direction_rejects_out_of_range() {
        assert!(Direction::new(-180.0, 90.0).is_err());
        assert!(Direction::new(180.0, 90.0).is_ok());
        assert!(Direction::new(0.0, -0.1).is_err());
        assert!(Direction::new(0.0, 180.1).is_err());
        assert!(Direction::new(f64::NAN, 90.0).is_err());
    }

    #[test]
    fn poles_have_zero_azimuth() {
        assert_eq!(Direction::new(45.0, 0.0).unwrap().azimuth(), 0.0);
        let d = Direction::from_vector(&[0.0, 0.0, -2.0]).unwrap();
        assert_eq!((d.azimuth(), d.zenith()), (0.0, 180.0));
    }

    #[test]
    fn wrapped_maps_seam() {
        assert_eq!(Direction::wrapped(-180.0, 90.0).azimuth(), 180.0);
        assert_abs_diff_eq!(Direction::wrapped(190.0, 90.0).azimuth(), -170.0, epsilon = 1e-12);
        assert_abs_diff_eq!(Direction::wrapped(-540.5, 90.0).azimuth(), 179.5, epsilon = 1e-12);
    }

    #[test]
    fn ula_examples() {
        let f = 28e9;
        let lambda = wavelength(f);
        let p = ula_positions(2, f).unwrap();
        assert_abs_diff_eq!(p[0][1], -lambda / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1][1], lambda / 4.0, epsilon = 1e-15);

        let p = ula_positions(256, f).unwrap();
        assert_abs_diff_eq!(lambda, 0.010_706_873_5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[0][1], -0.682_563_19, epsilon = 1e-8);
        let sum: f64 = p.iter().map(|q| q[1]).sum();
        assert_abs_diff_eq!(sum, 0.0, epsilon = 1e-12);
        for w in p.windows(2) {
            assert_abs_diff_eq!(w[1][1] - w[0][1], lambda / 2.0, epsilon = 1e-12);
            assert_eq!((w[0][0], w[0][2]), (0.0, 0.0));
        }
    }

    #[test]
    fn ula_rejects_bad_input() {
        assert!(ula_positions(0, 28e9).is_err());
        assert!(ula_positions(4, 0.0).is_err());
        assert!(ula_positions(4, -1.0).is_err());
    }

    #[test]
    fn ura_examples() {
        let f = 28e9;
        let lambda = wavelength(f);
        let ula = ula_positions(7, f).unwrap();
        let ura = ura_positions(7, 1, f).unwrap();
        for (a, b) in ula.iter().zip(&ura) {
            assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-15);
            assert_eq!(b[2], 0.0);
        }

        let corners = ura_positions(2, 2, f).unwrap();
        for p in &corners {
            assert_abs_diff_eq!(p[1].abs(), lambda / 4.0, epsilon = 1e-15);
            assert_abs_diff_eq!(p[2].abs(), lambda / 4.0, epsilon = 1e-15);
        }
        // row-major: second element shares the row (y) and steps in z
        assert_eq!(corners[0][1], corners[1][1]);
        assert!(corners[1][2] > corners[0][2]);

        let big = ura_positions(32, 32, f).unwrap();
        let zmax = big.iter().map(|p| p[2]).fold(f64::MIN, f64::max);
        assert_abs_diff_eq!(zmax, 15.5 * lambda / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(zmax, 0.082_978, epsilon = 1e-6);
        assert!(ura_positions(0, 3, f).is_err());
    }

    #[test]
    fn mounting_round_trip() {
        let m = Mounting {
            yaw_deg: 37.0,
            tilt_deg: 8.0,
        };
        let v = [0.3, -0.4, 0.5];
        let back = m.to_local(&m.to_global(&v));
        for i in 0..3 {
            assert_abs_diff_eq!(back[i], v[i], epsilon = 1e-14);
        }
        let boresight = Mounting::yaw(90.0).to_global(&[1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(boresight[1], 1.0, epsilon = 1e-15);
        let down = Mounting { yaw_deg: 0.0, tilt_deg: 10.0 }.to_global(&[1.0, 0.0, 0.0]);
        assert!(down[2] < 0.0);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn unit_vector_is_unit(az in -179.999f64..180.0, zen in 0.0f64..=180.0) {
                let v = unit_vector(&Direction::new(az, zen).unwrap());
                prop_assert!((norm(&v) - 1.0).abs() < 1e-12);
            }

            #[test]
            fn direction_round_trip(az in -179.9f64..180.0, zen in 0.5f64..179.5) {
                let d = Direction::new(az, zen).unwrap();
                let back = Direction::from_vector(&d.unit_vector()).unwrap();
                prop_assert!((back.zenith() - zen).abs() < 1e-9);
                let daz = (back.azimuth() - az + 540.0) % 360.0 - 180.0;
                prop_assert!(daz.abs() < 1e-9);
            }

            #[test]
            fn arrays_are_point_symmetric(n in 1usize..40, m in 1usize..12) {
                let ula = ula_positions(n, 28e9).unwrap();
                for (a, b) in ula.iter().zip(ula.iter().rev()) {
                    prop_assert!((a[1] + b[1]).abs() < 1e-14);
                }
                let ura = ura_positions(n, m, 28e9).unwrap();
                for (a, b) in ura.iter().zip(ura.iter().rev()) {
                    prop_assert!((a[1] + b[1]).abs() < 1e-14 && (a[2] + b[2]).abs() < 1e-14);
                }
            }
        }
    }
}
