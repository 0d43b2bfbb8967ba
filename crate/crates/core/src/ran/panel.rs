//! Antenna panel shared by every run that uses the same array: geometry,
//! codebook and the precomputed main directions of each codebook entry.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::beamforming::{element_gain, BeamWeights, Codebook, ElementPattern};
use crate::error::Result;
use crate::geometry::{dot, unit_vector, ArrayGeometry, Direction, SPEED_OF_LIGHT};
use crate::squint::{
    apply_compensation, compensation_vector, disambiguate_peak, find_all_main_directions, FrequencyPlan,
};

#[derive(Debug, Clone)]
pub struct Panel {
    pub geometry: ArrayGeometry,
    pub pattern: ElementPattern,
    pub codebook: Codebook,
    /// Main directions of each entry at the design frequency, strongest first.
    pub main_directions: Vec<Vec<Direction>>,
}

impl Panel {
    pub fn new(geometry: ArrayGeometry, pattern: ElementPattern, codebook: Codebook) -> Result<Self> {
        let f = codebook.design_frequency;
        let main_directions = codebook
            .entries
            .par_iter()
            .map(|w| find_all_main_directions(&geometry, &pattern, w, f, 3.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            geometry,
            pattern,
            codebook,
            main_directions,
        })
    }

    pub fn len(&self) -> usize {
        self.geometry.len()
    }

    pub fn is_empty(&self) -> bool {
        self.geometry.is_empty()
    }

    pub fn is_ambiguous(&self, beam: usize) -> bool {
        self.main_directions[beam].len() > 1
    }

    /// `|B_k(dir)|^2` for every codebook entry.
    pub fn codebook_gains(&self, dir: &Direction, f: f64) -> Vec<f64> {
        let u = unit_vector(dir);
        let k = 2.0 * PI * f / SPEED_OF_LIGHT;
        let psi: Vec<Complex64> = self
            .geometry
            .positions()
            .iter()
            .map(|r| Complex64::from_polar(1.0, k * dot(&u, r)))
            .collect();
        let g = element_gain(&self.pattern, dir);
        self.codebook
            .entries
            .iter()
            .map(|w| {
                let s: Complex64 = w.as_slice().iter().zip(&psi).map(|(a, b)| a * b).sum();
                g * s.norm_sqr()
            })
            .collect()
    }

    /// Strongest entry toward `dir`; ties go to the lowest index.
    pub fn best_beam(&self, dir: &Direction, f: f64) -> (usize, f64) {
        let gains = self.codebook_gains(dir, f);
        let mut best = (0, gains[0]);
        for (i, &g) in gains.iter().enumerate().skip(1) {
            if g > best.1 {
                best = (i, g);
            }
        }
        best
    }

    /// Direction the entry was meant to serve, resolving grating ambiguity
    /// with `estimate`.
    pub fn intended_direction(&self, beam: usize, estimate: &Direction) -> Direction {
        let mains = &self.main_directions[beam];
        match mains.len() {
            0 => *estimate,
            1 => mains[0],
            _ => disambiguate_peak(mains, estimate).unwrap_or(mains[0]),
        }
    }

    pub fn weights(&self, beam: usize) -> &BeamWeights {
        &self.codebook.entries[beam]
    }

    /// Entry `beam` corrected for use at `plan.f2()`.
    pub fn compensated(&self, beam: usize, plan: &FrequencyPlan, estimate: &Direction) -> Result<BeamWeights> {
        let target = self.intended_direction(beam, estimate);
        let c = compensation_vector(&self.geometry, plan, &target)?;
        apply_compensation(self.weights(beam), &c)
    }
}
