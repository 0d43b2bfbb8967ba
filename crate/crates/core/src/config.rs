//! Run configuration: a versioned TOML document with one section per
//! subcommand. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beamforming::{dft_codebook, dft_codebook_2d, Codebook, ElementPattern};
use crate::geometry::ArrayGeometry;
use crate::ran::{Mode, SimParams, TrafficModel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArraySpec {
    Ula { elements: usize },
    Ura { rows: usize, cols: usize },
}

impl ArraySpec {
    pub fn geometry(&self, f: f64) -> crate::Result<ArrayGeometry> {
        match *self {
            ArraySpec::Ula { elements } => ArrayGeometry::ula(elements, f),
            ArraySpec::Ura { rows, cols } => ArrayGeometry::ura(rows, cols, f),
        }
    }

    pub fn codebook(&self, oversampling: usize, f: f64) -> crate::Result<Codebook> {
        match *self {
            ArraySpec::Ula { elements } => dft_codebook(elements, oversampling, f),
            ArraySpec::Ura { rows, cols } => dft_codebook_2d(rows, cols, oversampling, f),
        }
    }

    pub fn codebook_len(&self, oversampling: usize) -> usize {
        match *self {
            ArraySpec::Ula { elements } => elements * oversampling,
            ArraySpec::Ura { rows, cols } => rows * cols * oversampling * oversampling,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ArraySpec::Ula { elements } => format!("ula{elements}"),
            ArraySpec::Ura { rows, cols } => format!("ura{rows}x{cols}"),
        }
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        let ok = match *self {
            ArraySpec::Ula { elements } => elements >= 1,
            ArraySpec::Ura { rows, cols } => rows >= 1 && cols >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(field, "array needs at least one element per dimension"))
        }
    }
}

/// Gain-versus-angle traces of selected codebook entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatternConfig {
    pub array: ArraySpec,
    pub design_frequency_hz: f64,
    pub oversampling: usize,
    pub element: ElementPattern,
    /// Codebook entries to trace.
    pub beams: Vec<usize>,
    pub frequencies_hz: Vec<f64>,
    /// Also trace the compensated beam at every frequency other than the
    /// design frequency.
    pub compensate: bool,
    pub fine_step_deg: f64,
    pub coarse_step_deg: f64,
    /// Half-width of the fine-grid window around each main lobe.
    pub fine_window_deg: f64,
}

impl Default for PatternConfig {
    fn default() -> Self {
        Self {
            array: ArraySpec::Ula { elements: 256 },
            design_frequency_hz: 28e9,
            oversampling: 1,
            element: ElementPattern::sector(8.0),
            beams: vec![33, 121],
            frequencies_hz: vec![28e9, 29e9, 27e9],
            compensate: true,
            fine_step_deg: 0.01,
            coarse_step_deg: 0.1,
            fine_window_deg: 5.0,
        }
    }
}

/// Gain at the design direction versus frequency offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOffsetConfig {
    pub array: ArraySpec,
    pub design_frequency_hz: f64,
    pub element: ElementPattern,
    /// Conjugate-steered beams toward these azimuths.
    pub beam_azimuths_deg: Vec<f64>,
    pub delta_f_min_hz: f64,
    pub delta_f_max_hz: f64,
    pub delta_f_step_hz: f64,
}

impl Default for SweepOffsetConfig {
    fn default() -> Self {
        Self {
            array: ArraySpec::Ula { elements: 256 },
            design_frequency_hz: 28e9,
            element: ElementPattern::sector(8.0),
            beam_azimuths_deg: vec![15.0, 35.0, 66.0],
            delta_f_min_hz: -1e9,
            delta_f_max_hz: 1e9,
            delta_f_step_hz: 10e6,
        }
    }
}

/// The system-level drop matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub seed: u64,
    pub drops: u32,
    /// ULA sizes, used for both the gNB and the repeater panels. Element
    /// patterns come from `model.radio`.
    pub array_sizes: Vec<usize>,
    pub delta_f_hz: Vec<f64>,
    pub modes: Vec<Mode>,
    /// `index,threshold_db,spectral_efficiency` CSV; the bundled table when
    /// absent. Relative paths are resolved against the config file.
    pub mcs_table: Option<PathBuf>,
    /// Write every transmission record, not only the summaries.
    pub write_records: bool,
    pub model: SimParams,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            drops: 4,
            array_sizes: vec![64, 128, 256],
            delta_f_hz: vec![0.0, 100e6, 500e6, 1e9],
            modes: Mode::ALL.to_vec(),
            mcs_table: None,
            write_records: true,
            model: SimParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(default)]
    pub pattern: PatternConfig,
    #[serde(default)]
    pub sweep_offset: SweepOffsetConfig,
    #[serde(default)]
    pub simulation: SimulationConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            pattern: PatternConfig::default(),
            sweep_offset: SweepOffsetConfig::default(),
            simulation: SimulationConfig::default(),
        }
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be a positive finite number, got {v}")))
    }
}

fn validate_element(field: &str, e: &ElementPattern) -> Result<(), ConfigError> {
    match *e {
        ElementPattern::Omni { gain_dbi } if !gain_dbi.is_finite() => Err(invalid(field, "gain must be finite")),
        ElementPattern::Sector3gpp {
            hpbw_horizontal_deg,
            hpbw_vertical_deg,
            front_back_db,
            side_lobe_db,
            ..
        } => {
            positive(&format!("{field}.hpbw_horizontal_deg"), hpbw_horizontal_deg)?;
            positive(&format!("{field}.hpbw_vertical_deg"), hpbw_vertical_deg)?;
            if !(front_back_db >= 0.0) || !(side_lobe_db >= 0.0) {
                return Err(invalid(field, "attenuation floors must be >= 0 dB"));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file. A relative `mcs_table` path is
    /// made relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(t) = &cfg.simulation.mcs_table {
            if t.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.simulation.mcs_table = Some(dir.join(t));
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String, ConfigError> {
        toml::to_string(self).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        self.validate_pattern()?;
        self.validate_sweep_offset()?;
        self.validate_simulation()
    }

    fn validate_pattern(&self) -> Result<(), ConfigError> {
        let p = &self.pattern;
        p.array.validate("pattern.array")?;
        positive("pattern.design_frequency_hz", p.design_frequency_hz)?;
        if p.oversampling == 0 {
            return Err(invalid("pattern.oversampling", "must be >= 1"));
        }
        validate_element("pattern.element", &p.element)?;
        let n = p.array.codebook_len(p.oversampling);
        for (i, &b) in p.beams.iter().enumerate() {
            if b >= n {
                return Err(invalid(
                    format!("pattern.beams[{i}]"),
                    format!("entry {b} outside codebook of {n}"),
                ));
            }
        }
        for (i, &f) in p.frequencies_hz.iter().enumerate() {
            positive(&format!("pattern.frequencies_hz[{i}]"), f)?;
        }
        positive("pattern.fine_step_deg", p.fine_step_deg)?;
        positive("pattern.coarse_step_deg", p.coarse_step_deg)?;
        if !(p.fine_window_deg >= 0.0) {
            return Err(invalid("pattern.fine_window_deg", "must be >= 0"));
        }
        Ok(())
    }

    fn validate_sweep_offset(&self) -> Result<(), ConfigError> {
        let s = &self.sweep_offset;
        s.array.validate("sweep_offset.array")?;
        positive("sweep_offset.design_frequency_hz", s.design_frequency_hz)?;
        validate_element("sweep_offset.element", &s.element)?;
        for (i, &a) in s.beam_azimuths_deg.iter().enumerate() {
            if !(-90.0..=90.0).contains(&a) {
                return Err(invalid(format!("sweep_offset.beam_azimuths_deg[{i}]"), "must be in [-90, 90]"));
            }
        }
        positive("sweep_offset.delta_f_step_hz", s.delta_f_step_hz)?;
        if !(s.delta_f_min_hz <= s.delta_f_max_hz) {
            return Err(invalid("sweep_offset.delta_f_max_hz", "must be >= delta_f_min_hz"));
        }
        if !(s.design_frequency_hz + s.delta_f_min_hz > 0.0) {
            return Err(invalid("sweep_offset.delta_f_min_hz", "offset frequency must stay positive"));
        }
        Ok(())
    }

    fn validate_simulation(&self) -> Result<(), ConfigError> {
        let s = &self.simulation;
        let m = &s.model;
        if s.drops == 0 {
            return Err(invalid("simulation.drops", "must be >= 1"));
        }
        for (i, &n) in s.array_sizes.iter().enumerate() {
            if n == 0 {
                return Err(invalid(format!("simulation.array_sizes[{i}]"), "must be >= 1"));
            }
        }
        for (i, &df) in s.delta_f_hz.iter().enumerate() {
            if !df.is_finite() || !(m.f1_hz + df > 0.0) {
                return Err(invalid(
                    format!("simulation.delta_f_hz[{i}]"),
                    "f1 + delta_f must be a positive frequency",
                ));
            }
        }
        validate_element("simulation.model.radio.gnb.pattern", &m.radio.gnb.pattern)?;
        validate_element("simulation.model.radio.ncr.pattern", &m.radio.ncr.pattern)?;
        validate_element("simulation.model.radio.ue.pattern", &m.radio.ue.pattern)?;
        positive("simulation.model.f1_hz", m.f1_hz)?;
        if m.n_ttis == 0 {
            return Err(invalid("simulation.model.n_ttis", "must be >= 1"));
        }
        for (name, v) in [
            ("channel_update_period", m.channel_update_period),
            ("access_sweep_period", m.access_sweep_period),
            ("backhaul_sweep_period", m.backhaul_sweep_period),
        ] {
            if v == 0 {
                return Err(invalid(format!("simulation.model.{name}"), "must be >= 1 TTI"));
            }
        }
        if !(m.direction_error_deg >= 0.0) {
            return Err(invalid("simulation.model.direction_error_deg", "must be >= 0"));
        }
        if let TrafficModel::Cbr { period_slots, .. } = m.traffic {
            if period_slots == 0 {
                return Err(invalid("simulation.model.traffic.period_slots", "must be >= 1"));
            }
        }
        let sc = &m.scenario;
        if sc.n_ues == 0 {
            return Err(invalid("simulation.model.scenario.n_ues", "must be >= 1"));
        }
        if sc.ue_street > sc.grid.blocks {
            return Err(invalid(
                "simulation.model.scenario.ue_street",
                format!("street {} outside 0..={}", sc.ue_street, sc.grid.blocks),
            ));
        }
        if sc.ue_street + sc.gnb.street_offset > sc.grid.blocks || sc.gnb.vertical_street > sc.grid.blocks {
            return Err(invalid("simulation.model.scenario.gnb", "gNB intersection outside the grid"));
        }
        if !(sc.ue_speed_kmh >= 0.0) {
            return Err(invalid("simulation.model.scenario.ue_speed_kmh", "must be >= 0"));
        }
        sc.grid
            .validate()
            .map_err(|e| invalid("simulation.model.scenario.grid", e.to_string()))?;
        let r = &m.radio;
        if r.n_rbs == 0 {
            return Err(invalid("simulation.model.radio.n_rbs", "must be >= 1"));
        }
        if r.subcarriers_per_rb == 0 {
            return Err(invalid("simulation.model.radio.subcarriers_per_rb", "must be >= 1"));
        }
        positive("simulation.model.radio.subcarrier_spacing_hz", r.subcarrier_spacing_hz)?;
        positive("simulation.model.radio.slot_duration_s", r.slot_duration_s)?;
        let ch = &m.channel;
        if !(ch.shadowing_sigma_db >= 0.0) {
            return Err(invalid("simulation.model.channel.shadowing_sigma_db", "must be >= 0"));
        }
        positive("simulation.model.channel.decorrelation_distance_m", ch.decorrelation_distance_m)?;
        for (name, pl) in [
            ("backhaul", ch.path_loss.backhaul),
            ("access", ch.path_loss.access),
            ("direct", ch.path_loss.direct),
        ] {
            if !(pl.b > 0.0) || !(pl.c > 0.0) || !pl.a.is_finite() {
                return Err(invalid(
                    format!("simulation.model.channel.path_loss.{name}"),
                    "needs finite a and positive b, c",
                ));
            }
        }
        m.validate().map_err(|e| invalid("simulation.model", e.to_string()))
    }
}
