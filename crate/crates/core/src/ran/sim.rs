//! Per-TTI downlink simulation of one drop.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::link_adaptation::{link_adapt, olla_update, transmit, McsTable, OllaState};
use super::ncr::NcrState;
use super::panel::Panel;
use super::scheduler::RoundRobin;
use super::sinr::RbPowers;
use super::sweep::{
    backhaul_sweep, beam_sweep, serving_decision, BackhaulReport, LinkModels, LinkShadowing, Network,
    ServingDecision, ServingPath,
};
use super::traffic::{BearerQueue, TrafficModel};
use crate::beamforming::{BeamWeights, ElementPattern};
use crate::channel::{dbm_to_watt, noise_power_dbm, path_loss_delta, RadioNode, ShadowingField};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Direction, Mounting, Vec3};
use crate::scenario::{build_scenario, Role, Scenario, ScenarioConfig};
use crate::squint::FrequencyPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Data on the measured frequency.
    Baseline,
    /// Data at `f1 + delta_f` with the measured beams.
    Squint,
    /// Data at `f1 + delta_f` with phase-compensated beams and a path-loss
    /// corrected SINR estimate.
    Compensated,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Baseline, Mode::Squint, Mode::Compensated];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::Squint => "squint",
            Mode::Compensated => "compensated",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where the direction used to resolve ambiguous codebook entries comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionEstimate {
    /// Strongest nominal main direction of the serving entry.
    Nominal,
    /// True direction of the peer node as seen by the tracking loop.
    Tracked,
}

/// Radio characteristics of one node type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NodeConfig {
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub pattern: ElementPattern,
}

impl NodeConfig {
    pub fn defaults(role: Role) -> Self {
        match role {
            Role::Gnb => Self {
                tx_power_dbm: 35.0,
                noise_figure_db: 7.0,
                pattern: ElementPattern::sector(8.0),
            },
            Role::Ncr => Self {
                tx_power_dbm: 33.0,
                noise_figure_db: 9.0,
                pattern: ElementPattern::sector(8.0),
            },
            Role::Ue => Self {
                tx_power_dbm: 24.0,
                noise_figure_db: 9.0,
                pattern: ElementPattern::OMNI,
            },
        }
    }
}

impl Default for NodeConfig {
    fn default() -> Self {
        Self::defaults(Role::Gnb)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioParams {
    pub gnb: NodeConfig,
    pub ncr: NodeConfig,
    pub ue: NodeConfig,
    pub ncr_fixed_gain_db: f64,
    pub ncr_enabled: bool,
    pub n_rbs: usize,
    pub subcarriers_per_rb: usize,
    pub subcarrier_spacing_hz: f64,
    pub slot_duration_s: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            gnb: NodeConfig::defaults(Role::Gnb),
            ncr: NodeConfig::defaults(Role::Ncr),
            ue: NodeConfig::defaults(Role::Ue),
            ncr_fixed_gain_db: 60.0,
            ncr_enabled: true,
            n_rbs: 66,
            subcarriers_per_rb: 12,
            subcarrier_spacing_hz: 60e3,
            slot_duration_s: 0.25e-3,
        }
    }
}

impl RadioParams {
    /// Bits carried by one RB per bit/s/Hz of spectral efficiency in a slot.
    pub fn bits_per_rb_per_se(&self) -> f64 {
        self.subcarriers_per_rb as f64 * self.subcarrier_spacing_hz * self.slot_duration_s
    }

    pub fn rb_powers(&self) -> RbPowers {
        let n = self.n_rbs as f64;
        RbPowers {
            p_tx_w: dbm_to_watt(self.gnb.tx_power_dbm) / n,
            p_ncr_w: dbm_to_watt(self.ncr.tx_power_dbm) / n,
            noise_ncr_w: dbm_to_watt(noise_power_dbm(
                self.subcarriers_per_rb,
                self.subcarrier_spacing_hz,
                self.ncr.noise_figure_db,
            )),
            noise_ue_w: dbm_to_watt(noise_power_dbm(
                self.subcarriers_per_rb,
                self.subcarrier_spacing_hz,
                self.ue.noise_figure_db,
            )),
            ncr_fixed_gain_db: self.ncr_fixed_gain_db,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    pub path_loss: LinkModels,
    pub shadowing_sigma_db: f64,
    pub decorrelation_distance_m: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            path_loss: LinkModels::default(),
            shadowing_sigma_db: 4.0,
            decorrelation_distance_m: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    pub f1_hz: f64,
    pub n_ttis: u64,
    pub channel_update_period: u64,
    pub access_sweep_period: u64,
    pub backhaul_sweep_period: u64,
    pub traffic: TrafficModel,
    pub olla: OllaState,
    pub direction_estimate: DirectionEstimate,
    pub direction_error_deg: f64,
    pub scenario: ScenarioConfig,
    pub radio: RadioParams,
    pub channel: ChannelParams,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            f1_hz: 28e9,
            n_ttis: 2000,
            channel_update_period: 20,
            access_sweep_period: 20,
            backhaul_sweep_period: 200,
            traffic: TrafficModel::default(),
            olla: OllaState::default(),
            direction_estimate: DirectionEstimate::Tracked,
            direction_error_deg: 1.0,
            scenario: ScenarioConfig::default(),
            radio: RadioParams::default(),
            channel: ChannelParams::default(),
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.f1_hz > 0.0) {
            return Err(Error::invalid("f1 must be positive"));
        }
        if self.channel_update_period == 0 || self.access_sweep_period == 0 || self.backhaul_sweep_period == 0 {
            return Err(Error::invalid("update and sweep periods must be >= 1 TTI"));
        }
        if !(self.direction_error_deg >= 0.0) {
            return Err(Error::invalid("direction error must be >= 0"));
        }
        let r = &self.radio;
        if r.n_rbs == 0 || r.subcarriers_per_rb == 0 || !(r.subcarrier_spacing_hz > 0.0) || !(r.slot_duration_s > 0.0)
        {
            return Err(Error::invalid("RB grid and slot must be non-empty"));
        }
        if let TrafficModel::Cbr { period_slots: 0, .. } = self.traffic {
            return Err(Error::invalid("CBR period must be >= 1 slot"));
        }
        Ok(())
    }
}

/// One scheduled transmission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpiRecord {
    pub drop: u32,
    pub tti: u64,
    pub ue: usize,
    pub path: ServingPath,
    pub mode: Mode,
    pub n_rbs: usize,
    pub sinr_db: f64,
    pub mcs: usize,
    pub ack: bool,
    pub bits: u64,
}

/// SplitMix64 finaliser used to derive independent stream seeds.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_SCENARIO: u64 = 1;

/// Seed of the scenario (placement and mobility) of drop `drop`.
pub fn scenario_seed(seed: u64, drop: u32) -> u64 {
    derive_seed(derive_seed(seed, drop as u64), STREAM_SCENARIO)
}
const STREAM_SHADOW_GNB: u64 = 2;
const STREAM_SHADOW_NCR: u64 = 3;
const STREAM_TRAFFIC: u64 = 4;
const STREAM_DIRECTION: u64 = 5;

#[derive(Debug, Clone)]
struct UeLink {
    decision: ServingDecision,
    sinr_est_db: f64,
    /// Data weights: the direct beam, or the NCR access beam.
    w_data: BeamWeights,
}

#[derive(Debug, Clone)]
struct BackhaulLink {
    report: BackhaulReport,
    w_gnb: BeamWeights,
    w_ncr: BeamWeights,
}

pub struct Simulation {
    params: SimParams,
    mode: Mode,
    drop: u32,
    plan: FrequencyPlan,
    scenario: Scenario,
    gnb_panel: Arc<Panel>,
    ncr_panel: Arc<Panel>,
    table: Arc<McsTable>,
    shadow_gnb: ShadowingField,
    shadow_ncr: ShadowingField,
    gnb: RadioNode,
    ncr_backhaul: RadioNode,
    ncr_access: RadioNode,
    ues: Vec<RadioNode>,
    shadowing: LinkShadowing,
    queues: Vec<BearerQueue>,
    olla: Vec<OllaState>,
    rr: RoundRobin,
    direction_rng: ChaCha8Rng,
    backhaul: Option<BackhaulLink>,
    links: Vec<Option<UeLink>>,
    actual_sinr_db: Vec<f64>,
    ncr_state: NcrState,
    tti: u64,
    offered_bits: u64,
}

impl Simulation {
    /// Sets up drop `drop` of a run seeded with `seed`. The scenario,
    /// shadowing, traffic phases and direction errors depend only on
    /// `(seed, drop)`, never on `mode` or `delta_f`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        params: &SimParams,
        mode: Mode,
        delta_f_hz: f64,
        gnb_panel: Arc<Panel>,
        ncr_panel: Arc<Panel>,
        table: Arc<McsTable>,
        seed: u64,
        drop: u32,
    ) -> Result<Self> {
        params.validate()?;
        let plan = FrequencyPlan::new(params.f1_hz, delta_f_hz)?;
        let drop_seed = derive_seed(seed, drop as u64);
        let scenario = build_scenario(&params.scenario, scenario_seed(seed, drop))?;
        let ch = &params.channel;
        let shadow_gnb = ShadowingField::new(
            derive_seed(drop_seed, STREAM_SHADOW_GNB),
            ch.decorrelation_distance_m,
            ch.shadowing_sigma_db,
        )?;
        let shadow_ncr = ShadowingField::new(
            derive_seed(drop_seed, STREAM_SHADOW_NCR),
            ch.decorrelation_distance_m,
            ch.shadowing_sigma_db,
        )?;
        let n_ues = scenario.ues.len();
        let mut traffic_rng = ChaCha8Rng::seed_from_u64(derive_seed(drop_seed, STREAM_TRAFFIC));
        let queues = (0..n_ues)
            .map(|_| match params.traffic {
                TrafficModel::Cbr { period_slots, .. } => BearerQueue::new(traffic_rng.random_range(0..period_slots), false),
                TrafficModel::FullBuffer => BearerQueue::new(0, true),
                TrafficModel::None => BearerQueue::new(0, false),
            })
            .collect();
        let radio = &params.radio;
        let node = |id, position, array: Option<ArrayGeometry>, pattern, yaw| RadioNode {
            id,
            position,
            array,
            pattern,
            mounting: Mounting::yaw(yaw),
        };
        let gnb = node(
            0,
            scenario.gnb_position,
            Some(gnb_panel.geometry.clone()),
            gnb_panel.pattern,
            scenario.gnb_yaw_deg(),
        );
        let ncr_backhaul = node(
            1,
            scenario.ncr_position,
            Some(ncr_panel.geometry.clone()),
            ncr_panel.pattern,
            scenario.ncr_backhaul_yaw_deg(),
        );
        let ncr_access = node(
            1,
            scenario.ncr_position,
            Some(ncr_panel.geometry.clone()),
            ncr_panel.pattern,
            scenario.ncr_access_yaw_deg(),
        );
        let ues = (0..n_ues)
            .map(|i| node(2 + i, scenario.ue_position(i), None, radio.ue.pattern, 0.0))
            .collect();
        let mut sim = Self {
            params: params.clone(),
            mode,
            drop,
            plan,
            scenario,
            gnb_panel,
            ncr_panel,
            table,
            shadow_gnb,
            shadow_ncr,
            gnb,
            ncr_backhaul,
            ncr_access,
            ues,
            shadowing: LinkShadowing::default(),
            queues,
            olla: vec![params.olla; n_ues],
            rr: RoundRobin::new(n_ues),
            direction_rng: ChaCha8Rng::seed_from_u64(derive_seed(drop_seed, STREAM_DIRECTION)),
            backhaul: None,
            links: vec![None; n_ues],
            actual_sinr_db: vec![f64::NAN; n_ues],
            ncr_state: NcrState::new(radio.ncr_fixed_gain_db, radio.ncr.tx_power_dbm),
            tti: 0,
            offered_bits: 0,
        };
        sim.update_channel();
        Ok(sim)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn tti(&self) -> u64 {
        self.tti
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn ncr_state(&self) -> &NcrState {
        &self.ncr_state
    }

    /// Data SINR (dB) of every UE in the current channel state.
    pub fn current_sinr_db(&self) -> &[f64] {
        &self.actual_sinr_db
    }

    /// Bits that arrived in all queues so far.
    pub fn offered_bits(&self) -> u64 {
        self.offered_bits
    }

    /// Serving path of each UE after the latest sweep.
    pub fn serving_paths(&self) -> Vec<Option<ServingPath>> {
        self.links.iter().map(|l| l.as_ref().map(|l| l.decision.path)).collect()
    }

    /// Frequency of the data transmissions.
    pub fn data_frequency(&self) -> f64 {
        match self.mode {
            Mode::Baseline => self.plan.f1(),
            Mode::Squint | Mode::Compensated => self.plan.f2(),
        }
    }

    fn network(&self) -> Network<'_> {
        Network {
            gnb: self.gnb.clone(),
            ncr_backhaul: self.ncr_backhaul.clone(),
            ncr_access: self.ncr_access.clone(),
            ues: self.ues.clone(),
            gnb_panel: &self.gnb_panel,
            ncr_panel: &self.ncr_panel,
            links: self.params.channel.path_loss,
            shadowing: self.shadowing.clone(),
            powers: self.params.radio.rb_powers(),
            subcarriers_per_rb: self.params.radio.subcarriers_per_rb,
            ncr_enabled: self.params.radio.ncr_enabled,
        }
    }

    fn update_channel(&mut self) {
        for (i, ue) in self.ues.iter_mut().enumerate() {
            ue.position = self.scenario.ue_position(i);
        }
        self.shadowing = LinkShadowing {
            backhaul_db: self.shadow_gnb.sample(&self.ncr_backhaul.position),
            direct_db: self.ues.iter().map(|u| self.shadow_gnb.sample(&u.position)).collect(),
            access_db: self.ues.iter().map(|u| self.shadow_ncr.sample(&u.position)).collect(),
        };
    }

    /// Direction estimate for resolving an ambiguous entry of `panel`,
    /// drawn for every beam so the random stream does not depend on mode.
    fn estimate(&mut self, panel: &Panel, beam: usize, from: &RadioNode, to: &Vec3) -> Result<Direction> {
        let sigma = self.params.direction_error_deg;
        let (da, dz) = if sigma > 0.0 {
            let n = Normal::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?;
            (n.sample(&mut self.direction_rng), n.sample(&mut self.direction_rng))
        } else {
            (0.0, 0.0)
        };
        let base = match self.params.direction_estimate {
            DirectionEstimate::Tracked => from.local_direction(&crate::geometry::sub(to, &from.position))?,
            DirectionEstimate::Nominal => panel.main_directions[beam].first().copied().unwrap_or(Direction::BORESIGHT),
        };
        Ok(Direction::wrapped(base.azimuth() + da, base.zenith() + dz))
    }

    /// Weights used for data with entry `beam` of `panel`.
    fn data_weights(&self, panel: &Panel, beam: usize, estimate: &Direction) -> Result<BeamWeights> {
        match self.mode {
            Mode::Baseline | Mode::Squint => Ok(panel.weights(beam).clone()),
            Mode::Compensated => panel.compensated(beam, &self.plan, estimate),
        }
    }

    fn sweep_backhaul(&mut self) -> Result<()> {
        let report = backhaul_sweep(&self.network(), self.plan.f1())?;
        let (gnb_panel, ncr_panel) = (self.gnb_panel.clone(), self.ncr_panel.clone());
        let (gnb, ncr) = (self.gnb.clone(), self.ncr_backhaul.clone());
        let est_gnb = self.estimate(&gnb_panel, report.gnb_beam, &gnb, &ncr.position)?;
        let est_ncr = self.estimate(&ncr_panel, report.ncr_beam, &ncr, &gnb.position)?;
        self.backhaul = Some(BackhaulLink {
            report,
            w_gnb: self.data_weights(&gnb_panel, report.gnb_beam, &est_gnb)?,
            w_ncr: self.data_weights(&ncr_panel, report.ncr_beam, &est_ncr)?,
        });
        self.ncr_state.fwd_backhaul_beam = Some(report.ncr_beam);
        Ok(())
    }

    fn sweep_access(&mut self) -> Result<()> {
        let backhaul = self.backhaul.as_ref().ok_or(Error::invalid("access sweep before backhaul sweep"))?.report;
        let f1 = self.plan.f1();
        let net = self.network();
        let reports = beam_sweep(&net, &backhaul, f1)?;
        let mut decisions = Vec::with_capacity(self.ues.len());
        for ue in 0..self.ues.len() {
            let d = serving_decision(&reports, &backhaul, ue)?;
            let est = match d.path {
                ServingPath::Direct => net.direct_sinr(ue, self.gnb_panel.weights(d.gnb_beam), f1)?,
                ServingPath::ViaNcr => net.via_ncr_sinr(
                    ue,
                    self.gnb_panel.weights(backhaul.gnb_beam),
                    self.ncr_panel.weights(backhaul.ncr_beam),
                    self.ncr_panel.weights(d.ncr_access_beam.unwrap_or(0)),
                    f1,
                )?,
            };
            decisions.push((d, est.sinr_db()));
        }
        drop(net);
        let (gnb_panel, ncr_panel) = (self.gnb_panel.clone(), self.ncr_panel.clone());
        let pl = self.params.channel.path_loss;
        for (ue, (d, est_db)) in decisions.into_iter().enumerate() {
            let target = self.ues[ue].position;
            let (gnb, ncr) = (self.gnb.clone(), self.ncr_access.clone());
            let est_gnb = self.estimate(&gnb_panel, reports[ue].direct.beam, &gnb, &target)?;
            let access_beam = reports[ue].via_ncr.map(|v| v.beam).unwrap_or(0);
            let est_ncr = self.estimate(&ncr_panel, access_beam, &ncr, &target)?;
            let (w_data, c) = match d.path {
                ServingPath::Direct => (self.data_weights(&gnb_panel, d.gnb_beam, &est_gnb)?, pl.direct.c),
                ServingPath::ViaNcr => (self.data_weights(&ncr_panel, access_beam, &est_ncr)?, pl.access.c),
            };
            let sinr_est_db = match self.mode {
                Mode::Compensated => est_db - path_loss_delta(c, self.plan.f1(), self.plan.delta_f()),
                Mode::Baseline | Mode::Squint => est_db,
            };
            self.links[ue] = Some(UeLink {
                decision: d,
                sinr_est_db,
                w_data,
            });
        }
        Ok(())
    }

    fn refresh_actual_sinr(&mut self) -> Result<()> {
        let f = self.data_frequency();
        let net = self.network();
        let backhaul = self.backhaul.as_ref();
        let mut out = vec![f64::NAN; self.ues.len()];
        let mut last_gain = None;
        for (ue, link) in self.links.iter().enumerate() {
            let Some(link) = link else { continue };
            out[ue] = match (link.decision.path, backhaul) {
                (ServingPath::Direct, _) => net.direct_sinr(ue, &link.w_data, f)?.sinr_db(),
                (ServingPath::ViaNcr, Some(bh)) => {
                    let s = net.via_ncr_sinr(ue, &bh.w_gnb, &bh.w_ncr, &link.w_data, f)?;
                    last_gain = Some(s.ncr_gain);
                    s.sinr_db()
                }
                (ServingPath::ViaNcr, None) => return Err(Error::invalid("via-NCR link without backhaul")),
            };
        }
        drop(net);
        if let Some(g) = last_gain {
            self.ncr_state.gain = g;
        }
        self.actual_sinr_db = out;
        Ok(())
    }

    /// SINR (dB) of `ue` on `rb` given the RB allocation of the current TTI.
    pub fn compute_sinr(&self, ue: usize, rb: usize, allocation: &[Option<usize>]) -> Result<f64> {
        match allocation.get(rb) {
            Some(Some(u)) if *u == ue => Ok(self.actual_sinr_db[ue]),
            _ => Err(Error::NotScheduled { ue, rb }),
        }
    }

    /// Advances one TTI and returns the transmissions made in it.
    pub fn step(&mut self) -> Result<Vec<KpiRecord>> {
        let tti = self.tti;
        let p = &self.params;
        let (traffic, bits_per_se, n_rbs, slot) = (
            p.traffic,
            p.radio.bits_per_rb_per_se(),
            p.radio.n_rbs,
            p.radio.slot_duration_s,
        );
        let (ch_period, acc_period, bh_period) = (p.channel_update_period, p.access_sweep_period, p.backhaul_sweep_period);

        for q in &mut self.queues {
            let before = q.packets.len();
            q.arrive(&traffic, tti);
            if q.packets.len() > before {
                if let TrafficModel::Cbr { packet_bits, .. } = traffic {
                    self.offered_bits += packet_bits;
                }
            }
        }
        if tti > 0 {
            self.scenario.move_ues(slot);
        }
        let mut dirty = false;
        if tti.is_multiple_of(ch_period) {
            self.update_channel();
            dirty = true;
        }
        if tti.is_multiple_of(bh_period) {
            self.sweep_backhaul()?;
            dirty = true;
        }
        if tti.is_multiple_of(acc_period) {
            self.sweep_access()?;
            dirty = true;
        }
        if dirty {
            self.refresh_actual_sinr()?;
        }

        for (ue, q) in self.queues.iter().enumerate() {
            let head = q.packets.front().map(|p| p.arrival_tti).unwrap_or(tti);
            self.rr.update(ue, q.is_backlogged(), head);
        }
        let allocation = self.rr.schedule(tti, n_rbs);
        let mut counts = vec![0usize; self.ues.len()];
        let mut first_rb = vec![usize::MAX; self.ues.len()];
        for (rb, u) in allocation.iter().enumerate() {
            if let Some(u) = u {
                counts[*u] += 1;
                first_rb[*u] = first_rb[*u].min(rb);
            }
        }

        let mut records = Vec::new();
        for ue in 0..self.ues.len() {
            if counts[ue] == 0 {
                continue;
            }
            let link = self.links[ue].as_ref().ok_or(Error::MissingReport(ue))?;
            let sinr_db = self.compute_sinr(ue, first_rb[ue], &allocation)?;
            let mcs = link_adapt(link.sinr_est_db, &self.olla[ue], &self.table);
            let out = transmit(mcs, sinr_db, &self.table, counts[ue], bits_per_se);
            let bits = if out.ack { self.queues[ue].serve(out.tb_bits) } else { 0 };
            self.olla[ue] = olla_update(&self.olla[ue], out.ack);
            if link.decision.path == ServingPath::ViaNcr {
                self.ncr_state.fwd_access_beam = link.decision.ncr_access_beam;
            }
            records.push(KpiRecord {
                drop: self.drop,
                tti,
                ue,
                path: link.decision.path,
                mode: self.mode,
                n_rbs: counts[ue],
                sinr_db,
                mcs,
                ack: out.ack,
                bits,
            });
        }
        self.tti += 1;
        Ok(records)
    }

    /// Runs the configured number of TTIs.
    pub fn run(&mut self) -> Result<Vec<KpiRecord>> {
        let mut all = Vec::new();
        while self.tti < self.params.n_ttis {
            all.extend(self.step()?);
        }
        Ok(all)
    }
}
