//! Radio access layer: repeater, sweeps, scheduling, link adaptation and the
//! per-TTI simulation.

pub mod link_adaptation;
pub mod ncr;
pub mod panel;
pub mod scheduler;
pub mod sim;
pub mod sinr;
pub mod sweep;
pub mod traffic;

pub use link_adaptation::{link_adapt, olla_update, transmit, McsRow, McsTable, OllaState, TxOutcome};
pub use ncr::{ncr_gain, NcrState};
pub use panel::Panel;
pub use scheduler::{rr_schedule, RoundRobin};
pub use sim::{
    ChannelParams, DirectionEstimate, KpiRecord, Mode, NodeConfig, RadioParams, SimParams, Simulation,
};
pub use sinr::{RbPowers, SinrBreakdown};
pub use sweep::{
    backhaul_sweep, beam_sweep, serving_decision, BackhaulReport, LinkModels, Network, ServingDecision, ServingPath,
    UeReport,
};
pub use traffic::{BearerQueue, TrafficModel};
