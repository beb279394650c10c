//! Experiment drivers shared by the examples and the command-line tool.

mod config;
mod experiments;
mod fleet;
mod run;
mod single;
mod timing;
mod transfer;

pub use config::{Policy, RunConfig, Scenario};
pub use experiments::{
    blur_event, distinct_configs, first_crossing, stream_surge, tightened_distance, Setup,
    SHIFT_ROUND, SLO_CHANGE_ROUND,
};
pub use fleet::{
    assign, congestion_recovery, fleet_devices, probe_fleet, rebalance, CongestionOutcome,
    CongestionPlan, FleetPlan, FleetRecord, PolicyOutcome, RebalanceOutcome,
};
pub use run::{run_scenario, transfer_donors, RunReport, Table};
pub use single::{run_agent, Device, RoundRecord};
pub use timing::{
    bnl_timing, mb_speedup, overhead_probe, reference_net, BnlTiming, MbTiming, OverheadSample,
};
pub use transfer::{
    entry_for, merged_for, seeded_device, stream_evidence, surprise_transfer, trailing_fulfillment,
    train_registry, transfer_vs_scratch, MergedModel, SurpriseComparison, TransferOutcome,
};
