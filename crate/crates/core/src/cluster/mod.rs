//! Leader-side logic: device classification, donor selection and model
//! merging, the fog model over device fulfillment and client reassignment.

mod classify;
mod fog;
mod merge;
mod registry;

pub use classify::{classified, classify_devices, Scalars};
pub use fog::{
    all_assignments, clamp_streams, congestion_bins, cumulative_value, device_delta,
    device_evidence, exhaustive_best, expected_fulfillment, fog_batch, fog_train, fog_train_with,
    greedy_assign, read_fog_csv, reassign_clients, slo_rate_bins, write_fog_csv, FogMetricsRow,
    FogOptions, SLO_RATE,
};
pub use merge::{donor_weights, merge_cpts, merge_donors, merge_via_refit, select_donors};
pub use registry::{load_registry, ClusterState, RegistryEntry, RegistrySnapshot};
