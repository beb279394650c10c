//! Synthetic video-analytics workload: metric generation per device,
//! scenario events and discretization into model variables.

mod discretize;
mod event;
mod profile;
mod workload;

pub use discretize::{discretize, value_label, BinningSpec, RangeBins};
pub use event::{apply_event, load_events, EventKind, ScenarioEvent};
pub use profile::DeviceProfile;
pub use workload::{
    generate_batch, read_metrics_csv, success_probability, write_metrics_csv, EnvState, MetricsRow,
    BYTES_PER_PIXEL,
};
