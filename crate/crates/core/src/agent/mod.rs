//! The per-device active-inference loop: SLOs, surprise, behavioral
//! factors over the configuration grid, and model learning gated by surprise.

mod factors;
mod interp;
mod slo;
mod space;
mod state;

pub use factors::{
    best_configuration, best_index, information_gain, information_gain_with, joint_fulfillment,
    pragmatic_value, risk_assigned, surprise, surprise_with, trailing_median, Complexity,
    FactorGrids, IgOptions, IgScale, SurpriseMode, PROB_FLOOR,
};
pub use interp::{interpolate_grid, interpolate_points};
pub use slo::{
    default_slos, evaluate_slos, load_slos, realized_fulfillment, validate_slos, SloKind, SloOp,
    SloSpec, SloValue, Tier,
};
pub use space::{Axis, ConfigPoint, ParamSpace};
pub use state::{AgentConfig, AgentState, IterationReport, LearningAction, TraceRow, TraceWriter};
