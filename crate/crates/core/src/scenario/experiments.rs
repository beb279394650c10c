use crate::agent::{
    default_slos, AgentConfig, AgentState, ParamSpace, SloKind, SloOp, SloSpec, SloValue,
};
use crate::error::Result;
use crate::scenario::{Device, RoundRecord};
use crate::sim::{DeviceProfile, EnvState, EventKind, ScenarioEvent};

/// Shared ingredients of every agent run.
#[derive(Debug, Clone)]
pub struct Setup {
    pub space: ParamSpace,
    pub slos: Vec<SloSpec>,
    pub agent: AgentConfig,
    pub batch_size: usize,
}

impl Default for Setup {
    fn default() -> Self {
        Setup {
            space: ParamSpace::default_grid(),
            slos: default_slos(),
            agent: AgentConfig::default(),
            batch_size: 20,
        }
    }
}

impl Setup {
    pub fn fresh_agent(&self) -> AgentState {
        AgentState::new(self.space.clone(), self.slos.clone(), self.agent.clone())
    }

    /// A device with a model-less agent, one stream and `seed` as noise seed.
    pub fn fresh_device(&self, profile: &DeviceProfile, seed: u64) -> Device {
        Device::new(
            profile.clone().with_seed(seed),
            EnvState::default(),
            self.fresh_agent(),
        )
    }

    /// Trains a fresh agent for `rounds` rounds without events.
    pub fn train(
        &self,
        profile: &DeviceProfile,
        seed: u64,
        rounds: u32,
    ) -> Result<(Vec<RoundRecord>, Device)> {
        let mut device = self.fresh_device(profile, seed);
        let records = device.run(&[], rounds, self.batch_size)?;
        Ok((records, device))
    }

    /// Trains a fresh agent while `events` fire.
    pub fn run_events(
        &self,
        profile: &DeviceProfile,
        seed: u64,
        events: &[ScenarioEvent],
        rounds: u32,
    ) -> Result<Vec<RoundRecord>> {
        self.fresh_device(profile, seed)
            .run(events, rounds, self.batch_size)
    }
}

/// Round at which the distribution-shift events fire.
pub const SHIFT_ROUND: u32 = 5;

/// Round at which the distance SLO is tightened.
pub const SLO_CHANGE_ROUND: u32 = 10;

/// Streams jump from 1 to 6.
pub fn stream_surge() -> ScenarioEvent {
    ScenarioEvent::new(SHIFT_ROUND, EventKind::StreamChange(6))
}

/// 5 px of blur on the video.
pub fn blur_event() -> ScenarioEvent {
    ScenarioEvent::new(SHIFT_ROUND, EventKind::Blur(5.0))
}

/// The distance SLO tightened from 50 to 20.
pub fn tightened_distance() -> ScenarioEvent {
    ScenarioEvent::new(
        SLO_CHANGE_ROUND,
        EventKind::SloChange(SloSpec::new(
            "distance",
            "distance",
            SloOp::Lt,
            SloValue::Number(20.0),
            SloKind::QoE,
        )),
    )
}

/// Index of the first round with fulfillment at least `threshold`.
pub fn first_crossing(records: &[RoundRecord], threshold: f64) -> Option<usize> {
    records.iter().position(|r| r.fulfillment() >= threshold)
}

/// Number of distinct configurations run from `from` on.
pub fn distinct_configs(records: &[RoundRecord], from: usize) -> usize {
    let mut seen: Vec<String> = records[from..]
        .iter()
        .map(|r| r.config.to_string())
        .collect();
    seen.sort();
    seen.dedup();
    seen.len()
}
