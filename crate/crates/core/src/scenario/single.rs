use std::time::Instant;

use crate::agent::{realized_fulfillment, AgentState, ConfigPoint, LearningAction, TraceRow};
use crate::error::Result;
use crate::sim::{
    apply_event, discretize, generate_batch, BinningSpec, DeviceProfile, EnvState, EventKind,
    ScenarioEvent,
};

/// What happened in one round of a single-device run.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: u32,
    pub surprise: f64,
    /// Realized QoE and QoS fulfillment rates of the round's rows.
    pub pv: f64,
    pub ra: f64,
    pub action: LearningAction,
    pub config: ConfigPoint,
    pub elapsed_ms: f64,
}

impl RoundRecord {
    pub fn fulfillment(&self) -> f64 {
        self.pv * self.ra
    }

    pub fn trace_row(&self) -> TraceRow {
        TraceRow {
            round: self.round,
            surprise: self.surprise,
            pv: self.pv,
            ra: self.ra,
            action: self.action,
            config: self.config.clone(),
        }
    }
}

/// A simulated device: hardware profile, environment and its agent.
#[derive(Debug, Clone)]
pub struct Device {
    pub profile: DeviceProfile,
    pub env: EnvState,
    pub agent: AgentState,
    binning: BinningSpec,
    round: u32,
}

impl Device {
    pub fn new(profile: DeviceProfile, env: EnvState, agent: AgentState) -> Self {
        let binning = BinningSpec::for_space(agent.space());
        Device {
            profile,
            env,
            agent,
            binning,
            round: 0,
        }
    }

    /// Rounds run so far.
    pub fn round(&self) -> u32 {
        self.round
    }

    /// Applies an event: SLO changes go to the agent, the rest to the environment.
    pub fn apply(&mut self, event: &ScenarioEvent) -> Result<()> {
        match &event.kind {
            EventKind::SloChange(slo) => self.agent.replace_slo(slo.clone()),
            _ => {
                self.env = apply_event(&self.env, event);
                Ok(())
            }
        }
    }

    /// Generates one batch under the current configuration and lets the agent
    /// learn from it.
    pub fn step(&mut self, batch_size: usize) -> Result<RoundRecord> {
        self.round += 1;
        let rows = generate_batch(
            &self.profile,
            &self.agent.current_config,
            &self.env,
            batch_size,
            self.round,
        )?;
        let (pv, ra) = realized_fulfillment(&rows, self.agent.slos())?;
        let batch = discretize(&rows, &self.binning, self.agent.slos())?;
        let start = Instant::now();
        let report = self.agent.iterate(&batch)?;
        Ok(RoundRecord {
            round: self.round,
            surprise: report.surprise,
            pv,
            ra,
            action: report.action,
            config: report.config,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }

    /// Runs `rounds` more rounds, applying events at the start of the round
    /// whose number they carry.
    pub fn run(
        &mut self,
        events: &[ScenarioEvent],
        rounds: u32,
        batch_size: usize,
    ) -> Result<Vec<RoundRecord>> {
        let mut out = Vec::with_capacity(rounds as usize);
        for _ in 0..rounds {
            let next = self.round + 1;
            for ev in events.iter().filter(|e| e.at_round == next) {
                self.apply(ev)?;
            }
            out.push(self.step(batch_size)?);
        }
        Ok(out)
    }
}

/// Runs `agent` on `profile` for rounds `1..=rounds`, applying events at the
/// start of their round.
pub fn run_agent(
    agent: &mut AgentState,
    profile: &DeviceProfile,
    env: &EnvState,
    events: &[ScenarioEvent],
    rounds: u32,
    batch_size: usize,
) -> Result<Vec<RoundRecord>> {
    let mut device = Device::new(profile.clone(), env.clone(), agent.clone());
    let out = device.run(events, rounds, batch_size)?;
    *agent = device.agent;
    Ok(out)
}
