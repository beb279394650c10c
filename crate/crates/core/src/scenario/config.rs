use std::path::PathBuf;
use std::str::FromStr;

use crate::agent::{default_slos, load_slos, validate_slos, AgentConfig, ParamSpace, SloSpec};
use crate::error::{invalid, Result};
use crate::scenario::Setup;
use crate::sim::DeviceProfile;

/// The experiments the command-line tool can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    TrainScratch,
    MbSpeedup,
    OverheadProbe,
    DagProgress,
    FactorGrids,
    BnlTiming,
    DistShift,
    SloChange,
    TransferVsScratch,
    SurpriseTransfer,
    Rebalance,
    CongestionRecovery,
}

impl Scenario {
    pub const ALL: [Scenario; 12] = [
        Scenario::TrainScratch,
        Scenario::MbSpeedup,
        Scenario::OverheadProbe,
        Scenario::DagProgress,
        Scenario::FactorGrids,
        Scenario::BnlTiming,
        Scenario::DistShift,
        Scenario::SloChange,
        Scenario::TransferVsScratch,
        Scenario::SurpriseTransfer,
        Scenario::Rebalance,
        Scenario::CongestionRecovery,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::TrainScratch => "train_scratch",
            Scenario::MbSpeedup => "mb_speedup",
            Scenario::OverheadProbe => "overhead_probe",
            Scenario::DagProgress => "dag_progress",
            Scenario::FactorGrids => "factor_grids",
            Scenario::BnlTiming => "bnl_timing",
            Scenario::DistShift => "dist_shift",
            Scenario::SloChange => "slo_change",
            Scenario::TransferVsScratch => "transfer_vs_scratch",
            Scenario::SurpriseTransfer => "surprise_transfer",
            Scenario::Rebalance => "rebalance",
            Scenario::CongestionRecovery => "congestion_recovery",
        }
    }

    /// Rounds run when none are given.
    pub fn default_rounds(self) -> u32 {
        match self {
            Scenario::SloChange => 40,
            Scenario::MbSpeedup => 100,
            Scenario::CongestionRecovery => 45,
            Scenario::Rebalance => 30,
            _ => 20,
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
                invalid(format!(
                    "unknown scenario `{s}`; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Client placement strategy for the rebalancing experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// One stream per device, regardless of the client count.
    Single,
    Equal,
    Random,
    /// Greedy placement over the fog model.
    Infer,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Single, Policy::Equal, Policy::Random, Policy::Infer];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Single => "single",
            Policy::Equal => "equal",
            Policy::Random => "random",
            Policy::Infer => "infer",
        }
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| invalid(format!("unknown policy `{s}`")))
    }
}

/// Everything a scenario run depends on.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub seeds: Vec<u64>,
    /// Rounds per run; `None` takes the scenario's default.
    pub rounds: Option<u32>,
    pub batch_size: usize,
    pub h: f64,
    pub e: f64,
    pub smoothing: f64,
    pub prior_weight: f64,
    /// Device for single-device scenarios.
    pub device: DeviceProfile,
    pub fleet: Vec<DeviceProfile>,
    pub clients: u32,
    pub policies: Vec<Policy>,
    pub slo_path: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn new(scenario: Scenario, out_dir: impl Into<PathBuf>) -> Self {
        let agent = AgentConfig::default();
        RunConfig {
            scenario,
            seeds: vec![0],
            rounds: None,
            batch_size: 20,
            h: agent.h,
            e: agent.e,
            smoothing: agent.learn.smoothing,
            prior_weight: agent.prior_weight,
            device: DeviceProfile::laptop(),
            fleet: DeviceProfile::fleet(0),
            clients: 25,
            policies: Policy::ALL.to_vec(),
            slo_path: None,
            out_dir: out_dir.into(),
        }
    }

    pub fn rounds(&self) -> u32 {
        self.rounds.unwrap_or(self.scenario.default_rounds())
    }

    pub fn agent_config(&self) -> AgentConfig {
        let mut cfg = AgentConfig {
            h: self.h,
            e: self.e,
            prior_weight: self.prior_weight,
            ..AgentConfig::default()
        };
        cfg.learn.smoothing = self.smoothing;
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds() == 0 {
            return Err(invalid("rounds must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(invalid("batch size must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(invalid("at least one seed is required"));
        }
        if !(self.h > 0.0) || !(self.e >= 0.0) || !(self.smoothing >= 0.0) {
            return Err(invalid("h must be positive; e and smoothing non-negative"));
        }
        if !(self.prior_weight >= 0.0) {
            return Err(invalid("prior weight must be non-negative"));
        }
        if self.fleet.is_empty() {
            return Err(invalid("the fleet needs at least one device"));
        }
        Ok(())
    }

    /// SLOs from the configured file, or the defaults.
    pub fn slos(&self) -> Result<Vec<SloSpec>> {
        match &self.slo_path {
            Some(p) => {
                let slos = load_slos(p)
                    .map_err(|e| invalid(format!("cannot read SLO file {}: {e}", p.display())))?;
                validate_slos(&slos)?;
                Ok(slos)
            }
            None => Ok(default_slos()),
        }
    }

    pub fn setup(&self) -> Result<Setup> {
        Ok(Setup {
            space: ParamSpace::default_grid(),
            slos: self.slos()?,
            agent: self.agent_config(),
            batch_size: self.batch_size,
        })
    }
}
