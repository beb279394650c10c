use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bayes::{BayesNet, Evidence};
use crate::cluster::{
    classified, device_evidence, fog_train_with, reassign_clients, FogMetricsRow, FogOptions,
};
use crate::error::Result;
use crate::scenario::{Device, Policy, RoundRecord, Setup};
use crate::sim::DeviceProfile;

/// Phases of the fleet experiments, in rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetPlan {
    /// Rounds each device trains at one stream before probing.
    pub warmup: u32,
    /// Stream counts every device is probed with.
    pub levels: Vec<u32>,
    pub rounds_per_level: u32,
    /// Rounds each policy runs before it is scored.
    pub eval_rounds: u32,
    /// Final rounds whose mean fulfillment scores a device.
    pub eval_tail: usize,
    /// Each probe level and each policy starts from untrained agents.
    pub fresh: bool,
    /// Only the last rounds of each probe level feed the fog model.
    pub fog_tail: Option<usize>,
    pub fog: FogOptions,
}

impl Default for FleetPlan {
    fn default() -> Self {
        FleetPlan {
            warmup: 15,
            levels: (1..=10).collect(),
            rounds_per_level: 8,
            eval_rounds: 30,
            eval_tail: 10,
            fresh: false,
            fog_tail: Some(4),
            fog: FogOptions::default(),
        }
    }
}

/// One device-round of a fleet run.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetRecord {
    pub phase: String,
    pub device: String,
    pub streams: u32,
    pub congestion: f64,
    pub record: RoundRecord,
}

impl FleetRecord {
    pub fn fog_row(&self) -> FogMetricsRow {
        FogMetricsRow {
            slo_rate: self.record.fulfillment().clamp(0.0, 1.0),
            device_type: self.device.clone(),
            congestion: self.congestion,
            streams: self.streams,
        }
    }
}

fn step_all(
    devices: &mut [Device],
    phase: &str,
    rounds: u32,
    batch_size: usize,
    log: &mut Vec<FleetRecord>,
) -> Result<()> {
    for _ in 0..rounds {
        for d in devices.iter_mut() {
            if d.env.streams == 0 {
                continue;
            }
            let record = d.step(batch_size)?;
            log.push(FleetRecord {
                phase: phase.into(),
                device: d.profile.id.clone(),
                streams: d.env.streams,
                congestion: d.env.congestion,
                record,
            });
        }
    }
    Ok(())
}

/// Fresh devices for `profiles`, classified against each other.
pub fn fleet_devices(setup: &Setup, profiles: &[DeviceProfile], seed: u64) -> Vec<Device> {
    classified(profiles)
        .iter()
        .enumerate()
        .map(|(i, p)| {
            setup.fresh_device(p, seed.wrapping_mul(1_000_003).wrapping_add(i as u64 + 1))
        })
        .collect()
}

/// Warms every device up, then probes each stream level; returns the log.
pub fn probe_fleet(
    setup: &Setup,
    devices: &mut [Device],
    plan: &FleetPlan,
) -> Result<Vec<FleetRecord>> {
    let mut log = Vec::new();
    step_all(devices, "warmup", plan.warmup, setup.batch_size, &mut log)?;
    let start: Vec<Device> = devices.to_vec();
    for &level in &plan.levels {
        if plan.fresh {
            devices.clone_from_slice(&start);
        }
        for d in devices.iter_mut() {
            d.env.streams = level;
        }
        let mut level_log = Vec::new();
        step_all(
            devices,
            "probe",
            plan.rounds_per_level,
            setup.batch_size,
            &mut level_log,
        )?;
        if let Some(tail) = plan.fog_tail {
            let adapt = level_log.len().saturating_sub(tail * devices.len());
            for r in &mut level_log[..adapt] {
                r.phase = "adapt".into();
            }
        }
        log.extend(level_log);
    }
    Ok(log)
}

fn fog_rows(log: &[FleetRecord]) -> Vec<FogMetricsRow> {
    log.iter()
        .filter(|r| r.phase != "warmup" && r.phase != "adapt")
        .map(FleetRecord::fog_row)
        .collect()
}

fn device_env(devices: &[Device]) -> Vec<(String, Evidence)> {
    devices
        .iter()
        .map(|d| {
            (
                d.profile.id.clone(),
                device_evidence(&d.profile.id, d.env.congestion),
            )
        })
        .collect()
}

/// Client counts per device under `policy`.
pub fn assign(
    policy: Policy,
    clients: u32,
    devices: &[Device],
    fog: &BayesNet,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u32>> {
    let n = devices.len();
    Ok(match policy {
        Policy::Single => vec![1; n],
        Policy::Equal => (0..n)
            .map(|i| clients / n as u32 + u32::from((i as u32) < clients % n as u32))
            .collect(),
        Policy::Random => {
            let mut a = vec![0; n];
            for _ in 0..clients {
                a[rng.gen_range(0..n)] += 1;
            }
            a
        }
        Policy::Infer => reassign_clients(fog, clients, &device_env(devices))?
            .into_iter()
            .map(|(_, c)| c)
            .collect(),
    })
}

/// Cluster fulfillment under one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyOutcome {
    pub policy: Policy,
    pub assignment: Vec<u32>,
    /// Mean fulfillment of each device over the scored rounds; `None` for
    /// devices without clients.
    pub fulfillment: Vec<Option<f64>>,
}

impl PolicyOutcome {
    /// Mean over devices that serve at least one client.
    pub fn average(&self) -> f64 {
        let v: Vec<f64> = self.fulfillment.iter().flatten().copied().collect();
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    }

    /// Mean weighted by each device's stream count.
    pub fn weighted_average(&self) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (f, &n) in self.fulfillment.iter().zip(&self.assignment) {
            if let Some(f) = f {
                num += f * f64::from(n);
                den += f64::from(n);
            }
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }
}

fn score(log: &[FleetRecord], devices: &[Device], tail: usize) -> Vec<Option<f64>> {
    devices
        .iter()
        .map(|d| {
            let f: Vec<f64> = log
                .iter()
                .filter(|r| r.device == d.profile.id)
                .map(|r| r.record.fulfillment())
                .collect();
            if d.env.streams == 0 || f.is_empty() {
                None
            } else {
                let t = &f[f.len().saturating_sub(tail)..];
                Some(t.iter().sum::<f64>() / t.len() as f64)
            }
        })
        .collect()
}

/// Result of the rebalancing experiment for one seed.
#[derive(Debug, Clone)]
pub struct RebalanceOutcome {
    pub fog_model: BayesNet,
    pub fog_history: Vec<FogMetricsRow>,
    pub probe_log: Vec<FleetRecord>,
    pub outcomes: Vec<PolicyOutcome>,
    pub eval_log: Vec<FleetRecord>,
}

impl RebalanceOutcome {
    pub fn outcome(&self, policy: Policy) -> Option<&PolicyOutcome> {
        self.outcomes.iter().find(|o| o.policy == policy)
    }
}

/// Probes the fleet, trains the fog model, then scores each policy from the
/// same trained devices.
pub fn rebalance(
    setup: &Setup,
    profiles: &[DeviceProfile],
    seed: u64,
    clients: u32,
    policies: &[Policy],
    plan: &FleetPlan,
) -> Result<RebalanceOutcome> {
    let mut devices = fleet_devices(setup, profiles, seed);
    let probe_log = probe_fleet(setup, &mut devices, plan)?;
    let fog_history = fog_rows(&probe_log);
    let fog_model = fog_train_with(&fog_history, &plan.fog)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes = Vec::new();
    let mut eval_log = Vec::new();
    for &policy in policies {
        let assignment = assign(policy, clients, &devices, &fog_model, &mut rng)?;
        let mut trial = if plan.fresh {
            fleet_devices(setup, profiles, seed)
        } else {
            devices.clone()
        };
        for (d, &n) in trial.iter_mut().zip(&assignment) {
            d.env.streams = n;
        }
        let mut log = Vec::new();
        step_all(
            &mut trial,
            policy.name(),
            plan.eval_rounds,
            setup.batch_size,
            &mut log,
        )?;
        outcomes.push(PolicyOutcome {
            policy,
            fulfillment: score(&log, &trial, plan.eval_tail),
            assignment,
        });
        eval_log.extend(log);
    }
    Ok(RebalanceOutcome {
        fog_model,
        fog_history,
        probe_log,
        outcomes,
        eval_log,
    })
}

/// Timeline of the congestion experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionPlan {
    pub fleet: FleetPlan,
    pub clients: u32,
    /// Added latency on the first device, in ms.
    pub congestion: f64,
    /// Rounds before congestion, with congestion, and after rebalancing.
    pub phases: [u32; 3],
    /// Final rounds of a phase that score it.
    pub tail: usize,
}

impl Default for CongestionPlan {
    fn default() -> Self {
        CongestionPlan {
            fleet: FleetPlan::default(),
            clients: 10,
            congestion: 80.0,
            phases: [10, 20, 15],
            tail: 5,
        }
    }
}

/// Summed fulfillment at the end of each phase.
#[derive(Debug, Clone)]
pub struct CongestionOutcome {
    pub before: f64,
    pub congested: f64,
    pub rebalanced: f64,
    pub assignments: [Vec<u32>; 2],
    pub log: Vec<FleetRecord>,
    pub fog_model: BayesNet,
}

fn summed(log: &[FleetRecord], phase: &str, devices: &[Device], tail: usize) -> f64 {
    devices
        .iter()
        .map(|d| {
            let f: Vec<f64> = log
                .iter()
                .filter(|r| r.phase == phase && r.device == d.profile.id)
                .map(|r| r.record.fulfillment())
                .collect();
            let t = &f[f.len().saturating_sub(tail)..];
            if t.is_empty() {
                0.0
            } else {
                t.iter().sum::<f64>() / t.len() as f64
            }
        })
        .sum()
}

/// Two or more devices share the clients by the fog model; the first device
/// then suffers congestion, and after a while the leader retrains its model
/// and reassigns.
pub fn congestion_recovery(
    setup: &Setup,
    profiles: &[DeviceProfile],
    seed: u64,
    plan: &CongestionPlan,
) -> Result<CongestionOutcome> {
    let mut devices = fleet_devices(setup, profiles, seed);
    let mut log = probe_fleet(setup, &mut devices, &plan.fleet)?;
    let fog = fog_train_with(&fog_rows(&log), &plan.fleet.fog)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = assign(Policy::Infer, plan.clients, &devices, &fog, &mut rng)?;
    for (d, &n) in devices.iter_mut().zip(&first) {
        d.env.streams = n;
    }
    step_all(
        &mut devices,
        "before",
        plan.phases[0],
        setup.batch_size,
        &mut log,
    )?;
    devices[0].env.congestion = plan.congestion;
    step_all(
        &mut devices,
        "congested",
        plan.phases[1],
        setup.batch_size,
        &mut log,
    )?;
    let fog = fog_train_with(&fog_rows(&log), &plan.fleet.fog)?;
    let second = assign(Policy::Infer, plan.clients, &devices, &fog, &mut rng)?;
    for (d, &n) in devices.iter_mut().zip(&second) {
        d.env.streams = n;
    }
    step_all(
        &mut devices,
        "rebalanced",
        plan.phases[2],
        setup.batch_size,
        &mut log,
    )?;
    Ok(CongestionOutcome {
        before: summed(&log, "before", &devices, plan.tail),
        congested: summed(&log, "congested", &devices, plan.tail),
        rebalanced: summed(&log, "rebalanced", &devices, plan.tail),
        assignments: [first, second],
        log,
        fog_model: fog,
    })
}
