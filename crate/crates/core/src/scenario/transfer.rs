use crate::agent::{AgentState, ConfigPoint};
use crate::bayes::{BayesNet, DiscreteBatch, Evidence};
use crate::cluster::{merge_donors, select_donors, ClusterState, RegistryEntry};
use crate::error::{invalid, Result};
use crate::scenario::{Device, RoundRecord, Setup};
use crate::sim::{BinningSpec, DeviceProfile, EnvState};

/// Mean fulfillment over the last `n` records.
pub fn trailing_fulfillment(records: &[RoundRecord], n: usize) -> f64 {
    let tail = &records[records.len().saturating_sub(n)..];
    if tail.is_empty() {
        return 0.0;
    }
    tail.iter().map(RoundRecord::fulfillment).sum::<f64>() / tail.len() as f64
}

/// Registry entry describing a trained device.
pub fn entry_for(device: &Device, records: &[RoundRecord]) -> Result<RegistryEntry> {
    let agent = &device.agent;
    let model = agent
        .model
        .clone()
        .ok_or_else(|| invalid("device has no model to register"))?;
    let backup = match &agent.backup_data {
        Some(b) => b.clone(),
        None => DiscreteBatch::empty(model.variables().to_vec())?,
    };
    let visited: Vec<ConfigPoint> = agent
        .grids
        .visited()
        .iter()
        .map(|&i| agent.space().point(i))
        .collect();
    Ok(RegistryEntry {
        device_type: device.profile.id.clone(),
        profile: device.profile.clone(),
        scalars: crate::cluster::Scalars {
            p: device.profile.cpu_scalar,
            g: device.profile.gpu_scalar,
            dc: device.profile.dc(),
        },
        model,
        backup_data: backup,
        visited,
        slo_rate: trailing_fulfillment(records, 5).clamp(0.0, 1.0),
    })
}

/// Trains one agent per donor profile for `rounds` rounds and registers them.
pub fn train_registry(
    setup: &Setup,
    donors: &[DeviceProfile],
    seed: u64,
    rounds: u32,
) -> Result<ClusterState> {
    let mut cluster = ClusterState::new();
    for profile in donors {
        let (records, device) = setup.train(profile, seed, rounds)?;
        cluster.register(entry_for(&device, &records)?)?;
    }
    Ok(cluster)
}

/// Evidence describing the environment of a device that runs `streams` streams.
pub fn stream_evidence(setup: &Setup, streams: u32) -> Evidence {
    let binning = BinningSpec::for_space(&setup.space);
    let mut ev = Evidence::new();
    if let Some(r) = binning.range("streams") {
        ev.insert("streams", r.labels()[r.index(f64::from(streams))].clone());
    }
    ev
}

/// A device whose agent starts from `model`, knowing the configurations in
/// `known` and holding `backup` as training data.
pub fn seeded_device(
    setup: &Setup,
    profile: &DeviceProfile,
    seed: u64,
    model: BayesNet,
    known: &[ConfigPoint],
    backup: Option<DiscreteBatch>,
) -> Result<Device> {
    let env = EnvState::default();
    let mut agent = AgentState::with_model(
        setup.space.clone(),
        setup.slos.clone(),
        setup.agent.clone(),
        model,
        known,
        &stream_evidence(setup, env.streams),
    )?;
    agent.backup_data = backup.map(|b| b.tail(setup.agent.backup_window));
    Ok(Device::new(profile.clone().with_seed(seed), env, agent))
}

/// The donors chosen for `recipient` and the model merged from them.
#[derive(Debug, Clone)]
pub struct MergedModel {
    pub donors: Vec<(String, f64)>,
    pub model: BayesNet,
    pub known: Vec<ConfigPoint>,
    pub backup: Option<DiscreteBatch>,
}

/// Classifies `recipient` against the registry, selects its donors and merges them.
pub fn merged_for(cluster: &mut ClusterState, recipient: &DeviceProfile) -> Result<MergedModel> {
    let dc = cluster.admit(recipient).dc;
    let donors = select_donors(&cluster.entries, dc);
    if donors.is_empty() {
        return Err(invalid("the registry holds no donors"));
    }
    let model = merge_donors(&donors)?;
    let mut known: Vec<ConfigPoint> = Vec::new();
    for (d, _) in &donors {
        for c in &d.visited {
            if !known.contains(c) {
                known.push(c.clone());
            }
        }
    }
    let mut backup: Option<DiscreteBatch> = None;
    for (d, _) in &donors {
        backup = Some(match backup {
            None => d.backup_data.clone(),
            Some(b) => b.union(&d.backup_data)?,
        });
    }
    Ok(MergedModel {
        donors: donors
            .iter()
            .map(|(d, w)| (d.device_type.clone(), *w))
            .collect(),
        model,
        known,
        backup,
    })
}

/// A recipient seeded with the merged donor model next to one trained from scratch.
#[derive(Debug, Clone)]
pub struct TransferOutcome {
    pub donors: Vec<(String, f64)>,
    pub transferred: Vec<RoundRecord>,
    pub scratch: Vec<RoundRecord>,
}

pub fn transfer_vs_scratch(
    setup: &Setup,
    cluster: &mut ClusterState,
    recipient: &DeviceProfile,
    seed: u64,
    rounds: u32,
) -> Result<TransferOutcome> {
    let merged = merged_for(cluster, recipient)?;
    let mut device = seeded_device(
        setup,
        recipient,
        seed,
        merged.model,
        &merged.known,
        merged.backup,
    )?;
    let transferred = device.run(&[], rounds, setup.batch_size)?;
    let scratch = setup
        .fresh_device(recipient, seed)
        .run(&[], rounds, setup.batch_size)?;
    Ok(TransferOutcome {
        donors: merged.donors,
        transferred,
        scratch,
    })
}

/// The same recipient seeded with the merged model and with each registered
/// single model.
#[derive(Debug, Clone)]
pub struct SurpriseComparison {
    pub merged: Vec<RoundRecord>,
    pub singles: Vec<(String, Vec<RoundRecord>)>,
}

pub fn surprise_transfer(
    setup: &Setup,
    cluster: &mut ClusterState,
    recipient: &DeviceProfile,
    seed: u64,
    rounds: u32,
) -> Result<SurpriseComparison> {
    let merged = merged_for(cluster, recipient)?;
    let mut singles = Vec::new();
    for entry in &cluster.entries {
        let name = &entry.device_type;
        let mut device = seeded_device(
            setup,
            recipient,
            seed,
            entry.model.clone(),
            &entry.visited,
            Some(entry.backup_data.clone()),
        )?;
        singles.push((name.clone(), device.run(&[], rounds, setup.batch_size)?));
    }
    let mut device = seeded_device(
        setup,
        recipient,
        seed,
        merged.model,
        &merged.known,
        merged.backup,
    )?;
    let merged_records = device.run(&[], rounds, setup.batch_size)?;
    Ok(SurpriseComparison {
        merged: merged_records,
        singles,
    })
}
