use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agent::ConfigPoint;
use crate::bayes::{BayesNet, DiscreteBatch, ModelDocument};
use crate::cluster::{classify_devices, Scalars};
use crate::error::{invalid, Result};
use crate::sim::DeviceProfile;

/// What the leader knows about one device.
#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub device_type: String,
    pub profile: DeviceProfile,
    pub scalars: Scalars,
    pub model: BayesNet,
    pub backup_data: DiscreteBatch,
    /// Configurations the device has run.
    pub visited: Vec<ConfigPoint>,
    /// Latest `pv * ra`.
    pub slo_rate: f64,
}

/// Leader-side state: registered devices, stream assignment and fog model.
#[derive(Debug, Clone, Default)]
pub struct ClusterState {
    pub entries: Vec<RegistryEntry>,
    pub assignment: BTreeMap<String, u32>,
    pub fog_model: Option<BayesNet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EntryDocument {
    device_type: String,
    scalars: Scalars,
    slo_rate: f64,
    visited: Vec<ConfigPoint>,
    model: ModelDocument,
}

impl ClusterState {
    pub fn new() -> Self {
        ClusterState::default()
    }

    /// Adds or replaces the entry for `entry.device_type` and reclassifies
    /// every device against the new membership.
    pub fn register(&mut self, entry: RegistryEntry) -> Result<()> {
        if !(0.0..=1.0).contains(&entry.slo_rate) {
            return Err(invalid(format!(
                "slo_rate {} outside [0, 1]",
                entry.slo_rate
            )));
        }
        match self
            .entries
            .iter_mut()
            .find(|e| e.device_type == entry.device_type)
        {
            Some(e) => *e = entry,
            None => self.entries.push(entry),
        }
        self.reclassify();
        Ok(())
    }

    fn reclassify(&mut self) {
        let profiles: Vec<DeviceProfile> = self.entries.iter().map(|e| e.profile.clone()).collect();
        let scalars = classify_devices(&profiles);
        for e in &mut self.entries {
            e.scalars = scalars[&e.profile.id];
        }
    }

    /// Reclassifies the registry as if `newcomer` had joined and returns the
    /// newcomer's scalars.
    pub fn admit(&mut self, newcomer: &DeviceProfile) -> Scalars {
        let mut profiles: Vec<DeviceProfile> =
            self.entries.iter().map(|e| e.profile.clone()).collect();
        profiles.push(newcomer.clone());
        let scalars = classify_devices(&profiles);
        for e in &mut self.entries {
            e.scalars = scalars[&e.profile.id];
        }
        scalars[&newcomer.id]
    }

    pub fn entry(&self, device_type: &str) -> Option<&RegistryEntry> {
        self.entries.iter().find(|e| e.device_type == device_type)
    }

    pub fn total_clients(&self) -> u32 {
        self.assignment.values().sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let docs: Vec<EntryDocument> = self
            .entries
            .iter()
            .map(|e| EntryDocument {
                device_type: e.device_type.clone(),
                scalars: e.scalars,
                slo_rate: e.slo_rate,
                visited: e.visited.clone(),
                model: e.model.to_document(),
            })
            .collect();
        Ok(serde_json::to_string_pretty(&docs)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Models and scalars read back from a registry snapshot.
#[derive(Debug, Clone)]
pub struct RegistrySnapshot {
    pub device_type: String,
    pub scalars: Scalars,
    pub slo_rate: f64,
    pub visited: Vec<ConfigPoint>,
    pub model: BayesNet,
}

pub fn load_registry(text: &str) -> Result<Vec<RegistrySnapshot>> {
    let docs: Vec<EntryDocument> = serde_json::from_str(text)?;
    docs.into_iter()
        .map(|d| {
            Ok(RegistrySnapshot {
                device_type: d.device_type,
                scalars: d.scalars,
                slo_rate: d.slo_rate,
                visited: d.visited,
                model: BayesNet::from_document(&d.model)?,
            })
        })
        .collect()
}
