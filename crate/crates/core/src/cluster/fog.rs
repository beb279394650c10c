use std::collections::BTreeSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::bayes::{
    hill_climb, mle_fit, variable_elimination_with, BayesNet, Dag, DiscreteBatch, Evidence,
    HillClimbOptions, VariableSpec, VeOptions,
};
use crate::error::{invalid, Error, Result};
use crate::sim::RangeBins;

/// Name of the fulfillment variable in the fog model.
pub const SLO_RATE: &str = "slo_rate";

/// One device-round as seen by the leader.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FogMetricsRow {
    /// `pv * ra` of the round.
    pub slo_rate: f64,
    pub device_type: String,
    pub congestion: f64,
    pub streams: u32,
}

pub fn slo_rate_bins() -> RangeBins {
    RangeBins::new(SLO_RATE, 0.0, 1.0, 4)
}

pub fn congestion_bins() -> RangeBins {
    RangeBins::new("congestion", 0.0, 100.0, 4)
}

/// Fog-model evidence for a device of type `device_type` under `congestion`.
pub fn device_evidence(device_type: &str, congestion: f64) -> Evidence {
    let bins = congestion_bins();
    Evidence::new()
        .with("device_type", device_type)
        .with("congestion", bins.labels()[bins.index(congestion)].clone())
}

/// Options for [`fog_train_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct FogOptions {
    pub hill_climb: HillClimbOptions,
    pub smoothing: f64,
}

impl Default for FogOptions {
    fn default() -> Self {
        FogOptions {
            hill_climb: HillClimbOptions::default(),
            smoothing: 1.0,
        }
    }
}

/// Discretizes fog rows: binned slo_rate and congestion, device types and
/// stream counts as categories in sorted order.
pub fn fog_batch(history: &[FogMetricsRow]) -> Result<DiscreteBatch> {
    let types: BTreeSet<&str> = history.iter().map(|r| r.device_type.as_str()).collect();
    let streams: BTreeSet<u32> = history.iter().map(|r| r.streams).collect();
    let rate = slo_rate_bins();
    let cong = congestion_bins();
    let schema = vec![
        VariableSpec::new(SLO_RATE, rate.labels())?,
        VariableSpec::new("device_type", types.iter().copied())?,
        VariableSpec::new("congestion", cong.labels())?,
        VariableSpec::new("streams", streams.iter().map(u32::to_string))?,
    ];
    let mut batch = DiscreteBatch::empty(schema)?;
    for r in history {
        if !(0.0..=1.0).contains(&r.slo_rate) {
            return Err(invalid(format!("slo_rate {} outside [0, 1]", r.slo_rate)));
        }
        batch.push_row(&[
            rate.index(r.slo_rate),
            types
                .iter()
                .position(|t| *t == r.device_type)
                .expect("collected"),
            cong.index(r.congestion),
            streams
                .iter()
                .position(|s| *s == r.streams)
                .expect("collected"),
        ])?;
    }
    Ok(batch)
}

/// Learns the leader's model over slo_rate, device_type, congestion and streams.
pub fn fog_train(history: &[FogMetricsRow]) -> Result<BayesNet> {
    fog_train_with(history, &FogOptions::default())
}

pub fn fog_train_with(history: &[FogMetricsRow], options: &FogOptions) -> Result<BayesNet> {
    if history.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let data = fog_batch(history)?;
    let empty = Dag::new(data.schema().iter().map(|v| v.name.clone()))?;
    let dag = hill_climb(&data, &empty, &options.hill_climb)?;
    mle_fit(&dag, &data, options.smoothing)
}

/// Largest trained stream category not above `streams`, or the smallest
/// category when all are above.
pub fn clamp_streams(model: &BayesNet, streams: u32) -> Result<String> {
    let var = model.variable(
        model
            .index_of("streams")
            .ok_or_else(|| Error::UnknownVariable("streams".into()))?,
    );
    let mut known: Vec<u32> = var
        .states
        .iter()
        .map(|s| {
            s.parse()
                .map_err(|_| invalid(format!("stream label `{s}`")))
        })
        .collect::<Result<_>>()?;
    known.sort_unstable();
    let pick = known
        .iter()
        .rev()
        .find(|&&k| k <= streams)
        .or(known.first())
        .ok_or_else(|| invalid("fog model has no stream categories"))?;
    Ok(pick.to_string())
}

/// Expected slo_rate under `evidence`, taking each bin at its midpoint.
/// Evidence on variables the model lacks is ignored.
pub fn expected_fulfillment(model: &BayesNet, evidence: &Evidence) -> Result<f64> {
    let ev = evidence.filtered(|k| k != SLO_RATE && model.index_of(k).is_some());
    let dist = variable_elimination_with(model, &[SLO_RATE], &ev, None, &VeOptions::default())?;
    let bins = slo_rate_bins();
    let labels = &dist.variables()[0].states;
    let mut total = 0.0;
    for (label, p) in labels.iter().zip(dist.values()) {
        let i = bins
            .labels()
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| invalid(format!("unexpected slo_rate state `{label}`")))?;
        total += p * bins.midpoint(i);
    }
    Ok(total)
}

/// Expected fulfillment of a device with `env` evidence running `streams` clients.
pub fn device_delta(model: &BayesNet, env: &Evidence, streams: u32) -> Result<f64> {
    let mut ev = env.clone();
    ev.insert("streams", clamp_streams(model, streams)?);
    expected_fulfillment(model, &ev)
}

/// Assigns clients one at a time to the device whose value for one more
/// client is largest; ties go to the first device. `delta(d, s)` is device
/// `d`'s value at `s` streams.
pub fn greedy_assign(
    n_clients: u32,
    devices: usize,
    mut delta: impl FnMut(usize, u32) -> Result<f64>,
) -> Result<Vec<u32>> {
    let mut ass = vec![0u32; devices];
    for _ in 0..n_clients {
        let mut best: Option<(usize, f64)> = None;
        for (d, &a) in ass.iter().enumerate() {
            let v = delta(d, a + 1)?;
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((d, v));
            }
        }
        match best {
            Some((d, _)) => ass[d] += 1,
            None => return Err(invalid("no devices to assign clients to")),
        }
    }
    Ok(ass)
}

/// Greedy client reassignment over the fog model. `env` lists each device's
/// evidence (device_type, congestion) in registration order.
pub fn reassign_clients(
    fog_model: &BayesNet,
    n_clients: u32,
    env: &[(String, Evidence)],
) -> Result<Vec<(String, u32)>> {
    let ass = greedy_assign(n_clients, env.len(), |d, s| {
        device_delta(fog_model, &env[d].1, s)
    })?;
    Ok(env
        .iter()
        .zip(ass)
        .map(|((id, _), n)| (id.clone(), n))
        .collect())
}

/// Sum over devices of the values of each of its clients,
/// `sum_d sum_{k <= n_d} delta(d, k)`.
pub fn cumulative_value(curves: &[Vec<f64>], assignment: &[u32]) -> f64 {
    curves
        .iter()
        .zip(assignment)
        .map(|(c, &n)| c[..n as usize].iter().sum::<f64>())
        .sum()
}

/// Every assignment of `n_clients` to `devices`, in lexicographic order.
pub fn all_assignments(n_clients: u32, devices: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(left - k, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if devices > 0 {
        rec(n_clients, devices, &mut Vec::new(), &mut out);
    }
    out
}

/// Best cumulative value over all assignments; `curves[d][k]` is device
/// `d`'s value at `k + 1` streams.
pub fn exhaustive_best(curves: &[Vec<f64>], n_clients: u32) -> (Vec<u32>, f64) {
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    for a in all_assignments(n_clients, curves.len()) {
        let v = cumulative_value(curves, &a);
        if v > best.1 {
            best = (a, v);
        }
    }
    best
}

pub fn write_fog_csv<W: Write>(writer: W, rows: &[FogMetricsRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if rows.is_empty() {
        w.write_record(["slo_rate", "device_type", "congestion", "streams"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_fog_csv<R: Read>(reader: R) -> Result<Vec<FogMetricsRow>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| Ok(r?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_clients_all_zero() {
        let a = greedy_assign(0, 3, |_, _| Ok(0.5)).unwrap();
        assert_eq!(a, vec![0, 0, 0]);
    }

    #[test]
    fn symmetric_split_favors_first() {
        let a = greedy_assign(5, 2, |_, s| Ok(1.0 / f64::from(s))).unwrap();
        assert_eq!(a, vec![3, 2]);
    }

    #[test]
    fn assignments_enumerated() {
        let all = all_assignments(2, 3);
        assert_eq!(all.len(), 6);
        assert!(all.iter().all(|a| a.iter().sum::<u32>() == 2));
    }
}
