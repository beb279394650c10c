use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::agent::{surprise_with, Complexity, SurpriseMode};
use crate::bayes::{
    parl_update, random_cpts, sample_rows, strl_update_with, BayesNet, Dag, DiscreteBatch,
    VariableSpec,
};
use crate::error::Result;
use crate::scenario::{RoundRecord, Setup};
use crate::sim::{discretize, generate_batch, BinningSpec, DeviceProfile};

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A ten-variable video-processing network in which the blanket of
/// `network` is `{bitrate, streams}`.
pub fn reference_net(seed: u64) -> Result<BayesNet> {
    let grid = |values: &[u32]| values.iter().map(u32::to_string).collect::<Vec<_>>();
    let vars = vec![
        VariableSpec::new("pixel", grid(&[120, 180, 240, 300, 360, 420, 480]))?,
        VariableSpec::new("fps", grid(&[5, 10, 14, 18, 22, 26, 30]))?,
        VariableSpec::new("bitrate", labels("b", 4))?,
        VariableSpec::new("streams", labels("b", 4))?,
        VariableSpec::new("network", ["false", "true"])?,
        VariableSpec::new("cpu", labels("b", 4))?,
        VariableSpec::new("memory", labels("b", 4))?,
        VariableSpec::new("consumption", labels("b", 4))?,
        VariableSpec::new("in_time", ["false", "true"])?,
        VariableSpec::new("success", ["false", "true"])?,
    ];
    let dag = Dag::with_edges(
        vars.iter().map(|v| v.name.clone()),
        &[
            ("pixel", "bitrate"),
            ("fps", "bitrate"),
            ("bitrate", "network"),
            ("streams", "network"),
            ("bitrate", "cpu"),
            ("streams", "cpu"),
            ("cpu", "consumption"),
            ("cpu", "in_time"),
            ("fps", "in_time"),
            ("pixel", "success"),
        ],
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cpts = random_cpts(&mut rng, &vars, &dag)?;
    BayesNet::new(vars, dag, cpts, 0.0)
}

/// Per-repetition surprise timings of the two inference modes.
#[derive(Debug, Clone, PartialEq)]
pub struct MbTiming {
    pub blanket_ms: Vec<f64>,
    pub full_ms: Vec<f64>,
    /// Largest difference between the two surprise values.
    pub max_diff: f64,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 0 {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    }
}

impl MbTiming {
    pub fn blanket_median(&self) -> f64 {
        median(&self.blanket_ms)
    }

    pub fn full_median(&self) -> f64 {
        median(&self.full_ms)
    }

    /// Relative time saved by the blanket mode, by median.
    pub fn speedup(&self) -> f64 {
        1.0 - self.blanket_median() / self.full_median()
    }
}

/// Times the surprise of `network` on `rows` sampled rows, alternating the
/// blanket and full-network modes for `reps` repetitions.
pub fn mb_speedup(seed: u64, reps: usize, rows: usize) -> Result<MbTiming> {
    let model = reference_net(seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let batch = DiscreteBatch::new(
        model.variables().to_vec(),
        sample_rows(&mut rng, &model, rows),
    )?;
    let mut out = MbTiming {
        blanket_ms: Vec::with_capacity(reps),
        full_ms: Vec::with_capacity(reps),
        max_diff: 0.0,
    };
    let time = |mode| -> Result<(f64, f64)> {
        let start = Instant::now();
        let s = surprise_with(&model, &batch, &["network"], mode, Complexity::CptEntries)?;
        Ok((s, start.elapsed().as_secs_f64() * 1e3))
    };
    for _ in 0..reps {
        let (a, ta) = time(SurpriseMode::Blanket)?;
        let (b, tb) = time(SurpriseMode::FullNetwork)?;
        out.blanket_ms.push(ta);
        out.full_ms.push(tb);
        out.max_diff = out.max_diff.max((a - b).abs());
    }
    Ok(out)
}

/// Learning cost after one round of training.
#[derive(Debug, Clone, PartialEq)]
pub struct BnlTiming {
    pub round: u32,
    pub rows: usize,
    pub strl_ms: f64,
    pub parl_ms: f64,
    pub edges: usize,
}

/// Trains on `profile` and, after every round, times a full structure
/// retrain and a parameter update on everything seen so far.
pub fn bnl_timing(
    setup: &Setup,
    profile: &DeviceProfile,
    seed: u64,
    rounds: u32,
) -> Result<(Vec<RoundRecord>, Vec<BnlTiming>)> {
    let mut device = setup.fresh_device(profile, seed);
    let mut records = Vec::new();
    let mut timings = Vec::new();
    let mut seen: Option<DiscreteBatch> = None;
    let binning = BinningSpec::for_space(&setup.space);
    for _ in 0..rounds {
        let round = device.round() + 1;
        let rows = generate_batch(
            &device.profile,
            &device.agent.current_config,
            &device.env,
            setup.batch_size,
            round,
        )?;
        let batch = discretize(&rows, &binning, device.agent.slos())?;
        records.push(device.step(setup.batch_size)?);
        let all = match seen.take() {
            Some(s) => s.union(&batch)?,
            None => batch.clone(),
        };
        let empty = DiscreteBatch::empty(all.schema().to_vec())?;
        let start = Instant::now();
        let (model, _) = strl_update_with(None, &all, &empty, &setup.agent.learn)?;
        let strl_ms = start.elapsed().as_secs_f64() * 1e3;
        let start = Instant::now();
        parl_update(&model, &batch, setup.agent.prior_weight)?;
        let parl_ms = start.elapsed().as_secs_f64() * 1e3;
        timings.push(BnlTiming {
            round,
            rows: all.len(),
            strl_ms,
            parl_ms,
            edges: model.dag().edge_count(),
        });
        seen = Some(all);
    }
    Ok((records, timings))
}

/// Per-round compute split between the workload and the agent.
#[derive(Debug, Clone, PartialEq)]
pub struct OverheadSample {
    pub device: String,
    pub round: u32,
    pub workload_ms: f64,
    pub agent_ms: f64,
}

/// Times batch generation against the agent's iteration on each profile.
pub fn overhead_probe(
    setup: &Setup,
    profiles: &[DeviceProfile],
    seed: u64,
    rounds: u32,
) -> Result<Vec<OverheadSample>> {
    let mut out = Vec::new();
    for profile in profiles {
        let mut device = setup.fresh_device(profile, seed);
        for _ in 0..rounds {
            let start = Instant::now();
            generate_batch(
                &device.profile,
                &device.agent.current_config,
                &device.env,
                setup.batch_size,
                device.round() + 1,
            )?;
            let workload_ms = start.elapsed().as_secs_f64() * 1e3;
            let r = device.step(setup.batch_size)?;
            out.push(OverheadSample {
                device: profile.id.clone(),
                round: r.round,
                workload_ms,
                agent_ms: r.elapsed_ms,
            });
        }
    }
    Ok(out)
}
