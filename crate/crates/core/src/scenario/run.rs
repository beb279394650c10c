use std::fs;
use std::path::{Path, PathBuf};

use crate::agent::{TraceWriter, PROB_FLOOR};
use crate::cluster::write_fog_csv;
use crate::error::Result;
use crate::scenario::{
    blur_event, bnl_timing, congestion_recovery, distinct_configs, first_crossing, mb_speedup,
    overhead_probe, rebalance, stream_surge, surprise_transfer, tightened_distance,
    trailing_fulfillment, train_registry, transfer_vs_scratch, CongestionPlan, FleetPlan,
    FleetRecord, RoundRecord, RunConfig, Scenario, Setup, SHIFT_ROUND, SLO_CHANGE_ROUND,
};
use crate::sim::{value_label, DeviceProfile};

/// A small CSV table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn num(v: f64) -> String {
    format!("{v:.6}")
}

/// Files written by a scenario run and its summary table.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub summary: Table,
}

struct Out {
    dir: PathBuf,
    report: RunReport,
    timing: Table,
}

impl Out {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.report.files.push(p.clone());
        p
    }

    fn trace(&mut self, setup: &Setup, label: &str, records: &[RoundRecord]) -> Result<()> {
        let path = self.path(&format!("trace_{label}.csv"));
        let mut w = TraceWriter::new(fs::File::create(path)?, &setup.space)?;
        for r in records {
            w.write(&r.trace_row())?;
            self.timing.push(vec![
                label.to_string(),
                r.round.to_string(),
                format!("{:.3}", r.elapsed_ms),
            ]);
        }
        w.finish()?;
        Ok(())
    }

    fn fleet_log(&mut self, label: &str, log: &[FleetRecord]) -> Result<()> {
        let mut t = Table::new(&[
            "phase",
            "device",
            "round",
            "streams",
            "congestion",
            "surprise",
            "pv",
            "ra",
            "learning_action",
            "config",
        ]);
        for r in log {
            t.push(vec![
                r.phase.clone(),
                r.device.clone(),
                r.record.round.to_string(),
                r.streams.to_string(),
                value_label(r.congestion),
                num(r.record.surprise),
                num(r.record.pv),
                num(r.record.ra),
                r.record.action.to_string(),
                r.record.config.to_string(),
            ]);
            self.timing.push(vec![
                format!("{label}_{}", r.device),
                r.record.round.to_string(),
                format!("{:.3}", r.record.elapsed_ms),
            ]);
        }
        let path = self.path(&format!("trace_{label}.csv"));
        t.write(&path)
    }

    fn table(&mut self, name: &str, table: &Table) -> Result<()> {
        let path = self.path(name);
        table.write(&path)
    }

    fn text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(path, text)?;
        Ok(())
    }

    fn model(&mut self, name: &str, device: &crate::scenario::Device) -> Result<()> {
        if let Some(m) = &device.agent.model {
            self.text(name, &m.to_json()?)?;
        }
        Ok(())
    }
}

/// Runs the configured scenario for every seed and writes its artifacts
/// into the output directory.
///
/// Configuration and SLO file are checked before anything is written.
pub fn run_scenario(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let setup = config.setup()?;
    fs::create_dir_all(&config.out_dir)?;
    let mut out = Out {
        dir: config.out_dir.clone(),
        report: RunReport::default(),
        timing: Table::new(&["run", "round", "elapsed_ms"]),
    };
    let summary = match config.scenario {
        Scenario::TrainScratch => train_scratch(config, &setup, &mut out)?,
        Scenario::MbSpeedup => mb(config, &mut out)?,
        Scenario::OverheadProbe => overhead(config, &setup, &mut out)?,
        Scenario::DagProgress => dag_progress(config, &setup, &mut out)?,
        Scenario::FactorGrids => factor_grids(config, &setup, &mut out)?,
        Scenario::BnlTiming => bnl(config, &setup, &mut out)?,
        Scenario::DistShift => dist_shift(config, &setup, &mut out)?,
        Scenario::SloChange => slo_change(config, &setup, &mut out)?,
        Scenario::TransferVsScratch => transfer(config, &setup, &mut out)?,
        Scenario::SurpriseTransfer => surprise(config, &setup, &mut out)?,
        Scenario::Rebalance => rebalance_run(config, &setup, &mut out)?,
        Scenario::CongestionRecovery => congestion(config, &setup, &mut out)?,
    };
    out.table("summary.csv", &summary)?;
    if !out.timing.rows.is_empty() {
        let timing = std::mem::take(&mut out.timing);
        out.table("timing.csv", &timing)?;
    }
    out.report.summary = summary;
    Ok(out.report)
}

fn train_scratch(config: &RunConfig, setup: &Setup, out: &mut Out) -> Result<Table> {
    let mut t = Table::new(&[
        "seed",
        "first_round_above_0.85",
        "configs_after_crossing",
        "final_f",
    ]);
    for &seed in &config.seeds {
        let (records, device) = setup.train(&config.device, seed, config.rounds())?;
        out.trace(setup, &format!("seed{seed}"), &records)?;
        out.model(&format!("model_seed{seed}.json"), &device)?;
        let cross = first_crossing(&records, 0.85);
        t.push(vec![
            seed.to_string(),
            cross.map_or("none".into(), |c| (c + 1).to_string()),
            cross.map_or("0".into(), |c| distinct_configs(&records, c).to_string()),
            num(trailing_fulfillment(&records, 1)),
        ]);
    }
    Ok(t)
}

fn mb(config: &RunConfig, out: &mut Out) -> Result<Table> {
    let mut t = Table::new(&[
        "seed",
        "blanket_median_ms",
        "full_median_ms",
        "speedup",
        "max_abs_diff",
    ]);
    let mut reps = Table::new(&["seed", "rep", "blanket_ms", "full_ms"]);
    for &seed in &config.seeds {
        let timing = mb_speedup(seed, config.rounds() as usize, config.batch_size.max(100))?;
        for (i, (a, b)) in timing.blanket_ms.iter().zip(&timing.full_ms).enumerate() {
            reps.push(vec![
                seed.to_string(),
                (i + 1).to_string(),
                format!("{a:.4}"),
                format!("{b:.4}"),
            ]);
        }
        t.push(vec![
            seed.to_string(),
            format!("{:.4}", timing.blanket_median()),
            format!("{:.4}", timing.full_median()),
            num(timing.speedup()),
            format!("{:e}", timing.max_diff),
        ]);
    }
    out.table("mb_timing.csv", &reps)?;
    Ok(t)
}

fn overhead(config: &RunConfig, setup: &Setup, out: &mut Out) -> Result<Table> {
    let profiles = [DeviceProfile::xavier_cpu(), DeviceProfile::xavier_gpu()];
    let mut samples = Table::new(&["seed", "device", "round", "workload_ms", "agent_ms"]);
    let mut t = Table::new(&["seed", "device", "workload_ms", "agent_ms", "agent_share"]);
    for &seed in &config.seeds {
        let probe = overhead_probe(setup, &profiles, seed, config.rounds())?;
        for p in &profiles {
            let rows: Vec<_> = probe.iter().filter(|s| s.device == p.id).collect();
            let w: f64 = rows.iter().map(|s| s.workload_ms).sum();
            let a: f64 = rows.iter().map(|s| s.agent_ms).sum();
            t.push(vec![
                seed.to_string(),
                p.id.clone(),
                format!("{w:.3}"),
                format!("{a:.3}"),
                num(a / (a + w).max(PROB_FLOOR)),
            ]);
        }
        for s in probe {
            samples.push(vec![
                seed.to_string(),
                s.device,
                s.round.to_string(),
                format!("{:.4}", s.workload_ms),
                format!("{:.4}", s.agent_ms),
            ]);
        }
    }
    out.table("overhead.csv", &samples)?;
    Ok(t)
}

/// Rounds after which graph and grid snapshots are taken.
const SNAPSHOTS: [u32; 5] = [1, 3, 5, 10, 20];

fn dag_progress(config: &RunConfig, setup: &Setup, out: &mut Out) -> Result<Table> {
    let mut t = Table::new(&["seed", "round", "parent", "child"]);
    for &seed in &config.seeds {
        let mut device = setup.fresh_device(&config.device, seed);
        let mut records = Vec::new();
        for _ in 0..config.rounds() {
            let r = device.step(setup.batch_size)?;
            let round = r.round;
            records.push(r);
            if !SNAPSHOTS.contains(&round) {
                continue;
            }
            out.model(&format!("model_seed{seed}_round{round}.json"), &device)?;
            if let Some(m) = &device.agent.model {
                for (p, c) in m.dag().named_edges() {
                    t.push(vec![seed.to_string(), round.to_string(), p, c]);
                }
            }
        }
        out.trace(setup, &format!("seed{seed}"), &records)?;
    }
    Ok(t)
}

fn factor_grids(config: &RunConfig, setup: &Setup, out: &mut Out) -> Result<Table> {
    let mut header = vec!["seed", "round"];
    header.extend(setup.space.axes().iter().map(|a| a.name.as_str()));
    header.extend(["pv", "ra", "ig", "ig_normalized", "utility", "visited"]);
    let mut grid = Table::new(&header);
    let mut t = Table::new(&["seed", "round", "next_config"]);
    for &seed in &config.seeds {
        let mut device = setup.fresh_device(&config.device, seed);
        let mut records = Vec::new();
        for _ in 0..config.rounds() {
            let r = device.step(setup.batch_size)?;
            let round = r.round;
            records.push(r);
            if !SNAPSHOTS.contains(&round) {
                continue;
            }
            let g = &device.agent.grids;
            let (ign, u) = (g.ig_normalized(), g.utility());
            for (i, point) in setup.space.points().enumerate() {
                let mut row = vec![seed.to_string(), round.to_string()];
                row.extend(point.values().map(value_label));
                row.extend([
                    num(g.pv[i]),
                    num(g.ra[i]),
                    num(g.ig[i]),
                    num(ign[i]),
                    num(u[i]),
                    g.is_visited(i).to_string(),
                ]);
                grid.push(row);
            }
            t.push(vec![
                seed.to_string(),
                round.to_string(),
                device.agent.current_config.to_string(),
            ]);
        }
        out.trace(setup, &format!("seed{seed}"), &records)?;
    }
    out.table("grids.csv", &grid)?;
    Ok(t)
}

fn bnl(config: &RunConfig, setup: &Setup, out: &mut Out) -> Result<Table> {
    let mut t = Table::new(&["seed", "round", "rows", "edges", "strl_ms", "parl_ms"]);
    for &seed in &config.seeds {
        let (records, timings) =
            bnl_timing(setup, &DeviceProfile::xavier_gpu(), seed, config.rounds())?;
        out.trace(setup, &format!("seed{seed}"), &records)?;
        for b in timings {
            t.push(vec![
                seed.to_string(),
                b.round.to_string(),
                b.rows.to_string(),
                b.edges.to_string(),
                format!("{:.3}", b.strl_ms),
                format!("{:.3}", b.parl_ms),
            ]);
        }
    }
    Ok(t)
}

fn mean_f(records: &[RoundRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    records.iter().map(RoundRecord::fulfillment).sum::<f64>() / records.len() as f64
}

fn dist_shift(config: &RunConfig, setup: &Setup, out: &mut Out) -> Result<Table> {
    let mut t = Table::new(&[
        "seed",
        "event",
        "pre_mean",
        "post_min",
        "recovery_round",
        "final_f",
    ]);
    let shift = SHIFT_ROUND as usize;
    for &seed in &config.seeds {
        for (name, event) in [("stream", stream_surge()), ("blur", blur_event())] {
            let records = setup.run_events(&config.device, seed, &[event], config.rounds())?;
            out.trace(setup, &format!("{name}_seed{seed}"), &records)?;
            let pre = mean_f(&records[shift.saturating_sub(4)..(shift - 1).min(records.len())]);
            let post = &records[(shift - 1).min(records.len())..];
            let min = post
                .iter()
                .map(RoundRecord::fulfillment)
                .fold(f64::INFINITY, f64::min);
            let recovered = post
                .iter()
                .find(|r| (r.fulfillment() - pre).abs() <= 0.05 || r.fulfillment() > pre)
                .map(|r| r.round);
            t.push(vec![
                seed.to_string(),
                name.into(),
                num(pre),
                num(if min.is_finite() { min } else { 0.0 }),
                recovered.map_or("none".into(), |r| r.to_string()),
                num(trailing_fulfillment(&records, 1)),
            ]);
        }
    }
    Ok(t)
}

fn slo_change(config: &RunConfig, setup: &Setup, out: &mut Out) -> Result<Table> {
    let mut t = Table::new(&[
        "seed",
        "baseline_median",
        "peak_ratio",
        "rounds_above_2x",
        "learning_during_spike",
        "final_f",
    ]);
    let change = SLO_CHANGE_ROUND as usize;
    for &seed in &config.seeds {
        let records = setup.run_events(
            &config.device,
            seed,
            &[tightened_distance()],
            config.rounds(),
        )?;
        out.trace(setup, &format!("seed{seed}"), &records)?;
        let before: Vec<f64> = records
            [(change - 1).saturating_sub(5)..(change - 1).min(records.len())]
            .iter()
            .map(|r| r.surprise)
            .collect();
        let base = crate::agent::trailing_median(&before, 5).unwrap_or(0.0);
        let after = &records[(change - 1).min(records.len())..];
        let peak = after.iter().map(|r| r.surprise).fold(0.0, f64::max);
        let above = after.iter().filter(|r| r.surprise > 2.0 * base).count();
        let learned = after
            .iter()
            .take(15)
            .any(|r| r.action != crate::agent::LearningAction::None);
        t.push(vec![
            seed.to_string(),
            num(base),
            num(if base > 0.0 { peak / base } else { 0.0 }),
            above.to_string(),
            learned.to_string(),
            num(trailing_fulfillment(&records, 1)),
        ]);
    }
    Ok(t)
}

/// Devices trained before the transfer experiments.
pub fn transfer_donors() -> Vec<DeviceProfile> {
    vec![
        DeviceProfile::laptop(),
        DeviceProfile::orin(),
        DeviceProfile::nano(),
        DeviceProfile::xavier_cpu(),
    ]
}

fn transfer(config: &RunConfig, setup: &Setup, out: &mut Out) -> Result<Table> {
    let mut t = Table::new(&[
        "seed",
        "donors",
        "transferred_round1_f",
        "scratch_round1_f",
        "transferred_mean_1_5",
        "scratch_reaches_at",
    ]);
    let recipient = DeviceProfile::xavier_gpu();
    for &seed in &config.seeds {
        let mut cluster = train_registry(setup, &transfer_donors(), seed, config.rounds())?;
        out.text(&format!("registry_seed{seed}.json"), &cluster.to_json()?)?;
        let o = transfer_vs_scratch(setup, &mut cluster, &recipient, seed, config.rounds())?;
        out.trace(setup, &format!("transferred_seed{seed}"), &o.transferred)?;
        out.trace(setup, &format!("scratch_seed{seed}"), &o.scratch)?;
        let target = mean_f(&o.transferred[..o.transferred.len().min(5)]);
        let reach = o
            .scratch
            .iter()
            .find(|r| r.fulfillment() >= target)
            .map(|r| r.round);
        let donors: Vec<String> = o
            .donors
            .iter()
            .map(|(n, w)| format!("{n}:{}", value_label(*w)))
            .collect();
        t.push(vec![
            seed.to_string(),
            donors.join(" "),
            num(o.transferred.first().map_or(0.0, RoundRecord::fulfillment)),
            num(o.scratch.first().map_or(0.0, RoundRecord::fulfillment)),
            num(target),
            reach.map_or("none".into(), |r| r.to_string()),
        ]);
    }
    Ok(t)
}

fn mean_surprise(records: &[RoundRecord]) -> f64 {
    records.iter().map(|r| r.surprise).sum::<f64>() / records.len().max(1) as f64
}

fn surprise(config: &RunConfig, setup: &Setup, out: &mut Out) -> Result<Table> {
    let mut t = Table::new(&["seed", "model", "mean_surprise_1_5"]);
    let recipient = DeviceProfile::xavier_gpu();
    for &seed in &config.seeds {
        let mut cluster = train_registry(setup, &transfer_donors(), seed, 20)?;
        let c = surprise_transfer(setup, &mut cluster, &recipient, seed, config.rounds())?;
        out.trace(setup, &format!("merged_seed{seed}"), &c.merged)?;
        t.push(vec![
            seed.to_string(),
            "merged".into(),
            num(mean_surprise(&c.merged[..c.merged.len().min(5)])),
        ]);
        for (name, records) in &c.singles {
            out.trace(setup, &format!("{name}_seed{seed}"), records)?;
            t.push(vec![
                seed.to_string(),
                name.clone(),
                num(mean_surprise(&records[..records.len().min(5)])),
            ]);
        }
    }
    Ok(t)
}

fn rebalance_run(config: &RunConfig, setup: &Setup, out: &mut Out) -> Result<Table> {
    let mut t = Table::new(&[
        "seed",
        "policy",
        "assignment",
        "average",
        "weighted_average",
    ]);
    let plan = FleetPlan {
        eval_rounds: config.rounds(),
        ..FleetPlan::default()
    };
    for &seed in &config.seeds {
        let fleet = DeviceProfile::fleet(seed);
        let o = rebalance(setup, &fleet, seed, config.clients, &config.policies, &plan)?;
        out.fleet_log(&format!("probe_seed{seed}"), &o.probe_log)?;
        out.fleet_log(&format!("policies_seed{seed}"), &o.eval_log)?;
        let mut hist = Vec::new();
        write_fog_csv(&mut hist, &o.fog_history)?;
        out.text(
            &format!("fog_history_seed{seed}.csv"),
            &String::from_utf8_lossy(&hist),
        )?;
        out.text(
            &format!("fog_model_seed{seed}.json"),
            &o.fog_model.to_json()?,
        )?;
        for p in &o.outcomes {
            let a: Vec<String> = fleet
                .iter()
                .zip(&p.assignment)
                .map(|(d, n)| format!("{}:{n}", d.id))
                .collect();
            t.push(vec![
                seed.to_string(),
                p.policy.to_string(),
                a.join(" "),
                num(p.average()),
                num(p.weighted_average()),
            ]);
        }
    }
    Ok(t)
}

fn congestion(config: &RunConfig, setup: &Setup, out: &mut Out) -> Result<Table> {
    let mut t = Table::new(&[
        "seed",
        "before",
        "congested",
        "rebalanced",
        "first_assignment",
        "second_assignment",
    ]);
    let r = config.rounds().max(3);
    let first = (r * 2 / 9).max(1);
    let second = (r * 4 / 9).max(1);
    let plan = CongestionPlan {
        phases: [first, second, r - first - second],
        ..CongestionPlan::default()
    };
    let fmt = |a: &[u32]| a.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    for &seed in &config.seeds {
        let pair = vec![
            DeviceProfile::laptop().with_seed(seed),
            DeviceProfile::orin().with_seed(seed),
        ];
        let o = congestion_recovery(setup, &pair, seed, &plan)?;
        out.fleet_log(&format!("seed{seed}"), &o.log)?;
        out.text(
            &format!("fog_model_seed{seed}.json"),
            &o.fog_model.to_json()?,
        )?;
        t.push(vec![
            seed.to_string(),
            num(o.before),
            num(o.congested),
            num(o.rebalanced),
            fmt(&o.assignments[0]),
            fmt(&o.assignments[1]),
        ]);
    }
    Ok(t)
}
