use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use edge_aci::bayes::{BayesNet, DiscreteBatch};
use edge_aci::cluster::{classify_devices, merge_cpts, merge_via_refit};
use edge_aci::scenario::{run_scenario, Policy, RunConfig, Scenario, Setup};
use edge_aci::sim::DeviceProfile;
use edge_aci::{Error, Result};

#[derive(Parser)]
#[command(
    name = "aci",
    version,
    about = "Simulated edge agents, model transfer and fog rebalancing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one of the experiment scenarios.
    Run(RunArgs),
    /// Train an agent and write its model as JSON.
    ExportModel(ExportArgs),
    /// Load a model file, validate it and describe it.
    ImportModel { path: PathBuf },
    /// Merge two model files with weights.
    MergeModels(MergeArgs),
    /// Print the classified hardware scalars of the fleet.
    Classify {
        /// Devices to classify; the default fleet when empty.
        devices: Vec<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Seeds to run; repeat for several.
    #[arg(long = "seed", default_values_t = [0u64])]
    seeds: Vec<u64>,
    #[arg(long)]
    rounds: Option<u32>,
    #[arg(long, default_value_t = 20)]
    batch_size: usize,
    /// Surprise factor that triggers structure learning.
    #[arg(long)]
    h: Option<f64>,
    /// Exploration bonus on key configurations.
    #[arg(long)]
    e: Option<f64>,
    #[arg(long)]
    prior_weight: Option<f64>,
    #[arg(long)]
    smoothing: Option<f64>,
    /// Device for single-device scenarios.
    #[arg(long, default_value = "laptop")]
    device: String,
    /// JSON list of SLO definitions.
    #[arg(long)]
    slos: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    scenario: String,
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Placement policies for `rebalance`; all when omitted.
    #[arg(long = "policy")]
    policies: Vec<String>,
    #[arg(long, default_value_t = 25)]
    clients: u32,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "model.json")]
    out: PathBuf,
}

#[derive(Args)]
struct MergeArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    wa: f64,
    #[arg(long, default_value_t = 0.5)]
    wb: f64,
    /// Training data of `b` as CSV of state labels, one column per variable;
    /// used when the structures differ.
    #[arg(long)]
    data_b: Option<PathBuf>,
    #[arg(long, default_value = "merged.json")]
    out: PathBuf,
}

fn device(name: &str) -> Result<DeviceProfile> {
    DeviceProfile::by_name(name).ok_or_else(|| Error::Invalid(format!("unknown device `{name}`")))
}

fn config(scenario: Scenario, common: &Common, out: PathBuf) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(scenario, out);
    cfg.seeds = common.seeds.clone();
    cfg.rounds = common.rounds;
    cfg.batch_size = common.batch_size;
    cfg.h = common.h.unwrap_or(cfg.h);
    cfg.e = common.e.unwrap_or(cfg.e);
    cfg.prior_weight = common.prior_weight.unwrap_or(cfg.prior_weight);
    cfg.smoothing = common.smoothing.unwrap_or(cfg.smoothing);
    cfg.device = device(&common.device)?;
    cfg.slo_path = common.slos.clone();
    Ok(cfg)
}

/// Reads a CSV of state labels whose header names the variables of `model`.
fn read_batch(model: &BayesNet, path: &PathBuf) -> Result<DiscreteBatch> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    let columns: Vec<usize> = model
        .variables()
        .iter()
        .map(|v| {
            header
                .iter()
                .position(|h| h == v.name)
                .ok_or_else(|| Error::UnknownVariable(v.name.clone()))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(
            columns
                .iter()
                .map(|&c| record[c].to_string())
                .collect::<Vec<_>>(),
        );
    }
    DiscreteBatch::from_labels(model.variables().to_vec(), &rows)
}

fn describe(model: &BayesNet) {
    println!(
        "{} variables, {} edges, sample weight {}",
        model.len(),
        model.dag().edge_count(),
        model.sample_weight()
    );
    for (p, c) in model.dag().named_edges() {
        println!("  {p} -> {c}");
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let scenario: Scenario = args.scenario.parse()?;
            let mut cfg = config(scenario, &args.common, args.out)?;
            cfg.clients = args.clients;
            if !args.policies.is_empty() {
                cfg.policies = args
                    .policies
                    .iter()
                    .map(|p| p.parse::<Policy>())
                    .collect::<Result<_>>()?;
            }
            let report = run_scenario(&cfg)?;
            println!("{}", report.summary.header.join(","));
            for row in &report.summary.rows {
                println!("{}", row.join(","));
            }
            log::info!(
                "wrote {} files to {}",
                report.files.len(),
                cfg.out_dir.display()
            );
        }
        Command::ExportModel(args) => {
            let cfg = config(Scenario::TrainScratch, &args.common, PathBuf::new())?;
            cfg.validate()?;
            let setup: Setup = cfg.setup()?;
            let (_, trained) = setup.train(&cfg.device, cfg.seeds[0], cfg.rounds())?;
            let model = trained
                .agent
                .model
                .ok_or_else(|| Error::Invalid("training produced no model".into()))?;
            model.save(&args.out)?;
            println!("wrote {}", args.out.display());
        }
        Command::ImportModel { path } => describe(&BayesNet::load(&path)?),
        Command::MergeModels(args) => {
            let a = BayesNet::load(&args.a)?;
            let b = BayesNet::load(&args.b)?;
            let merged = match (merge_cpts(&a, &b, args.wa, args.wb), &args.data_b) {
                (Err(Error::IncompatibleModels(why)), Some(data)) => {
                    log::info!("structures differ ({why}); refitting");
                    merge_via_refit(&a, &read_batch(&b, data)?, args.wa, args.wb)?
                }
                (result, _) => result?,
            };
            merged.save(&args.out)?;
            describe(&merged);
        }
        Command::Classify { devices } => {
            let profiles = if devices.is_empty() {
                DeviceProfile::fleet(0)
            } else {
                devices.iter().map(|d| device(d)).collect::<Result<_>>()?
            };
            println!("device,p,g,dc");
            for (id, s) in classify_devices(&profiles) {
                println!("{id},{},{},{}", s.p, s.g, s.dc);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ACI_LOG_LEVEL", "error"))
        .init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
