//! Runs a named scenario the way the `aci run` command does.

use edge_aci::scenario::{run_scenario, RunConfig, Scenario};

fn main() -> edge_aci::Result<()> {
    let name = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "dist_shift".into());
    let scenario: Scenario = name.parse()?;
    let out = std::env::temp_dir().join(format!("aci_{name}"));
    let mut config = RunConfig::new(scenario, &out);
    config.seeds = vec![0, 1];
    let report = run_scenario(&config)?;
    println!("{}", report.summary.header.join(","));
    for row in &report.summary.rows {
        println!("{}", row.join(","));
    }
    println!("{} files in {}", report.files.len(), out.display());
    Ok(())
}
