//! One agent learns to configure a simulated laptop from scratch.

use edge_aci::scenario::{first_crossing, Setup};
use edge_aci::sim::DeviceProfile;

fn main() -> edge_aci::Result<()> {
    let setup = Setup::default();
    let (records, device) = setup.train(&DeviceProfile::laptop(), 1, 20)?;
    println!("round  surprise    pv    ra  action  config");
    for r in &records {
        println!(
            "{:>5} {:>9.1} {:>5.2} {:>5.2}  {:<6}  {}",
            r.round, r.surprise, r.pv, r.ra, r.action, r.config
        );
    }
    match first_crossing(&records, 0.85) {
        Some(i) => println!("fulfillment above 0.85 from round {}", i + 1),
        None => println!("never above 0.85"),
    }
    if let Some(model) = &device.agent.model {
        println!("learned edges: {:?}", model.dag().named_edges());
    }
    Ok(())
}
