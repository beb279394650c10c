//! The fog leader learns device capacity and places 25 clients on five devices.

use edge_aci::scenario::{rebalance, FleetPlan, Policy, Setup};
use edge_aci::sim::DeviceProfile;

fn main() -> edge_aci::Result<()> {
    let setup = Setup::default();
    let fleet = DeviceProfile::fleet(2);
    let plan = FleetPlan {
        levels: vec![1, 2, 4, 6, 8, 10],
        ..FleetPlan::default()
    };
    let o = rebalance(&setup, &fleet, 2, 25, &Policy::ALL, &plan)?;
    println!("fog model edges: {:?}", o.fog_model.dag().named_edges());
    let ids: Vec<&str> = fleet.iter().map(|p| p.id.as_str()).collect();
    println!("{:<7} {:?}", "policy", ids);
    for p in &o.outcomes {
        println!(
            "{:<7} {:?} mean f {:.2}, stream-weighted {:.2}",
            p.policy.to_string(),
            p.assignment,
            p.average(),
            p.weighted_average()
        );
    }
    Ok(())
}
