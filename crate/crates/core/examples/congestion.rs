//! Congestion on one of two devices, followed by a retrained fog model.

use edge_aci::scenario::{congestion_recovery, CongestionPlan, Setup};
use edge_aci::sim::DeviceProfile;

fn main() -> edge_aci::Result<()> {
    let setup = Setup::default();
    let pair = [
        DeviceProfile::laptop().with_seed(4),
        DeviceProfile::orin().with_seed(4),
    ];
    let o = congestion_recovery(&setup, &pair, 4, &CongestionPlan::default())?;
    println!(
        "assignment before {:?}, after {:?}",
        o.assignments[0], o.assignments[1]
    );
    println!(
        "summed fulfillment: before {:.2}, congested {:.2}, rebalanced {:.2}",
        o.before, o.congested, o.rebalanced
    );
    Ok(())
}
