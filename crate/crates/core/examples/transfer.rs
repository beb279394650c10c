//! Donors register their models; a new device starts from their merge.

use edge_aci::cluster::classify_devices;
use edge_aci::scenario::{train_registry, transfer_donors, transfer_vs_scratch, Setup};
use edge_aci::sim::DeviceProfile;

fn main() -> edge_aci::Result<()> {
    let setup = Setup::default();
    let mut fleet = transfer_donors();
    let recipient = DeviceProfile::xavier_gpu();
    fleet.push(recipient.clone());
    for (id, s) in classify_devices(&fleet) {
        println!("{id:<11} p={} g={} dc={}", s.p, s.g, s.dc);
    }

    let mut cluster = train_registry(&setup, &transfer_donors(), 0, 20)?;
    let o = transfer_vs_scratch(&setup, &mut cluster, &recipient, 0, 12)?;
    println!("donors and weights: {:?}", o.donors);
    println!("round  transferred  scratch");
    for (t, s) in o.transferred.iter().zip(&o.scratch) {
        println!(
            "{:>5} {:>12.2} {:>8.2}",
            t.round,
            t.fulfillment(),
            s.fulfillment()
        );
    }
    Ok(())
}
