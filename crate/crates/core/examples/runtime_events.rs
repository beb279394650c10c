//! A stream surge, a blur and a tightened SLO hitting a trained agent.

use edge_aci::scenario::{blur_event, stream_surge, tightened_distance, Setup};
use edge_aci::sim::DeviceProfile;

fn main() -> edge_aci::Result<()> {
    let setup = Setup::default();
    let laptop = DeviceProfile::laptop();
    for (name, event, rounds) in [
        ("streams 1 -> 6", stream_surge(), 20),
        ("blur", blur_event(), 20),
        ("distance < 20", tightened_distance(), 25),
    ] {
        let at = event.at_round;
        let records = setup.run_events(&laptop, 3, &[event], rounds)?;
        let f: Vec<String> = records
            .iter()
            .map(|r| format!("{:.2}", r.fulfillment()))
            .collect();
        let s: Vec<String> = records
            .iter()
            .map(|r| format!("{:.0}", r.surprise))
            .collect();
        println!("{name} at round {at}");
        println!("  f:        {}", f.join(" "));
        println!("  surprise: {}", s.join(" "));
    }
    Ok(())
}
