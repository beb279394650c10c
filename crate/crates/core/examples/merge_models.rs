//! Weighted merging of two models, by CPT cells or by refitting on data.

use edge_aci::bayes::{random_cpts, random_net, sample_rows, BayesNet, DiscreteBatch};
use edge_aci::cluster::{donor_weights, merge_cpts, merge_via_refit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> edge_aci::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random_net(&mut rng, 4, 2, 0.6, 2)?;
    let b = BayesNet::new(
        a.variables().to_vec(),
        a.dag().clone(),
        random_cpts(&mut rng, a.variables(), a.dag())?,
        0.0,
    )?;

    // capacities 2 and 5 around a newcomer of capacity 3
    let w = donor_weights(&[2, 5], 3);
    println!("donor weights {w:?}");
    let merged = merge_cpts(&a, &b, w[0].1, w[1].1)?;
    println!("first CPT a:      {:?}", a.cpt(0).values());
    println!("first CPT b:      {:?}", b.cpt(0).values());
    println!("first CPT merged: {:?}", merged.cpt(0).values());

    let other = random_net(&mut rng, 4, 2, 0.6, 2)?;
    let data = DiscreteBatch::new(
        other.variables().to_vec(),
        sample_rows(&mut rng, &other, 200),
    )?;
    match merge_cpts(&a, &other, 0.5, 0.5) {
        Ok(_) => println!("structures happen to agree"),
        Err(e) => {
            println!("cellwise merge refused: {e}");
            let refit = merge_via_refit(&a, &data, 0.5, 0.5)?;
            println!("refit keeps edges {:?}", refit.dag().named_edges());
        }
    }
    Ok(())
}
