//! Recovers a network from samples by hill climbing and fits its CPTs.

use edge_aci::bayes::{
    hill_climb, mle_fit, random_net, sample_rows, score, Dag, DiscreteBatch, HillClimbOptions,
    ScoreKind,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> edge_aci::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let truth = random_net(&mut rng, 5, 3, 0.5, 2)?;
    let data = DiscreteBatch::new(
        truth.variables().to_vec(),
        sample_rows(&mut rng, &truth, 2000),
    )?;

    let empty = Dag::new(truth.node_names().map(String::from))?;
    let learned = hill_climb(&data, &empty, &HillClimbOptions::default())?;
    println!("true edges:    {:?}", truth.dag().named_edges());
    println!("learned edges: {:?}", learned.named_edges());
    for (name, dag) in [("true", truth.dag()), ("learned", &learned)] {
        println!(
            "{name:>7} score {:.1}",
            score(dag, &data, ScoreKind::Additive)?
        );
    }

    let fitted = mle_fit(&learned, &data, 1.0)?;
    println!(
        "fitted model has {} CPT cells",
        fitted.cpts().iter().map(|c| c.len()).sum::<usize>()
    );
    Ok(())
}
