use rand::seq::SliceRandom;
use rand::Rng;

use crate::bayes::{BayesNet, Cpt, Dag, VariableSpec};
use crate::error::Result;

/// A random network on `n` variables with cardinalities in `2..=max_card`.
/// Each ordered pair along a random topological order becomes an edge with
/// probability `edge_prob`, up to `max_parents` parents per node.
pub fn random_net<R: Rng>(
    rng: &mut R,
    n: usize,
    max_card: usize,
    edge_prob: f64,
    max_parents: usize,
) -> Result<BayesNet> {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let vars: Vec<VariableSpec> = names
        .iter()
        .map(|name| {
            let card = rng.gen_range(2..=max_card.max(2));
            VariableSpec::new(name.clone(), (0..card).map(|s| format!("s{s}")))
        })
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut dag = Dag::new(names)?;
    for (j, &child) in order.iter().enumerate() {
        for &parent in &order[..j] {
            if dag.parents(child).len() < max_parents && rng.gen_bool(edge_prob) {
                dag.add_edge(parent, child)?;
            }
        }
    }
    let cpts = random_cpts(rng, &vars, &dag)?;
    BayesNet::new(vars, dag, cpts, 0.0)
}

/// Strictly positive random CPTs for `dag`.
pub fn random_cpts<R: Rng>(rng: &mut R, vars: &[VariableSpec], dag: &Dag) -> Result<Vec<Cpt>> {
    (0..vars.len())
        .map(|i| {
            let parents = dag.parents(i).to_vec();
            let pcards: Vec<usize> = parents.iter().map(|&p| vars[p].cardinality()).collect();
            let card = vars[i].cardinality();
            let rows: usize = pcards.iter().product();
            let mut values = Vec::with_capacity(rows * card);
            for _ in 0..rows {
                let raw: Vec<f64> = (0..card).map(|_| rng.gen_range(0.05..1.0)).collect();
                let sum: f64 = raw.iter().sum();
                values.extend(raw.iter().map(|v| v / sum));
            }
            Cpt::new(parents, card, pcards, values)
        })
        .collect()
}

/// Draws `n` rows by ancestral sampling, as state indices in variable order.
pub fn sample_rows<R: Rng>(rng: &mut R, model: &BayesNet, n: usize) -> Vec<Vec<usize>> {
    let order = model.dag().topological_order();
    (0..n)
        .map(|_| {
            let mut row = vec![0usize; model.len()];
            for &v in &order {
                let cpt = model.cpt(v);
                let ps: Vec<usize> = cpt.parents().iter().map(|&p| row[p]).collect();
                let probs = cpt.row(cpt.row_index(&ps));
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                row[v] = probs.len() - 1;
                for (k, p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        row[v] = k;
                        break;
                    }
                }
            }
            row
        })
        .collect()
}
