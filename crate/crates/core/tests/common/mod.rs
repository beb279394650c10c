#![allow(dead_code)]

use std::io::Write;

use edge_aci::bayes::{random_net, BayesNet, Evidence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random net for seed `seed`: up to 6 variables of cardinality at most 3.
pub fn small_net(seed: u64) -> BayesNet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=6);
    random_net(&mut rng, n, 3, 0.5, 3).expect("random net")
}

/// Every joint state of `model` in row-major order, last variable fastest.
pub fn joint_states(model: &BayesNet) -> Vec<Vec<usize>> {
    let cards: Vec<usize> = (0..model.len()).map(|i| model.cardinality(i)).collect();
    let mut out = vec![vec![]];
    for &c in &cards {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..c).map(move |x| {
                    let mut t = s.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// Probability of one full joint state as the product of CPT entries.
pub fn joint_prob(model: &BayesNet, states: &[usize]) -> f64 {
    (0..model.len())
        .map(|i| {
            let cpt = model.cpt(i);
            let ps: Vec<usize> = cpt.parents().iter().map(|&p| states[p]).collect();
            cpt.prob(&ps, states[i])
        })
        .product()
}

/// `P(targets | evidence)` by summing the full joint, indexed like the
/// output of variable elimination.
pub fn enumerate(model: &BayesNet, targets: &[usize], evidence: &[(usize, usize)]) -> Vec<f64> {
    let size: usize = targets.iter().map(|&t| model.cardinality(t)).product();
    let mut out = vec![0.0; size];
    for s in joint_states(model) {
        if evidence.iter().any(|&(v, x)| s[v] != x) {
            continue;
        }
        let idx = targets
            .iter()
            .fold(0, |acc, &t| acc * model.cardinality(t) + s[t]);
        out[idx] += joint_prob(model, &s);
    }
    let z: f64 = out.iter().sum();
    out.iter().map(|p| p / z).collect()
}

pub fn evidence_of(model: &BayesNet, pairs: &[(usize, usize)]) -> Evidence {
    let mut ev = Evidence::new();
    for &(v, x) in pairs {
        let var = model.variable(v);
        ev.insert(var.name.clone(), var.states[x].clone());
    }
    ev
}

/// Writes a line straight to stderr so it shows even when output is captured.
pub fn report(line: &str) {
    let _ = writeln!(std::io::stderr(), "{line}");
}
