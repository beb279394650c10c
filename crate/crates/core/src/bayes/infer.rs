use std::collections::BTreeSet;

use crate::bayes::blanket::blanket_of;
use crate::bayes::{BayesNet, Evidence, Factor, VariableSpec};
use crate::error::{invalid, Error, Result};

/// Joint distribution over an ordered list of variables, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    variables: Vec<VariableSpec>,
    values: Vec<f64>,
}

impl Distribution {
    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Probability of one joint state given by state indices in variable order.
    pub fn prob_indices(&self, states: &[usize]) -> f64 {
        let idx = states
            .iter()
            .zip(&self.variables)
            .fold(0, |acc, (&s, v)| acc * v.cardinality() + s);
        self.values[idx]
    }

    /// Probability of one joint state given by labels in variable order.
    pub fn prob(&self, labels: &[&str]) -> Result<f64> {
        if labels.len() != self.variables.len() {
            return Err(invalid("label count does not match the distribution"));
        }
        let states = labels
            .iter()
            .zip(&self.variables)
            .map(|(l, v)| v.require_state(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.prob_indices(&states))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VeOptions {
    /// Drop nodes outside the ancestral closure of targets and evidence
    /// before eliminating.
    pub prune: bool,
}

impl Default for VeOptions {
    fn default() -> Self {
        VeOptions { prune: true }
    }
}

/// Exact `P(targets | evidence)` by variable elimination.
///
/// With `order = None` a min-degree order is chosen; an explicit order must
/// list every non-target node exactly once.
pub fn variable_elimination(
    model: &BayesNet,
    targets: &[&str],
    evidence: &Evidence,
    order: Option<&[&str]>,
) -> Result<Distribution> {
    variable_elimination_with(model, targets, evidence, order, &VeOptions::default())
}

pub fn variable_elimination_with(
    model: &BayesNet,
    targets: &[&str],
    evidence: &Evidence,
    order: Option<&[&str]>,
    options: &VeOptions,
) -> Result<Distribution> {
    let t = model.resolve_names(targets.iter().copied())?;
    let ev = model.resolve_evidence(evidence)?;
    let order = order
        .map(|o| model.resolve_names(o.iter().copied()))
        .transpose()?;
    if let Some(o) = &order {
        let expected: BTreeSet<usize> = (0..model.len()).filter(|i| !t.contains(i)).collect();
        let given: BTreeSet<usize> = o.iter().copied().collect();
        if given.len() != o.len() || given != expected {
            return Err(Error::InvalidOrder(
                "order must list every non-target node exactly once".into(),
            ));
        }
    }
    let factor = ve_indices(model, &t, &ev, order.as_deref(), None, options.prune)?;
    Ok(to_distribution(model, &t, factor))
}

/// Variable elimination over a node subset: only CPTs whose whole family
/// lies inside `nodes` contribute, and factors that become constant after
/// applying the evidence are dropped.
pub fn restricted_elimination(
    model: &BayesNet,
    nodes: &BTreeSet<String>,
    targets: &[&str],
    evidence: &Evidence,
) -> Result<Distribution> {
    let t = model.resolve_names(targets.iter().copied())?;
    let ev = model.resolve_evidence(evidence)?;
    let set: BTreeSet<usize> = model
        .resolve_names(nodes.iter().map(String::as_str))?
        .into_iter()
        .collect();
    if t.iter().any(|i| !set.contains(i)) {
        return Err(invalid("targets must lie inside the node subset"));
    }
    let factor = ve_indices(model, &t, &ev, None, Some(&set), false)?;
    Ok(to_distribution(model, &t, factor))
}

/// `P(var = state | evidence)`. When the evidence covers the Markov blanket
/// of `var`, only the blanket is used.
pub fn query_prob(model: &BayesNet, var: &str, state: &str, evidence: &Evidence) -> Result<f64> {
    let i = model.require(var)?;
    let s = model.variable(i).require_state(state)?;
    let mb = blanket_of(model.dag(), i);
    let dist = if mb
        .iter()
        .all(|&m| evidence.contains(model.variable(m).name.as_str()))
    {
        let mut nodes = model.names_of(&mb);
        let ev = evidence.filtered(|k| nodes.contains(k));
        nodes.insert(var.to_string());
        restricted_elimination(model, &nodes, &[var], &ev)?
    } else {
        variable_elimination(model, &[var], evidence, None)?
    };
    Ok(dist.prob_indices(&[s]))
}

/// `P(target | blanket)` for a fully observed blanket, from the target's CPT
/// and its children's CPTs. `state_of(node)` supplies observed states.
/// Returns `None` when the blanket assignment has probability zero.
pub fn blanket_posterior(
    model: &BayesNet,
    target: usize,
    state_of: impl Fn(usize) -> usize,
) -> Option<Vec<f64>> {
    let dag = model.dag();
    let card = model.cardinality(target);
    let children = dag.children(target);
    let cpt = model.cpt(target);
    let pstates: Vec<usize> = cpt.parents().iter().map(|&p| state_of(p)).collect();
    let base = cpt.row_index(&pstates);
    let mut post: Vec<f64> = cpt.row(base).to_vec();
    let mut buf = Vec::new();
    for &c in &children {
        let ccpt = model.cpt(c);
        let cs = state_of(c);
        for (s, p) in post.iter_mut().enumerate() {
            if *p == 0.0 {
                continue;
            }
            buf.clear();
            buf.extend(
                ccpt.parents()
                    .iter()
                    .map(|&q| if q == target { s } else { state_of(q) }),
            );
            *p *= ccpt.prob(&buf, cs);
        }
    }
    let total: f64 = post.iter().sum();
    if !(total > 0.0) || card == 0 {
        return None;
    }
    post.iter_mut().for_each(|p| *p /= total);
    Some(post)
}

fn to_distribution(model: &BayesNet, targets: &[usize], factor: Factor) -> Distribution {
    Distribution {
        variables: targets.iter().map(|&i| model.variable(i).clone()).collect(),
        values: factor.values().to_vec(),
    }
}

pub(crate) fn cpt_factor(model: &BayesNet, node: usize) -> Factor {
    let cpt = model.cpt(node);
    let mut vars = cpt.parents().to_vec();
    vars.push(node);
    let mut cards = cpt.parent_cards().to_vec();
    cards.push(cpt.cardinality());
    Factor::new(vars, cards, cpt.values().to_vec())
}

fn ve_indices(
    model: &BayesNet,
    targets: &[usize],
    evidence: &[(usize, usize)],
    order: Option<&[usize]>,
    subset: Option<&BTreeSet<usize>>,
    prune: bool,
) -> Result<Factor> {
    if targets.is_empty() {
        return Err(invalid("at least one target is required"));
    }
    let tset: BTreeSet<usize> = targets.iter().copied().collect();
    if tset.len() != targets.len() {
        return Err(invalid("duplicate target"));
    }
    if evidence.iter().any(|(v, _)| tset.contains(v)) {
        return Err(invalid("targets and evidence overlap"));
    }
    let dag = model.dag();
    let restricted = subset.is_some();
    let nodes: BTreeSet<usize> = match subset {
        Some(s) => s.clone(),
        None if prune => {
            dag.ancestral_closure(targets.iter().copied().chain(evidence.iter().map(|e| e.0)))
        }
        None => (0..model.len()).collect(),
    };

    let mut factors: Vec<Factor> = Vec::new();
    let mut constant = 1.0;
    for &i in &nodes {
        if restricted && !dag.parents(i).iter().all(|p| nodes.contains(p)) {
            continue;
        }
        let mut f = cpt_factor(model, i);
        for &(v, s) in evidence {
            if f.contains(v) {
                f = f.reduce(v, s);
            }
        }
        if f.is_scalar() {
            if !restricted {
                constant *= f.values()[0];
            }
        } else {
            factors.push(f);
        }
    }

    let evset: BTreeSet<usize> = evidence.iter().map(|e| e.0).collect();
    let mut pending: Vec<usize> = match order {
        Some(o) => o
            .iter()
            .copied()
            .filter(|v| nodes.contains(v) && !evset.contains(v))
            .collect(),
        None => nodes
            .iter()
            .copied()
            .filter(|v| !tset.contains(v) && !evset.contains(v))
            .collect(),
    };
    while !pending.is_empty() {
        let pick = match order {
            Some(_) => 0,
            None => min_degree(&factors, &pending),
        };
        let v = pending.remove(pick);
        let (with, without): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.contains(v));
        factors = without;
        if with.is_empty() {
            continue;
        }
        let prod = with
            .iter()
            .skip(1)
            .fold(with[0].clone(), |acc, f| acc.product(f));
        let m = prod.sum_out(v);
        if m.is_scalar() {
            if !restricted {
                constant *= m.values()[0];
            }
        } else {
            factors.push(m);
        }
    }

    let mut joint = Factor::scalar(constant);
    for f in &factors {
        joint = joint.product(f);
    }
    for &t in targets {
        if !joint.contains(t) {
            let card = model.cardinality(t);
            joint = joint.product(&Factor::new(vec![t], vec![card], vec![1.0; card]));
        }
    }
    let joint = joint.permuted(targets);
    let total = joint.total();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::ImpossibleEvidence);
    }
    Ok(joint.scaled(1.0 / total))
}

fn min_degree(factors: &[Factor], pending: &[usize]) -> usize {
    let mut best = (usize::MAX, 0);
    for (k, &v) in pending.iter().enumerate() {
        let mut nb: BTreeSet<usize> = BTreeSet::new();
        for f in factors.iter().filter(|f| f.contains(v)) {
            nb.extend(f.vars().iter().copied());
        }
        nb.remove(&v);
        if nb.len() < best.0 {
            best = (nb.len(), k);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{Cpt, Dag};

    fn chain() -> BayesNet {
        let vars = vec![
            VariableSpec::new("a", ["0", "1"]).unwrap(),
            VariableSpec::new("b", ["0", "1"]).unwrap(),
            VariableSpec::new("c", ["0", "1"]).unwrap(),
        ];
        let dag = Dag::with_edges(["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let cpts = vec![
            Cpt::new(vec![], 2, vec![], vec![0.6, 0.4]).unwrap(),
            Cpt::new(vec![0], 2, vec![2], vec![0.9, 0.1, 0.2, 0.8]).unwrap(),
            Cpt::new(vec![1], 2, vec![2], vec![0.7, 0.3, 0.1, 0.9]).unwrap(),
        ];
        BayesNet::new(vars, dag, cpts, 1.0).unwrap()
    }

    #[test]
    fn root_marginal_is_prior() {
        let d = variable_elimination(&chain(), &["a"], &Evidence::new(), None).unwrap();
        assert_eq!(d.values(), &[0.6, 0.4]);
    }

    #[test]
    fn leaf_evidence_matches_hand_enumeration() {
        let net = chain();
        let d = variable_elimination(&net, &["a"], &Evidence::new().with("c", "1"), None).unwrap();
        let joint = |a: usize| -> f64 {
            (0..2)
                .map(|b| {
                    net.cpt(0).prob(&[], a) * net.cpt(1).prob(&[a], b) * net.cpt(2).prob(&[b], 1)
                })
                .sum()
        };
        let z = joint(0) + joint(1);
        assert!((d.values()[0] - joint(0) / z).abs() < 1e-12);
    }

    #[test]
    fn explicit_order_must_cover_non_targets() {
        let net = chain();
        let ev = Evidence::new().with("c", "1");
        assert!(variable_elimination(&net, &["a"], &ev, Some(&["b"])).is_err());
        let d = variable_elimination(&net, &["a"], &ev, Some(&["c", "b"])).unwrap();
        let e = variable_elimination(&net, &["a"], &ev, None).unwrap();
        assert!((d.values()[0] - e.values()[0]).abs() < 1e-12);
    }

    #[test]
    fn impossible_evidence() {
        let vars = vec![
            VariableSpec::new("a", ["0", "1"]).unwrap(),
            VariableSpec::new("b", ["0", "1"]).unwrap(),
        ];
        let dag = Dag::with_edges(["a", "b"], &[("a", "b")]).unwrap();
        let cpts = vec![
            Cpt::new(vec![], 2, vec![], vec![1.0, 0.0]).unwrap(),
            Cpt::new(vec![0], 2, vec![2], vec![1.0, 0.0, 0.5, 0.5]).unwrap(),
        ];
        let net = BayesNet::new(vars, dag, cpts, 1.0).unwrap();
        let err =
            variable_elimination(&net, &["a"], &Evidence::new().with("b", "1"), None).unwrap_err();
        assert!(err.to_string().contains("impossible evidence"));
    }

    #[test]
    fn overlapping_targets_and_evidence_rejected() {
        let ev = Evidence::new().with("a", "1");
        assert!(variable_elimination(&chain(), &["a"], &ev, None).is_err());
    }

    #[test]
    fn query_prob_uses_blanket_when_covered() {
        let net = chain();
        let ev = Evidence::new().with("a", "1").with("c", "0");
        let p = query_prob(&net, "b", "1", &ev).unwrap();
        let q = variable_elimination(&net, &["b"], &ev, None)
            .unwrap()
            .values()[1];
        assert!((p - q).abs() < 1e-12);
        let post = blanket_posterior(&net, 1, |n| if n == 0 { 1 } else { 0 }).unwrap();
        assert!((post[1] - q).abs() < 1e-12);
    }
}
