use std::collections::HashMap;

use crate::bayes::{Dag, DiscreteBatch};
use crate::error::{Error, Result};

/// Penalty form used by [`score_bic`] and hill climbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreKind {
    /// `LL - (ln(n)/2 + |V| + |E|)`: a constant per graph plus one nat per edge.
    #[default]
    Additive,
    /// `LL - ln(n)/2 * sum_i q_i (r_i - 1)`: the textbook parameter-count penalty.
    Bic,
}

/// Sufficient statistics of one family: counts per (parent row, child state).
pub(crate) struct FamilyCounts {
    pub rows: HashMap<u64, Vec<f64>>,
}

pub(crate) fn family_counts(data: &DiscreteBatch, child: usize, parents: &[usize]) -> FamilyCounts {
    let card = data.schema()[child].cardinality();
    let radix: Vec<u64> = parents
        .iter()
        .map(|&p| data.schema()[p].cardinality() as u64)
        .collect();
    let mut rows: HashMap<u64, Vec<f64>> = HashMap::new();
    for row in data.rows() {
        let key = parents
            .iter()
            .zip(&radix)
            .fold(0u64, |acc, (&p, &r)| acc * r + row[p] as u64);
        rows.entry(key).or_insert_with(|| vec![0.0; card])[row[child]] += 1.0;
    }
    FamilyCounts { rows }
}

impl FamilyCounts {
    pub fn log_likelihood(&self) -> f64 {
        self.rows
            .values()
            .map(|counts| {
                let n: f64 = counts.iter().sum();
                counts
                    .iter()
                    .filter(|&&c| c > 0.0)
                    .map(|&c| c * (c / n).ln())
                    .sum::<f64>()
            })
            .sum()
    }
}

fn check(dag: &Dag, data: &DiscreteBatch) -> Result<Vec<usize>> {
    if data.is_empty() {
        return Err(Error::EmptyBatch);
    }
    dag.nodes().iter().map(|n| data.require_column(n)).collect()
}

/// Maps DAG node indices onto batch columns.
pub(crate) fn column_map(dag: &Dag, data: &DiscreteBatch) -> Result<Vec<usize>> {
    check(dag, data)
}

/// Decomposable log-likelihood of `data` under the empirical CPTs of `dag` (natural log).
pub fn log_likelihood(dag: &Dag, data: &DiscreteBatch) -> Result<f64> {
    let cols = check(dag, data)?;
    Ok((0..dag.len())
        .map(|i| {
            let parents: Vec<usize> = dag.parents(i).iter().map(|&p| cols[p]).collect();
            family_counts(data, cols[i], &parents).log_likelihood()
        })
        .sum())
}

/// Penalized likelihood score with the additive penalty.
pub fn score_bic(dag: &Dag, data: &DiscreteBatch) -> Result<f64> {
    score(dag, data, ScoreKind::Additive)
}

pub fn score(dag: &Dag, data: &DiscreteBatch, kind: ScoreKind) -> Result<f64> {
    let cols = check(dag, data)?;
    let n = data.len() as f64;
    let mut total = match kind {
        ScoreKind::Additive => -(0.5 * n.ln() + dag.len() as f64),
        ScoreKind::Bic => 0.0,
    };
    for i in 0..dag.len() {
        let parents: Vec<usize> = dag.parents(i).iter().map(|&p| cols[p]).collect();
        total += family_score(data, cols[i], &parents, kind);
    }
    Ok(total)
}

/// Score contribution of one family, excluding per-graph constants.
pub(crate) fn family_score(
    data: &DiscreteBatch,
    child: usize,
    parents: &[usize],
    kind: ScoreKind,
) -> f64 {
    let ll = family_counts(data, child, parents).log_likelihood();
    match kind {
        ScoreKind::Additive => ll - parents.len() as f64,
        ScoreKind::Bic => {
            let q: f64 = parents
                .iter()
                .map(|&p| data.schema()[p].cardinality() as f64)
                .product();
            let r = data.schema()[child].cardinality() as f64;
            ll - 0.5 * (data.len() as f64).ln() * q * (r - 1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::VariableSpec;

    fn bin(name: &str) -> VariableSpec {
        VariableSpec::new(name, ["0", "1"]).unwrap()
    }

    #[test]
    fn uniform_single_variable() {
        let data =
            DiscreteBatch::new(vec![bin("a")], vec![vec![0], vec![0], vec![1], vec![1]]).unwrap();
        let dag = Dag::new(["a"]).unwrap();
        let ll = log_likelihood(&dag, &data).unwrap();
        assert!((ll - 4.0 * 0.5f64.ln()).abs() < 1e-12);
        let s = score_bic(&dag, &data).unwrap();
        assert!((s - (-4.465736)).abs() < 1e-6);
    }

    #[test]
    fn degenerate_column_has_zero_ll() {
        let data = DiscreteBatch::new(vec![bin("a")], vec![vec![0]; 4]).unwrap();
        let dag = Dag::new(["a"]).unwrap();
        assert_eq!(log_likelihood(&dag, &data).unwrap(), 0.0);
    }

    #[test]
    fn empty_batch_errors() {
        let data = DiscreteBatch::empty(vec![bin("a")]).unwrap();
        let dag = Dag::new(["a"]).unwrap();
        assert!(matches!(
            log_likelihood(&dag, &data),
            Err(Error::EmptyBatch)
        ));
    }

    #[test]
    fn missing_column_errors() {
        let data = DiscreteBatch::new(vec![bin("a")], vec![vec![0]]).unwrap();
        let dag = Dag::new(["a", "b"]).unwrap();
        assert!(matches!(
            log_likelihood(&dag, &data),
            Err(Error::UnknownVariable(_))
        ));
    }
}
