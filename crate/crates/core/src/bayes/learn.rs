use crate::bayes::score::{column_map, family_counts, family_score};
use crate::bayes::{BayesNet, Cpt, Dag, DiscreteBatch, ScoreKind, VariableSpec};
use crate::error::{invalid, Error, Result};

/// Stop criterion and move set for [`hill_climb`].
#[derive(Debug, Clone, PartialEq)]
pub struct HillClimbOptions {
    pub score: ScoreKind,
    /// Upper bound on the number of full passes over all node pairs.
    pub max_passes: usize,
    /// Additions that would give a node more parents than this are skipped.
    pub max_parents: Option<usize>,
    /// Also try removing existing edges.
    pub allow_removals: bool,
}

impl Default for HillClimbOptions {
    fn default() -> Self {
        HillClimbOptions {
            score: ScoreKind::Additive,
            max_passes: 100,
            max_parents: None,
            allow_removals: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Add,
    Remove,
}

/// One accepted move and the graph score after it.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedMove {
    pub kind: Move,
    pub parent: String,
    pub child: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HillClimbTrace {
    pub dag: Dag,
    pub initial_score: f64,
    pub moves: Vec<AcceptedMove>,
    pub passes: usize,
}

/// Greedy single-edge hill climbing starting from `init`.
pub fn hill_climb(data: &DiscreteBatch, init: &Dag, options: &HillClimbOptions) -> Result<Dag> {
    Ok(hill_climb_traced(data, init, options)?.dag)
}

/// Like [`hill_climb`], also returning every accepted move with its score.
pub fn hill_climb_traced(
    data: &DiscreteBatch,
    init: &Dag,
    options: &HillClimbOptions,
) -> Result<HillClimbTrace> {
    let cols = column_map(init, data)?;
    let n = data.len() as f64;
    let constant = match options.score {
        ScoreKind::Additive => -(0.5 * n.ln() + init.len() as f64),
        ScoreKind::Bic => 0.0,
    };
    let family = |dag: &Dag, child: usize| {
        let ps: Vec<usize> = dag.parents(child).iter().map(|&p| cols[p]).collect();
        family_score(data, cols[child], &ps, options.score)
    };

    let mut dag = init.clone();
    let mut fam: Vec<f64> = (0..dag.len()).map(|i| family(&dag, i)).collect();
    let mut total = constant + fam.iter().sum::<f64>();
    let initial_score = total;
    let mut moves = Vec::new();
    let mut passes = 0;

    while passes < options.max_passes {
        passes += 1;
        let mut accepted = false;
        for i in 0..dag.len() {
            for j in 0..dag.len() {
                if i == j {
                    continue;
                }
                if dag.has_edge(i, j) {
                    if !options.allow_removals {
                        continue;
                    }
                    dag.remove_edge(i, j);
                    let f = family(&dag, j);
                    if total - fam[j] + f > total {
                        total += f - fam[j];
                        fam[j] = f;
                        accepted = true;
                        moves.push(AcceptedMove {
                            kind: Move::Remove,
                            parent: dag.name(i).to_string(),
                            child: dag.name(j).to_string(),
                            score: total,
                        });
                    } else {
                        dag.add_edge(i, j)?;
                    }
                    continue;
                }
                if options
                    .max_parents
                    .is_some_and(|m| dag.parents(j).len() >= m)
                    || dag.would_create_cycle(i, j)
                {
                    continue;
                }
                dag.add_edge(i, j)?;
                let f = family(&dag, j);
                let candidate = total - fam[j] + f;
                if candidate > total {
                    total = candidate;
                    fam[j] = f;
                    accepted = true;
                    moves.push(AcceptedMove {
                        kind: Move::Add,
                        parent: dag.name(i).to_string(),
                        child: dag.name(j).to_string(),
                        score: total,
                    });
                } else {
                    dag.remove_edge(i, j);
                }
            }
        }
        if !accepted {
            break;
        }
    }
    Ok(HillClimbTrace {
        dag,
        initial_score,
        moves,
        passes,
    })
}

fn schema_for(dag: &Dag, data: &DiscreteBatch) -> Result<(Vec<usize>, Vec<VariableSpec>)> {
    let cols = column_map(dag, data)?;
    let vars = cols.iter().map(|&c| data.schema()[c].clone()).collect();
    Ok((cols, vars))
}

/// Maximum-likelihood CPTs for `dag` with an additive pseudo-count per cell.
pub fn mle_fit(dag: &Dag, data: &DiscreteBatch, smoothing: f64) -> Result<BayesNet> {
    if !(smoothing >= 0.0) {
        return Err(invalid("smoothing must be non-negative"));
    }
    let (cols, vars) = schema_for(dag, data)?;
    let mut cpts = Vec::with_capacity(dag.len());
    for i in 0..dag.len() {
        let parents = dag.parents(i).to_vec();
        let pcards: Vec<usize> = parents.iter().map(|&p| vars[p].cardinality()).collect();
        let mut cpt = Cpt::uniform(parents.clone(), vars[i].cardinality(), pcards);
        let pcols: Vec<usize> = parents.iter().map(|&p| cols[p]).collect();
        let counts = family_counts(data, cols[i], &pcols);
        let card = cpt.cardinality();
        let rows = cpt.row_count();
        let values = cpt.values_mut();
        for r in 0..rows {
            let row_counts = counts.rows.get(&(r as u64));
            let total: f64 = row_counts.map_or(0.0, |c| c.iter().sum());
            let denom = total + smoothing * card as f64;
            if denom > 0.0 {
                for k in 0..card {
                    let c = row_counts.map_or(0.0, |c| c[k]);
                    values[r * card + k] = (c + smoothing) / denom;
                }
            }
        }
        cpts.push(cpt);
    }
    BayesNet::new(vars, dag.clone(), cpts, data.len() as f64)
}

/// Blends the model's CPTs with the batch counts. Each row becomes
/// `(prior_weight * P_old + N_jk) / (prior_weight + N_j)`; rows without
/// batch data keep their old values.
pub fn parl_update(model: &BayesNet, batch: &DiscreteBatch, prior_weight: f64) -> Result<BayesNet> {
    if !(prior_weight >= 0.0) {
        return Err(invalid("prior_weight must be non-negative"));
    }
    blend(
        model,
        batch,
        |_, _, _| prior_weight,
        prior_weight + batch.len() as f64,
    )
}

/// Like [`parl_update`] with a per-row prior of `ratio * N_j`, so every row
/// with data becomes `(ratio * P_old + P_batch) / (ratio + 1)` and rows
/// without data keep their old values.
pub fn parl_update_proportional(
    model: &BayesNet,
    batch: &DiscreteBatch,
    ratio: f64,
) -> Result<BayesNet> {
    if !(ratio >= 0.0) || ratio.is_infinite() {
        return Err(invalid("ratio must be finite and non-negative"));
    }
    let weight = model.sample_weight() + batch.len() as f64;
    blend(model, batch, |_, _, n| ratio * n, weight)
}

fn blend(
    model: &BayesNet,
    batch: &DiscreteBatch,
    prior: impl Fn(usize, usize, f64) -> f64,
    sample_weight: f64,
) -> Result<BayesNet> {
    if batch.is_empty() {
        return Ok(model.clone());
    }
    let aligned = align_batch(model, batch)?;
    let mut cpts = Vec::with_capacity(model.len());
    for i in 0..model.len() {
        let old = model.cpt(i);
        let counts = family_counts(&aligned, i, old.parents());
        let card = old.cardinality();
        let mut cpt = old.clone();
        let values = cpt.values_mut();
        for r in 0..old.row_count() {
            let row_counts = counts.rows.get(&(r as u64));
            let n: f64 = row_counts.map_or(0.0, |c| c.iter().sum());
            let Some(row_counts) = row_counts.filter(|_| n > 0.0) else {
                continue;
            };
            let w = prior(i, r, n);
            for k in 0..card {
                values[r * card + k] = (w * old.row(r)[k] + row_counts[k]) / (w + n);
            }
        }
        cpts.push(cpt);
    }
    Ok(BayesNet::from_parts_unchecked(
        model.variables().to_vec(),
        model.dag().clone(),
        cpts,
        sample_weight,
    ))
}

/// Reorders and relabels batch columns onto the model's variables.
pub(crate) fn align_batch(model: &BayesNet, batch: &DiscreteBatch) -> Result<DiscreteBatch> {
    let cols: Vec<usize> = model
        .node_names()
        .map(|n| batch.require_column(n))
        .collect::<Result<_>>()?;
    let maps: Vec<Vec<Option<usize>>> = cols
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            batch.schema()[c]
                .states
                .iter()
                .map(|s| model.variable(i).state_index(s))
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(batch.len());
    for row in batch.rows() {
        let mut out = Vec::with_capacity(cols.len());
        for (i, &c) in cols.iter().enumerate() {
            match maps[i][row[c]] {
                Some(s) => out.push(s),
                None => {
                    return Err(Error::CardinalityMismatch {
                        variable: model.variable(i).name.clone(),
                        state: batch.schema()[c].states[row[c]].clone(),
                    })
                }
            }
        }
        rows.push(out);
    }
    DiscreteBatch::new(model.variables().to_vec(), rows)
}

/// Options for structure relearning.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnOptions {
    pub hill_climb: HillClimbOptions,
    pub smoothing: f64,
}

impl Default for LearnOptions {
    fn default() -> Self {
        LearnOptions {
            hill_climb: HillClimbOptions::default(),
            smoothing: 0.0,
        }
    }
}

/// Retrains structure and parameters from scratch on `batch ∪ backup`,
/// returning the new model and the merged data.
pub fn strl_update(
    model: Option<&BayesNet>,
    batch: &DiscreteBatch,
    backup: &DiscreteBatch,
) -> Result<(BayesNet, DiscreteBatch)> {
    strl_update_with(model, batch, backup, &LearnOptions::default())
}

pub fn strl_update_with(
    model: Option<&BayesNet>,
    batch: &DiscreteBatch,
    backup: &DiscreteBatch,
    options: &LearnOptions,
) -> Result<(BayesNet, DiscreteBatch)> {
    if batch.is_empty() && backup.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut data = if backup.width() == 0 {
        batch.clone()
    } else {
        backup.union(batch)?
    };
    if let Some(m) = model {
        // keep every label the old model knew so cardinalities only grow
        let widened: Vec<VariableSpec> = data
            .schema()
            .iter()
            .map(|v| match m.index_of(&v.name) {
                Some(i) => m.variable(i).widened(v),
                None => v.clone(),
            })
            .collect();
        data = data.with_widened_schema(&widened)?;
    }
    let empty = Dag::new(data.schema().iter().map(|v| v.name.clone()))?;
    let dag = hill_climb(&data, &empty, &options.hill_climb)?;
    let net = mle_fit(&dag, &data, options.smoothing)?;
    Ok((net, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(name: &str) -> VariableSpec {
        VariableSpec::new(name, ["0", "1"]).unwrap()
    }

    #[test]
    fn mle_counts() {
        let data = DiscreteBatch::new(
            vec![bin("a"), bin("b")],
            vec![vec![0, 0], vec![0, 0], vec![0, 0], vec![0, 1]],
        )
        .unwrap();
        let dag = Dag::with_edges(["a", "b"], &[("a", "b")]).unwrap();
        let net = mle_fit(&dag, &data, 0.0).unwrap();
        assert!((net.cpt(1).prob(&[0], 0) - 0.75).abs() < 1e-12);
        // unobserved parent state -> uniform
        assert_eq!(net.cpt(1).row(1), &[0.5, 0.5]);
        assert_eq!(net.sample_weight(), 4.0);
    }

    #[test]
    fn laplace_smoothing() {
        let data = DiscreteBatch::new(vec![bin("b")], vec![vec![1]; 4]).unwrap();
        let dag = Dag::new(["b"]).unwrap();
        assert_eq!(
            mle_fit(&dag, &data, 0.0).unwrap().cpt(0).row(0),
            &[0.0, 1.0]
        );
        let p = mle_fit(&dag, &data, 1.0).unwrap().cpt(0).row(0)[1];
        assert!((p - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn parl_convex_combination() {
        let vars = vec![bin("b")];
        let dag = Dag::new(["b"]).unwrap();
        let old = BayesNet::new(
            vars.clone(),
            dag,
            vec![Cpt::new(vec![], 2, vec![], vec![0.8, 0.2]).unwrap()],
            100.0,
        )
        .unwrap();
        let batch = DiscreteBatch::new(vars, vec![vec![1]; 100]).unwrap();
        let new = parl_update(&old, &batch, 100.0).unwrap();
        assert!((new.cpt(0).row(0)[1] - 0.6).abs() < 1e-12);
        assert_eq!(new.sample_weight(), 200.0);
    }

    #[test]
    fn parl_rejects_unknown_labels() {
        let dag = Dag::new(["b"]).unwrap();
        let old = mle_fit(
            &dag,
            &DiscreteBatch::new(vec![bin("b")], vec![vec![0]]).unwrap(),
            0.0,
        )
        .unwrap();
        let other = VariableSpec::new("b", ["0", "1", "2"]).unwrap();
        let batch = DiscreteBatch::new(vec![other], vec![vec![2]]).unwrap();
        let err = parl_update(&old, &batch, 1.0).unwrap_err();
        assert!(err.to_string().contains("cardinality mismatch"));
    }

    #[test]
    fn strl_widens_cardinality() {
        let dag = Dag::new(["b"]).unwrap();
        let backup = DiscreteBatch::new(vec![bin("b")], vec![vec![0], vec![1]]).unwrap();
        let old = mle_fit(&dag, &backup, 0.0).unwrap();
        let batch = DiscreteBatch::new(vec![VariableSpec::new("b", ["2"]).unwrap()], vec![vec![0]])
            .unwrap();
        let (net, data) = strl_update(Some(&old), &batch, &backup).unwrap();
        assert_eq!(net.cardinality(0), 3);
        assert_eq!(data.len(), 3);
    }
}
