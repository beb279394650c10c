use std::collections::{BTreeMap, BTreeSet};

use crate::agent::{interpolate_grid, ConfigPoint, ParamSpace};
use crate::bayes::{
    align_batch, blanket_indices, blanket_posterior, variable_elimination_with, BayesNet,
    DiscreteBatch, Evidence, VeOptions,
};
use crate::error::{Error, Result};

/// Floor applied to probabilities before taking logarithms.
pub const PROB_FLOOR: f64 = 1e-9;

/// Which network the per-row inference of [`surprise_with`] runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SurpriseMode {
    /// Only the target and its Markov blanket.
    #[default]
    Blanket,
    /// Variable elimination over every node of the model.
    FullNetwork,
}

/// What `k` counts in the complexity term of [`surprise_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Complexity {
    /// Every entry of the variable's CPT.
    #[default]
    CptEntries,
    /// The number of states of the variable itself.
    VariableStates,
}

/// BIC-penalized negative log-likelihood of the SLO variables in `batch`.
///
/// For each SLO variable, rows contribute `ln P(observed | row ∩ MB(var))`;
/// the per-variable term is `-2 LL + k ln n` with `k` the CPT size.
pub fn surprise(model: &BayesNet, batch: &DiscreteBatch, slo_vars: &[&str]) -> Result<f64> {
    surprise_with(
        model,
        batch,
        slo_vars,
        SurpriseMode::Blanket,
        Complexity::CptEntries,
    )
}

pub fn surprise_with(
    model: &BayesNet,
    batch: &DiscreteBatch,
    slo_vars: &[&str],
    mode: SurpriseMode,
    complexity: Complexity,
) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let data = align_batch(model, batch)?;
    let targets = model.resolve_names(slo_vars.iter().copied())?;
    let n = data.len() as f64;
    let no_prune = VeOptions { prune: false };
    let mut total = 0.0;
    for &var in &targets {
        let mb = blanket_indices(model.dag(), &[var]);
        let mut ll = 0.0;
        for row in data.rows() {
            let p = match mode {
                SurpriseMode::Blanket => {
                    blanket_posterior(model, var, |i| row[i]).map(|post| post[row[var]])
                }
                SurpriseMode::FullNetwork => {
                    let ev: Evidence = mb
                        .iter()
                        .map(|&m| {
                            (
                                model.variable(m).name.clone(),
                                model.variable(m).states[row[m]].clone(),
                            )
                        })
                        .collect();
                    match variable_elimination_with(
                        model,
                        &[model.variable(var).name.as_str()],
                        &ev,
                        None,
                        &no_prune,
                    ) {
                        Ok(d) => Some(d.values()[row[var]]),
                        Err(Error::ImpossibleEvidence) => None,
                        Err(e) => return Err(e),
                    }
                }
            };
            ll += p.unwrap_or(0.0).max(PROB_FLOOR).ln();
        }
        let k = match complexity {
            Complexity::CptEntries => model.cpt(var).len(),
            Complexity::VariableStates => model.cardinality(var),
        } as f64;
        total += -2.0 * ll + k * n.ln();
    }
    Ok(total)
}

/// Probability that every listed SLO variable is `true` given the evidence.
/// Evidence on variables the model lacks is ignored; impossible evidence
/// yields 0.
pub fn joint_fulfillment(model: &BayesNet, slo_vars: &[&str], evidence: &Evidence) -> Result<f64> {
    let vars: Vec<&str> = slo_vars
        .iter()
        .copied()
        .filter(|v| model.index_of(v).is_some())
        .collect();
    if vars.is_empty() {
        return Ok(1.0);
    }
    let ev = evidence.filtered(|k| model.index_of(k).is_some() && !vars.contains(&k));
    let dist = match variable_elimination_with(model, &vars, &ev, None, &VeOptions::default()) {
        Ok(d) => d,
        Err(Error::ImpossibleEvidence) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let labels = vec!["true"; vars.len()];
    dist.prob(&labels)
}

/// Joint probability that all QoE SLOs hold.
pub fn pragmatic_value(model: &BayesNet, evidence: &Evidence, qoe: &[&str]) -> Result<f64> {
    joint_fulfillment(model, qoe, evidence)
}

/// Joint probability that all QoS SLOs hold.
pub fn risk_assigned(model: &BayesNet, evidence: &Evidence, qos: &[&str]) -> Result<f64> {
    joint_fulfillment(model, qos, evidence)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 0 {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    }
}

/// Median of the last `window` values (all values when fewer exist).
pub fn trailing_median(values: &[f64], window: usize) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(median(&values[values.len().saturating_sub(window)..]))
}

/// Units in which unvisited points receive the maximum surprise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IgScale {
    /// The raw maximum, as in [`information_gain`].
    Raw,
    /// `max / mean * 100`, the same percent-of-mean units visited points use.
    #[default]
    Relative,
}

/// Behavioral factors over a configuration grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorGrids {
    space: ParamSpace,
    pub pv: Vec<f64>,
    pub ra: Vec<f64>,
    /// Raw information gain, before normalization.
    pub ig: Vec<f64>,
    visited: BTreeSet<usize>,
    config_surprise: BTreeMap<usize, Vec<f64>>,
    surprises: Vec<f64>,
}

impl FactorGrids {
    pub fn new(space: ParamSpace) -> Self {
        let n = space.len();
        FactorGrids {
            space,
            pv: vec![0.0; n],
            ra: vec![0.0; n],
            ig: vec![0.0; n],
            visited: BTreeSet::new(),
            config_surprise: BTreeMap::new(),
            surprises: Vec::new(),
        }
    }

    pub fn space(&self) -> &ParamSpace {
        &self.space
    }

    pub fn visited(&self) -> &BTreeSet<usize> {
        &self.visited
    }

    pub fn is_visited(&self, idx: usize) -> bool {
        self.visited.contains(&idx)
    }

    pub fn surprises(&self) -> &[f64] {
        &self.surprises
    }

    pub fn config_surprise(&self, idx: usize) -> Option<&[f64]> {
        self.config_surprise.get(&idx).map(Vec::as_slice)
    }

    /// Records one round's surprise, observed while running grid point `idx`.
    pub fn record(&mut self, idx: usize, surprise: f64) {
        self.visited.insert(idx);
        self.config_surprise.entry(idx).or_default().push(surprise);
        self.surprises.push(surprise);
    }

    /// Sets pv and ra from values at known points and fills the rest by interpolation.
    pub fn set_known(&mut self, pv: &BTreeMap<usize, f64>, ra: &BTreeMap<usize, f64>) {
        if !pv.is_empty() {
            self.pv = interpolate_grid(pv, &self.space);
        }
        if !ra.is_empty() {
            self.ra = interpolate_grid(ra, &self.space);
        }
    }

    /// Recomputes the raw ig grid.
    pub fn refresh_ig(&mut self, options: &IgOptions) {
        self.ig = (0..self.space.len())
            .map(|i| information_gain_with(i, self, options))
            .collect();
    }

    /// ig rescaled to [0, 1] by its maximum.
    pub fn ig_normalized(&self) -> Vec<f64> {
        let max = self.ig.iter().copied().fold(0.0, f64::max);
        if max > 0.0 {
            self.ig.iter().map(|v| v / max).collect()
        } else {
            vec![0.0; self.ig.len()]
        }
    }

    /// Combined factor `pv + ra + ig_normalized` per grid point.
    pub fn utility(&self) -> Vec<f64> {
        let ig = self.ig_normalized();
        (0..self.space.len())
            .map(|i| self.pv[i] + self.ra[i] + ig[i])
            .collect()
    }
}

/// Exploration score of grid point `idx`.
///
/// Unvisited points get the largest recorded surprise, plus `e` on key
/// points; visited points get `median_c / mean * 100`.
pub fn information_gain(idx: usize, grids: &FactorGrids, e: f64) -> f64 {
    information_gain_with(
        idx,
        grids,
        &IgOptions {
            e,
            scale: IgScale::Raw,
            window: None,
        },
    )
}

/// Parameters of [`information_gain_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IgOptions {
    /// Bonus on unvisited key points.
    pub e: f64,
    pub scale: IgScale,
    /// Take the maximum and mean over only the most recent surprises.
    pub window: Option<usize>,
}

pub fn information_gain_with(idx: usize, grids: &FactorGrids, options: &IgOptions) -> f64 {
    let IgOptions { e, scale, window } = *options;
    let all = &grids.surprises[grids
        .surprises
        .len()
        .saturating_sub(window.unwrap_or(usize::MAX))..];
    if all.is_empty() {
        return 0.0;
    }
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    if mean == 0.0 {
        return 0.0;
    }
    match grids.config_surprise.get(&idx) {
        Some(hist) if !hist.is_empty() => median(hist) / mean * 100.0,
        _ => {
            let max = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let max = match scale {
                IgScale::Raw => max,
                IgScale::Relative => max / mean * 100.0,
            };
            max + if grids.space.is_key(idx) { e } else { 0.0 }
        }
    }
}

/// Grid point with the highest combined factor; ties go to the
/// lexicographically smallest parameter values.
pub fn best_configuration(grids: &FactorGrids) -> ConfigPoint {
    grids.space.point(best_index(grids))
}

pub fn best_index(grids: &FactorGrids) -> usize {
    let u = grids.utility();
    let space = &grids.space;
    let mut best = 0;
    for i in 1..u.len() {
        if u[i] > u[best] || (u[i] == u[best] && lex_less(space, i, best)) {
            best = i;
        }
    }
    best
}

fn lex_less(space: &ParamSpace, a: usize, b: usize) -> bool {
    let pa: Vec<f64> = space.point(a).values().collect();
    let pb: Vec<f64> = space.point(b).values().collect();
    pa.iter()
        .zip(&pb)
        .find(|(x, y)| x != y)
        .is_some_and(|(x, y)| x < y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ig_cases() {
        let space = ParamSpace::default_grid();
        let corner = space.keys()[0];
        let mut g = FactorGrids::new(space);
        assert_eq!(information_gain(corner, &g, 0.3), 0.0);
        g.record(10, 40.0);
        assert!((information_gain(corner, &g, 0.3) - 40.3).abs() < 1e-12);
        assert!((information_gain(10, &g, 0.3) - 100.0).abs() < 1e-12);
        g.record(11, 10.0);
        g.record(12, 70.0);
        // mean 40, median for 11 is 10
        assert!((information_gain(11, &g, 0.3) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn ties_pick_lexicographically_smallest() {
        let g = FactorGrids::new(ParamSpace::default_grid());
        assert_eq!(best_configuration(&g).to_string(), "pixel=120,fps=5");
    }

    #[test]
    fn trailing_median_uses_available_values() {
        assert_eq!(trailing_median(&[3.0], 10), Some(3.0));
        assert_eq!(trailing_median(&[1.0, 5.0, 2.0, 8.0], 3), Some(5.0));
        assert_eq!(trailing_median(&[], 10), None);
    }
}
