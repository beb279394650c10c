use crate::bayes::{parl_update_proportional, BayesNet, DiscreteBatch};
use crate::cluster::RegistryEntry;
use crate::error::{invalid, Error, Result};

const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Donor indices and weights for a device of capacity `dc_x`, given the
/// capacities of the registered devices.
///
/// A device with exactly `dc_x` gets weight 1. Otherwise the nearest donors
/// below and above share the weight in proportion to their distance; with
/// donors on one side only, the nearest one gets weight 1. Ties go to the
/// earliest registered device.
pub fn donor_weights(dcs: &[u32], dc_x: u32) -> Vec<(usize, f64)> {
    if let Some(i) = dcs.iter().position(|&d| d == dc_x) {
        return vec![(i, 1.0)];
    }
    let nearest = |pick: &dyn Fn(u32) -> bool, better: &dyn Fn(u32, u32) -> bool| {
        let mut best: Option<usize> = None;
        for (i, &d) in dcs.iter().enumerate() {
            if pick(d) && best.map_or(true, |b| better(d, dcs[b])) {
                best = Some(i);
            }
        }
        best
    };
    let below = nearest(&|d| d < dc_x, &|d, b| d > b);
    let above = nearest(&|d| d > dc_x, &|d, b| d < b);
    match (below, above) {
        (Some(a), Some(b)) => {
            let (da, db, x) = (f64::from(dcs[a]), f64::from(dcs[b]), f64::from(dc_x));
            let wa = (db - x) / (db - da);
            vec![(a, wa), (b, 1.0 - wa)]
        }
        (Some(i), None) | (None, Some(i)) => vec![(i, 1.0)],
        (None, None) => Vec::new(),
    }
}

/// The one or two registered entries closest in capacity to `dc_x`, with
/// their merge weights.
pub fn select_donors(entries: &[RegistryEntry], dc_x: u32) -> Vec<(&RegistryEntry, f64)> {
    let dcs: Vec<u32> = entries.iter().map(|e| e.scalars.dc).collect();
    donor_weights(&dcs, dc_x)
        .into_iter()
        .map(|(i, w)| (&entries[i], w))
        .collect()
}

fn check_weights(w_a: f64, w_b: f64) -> Result<()> {
    if !(w_a >= 0.0 && w_b >= 0.0) || ((w_a + w_b) - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(invalid(format!(
            "merge weights must be non-negative and sum to 1, got {w_a} and {w_b}"
        )));
    }
    Ok(())
}

/// Cellwise convex combination `w_a * P_a + w_b * P_b` of two models with the
/// same structure and state spaces.
pub fn merge_cpts(m_a: &BayesNet, m_b: &BayesNet, w_a: f64, w_b: f64) -> Result<BayesNet> {
    check_weights(w_a, w_b)?;
    if !m_a.same_structure(m_b) {
        return Err(Error::IncompatibleModels(
            "structures or state spaces differ".into(),
        ));
    }
    let cpts = m_a
        .cpts()
        .iter()
        .zip(m_b.cpts())
        .map(|(a, b)| {
            let values = a
                .values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| w_a * x + w_b * y)
                .collect();
            crate::bayes::Cpt::new(
                a.parents().to_vec(),
                a.cardinality(),
                a.parent_cards().to_vec(),
                values,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    BayesNet::new(
        m_a.variables().to_vec(),
        m_a.dag().clone(),
        cpts,
        w_a * m_a.sample_weight() + w_b * m_b.sample_weight(),
    )
}

/// Merges the parameters of `m_a` with data `d_b` from another device,
/// keeping `m_a`'s structure. Every CPT row seen in `d_b` becomes
/// `w_a * P_a + w_b * P_b` with `P_b` the row's frequencies in `d_b`.
pub fn merge_via_refit(
    m_a: &BayesNet,
    d_b: &DiscreteBatch,
    w_a: f64,
    w_b: f64,
) -> Result<BayesNet> {
    check_weights(w_a, w_b)?;
    if d_b.is_empty() || w_b == 0.0 {
        return Ok(m_a.clone());
    }
    parl_update_proportional(m_a, d_b, w_a / w_b)
}

/// Combines the selected donors into one model: a single donor is copied,
/// a pair is merged cellwise when compatible and by refit otherwise.
pub fn merge_donors(donors: &[(&RegistryEntry, f64)]) -> Result<BayesNet> {
    match donors {
        [] => Err(invalid("no donor models")),
        [(a, _)] => Ok(a.model.clone()),
        [(a, wa), (b, wb)] => match merge_cpts(&a.model, &b.model, *wa, *wb) {
            Err(Error::IncompatibleModels(why)) => {
                log::debug!(
                    "merging {} and {} by refit: {why}",
                    a.device_type,
                    b.device_type
                );
                // the heavier donor keeps its structure; on a tie, the smaller one
                let entries = |m: &BayesNet| m.cpts().iter().map(|c| c.len()).sum::<usize>();
                if wa > wb || (wa == wb && entries(&a.model) <= entries(&b.model)) {
                    merge_via_refit(&a.model, &b.backup_data, *wa, *wb)
                } else {
                    merge_via_refit(&b.model, &a.backup_data, *wb, *wa)
                }
            }
            other => other,
        },
        _ => Err(invalid("at most two donors can be merged")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn donor_examples() {
        let w = donor_weights(&[2, 5], 4);
        assert_eq!(w[0].0, 0);
        assert!((w[0].1 - 1.0 / 3.0).abs() < 1e-12);
        assert!((w[1].1 - 2.0 / 3.0).abs() < 1e-12);
        let w = donor_weights(&[2, 7], 3);
        assert!((w[0].1 - 0.8).abs() < 1e-12 && (w[1].1 - 0.2).abs() < 1e-12);
        let w = donor_weights(&[3, 5], 4);
        assert_eq!((w[0].1, w[1].1), (0.5, 0.5));
        assert_eq!(donor_weights(&[1, 4, 4], 4), vec![(1, 1.0)]);
        assert_eq!(donor_weights(&[1, 2], 4), vec![(1, 1.0)]);
        assert_eq!(donor_weights(&[], 4), vec![]);
    }
}
