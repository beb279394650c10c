use std::collections::BTreeSet;

use crate::bayes::{BayesNet, Dag};
use crate::error::Result;

/// Parents, children and co-parents of `node`, by index.
pub fn blanket_of(dag: &Dag, node: usize) -> BTreeSet<usize> {
    let mut mb: BTreeSet<usize> = dag.parents(node).iter().copied().collect();
    for c in dag.children(node) {
        mb.insert(c);
        mb.extend(dag.parents(c).iter().copied());
    }
    mb.remove(&node);
    mb
}

/// Union of the Markov blankets of `targets`, without the targets themselves.
pub fn markov_blanket<'a>(
    model: &BayesNet,
    targets: impl IntoIterator<Item = &'a str>,
) -> Result<BTreeSet<String>> {
    let idx = model.resolve_names(targets)?;
    Ok(model.names_of(&blanket_indices(model.dag(), &idx)))
}

pub fn blanket_indices(dag: &Dag, targets: &[usize]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &t in targets {
        out.extend(blanket_of(dag, t));
    }
    for t in targets {
        out.remove(t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collider_includes_co_parent() {
        let dag = Dag::with_edges(["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
        assert_eq!(blanket_of(&dag, 0), BTreeSet::from([1, 2]));
    }

    #[test]
    fn isolated_node_has_empty_blanket() {
        let dag = Dag::with_edges(["a", "b", "c"], &[("a", "b")]).unwrap();
        assert!(blanket_of(&dag, 2).is_empty());
    }

    #[test]
    fn multi_target_union_excludes_targets() {
        let dag =
            Dag::with_edges(["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("d", "c")]).unwrap();
        assert_eq!(blanket_indices(&dag, &[0, 1]), BTreeSet::from([2, 3]));
    }
}
