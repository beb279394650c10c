use std::collections::{BTreeSet, HashMap};

use crate::error::{invalid, Error, Result};

/// Directed acyclic graph over named nodes.
///
/// Parent lists keep insertion order, which is also the axis order of the
/// corresponding CPT. Every mutation preserves acyclicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    nodes: Vec<String>,
    parents: Vec<Vec<usize>>,
}

impl Dag {
    pub fn new<S: Into<String>>(nodes: impl IntoIterator<Item = S>) -> Result<Self> {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        for (i, n) in nodes.iter().enumerate() {
            if nodes[..i].contains(n) {
                return Err(invalid(format!("duplicate node `{n}`")));
            }
        }
        let parents = vec![Vec::new(); nodes.len()];
        Ok(Dag { nodes, parents })
    }

    /// Builds a graph from named edges, rejecting unknown endpoints and cycles.
    pub fn with_edges<S: Into<String>>(
        nodes: impl IntoIterator<Item = S>,
        edges: &[(&str, &str)],
    ) -> Result<Self> {
        let mut dag = Dag::new(nodes)?;
        for (p, c) in edges {
            dag.add_edge_by_name(p, c)?;
        }
        Ok(dag)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub(crate) fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&c| self.parents[c].contains(&i))
            .collect()
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.parents[child].contains(&parent)
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Edges as (parent, child) index pairs, grouped by child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
            .collect()
    }

    pub fn named_edges(&self) -> Vec<(String, String)> {
        self.edges()
            .into_iter()
            .map(|(p, c)| (self.nodes[p].clone(), self.nodes[c].clone()))
            .collect()
    }

    /// True when a directed path `from ->* to` exists.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let children = self.child_lists();
        let mut seen = vec![false; self.len()];
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            stack.extend(children[v].iter().copied().filter(|&c| !seen[c]));
        }
        false
    }

    pub fn would_create_cycle(&self, parent: usize, child: usize) -> bool {
        self.reaches(child, parent)
    }

    pub fn add_edge(&mut self, parent: usize, child: usize) -> Result<()> {
        if parent >= self.len() || child >= self.len() {
            return Err(invalid("edge endpoint out of range"));
        }
        if self.has_edge(parent, child) {
            return Ok(());
        }
        if self.would_create_cycle(parent, child) {
            return Err(Error::Cycle {
                parent: self.nodes[parent].clone(),
                child: self.nodes[child].clone(),
            });
        }
        self.parents[child].push(parent);
        Ok(())
    }

    pub fn add_edge_by_name(&mut self, parent: &str, child: &str) -> Result<()> {
        let p = self.require(parent)?;
        let c = self.require(child)?;
        self.add_edge(p, c)
    }

    pub fn remove_edge(&mut self, parent: usize, child: usize) -> bool {
        let before = self.parents[child].len();
        self.parents[child].retain(|&p| p != parent);
        before != self.parents[child].len()
    }

    pub fn topological_order(&self) -> Vec<usize> {
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let children = self.child_lists();
        let mut ready: BTreeSet<usize> = (0..self.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }

    /// The given nodes together with all of their ancestors.
    pub fn ancestral_closure(&self, nodes: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<usize> = nodes.into_iter().collect();
        while let Some(v) = stack.pop() {
            if out.insert(v) {
                stack.extend(self.parents[v].iter().copied());
            }
        }
        out
    }

    /// Same node set without any edges.
    pub fn empty_like(&self) -> Dag {
        Dag {
            nodes: self.nodes.clone(),
            parents: vec![Vec::new(); self.len()],
        }
    }

    /// Re-indexes the graph onto another node ordering that contains the same names.
    pub fn reindexed(&self, order: &[String]) -> Result<Dag> {
        let map: HashMap<&str, usize> = order
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut dag = Dag::new(order.iter().cloned())?;
        for (p, c) in self.edges() {
            let p2 = *map
                .get(self.nodes[p].as_str())
                .ok_or_else(|| Error::UnknownVariable(self.nodes[p].clone()))?;
            let c2 = *map
                .get(self.nodes[c].as_str())
                .ok_or_else(|| Error::UnknownVariable(self.nodes[c].clone()))?;
            dag.parents[c2].push(p2);
        }
        Ok(dag)
    }

    fn child_lists(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.len()];
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        children
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_are_rejected() {
        let mut g = Dag::new(["a", "b", "c"]).unwrap();
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        assert!(matches!(g.add_edge(2, 0), Err(Error::Cycle { .. })));
        assert!(g.add_edge(1, 1).is_err());
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn unknown_endpoint() {
        let mut g = Dag::new(["a"]).unwrap();
        assert!(matches!(
            g.add_edge_by_name("a", "zz"),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn topo_order_respects_edges() {
        let g = Dag::with_edges(["c", "b", "a"], &[("a", "b"), ("b", "c")]).unwrap();
        let order = g.topological_order();
        let pos = |n: &str| order.iter().position(|&i| g.name(i) == n).unwrap();
        assert!(pos("a") < pos("b") && pos("b") < pos("c"));
    }
}
