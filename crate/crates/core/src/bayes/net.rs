use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bayes::{Cpt, Dag, Evidence, VariableSpec};
use crate::error::{invalid, Error, Result};

/// A discrete Bayesian network: DAG, one CPT per node and the number of
/// observations its parameters summarize.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    variables: Vec<VariableSpec>,
    dag: Dag,
    cpts: Vec<Cpt>,
    sample_weight: f64,
}

impl BayesNet {
    pub fn new(
        variables: Vec<VariableSpec>,
        dag: Dag,
        cpts: Vec<Cpt>,
        sample_weight: f64,
    ) -> Result<Self> {
        if variables.len() != dag.len() || cpts.len() != dag.len() {
            return Err(invalid("variables, DAG nodes and CPTs differ in count"));
        }
        for (i, v) in variables.iter().enumerate() {
            v.validate()?;
            if v.name != dag.name(i) {
                return Err(invalid(format!(
                    "variable `{}` does not match DAG node `{}`",
                    v.name,
                    dag.name(i)
                )));
            }
            let cpt = &cpts[i];
            if cpt.parents() != dag.parents(i) {
                return Err(invalid(format!(
                    "CPT parents of `{}` differ from the DAG",
                    v.name
                )));
            }
            let expect: Vec<usize> = dag
                .parents(i)
                .iter()
                .map(|&p| variables[p].cardinality())
                .collect();
            if cpt.cardinality() != v.cardinality() || cpt.parent_cards() != expect.as_slice() {
                return Err(invalid(format!(
                    "CPT shape of `{}` does not match cardinalities",
                    v.name
                )));
            }
            if let Some((row, sum)) = cpt.first_invalid_row() {
                return Err(Error::NotNormalized {
                    variable: v.name.clone(),
                    row,
                    sum,
                });
            }
        }
        if !(sample_weight >= 0.0) {
            return Err(invalid("sample_weight must be non-negative"));
        }
        Ok(BayesNet {
            variables,
            dag,
            cpts,
            sample_weight,
        })
    }

    pub(crate) fn from_parts_unchecked(
        variables: Vec<VariableSpec>,
        dag: Dag,
        cpts: Vec<Cpt>,
        sample_weight: f64,
    ) -> Self {
        BayesNet {
            variables,
            dag,
            cpts,
            sample_weight,
        }
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn variable(&self, i: usize) -> &VariableSpec {
        &self.variables[i]
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cpt(&self, i: usize) -> &Cpt {
        &self.cpts[i]
    }

    pub fn cpt_by_name(&self, name: &str) -> Result<&Cpt> {
        Ok(&self.cpts[self.require(name)?])
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn sample_weight(&self) -> f64 {
        self.sample_weight
    }

    pub fn cardinality(&self, i: usize) -> usize {
        self.variables[i].cardinality()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dag.index_of(name)
    }

    pub(crate) fn require(&self, name: &str) -> Result<usize> {
        self.dag.require(name)
    }

    pub fn node_names(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().map(|v| v.name.as_str())
    }

    /// Resolves evidence labels to (node, state) index pairs.
    pub fn resolve_evidence(&self, evidence: &Evidence) -> Result<Vec<(usize, usize)>> {
        evidence
            .iter()
            .map(|(var, state)| {
                let i = self.require(var)?;
                Ok((i, self.variables[i].require_state(state)?))
            })
            .collect()
    }

    pub fn resolve_names<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<Vec<usize>> {
        names.into_iter().map(|n| self.require(n)).collect()
    }

    pub fn names_of(&self, nodes: &BTreeSet<usize>) -> BTreeSet<String> {
        nodes
            .iter()
            .map(|&i| self.variables[i].name.clone())
            .collect()
    }

    /// True when both models have the same node names, edges and state labels.
    pub fn same_structure(&self, other: &BayesNet) -> bool {
        self.variables == other.variables && self.dag == other.dag
    }

    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            variables: self.variables.clone(),
            edges: self.dag.named_edges(),
            cpts: self
                .cpts
                .iter()
                .enumerate()
                .map(|(i, c)| CptDocument {
                    variable: self.variables[i].name.clone(),
                    parents: c
                        .parents()
                        .iter()
                        .map(|&p| self.variables[p].name.clone())
                        .collect(),
                    values: c.values().to_vec(),
                })
                .collect(),
            sample_weight: self.sample_weight,
        }
    }

    pub fn from_document(doc: &ModelDocument) -> Result<Self> {
        let names: Vec<String> = doc.variables.iter().map(|v| v.name.clone()).collect();
        let mut dag = Dag::new(names.iter().cloned())?;
        let mut cpts = Vec::with_capacity(names.len());
        // CPT parent order defines DAG parent order.
        let mut by_var = Vec::with_capacity(names.len());
        for name in &names {
            let c = doc
                .cpts
                .iter()
                .find(|c| &c.variable == name)
                .ok_or_else(|| invalid(format!("missing CPT for `{name}`")))?;
            by_var.push(c);
        }
        for (i, c) in by_var.iter().enumerate() {
            for p in &c.parents {
                let pi = dag.require(p)?;
                dag.add_edge(pi, i)?;
            }
        }
        let mut doc_edges: Vec<(String, String)> = doc.edges.clone();
        let mut dag_edges = dag.named_edges();
        doc_edges.sort();
        dag_edges.sort();
        if doc_edges != dag_edges {
            return Err(invalid("edge list disagrees with CPT parent lists"));
        }
        for (i, c) in by_var.iter().enumerate() {
            let parents = dag.parents(i).to_vec();
            let pc = parents
                .iter()
                .map(|&p| doc.variables[p].cardinality())
                .collect();
            cpts.push(Cpt::new(
                parents,
                doc.variables[i].cardinality(),
                pc,
                c.values.clone(),
            )?);
        }
        BayesNet::new(doc.variables.clone(), dag, cpts, doc.sample_weight)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        BayesNet::from_document(&doc)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        BayesNet::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Serialized model: variables, edges, row-major CPT values and sample weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub variables: Vec<VariableSpec>,
    pub edges: Vec<(String, String)>,
    pub cpts: Vec<CptDocument>,
    pub sample_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CptDocument {
    pub variable: String,
    pub parents: Vec<String>,
    pub values: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node() -> BayesNet {
        let vars = vec![
            VariableSpec::new("a", ["0", "1"]).unwrap(),
            VariableSpec::new("b", ["x", "y", "z"]).unwrap(),
        ];
        let dag = Dag::with_edges(["a", "b"], &[("a", "b")]).unwrap();
        let cpts = vec![
            Cpt::new(vec![], 2, vec![], vec![0.25, 0.75]).unwrap(),
            Cpt::new(
                vec![0],
                3,
                vec![2],
                vec![0.1, 0.2, 0.7, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            )
            .unwrap(),
        ];
        BayesNet::new(vars, dag, cpts, 12.0).unwrap()
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let net = two_node();
        let back = BayesNet::from_json(&net.to_json().unwrap()).unwrap();
        assert_eq!(net, back);
        // bitwise equality of every probability
        for (a, b) in net.cpts().iter().zip(back.cpts()) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn tampered_rows_fail_import() {
        let mut doc = two_node().to_document();
        doc.cpts[1].values[0] = 0.3;
        let err = BayesNet::from_document(&doc).unwrap_err();
        assert!(err.to_string().contains("CPT row not normalized"));
    }

    #[test]
    fn inconsistent_edges_fail_import() {
        let mut doc = two_node().to_document();
        doc.edges.clear();
        assert!(BayesNet::from_document(&doc).is_err());
    }
}
