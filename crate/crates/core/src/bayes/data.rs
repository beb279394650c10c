use crate::bayes::VariableSpec;
use crate::error::{invalid, Error, Result};

/// A window of categorical observations: one row per sample, one column per variable.
///
/// Rows are stored flattened; values are state indices into the column's
/// [`VariableSpec`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteBatch {
    schema: Vec<VariableSpec>,
    values: Vec<usize>,
}

impl DiscreteBatch {
    pub fn new(schema: Vec<VariableSpec>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut batch = DiscreteBatch::empty(schema)?;
        for row in rows {
            batch.push_row(&row)?;
        }
        Ok(batch)
    }

    pub fn empty(schema: Vec<VariableSpec>) -> Result<Self> {
        for (i, v) in schema.iter().enumerate() {
            v.validate()?;
            if schema[..i].iter().any(|w| w.name == v.name) {
                return Err(invalid(format!("duplicate column `{}`", v.name)));
            }
        }
        Ok(DiscreteBatch {
            schema,
            values: Vec::new(),
        })
    }

    /// Builds a batch from rows of state labels.
    pub fn from_labels<S: AsRef<str>>(schema: Vec<VariableSpec>, rows: &[Vec<S>]) -> Result<Self> {
        let mut batch = DiscreteBatch::empty(schema)?;
        for row in rows {
            if row.len() != batch.width() {
                return Err(invalid("row width does not match schema"));
            }
            let idx = row
                .iter()
                .zip(&batch.schema)
                .map(|(l, v)| v.require_state(l.as_ref()))
                .collect::<Result<Vec<_>>>()?;
            batch.values.extend(idx);
        }
        Ok(batch)
    }

    pub fn schema(&self) -> &[VariableSpec] {
        &self.schema
    }

    pub fn width(&self) -> usize {
        self.schema.len()
    }

    pub fn len(&self) -> usize {
        if self.schema.is_empty() {
            0
        } else {
            self.values.len() / self.schema.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|v| v.name == name)
    }

    pub(crate) fn require_column(&self, name: &str) -> Result<usize> {
        self.column_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn row(&self, i: usize) -> &[usize] {
        let w = self.width();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.values.chunks_exact(self.width().max(1))
    }

    pub fn label(&self, row: usize, col: usize) -> &str {
        &self.schema[col].states[self.row(row)[col]]
    }

    pub fn push_row(&mut self, row: &[usize]) -> Result<()> {
        if row.len() != self.width() {
            return Err(invalid(format!(
                "row has {} values, schema has {} columns",
                row.len(),
                self.width()
            )));
        }
        for (v, spec) in row.iter().zip(&self.schema) {
            if *v >= spec.cardinality() {
                return Err(invalid(format!(
                    "state index {v} out of range for `{}`",
                    spec.name
                )));
            }
        }
        self.values.extend_from_slice(row);
        Ok(())
    }

    /// Union of two batches sharing the same column names. State lists are
    /// widened by label so new categories in `other` extend the schema.
    pub fn union(&self, other: &DiscreteBatch) -> Result<DiscreteBatch> {
        if self.width() != other.width()
            || self
                .schema
                .iter()
                .any(|v| other.column_index(&v.name).is_none())
        {
            return Err(invalid("batches do not share a schema"));
        }
        let schema: Vec<VariableSpec> = self
            .schema
            .iter()
            .map(|v| v.widened(&other.schema[other.column_index(&v.name).unwrap()]))
            .collect();
        let mut out = DiscreteBatch {
            schema,
            values: self.values.clone(),
        };
        // other's column c maps to out's column col_map[c] with relabelled states
        let col_map: Vec<usize> = other
            .schema
            .iter()
            .map(|v| self.column_index(&v.name).unwrap())
            .collect();
        let state_maps: Vec<Vec<usize>> = other
            .schema
            .iter()
            .zip(&col_map)
            .map(|(v, &c)| {
                v.states
                    .iter()
                    .map(|s| out.schema[c].state_index(s).unwrap())
                    .collect()
            })
            .collect();
        let w = out.width();
        let mut buf = vec![0; w];
        for row in other.rows() {
            for (c, &v) in row.iter().enumerate() {
                buf[col_map[c]] = state_maps[c][v];
            }
            out.values.extend_from_slice(&buf);
        }
        Ok(out)
    }

    /// Keeps the last `n` rows.
    pub fn tail(&self, n: usize) -> DiscreteBatch {
        let keep = n.min(self.len());
        let start = (self.len() - keep) * self.width();
        DiscreteBatch {
            schema: self.schema.clone(),
            values: self.values[start..].to_vec(),
        }
    }

    /// Replaces a column's state labels; the new label list must be a superset
    /// (by label) of the values that appear.
    pub fn with_widened_schema(&self, schema: &[VariableSpec]) -> Result<DiscreteBatch> {
        let target = DiscreteBatch::empty(schema.to_vec())?;
        target.union(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str, states: &[&str]) -> VariableSpec {
        VariableSpec::new(name, states.iter().copied()).unwrap()
    }

    #[test]
    fn rejects_out_of_range_values() {
        let err = DiscreteBatch::new(vec![spec("a", &["0", "1"])], vec![vec![2]]);
        assert!(err.is_err());
    }

    #[test]
    fn union_widens_and_relabels() {
        let a = DiscreteBatch::from_labels(
            vec![spec("x", &["lo", "hi"]), spec("y", &["0"])],
            &[vec!["hi", "0"]],
        )
        .unwrap();
        // columns in a different order, with an extra label
        let b = DiscreteBatch::from_labels(
            vec![spec("y", &["1", "0"]), spec("x", &["hi"])],
            &[vec!["1", "hi"], vec!["0", "hi"]],
        )
        .unwrap();
        let u = a.union(&b).unwrap();
        assert_eq!(u.len(), 3);
        assert_eq!(u.schema()[1].states, vec!["0", "1"]);
        assert_eq!(u.label(1, 0), "hi");
        assert_eq!(u.label(1, 1), "1");
        assert_eq!(u.label(2, 1), "0");
    }

    #[test]
    fn tail_keeps_last_rows() {
        let b = DiscreteBatch::new(
            vec![spec("a", &["0", "1"])],
            vec![vec![0], vec![1], vec![1]],
        )
        .unwrap();
        let t = b.tail(2);
        assert_eq!(t.len(), 2);
        assert_eq!(t.row(0), &[1]);
    }
}
