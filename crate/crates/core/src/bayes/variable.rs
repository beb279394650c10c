use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A named categorical variable with an ordered list of state labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub states: Vec<String>,
}

impl VariableSpec {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        states: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let spec = VariableSpec {
            name: name.into(),
            states: states.into_iter().map(Into::into).collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Boolean variable with states `false`, `true` (in that order).
    pub fn boolean(name: impl Into<String>) -> Self {
        VariableSpec {
            name: name.into(),
            states: vec!["false".into(), "true".into()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(invalid(format!("variable `{}` has no states", self.name)));
        }
        for (i, s) in self.states.iter().enumerate() {
            if self.states[..i].contains(s) {
                return Err(invalid(format!(
                    "variable `{}` has duplicate state `{s}`",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    pub(crate) fn require_state(&self, label: &str) -> Result<usize> {
        self.state_index(label).ok_or_else(|| Error::UnknownState {
            variable: self.name.clone(),
            state: label.to_string(),
        })
    }

    /// Appends the labels of `other` that are not yet present, keeping existing order.
    pub fn widened(&self, other: &VariableSpec) -> VariableSpec {
        let mut states = self.states.clone();
        for s in &other.states {
            if !states.contains(s) {
                states.push(s.clone());
            }
        }
        VariableSpec {
            name: self.name.clone(),
            states,
        }
    }
}

/// Observed assignments, variable name to state label.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence(pub BTreeMap<String, String>);

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, variable: impl Into<String>, state: impl Into<String>) -> Self {
        self.0.insert(variable.into(), state.into());
        self
    }

    pub fn insert(&mut self, variable: impl Into<String>, state: impl Into<String>) {
        self.0.insert(variable.into(), state.into());
    }

    pub fn get(&self, variable: &str) -> Option<&str> {
        self.0.get(variable).map(String::as_str)
    }

    pub fn contains(&self, variable: &str) -> bool {
        self.0.contains_key(variable)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Keeps only the assignments whose variable satisfies `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&str) -> bool) -> Evidence {
        Evidence(
            self.0
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Evidence {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Evidence(
            iter.into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_states_rejected() {
        assert!(VariableSpec::new("a", ["x", "y", "x"]).is_err());
        assert!(VariableSpec::new("a", Vec::<String>::new()).is_err());
    }

    #[test]
    fn widening_appends_new_labels() {
        let a = VariableSpec::new("v", ["0", "1"]).unwrap();
        let b = VariableSpec::new("v", ["1", "2"]).unwrap();
        assert_eq!(a.widened(&b).states, vec!["0", "1", "2"]);
    }
}
