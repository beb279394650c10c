use crate::error::{invalid, Result};

/// Row-sum tolerance for a normalized CPT.
pub const ROW_TOLERANCE: f64 = 1e-9;

/// Conditional probability table of one variable given its ordered parents.
///
/// `values` is row-major: one row per parent-state combination (first parent
/// most significant), one column per state of the variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    pub(crate) parents: Vec<usize>,
    card: usize,
    parent_cards: Vec<usize>,
    values: Vec<f64>,
}

impl Cpt {
    pub fn new(
        parents: Vec<usize>,
        card: usize,
        parent_cards: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if parents.len() != parent_cards.len() {
            return Err(invalid(
                "parent list and parent cardinalities differ in length",
            ));
        }
        let rows: usize = parent_cards.iter().product();
        if values.len() != rows * card {
            return Err(invalid(format!(
                "CPT has {} entries, expected {}",
                values.len(),
                rows * card
            )));
        }
        Ok(Cpt {
            parents,
            card,
            parent_cards,
            values,
        })
    }

    pub fn uniform(parents: Vec<usize>, card: usize, parent_cards: Vec<usize>) -> Self {
        let rows: usize = parent_cards.iter().product();
        Cpt {
            parents,
            card,
            parent_cards,
            values: vec![1.0 / card as f64; rows * card],
        }
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn cardinality(&self) -> usize {
        self.card
    }

    pub fn parent_cards(&self) -> &[usize] {
        &self.parent_cards
    }

    pub fn row_count(&self) -> usize {
        self.parent_cards.iter().product()
    }

    /// Total number of table cells.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row_index(&self, parent_states: &[usize]) -> usize {
        parent_states
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&s, &c)| acc * c + s)
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.card..(row + 1) * self.card]
    }

    pub fn prob(&self, parent_states: &[usize], state: usize) -> f64 {
        self.values[self.row_index(parent_states) * self.card + state]
    }

    /// Index of the first row whose sum deviates from 1 beyond the tolerance,
    /// or of an entry outside [0, 1].
    pub fn first_invalid_row(&self) -> Option<(usize, f64)> {
        (0..self.row_count()).find_map(|r| {
            let row = self.row(r);
            let sum: f64 = row.iter().sum();
            let bad_entry = row.iter().any(|&p| !(0.0..=1.0).contains(&p) || p.is_nan());
            ((sum - 1.0).abs() > ROW_TOLERANCE || bad_entry).then_some((r, sum))
        })
    }

    pub fn same_shape(&self, other: &Cpt) -> bool {
        self.card == other.card
            && self.parent_cards == other.parent_cards
            && self.parents == other.parents
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_indexing() {
        // parents with cards 2 and 3, child card 2
        let values: Vec<f64> = (0..6)
            .flat_map(|r| [r as f64 / 10.0, 1.0 - r as f64 / 10.0])
            .collect();
        let cpt = Cpt::new(vec![0, 1], 2, vec![2, 3], values).unwrap();
        assert_eq!(cpt.row_index(&[1, 2]), 5);
        assert!((cpt.prob(&[1, 0], 0) - 0.3).abs() < 1e-15);
        assert!(cpt.first_invalid_row().is_none());
    }

    #[test]
    fn detects_unnormalized_rows() {
        let cpt = Cpt::new(vec![], 2, vec![], vec![0.5, 0.6]).unwrap();
        assert_eq!(cpt.first_invalid_row().map(|r| r.0), Some(0));
    }
}
