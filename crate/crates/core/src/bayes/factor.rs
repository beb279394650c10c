/// A non-negative table over a set of discrete variables (node indices).
///
/// Values are row-major with the first variable most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    vars: Vec<usize>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    pub fn new(vars: Vec<usize>, cards: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(vars.len(), cards.len());
        debug_assert_eq!(values.len(), cards.iter().product::<usize>());
        Factor {
            vars,
            cards,
            values,
        }
    }

    pub fn scalar(value: f64) -> Self {
        Factor::new(Vec::new(), Vec::new(), vec![value])
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn contains(&self, var: usize) -> bool {
        self.vars.contains(&var)
    }

    pub fn is_scalar(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.vars.len()];
        for i in (0..self.vars.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.cards[i + 1];
        }
        s
    }

    /// Fixes `var` to `state`, dropping it from the scope.
    pub fn reduce(&self, var: usize, state: usize) -> Factor {
        let Some(pos) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let outer: usize = self.cards[..pos].iter().product();
        let inner = strides[pos];
        let mut values = Vec::with_capacity(self.values.len() / self.cards[pos]);
        for o in 0..outer {
            let base = o * self.cards[pos] * inner + state * inner;
            values.extend_from_slice(&self.values[base..base + inner]);
        }
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        Factor {
            vars,
            cards,
            values,
        }
    }

    /// Sums `var` out of the factor.
    pub fn sum_out(&self, var: usize) -> Factor {
        let Some(pos) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let outer: usize = self.cards[..pos].iter().product();
        let inner = strides[pos];
        let card = self.cards[pos];
        let mut values = vec![0.0; outer * inner];
        for o in 0..outer {
            for s in 0..card {
                let base = (o * card + s) * inner;
                for i in 0..inner {
                    values[o * inner + i] += self.values[base + i];
                }
            }
        }
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        Factor {
            vars,
            cards,
            values,
        }
    }

    /// Pointwise product; the scope is `self`'s variables followed by the new ones from `other`.
    pub fn product(&self, other: &Factor) -> Factor {
        if other.is_scalar() {
            return self.scaled(other.values[0]);
        }
        if self.is_scalar() {
            return other.scaled(self.values[0]);
        }
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        for (&v, &c) in other.vars.iter().zip(&other.cards) {
            if !vars.contains(&v) {
                vars.push(v);
                cards.push(c);
            }
        }
        // stride of each output variable inside each operand (0 when absent)
        let sa = self.strides();
        let sb = other.strides();
        let stride_in = |f: &Factor, s: &[usize], v: usize| {
            f.vars.iter().position(|&x| x == v).map_or(0, |p| s[p])
        };
        let a_str: Vec<usize> = vars.iter().map(|&v| stride_in(self, &sa, v)).collect();
        let b_str: Vec<usize> = vars.iter().map(|&v| stride_in(other, &sb, v)).collect();
        let size: usize = cards.iter().product();
        let mut values = Vec::with_capacity(size);
        let mut assign = vec![0usize; vars.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..size {
            values.push(self.values[ia] * other.values[ib]);
            // increment the mixed-radix counter, last variable fastest
            for d in (0..vars.len()).rev() {
                assign[d] += 1;
                ia += a_str[d];
                ib += b_str[d];
                if assign[d] < cards[d] {
                    break;
                }
                ia -= a_str[d] * cards[d];
                ib -= b_str[d] * cards[d];
                assign[d] = 0;
            }
        }
        Factor {
            vars,
            cards,
            values,
        }
    }

    pub fn scaled(&self, k: f64) -> Factor {
        Factor {
            vars: self.vars.clone(),
            cards: self.cards.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    /// Reorders the scope to `order`, which must be a permutation of the current variables.
    pub fn permuted(&self, order: &[usize]) -> Factor {
        if order == self.vars.as_slice() {
            return self.clone();
        }
        let strides = self.strides();
        let src: Vec<usize> = order
            .iter()
            .map(|v| {
                strides[self
                    .vars
                    .iter()
                    .position(|x| x == v)
                    .expect("variable in scope")]
            })
            .collect();
        let cards: Vec<usize> = order
            .iter()
            .map(|v| self.cards[self.vars.iter().position(|x| x == v).unwrap()])
            .collect();
        let size = self.values.len();
        let mut values = Vec::with_capacity(size);
        let mut assign = vec![0usize; order.len()];
        let mut idx = 0usize;
        for _ in 0..size {
            values.push(self.values[idx]);
            for d in (0..order.len()).rev() {
                assign[d] += 1;
                idx += src[d];
                if assign[d] < cards[d] {
                    break;
                }
                idx -= src[d] * cards[d];
                assign[d] = 0;
            }
        }
        Factor {
            vars: order.to_vec(),
            cards,
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_sum_out() {
        // f(a) * g(a, b) summed over a
        let f = Factor::new(vec![0], vec![2], vec![0.3, 0.7]);
        let g = Factor::new(vec![0, 1], vec![2, 3], vec![0.1, 0.2, 0.7, 0.5, 0.25, 0.25]);
        let p = f.product(&g);
        assert_eq!(p.vars(), &[0, 1]);
        let m = p.sum_out(0);
        let expect = [
            0.3 * 0.1 + 0.7 * 0.5,
            0.3 * 0.2 + 0.7 * 0.25,
            0.3 * 0.7 + 0.7 * 0.25,
        ];
        for (a, b) in m.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn product_with_disjoint_scopes_is_outer() {
        let f = Factor::new(vec![2], vec![2], vec![1.0, 2.0]);
        let g = Factor::new(vec![5], vec![3], vec![1.0, 10.0, 100.0]);
        let p = f.product(&g);
        assert_eq!(p.values(), &[1.0, 10.0, 100.0, 2.0, 20.0, 200.0]);
    }

    #[test]
    fn reduce_and_permute() {
        let g = Factor::new(vec![0, 1], vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(g.reduce(0, 1).values(), &[4.0, 5.0, 6.0]);
        assert_eq!(g.reduce(1, 2).values(), &[3.0, 6.0]);
        assert_eq!(
            g.permuted(&[1, 0]).values(),
            &[1.0, 4.0, 2.0, 5.0, 3.0, 6.0]
        );
    }
}
