//! Discrete factors over node indices, used by exact inference and clique
//! factorisations.

/// A nonnegative table over `vars`. Values are laid out with the first
/// variable varying slowest; `vars` is kept sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub vars: Vec<usize>,
    pub cards: Vec<usize>,
    pub values: Vec<f64>,
}

impl Factor {
    pub fn scalar(v: f64) -> Self {
        Factor {
            vars: Vec::new(),
            cards: Vec::new(),
            values: vec![v],
        }
    }

    /// Builds a factor from values laid out over `vars` in the given order,
    /// reordering to ascending variable order.
    pub fn new(vars: Vec<usize>, cards: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), cards.iter().product::<usize>());
        let mut perm: Vec<usize> = (0..vars.len()).collect();
        perm.sort_by_key(|&k| vars[k]);
        if perm.iter().enumerate().all(|(i, &k)| i == k) {
            return Factor {
                vars,
                cards,
                values,
            };
        }
        let new_vars: Vec<usize> = perm.iter().map(|&k| vars[k]).collect();
        let new_cards: Vec<usize> = perm.iter().map(|&k| cards[k]).collect();
        let mut out = vec![0.0; values.len()];
        let mut assign = vec![0usize; vars.len()];
        for v in &values {
            let mut idx = 0;
            for &k in &perm {
                idx = idx * cards[k] + assign[k];
            }
            out[idx] = *v;
            increment(&mut assign, &cards);
        }
        Factor {
            vars: new_vars,
            cards: new_cards,
            values: out,
        }
    }

    fn stride_of(&self, var: usize) -> Option<(usize, usize)> {
        let pos = self.vars.iter().position(|&v| v == var)?;
        let stride: usize = self.cards[pos + 1..].iter().product();
        Some((stride, self.cards[pos]))
    }

    /// Value at a full assignment indexed by node.
    pub fn value_at(&self, assignment: &[usize]) -> f64 {
        let mut idx = 0;
        for (&v, &c) in self.vars.iter().zip(&self.cards) {
            idx = idx * c + assignment[v];
        }
        self.values[idx]
    }

    pub fn product(&self, other: &Factor) -> Factor {
        let mut vars: Vec<usize> = self.vars.iter().chain(&other.vars).copied().collect();
        vars.sort_unstable();
        vars.dedup();
        let cards: Vec<usize> = vars
            .iter()
            .map(|v| {
                self.vars
                    .iter()
                    .position(|x| x == v)
                    .map(|k| self.cards[k])
                    .unwrap_or_else(|| other.cards[other.vars.iter().position(|x| x == v).unwrap()])
            })
            .collect();
        let size: usize = cards.iter().product();
        let map_a: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|x| x == v).unwrap())
            .collect();
        let map_b: Vec<usize> = other
            .vars
            .iter()
            .map(|v| vars.iter().position(|x| x == v).unwrap())
            .collect();
        let mut values = Vec::with_capacity(size);
        let mut assign = vec![0usize; vars.len()];
        for _ in 0..size {
            let ia = map_a
                .iter()
                .zip(&self.cards)
                .fold(0, |acc, (&k, &c)| acc * c + assign[k]);
            let ib = map_b
                .iter()
                .zip(&other.cards)
                .fold(0, |acc, (&k, &c)| acc * c + assign[k]);
            values.push(self.values[ia] * other.values[ib]);
            increment(&mut assign, &cards);
        }
        Factor {
            vars,
            cards,
            values,
        }
    }

    /// Sums `var` out. A factor not mentioning `var` is returned unchanged.
    pub fn sum_out(&self, var: usize) -> Factor {
        let Some((stride, card)) = self.stride_of(var) else {
            return self.clone();
        };
        let pos = self.vars.iter().position(|&v| v == var).unwrap();
        let outer = self.values.len() / (stride * card);
        let mut values = vec![0.0; outer * stride];
        for o in 0..outer {
            for k in 0..card {
                let base = (o * card + k) * stride;
                for s in 0..stride {
                    values[o * stride + s] += self.values[base + s];
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

    /// Marginal over `keep` (which must be a subset of `vars`).
    pub fn marginal(&self, keep: &[usize]) -> Factor {
        let mut f = self.clone();
        for &v in &self.vars {
            if !keep.contains(&v) {
                f = f.sum_out(v);
            }
        }
        f
    }

    /// Restricts `var` to `value` and drops it from the scope.
    pub fn reduce(&self, var: usize, value: usize) -> Factor {
        let Some((stride, card)) = self.stride_of(var) else {
            return self.clone();
        };
        let pos = self.vars.iter().position(|&v| v == var).unwrap();
        let outer = self.values.len() / (stride * card);
        let mut values = Vec::with_capacity(outer * stride);
        for o in 0..outer {
            let base = (o * card + value) * stride;
            values.extend_from_slice(&self.values[base..base + stride]);
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

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn normalized(mut self) -> Factor {
        let t = self.total();
        if t > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= t);
        }
        self
    }
}

/// Advances a mixed-radix counter, last digit fastest.
pub(crate) fn increment(assign: &mut [usize], cards: &[usize]) {
    for k in (0..assign.len()).rev() {
        assign[k] += 1;
        if assign[k] < cards[k] {
            return;
        }
        assign[k] = 0;
    }
}
