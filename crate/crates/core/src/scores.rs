//! Decomposable network scores. Larger is better; penalties are subtracted.

use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;
use std::sync::RwLock;

use statrs::function::gamma::ln_gamma;

use crate::data::Dataset;
use crate::error::{PgmError, Result};
use crate::graph::Dag;
use crate::params::least_squares;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoreKind {
    LogLik,
    Aic,
    Bic,
    Bdeu,
}

impl FromStr for ScoreKind {
    type Err = PgmError;

    /// `mdl` is accepted as an alias of `bic`.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "loglik" => Ok(ScoreKind::LogLik),
            "aic" => Ok(ScoreKind::Aic),
            "bic" | "mdl" => Ok(ScoreKind::Bic),
            "bdeu" | "bde" => Ok(ScoreKind::Bdeu),
            other => Err(PgmError::arg(format!("unknown score '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreValue {
    pub total: f64,
    /// Local scores in graph node order.
    pub per_node: Vec<(String, f64)>,
}

/// A single-arc modification of a DAG, by node index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeChange {
    Add(usize, usize),
    Remove(usize, usize),
    Reverse(usize, usize),
}

impl EdgeChange {
    /// Applies the change, failing if it is not applicable or would create a cycle.
    pub fn apply(self, g: &mut Dag) -> Result<()> {
        match self {
            EdgeChange::Add(a, b) => g.add_arc(a, b),
            EdgeChange::Remove(a, b) => {
                if g.remove_arc(a, b) {
                    Ok(())
                } else {
                    Err(PgmError::Structural(format!(
                        "no arc {} -> {} to remove",
                        g.name(a),
                        g.name(b)
                    )))
                }
            }
            EdgeChange::Reverse(a, b) => {
                if !g.remove_arc(a, b) {
                    return Err(PgmError::Structural(format!(
                        "no arc {} -> {} to reverse",
                        g.name(a),
                        g.name(b)
                    )));
                }
                if let Err(e) = g.add_arc(b, a) {
                    g.add_arc(a, b).expect("restoring a removed arc");
                    return Err(e);
                }
                Ok(())
            }
        }
    }
}

/// Memoised local scores keyed by `(column, sorted parent columns)`.
///
/// Lookups take a shared lock; inserts take the exclusive lock. Values are
/// pure functions of the key, so concurrent use never changes totals.
#[derive(Debug, Default)]
pub struct ScoreCache {
    map: RwLock<HashMap<(usize, Vec<usize>), f64>>,
}

impl ScoreCache {
    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, key: &(usize, Vec<usize>)) -> Option<f64> {
        self.map.read().unwrap().get(key).copied()
    }

    fn put(&self, key: (usize, Vec<usize>), v: f64) {
        self.map.write().unwrap().insert(key, v);
    }
}

/// Score evaluator bound to one dataset, score kind and prior size.
#[derive(Debug)]
pub struct Scorer<'a> {
    data: &'a Dataset,
    kind: ScoreKind,
    iss: f64,
    discrete: bool,
    cache: ScoreCache,
}

impl<'a> Scorer<'a> {
    pub fn new(data: &'a Dataset, kind: ScoreKind, iss: f64) -> Result<Self> {
        let discrete = data.all_discrete();
        if !discrete && !data.all_continuous() {
            return Err(PgmError::arg(
                "scores need all-discrete or all-continuous data",
            ));
        }
        if kind == ScoreKind::Bdeu {
            if !discrete {
                return Err(PgmError::arg("BDeu requires discrete data"));
            }
            if !(iss > 0.0) || !iss.is_finite() {
                return Err(PgmError::arg(
                    "BDeu requires a positive imaginary sample size",
                ));
            }
        }
        Ok(Scorer {
            data,
            kind,
            iss,
            discrete,
            cache: ScoreCache::default(),
        })
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }

    pub fn cache(&self) -> &ScoreCache {
        &self.cache
    }

    /// Dataset column for each node of `g`.
    pub fn columns_for(&self, g: &Dag) -> Result<Vec<usize>> {
        g.names().iter().map(|n| self.data.require(n)).collect()
    }

    /// Local score of `col` given parent columns (any order).
    pub fn local(&self, col: usize, parents: &[usize]) -> Result<f64> {
        let mut key_parents = parents.to_vec();
        key_parents.sort_unstable();
        let key = (col, key_parents);
        if let Some(v) = self.cache.get(&key) {
            return Ok(v);
        }
        let v = self.compute_local(col, &key.1)?;
        self.cache.put(key, v);
        Ok(v)
    }

    fn compute_local(&self, col: usize, parents: &[usize]) -> Result<f64> {
        let n = self.data.n_rows() as f64;
        let (loglik, k) = if self.discrete {
            let (counts, r) = self.family_counts(col, parents)?;
            if self.kind == ScoreKind::Bdeu {
                return Ok(self.bdeu(&counts, r));
            }
            let mut ll = 0.0;
            for row in counts.chunks(r) {
                let nij: u64 = row.iter().sum();
                for &nijk in row {
                    if nijk > 0 {
                        ll += nijk as f64 * (nijk as f64 / nij as f64).ln();
                    }
                }
            }
            let q = counts.len() / r;
            (ll, ((r - 1) * q) as f64)
        } else {
            let y = self.data.continuous(col)?;
            let xs: Vec<&[f64]> = parents
                .iter()
                .map(|&p| self.data.continuous(p))
                .collect::<Result<_>>()?;
            let fit = least_squares(y, &xs).map_err(|_| {
                PgmError::Collinearity(format!(
                    "parents of '{}' are linearly dependent",
                    self.data.var(col).name
                ))
            })?;
            let sigma2 = fit.rss / n;
            if !(sigma2 > f64::EPSILON * fit.tss / n) {
                return Err(PgmError::DegenerateVariance(
                    self.data.var(col).name.clone(),
                ));
            }
            let ll = -0.5 * n * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0);
            (ll, (parents.len() + 2) as f64)
        };
        Ok(match self.kind {
            ScoreKind::LogLik => loglik,
            ScoreKind::Aic => loglik - k,
            ScoreKind::Bic => loglik - 0.5 * k * n.ln(),
            ScoreKind::Bdeu => unreachable!("handled above"),
        })
    }

    fn family_counts(&self, col: usize, parents: &[usize]) -> Result<(Vec<u64>, usize)> {
        let cells = self.data.discrete(col)?;
        self.data.require_discrete(parents)?;
        let r = self.data.cardinality(col);
        let q: usize = parents.iter().map(|&p| self.data.cardinality(p)).product();
        let mut counts = vec![0u64; q * r];
        for row in 0..self.data.n_rows() {
            counts[self.data.config_at(row, parents) * r + cells[row] as usize] += 1;
        }
        Ok((counts, r))
    }

    /// Log Dirichlet-multinomial marginal likelihood with `α_jk = iss/(q·r)`.
    fn bdeu(&self, counts: &[u64], r: usize) -> f64 {
        let q = counts.len() / r;
        let a_jk = self.iss / (q * r) as f64;
        let a_j = self.iss / q as f64;
        let mut s = 0.0;
        for row in counts.chunks(r) {
            let nij: u64 = row.iter().sum();
            if nij == 0 {
                continue;
            }
            s += ln_gamma(a_j) - ln_gamma(a_j + nij as f64);
            for &nijk in row {
                if nijk > 0 {
                    s += ln_gamma(a_jk + nijk as f64) - ln_gamma(a_jk);
                }
            }
        }
        s
    }

    pub fn score(&self, g: &Dag) -> Result<ScoreValue> {
        let cols = self.columns_for(g)?;
        let mut per_node = Vec::with_capacity(g.n());
        for i in 0..g.n() {
            let pa: Vec<usize> = g.parents(i).iter().map(|&p| cols[p]).collect();
            per_node.push((g.name(i).to_owned(), self.local(cols[i], &pa)?));
        }
        Ok(ScoreValue {
            total: per_node.iter().map(|(_, v)| v).sum(),
            per_node,
        })
    }

    /// `score(changed) − score(g)`, computed from the affected local terms only.
    pub fn delta(&self, g: &Dag, change: EdgeChange) -> Result<f64> {
        let cols = self.columns_for(g)?;
        let mut probe = g.clone();
        change.apply(&mut probe)?;
        let touched: BTreeSet<usize> = match change {
            EdgeChange::Add(_, b) | EdgeChange::Remove(_, b) => [b].into(),
            EdgeChange::Reverse(a, b) => [a, b].into(),
        };
        let mut delta = 0.0;
        for v in touched {
            let before: Vec<usize> = g.parents(v).iter().map(|&p| cols[p]).collect();
            let after: Vec<usize> = probe.parents(v).iter().map(|&p| cols[p]).collect();
            delta += self.local(cols[v], &after)? - self.local(cols[v], &before)?;
        }
        Ok(delta)
    }
}

pub fn score(d: &Dataset, g: &Dag, kind: ScoreKind, iss: f64) -> Result<ScoreValue> {
    Scorer::new(d, kind, iss)?.score(g)
}

pub fn score_delta(scorer: &Scorer<'_>, g: &Dag, change: EdgeChange) -> Result<f64> {
    scorer.delta(g, change)
}

/// Number of free parameters of a fitted network structure on `d`.
pub fn parameter_count(d: &Dataset, g: &Dag) -> Result<usize> {
    let mut k = 0;
    for i in 0..g.n() {
        let col = d.require(g.name(i))?;
        if d.var(col).is_discrete() {
            let q: usize = g
                .parents(i)
                .iter()
                .map(|&p| d.require(g.name(p)).map(|c| d.cardinality(c)))
                .product::<Result<usize>>()?;
            k += (d.cardinality(col) - 1) * q;
        } else {
            k += g.parents(i).len() + 2;
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Column, VariableMeta};

    fn coin() -> Dataset {
        Dataset::new(
            vec![VariableMeta::discrete("X", ["a", "b"])],
            vec![Column::Discrete(vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1])],
        )
        .unwrap()
    }

    #[test]
    fn single_binary_node() {
        let g = Dag::empty(["X"]).unwrap();
        let ll = score(&coin(), &g, ScoreKind::LogLik, 1.0).unwrap().total;
        assert!((ll - 10.0 * 0.5f64.ln()).abs() < 1e-12);
        let bic = score(&coin(), &g, ScoreKind::Bic, 1.0).unwrap().total;
        assert!((bic - (ll - 0.5 * 10f64.ln())).abs() < 1e-12);
        let aic = score(&coin(), &g, ScoreKind::Aic, 1.0).unwrap().total;
        assert!((aic - (ll - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn bdeu_single_node_matches_beta_binomial() {
        // iss = 1, two levels: α = 0.5 per cell.
        let g = Dag::empty(["X"]).unwrap();
        let s = score(&coin(), &g, ScoreKind::Bdeu, 1.0).unwrap().total;
        let expect = ln_gamma(1.0) - ln_gamma(11.0) + 2.0 * (ln_gamma(5.5) - ln_gamma(0.5));
        assert!((s - expect).abs() < 1e-10);
    }

    #[test]
    fn invalid_requests() {
        let cont = Dataset::new(
            vec![VariableMeta::continuous("Y")],
            vec![Column::Continuous(vec![1.0, 2.0, 3.0])],
        )
        .unwrap();
        assert!(Scorer::new(&cont, ScoreKind::Bdeu, 1.0).is_err());
        assert!(Scorer::new(&coin(), ScoreKind::Bdeu, 0.0).is_err());
        assert_eq!("mdl".parse::<ScoreKind>().unwrap(), ScoreKind::Bic);
    }

    #[test]
    fn cycle_creating_change_is_structural_error() {
        let d = Dataset::new(
            vec![
                VariableMeta::discrete("A", ["0", "1"]),
                VariableMeta::discrete("B", ["0", "1"]),
            ],
            vec![
                Column::Discrete(vec![0, 1, 1]),
                Column::Discrete(vec![0, 1, 0]),
            ],
        )
        .unwrap();
        let g = Dag::from_arcs(&["A", "B"], &[("A", "B")]).unwrap();
        let s = Scorer::new(&d, ScoreKind::Bic, 1.0).unwrap();
        assert!(matches!(
            s.delta(&g, EdgeChange::Add(1, 0)),
            Err(PgmError::Structural(_))
        ));
        assert!(matches!(
            s.delta(&g, EdgeChange::Remove(1, 0)),
            Err(PgmError::Structural(_))
        ));
    }
}
