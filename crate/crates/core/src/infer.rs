//! Evidence and conditional probability queries: exact variable elimination,
//! logic sampling, likelihood weighting, and forward simulation.
//!
//! Samplers split the requested sample count into blocks of
//! [`BLOCK`] draws; block `k` uses stream `k` of the seed (see [`crate::rng`]).
//! Block results are summed in block order, so estimates do not depend on the
//! number of worker threads.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::data::{Column, Dataset};
use crate::error::{PgmError, Result};
use crate::factor::Factor;
use crate::params::{BayesianNetwork, LocalDistribution};
use crate::rng::substream;

pub const BLOCK: usize = 1024;

/// Hard evidence clamps nodes to levels. Soft evidence replaces a node's
/// conditional probability table: one row per parent configuration (a single
/// row for a root).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Evidence {
    pub hard: BTreeMap<String, String>,
    pub soft: BTreeMap<String, Vec<Vec<f64>>>,
}

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn hard(mut self, node: &str, level: &str) -> Self {
        self.hard.insert(node.to_owned(), level.to_owned());
        self
    }

    /// Replacement prior for a root node.
    pub fn soft(mut self, node: &str, probs: Vec<f64>) -> Self {
        self.soft.insert(node.to_owned(), vec![probs]);
        self
    }

    pub fn soft_rows(mut self, node: &str, rows: Vec<Vec<f64>>) -> Self {
        self.soft.insert(node.to_owned(), rows);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.hard.is_empty() && self.soft.is_empty()
    }
}

/// Joint distribution of the query nodes; the table lists configurations
/// with the first query node varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub nodes: Vec<String>,
    pub levels: Vec<Vec<String>>,
    pub table: Vec<f64>,
    pub method: String,
    /// Samples drawn (samplers only); for logic sampling, `accepted` counts survivors.
    pub samples: Option<usize>,
    pub accepted: Option<usize>,
    pub effective_weight: Option<f64>,
}

impl QueryResult {
    /// Marginal distribution of one query node.
    pub fn marginal(&self, node: &str) -> Result<Vec<f64>> {
        let k = self
            .nodes
            .iter()
            .position(|n| n == node)
            .ok_or_else(|| PgmError::arg(format!("'{node}' is not a query node")))?;
        let cards: Vec<usize> = self.levels.iter().map(Vec::len).collect();
        let stride: usize = cards[k + 1..].iter().product();
        let mut out = vec![0.0; cards[k]];
        for (idx, p) in self.table.iter().enumerate() {
            out[(idx / stride) % cards[k]] += p;
        }
        Ok(out)
    }

    /// Probability of one configuration given as level labels in query order.
    pub fn probability(&self, labels: &[&str]) -> Result<f64> {
        if labels.len() != self.nodes.len() {
            return Err(PgmError::arg("one label per query node"));
        }
        let mut idx = 0;
        for (k, lab) in labels.iter().enumerate() {
            let v = self.levels[k]
                .iter()
                .position(|l| l == lab)
                .ok_or_else(|| {
                    PgmError::arg(format!("'{lab}' is not a level of '{}'", self.nodes[k]))
                })?;
            idx = idx * self.levels[k].len() + v;
        }
        Ok(self.table[idx])
    }
}

/// Replaces the tables of the soft-evidence nodes; the structure is unchanged.
pub fn apply_soft_evidence(
    bn: &BayesianNetwork,
    soft: &BTreeMap<String, Vec<Vec<f64>>>,
) -> Result<BayesianNetwork> {
    let mut out = bn.clone();
    for (name, rows) in soft {
        let i = bn.dag().require(name)?;
        let mut cpt = bn.cpt(i)?.clone();
        if rows.len() != cpt.rows.len() {
            return Err(PgmError::arg(format!(
                "soft evidence for '{name}' needs {} row(s), one per parent configuration; got {}",
                cpt.rows.len(),
                rows.len()
            )));
        }
        for row in rows {
            if row.len() != cpt.levels() {
                return Err(PgmError::arg(format!(
                    "soft evidence for '{name}' needs {} probabilities, got {}",
                    cpt.levels(),
                    row.len()
                )));
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p))
                || (row.iter().sum::<f64>() - 1.0).abs() > 1e-12
            {
                return Err(PgmError::arg(format!(
                    "soft evidence for '{name}' must be a probability vector"
                )));
            }
        }
        cpt.rows = rows.clone();
        cpt.unseen_rows.clear();
        out.replace_local(i, LocalDistribution::Cpt(cpt));
    }
    Ok(out)
}

struct Prepared {
    bn: BayesianNetwork,
    query: Vec<usize>,
    hard: Vec<Option<usize>>,
}

fn prepare(bn: &BayesianNetwork, query: &[&str], ev: &Evidence) -> Result<Prepared> {
    if !bn.is_discrete() {
        return Err(PgmError::arg("queries need a discrete network"));
    }
    if query.is_empty() {
        return Err(PgmError::arg("query must name at least one node"));
    }
    let g = bn.dag();
    let mut q = Vec::with_capacity(query.len());
    for name in query {
        let i = g.require(name)?;
        if q.contains(&i) {
            return Err(PgmError::arg(format!(
                "'{name}' appears twice in the query"
            )));
        }
        q.push(i);
    }
    let mut hard = vec![None; g.n()];
    for (name, level) in &ev.hard {
        let i = g.require(name)?;
        if ev.soft.contains_key(name) {
            return Err(PgmError::arg(format!(
                "'{name}' has both hard and soft evidence"
            )));
        }
        hard[i] = Some(
            bn.variables()[i]
                .level_index(level)
                .ok_or_else(|| PgmError::arg(format!("'{level}' is not a level of '{name}'")))?,
        );
    }
    Ok(Prepared {
        bn: apply_soft_evidence(bn, &ev.soft)?,
        query: q,
        hard,
    })
}

fn result_shell(p: &Prepared, method: &str, table: Vec<f64>) -> QueryResult {
    let g = p.bn.dag();
    QueryResult {
        nodes: p.query.iter().map(|&i| g.name(i).to_owned()).collect(),
        levels: p
            .query
            .iter()
            .map(|&i| p.bn.variables()[i].levels().unwrap_or_default().to_vec())
            .collect(),
        table,
        method: method.to_owned(),
        samples: None,
        accepted: None,
        effective_weight: None,
    }
}

/// Index of a query configuration, first query node slowest.
fn query_index(p: &Prepared, values: &[usize]) -> usize {
    p.query
        .iter()
        .fold(0, |acc, &i| acc * p.bn.cardinality(i) + values[i])
}

fn query_cells(p: &Prepared) -> usize {
    p.query.iter().map(|&i| p.bn.cardinality(i)).product()
}

/// Evidence-reduced factors and the variables still to be eliminated.
fn initial_factors(p: &Prepared) -> Result<(Vec<Factor>, BTreeSet<usize>)> {
    let n = p.bn.dag().n();
    let mut factors = Vec::with_capacity(n + p.query.len());
    for i in 0..n {
        let mut f = p.bn.cpt_factor(i)?;
        for (v, e) in p.hard.iter().enumerate() {
            if let Some(val) = e {
                if !p.query.contains(&v) {
                    f = f.reduce(v, *val);
                }
            }
        }
        factors.push(f);
    }
    for &q in &p.query {
        if let Some(val) = p.hard[q] {
            let card = p.bn.cardinality(q);
            let values = (0..card)
                .map(|k| if k == val { 1.0 } else { 0.0 })
                .collect();
            factors.push(Factor::new(vec![q], vec![card], values));
        }
    }
    let hidden = (0..n)
        .filter(|v| p.hard[*v].is_none() && !p.query.contains(v))
        .collect();
    Ok((factors, hidden))
}

fn eliminate(factors: &mut Vec<Factor>, v: usize) {
    let (with, without): (Vec<Factor>, Vec<Factor>) =
        factors.drain(..).partition(|f| f.vars.contains(&v));
    *factors = without;
    if let Some(prod) = with.into_iter().reduce(|a, b| a.product(&b)) {
        factors.push(prod.sum_out(v));
    }
}

/// Number of other variables sharing a factor with `v`.
fn degree(factors: &[Factor], v: usize) -> usize {
    let mut nb = BTreeSet::new();
    for f in factors.iter().filter(|f| f.vars.contains(&v)) {
        nb.extend(f.vars.iter().copied().filter(|&u| u != v));
    }
    nb.len()
}

fn finish(p: &Prepared, factors: Vec<Factor>, method: &str) -> Result<QueryResult> {
    let joint = factors
        .into_iter()
        .reduce(|a, b| a.product(&b))
        .unwrap_or_else(|| Factor::scalar(1.0));
    let evidence_prob = joint.total();
    if !(evidence_prob > 0.0) {
        return Err(PgmError::InconsistentEvidence(
            "the evidence has probability zero under the model".to_owned(),
        ));
    }
    let n = p.bn.dag().n();
    let mut table = vec![0.0; query_cells(p)];
    let cards: Vec<usize> = p.query.iter().map(|&i| p.bn.cardinality(i)).collect();
    let mut qa = vec![0usize; p.query.len()];
    let mut full = vec![0usize; n];
    for cell in table.iter_mut() {
        for (k, &q) in p.query.iter().enumerate() {
            full[q] = qa[k];
        }
        *cell = joint.value_at(&full) / evidence_prob;
        crate::factor::increment(&mut qa, &cards);
    }
    Ok(result_shell(p, method, table))
}

/// Exact `P(query | evidence)`. Variables are eliminated greedily by the
/// fewest current neighbours, ties going to the earliest name.
pub fn variable_elimination(
    bn: &BayesianNetwork,
    query: &[&str],
    ev: &Evidence,
) -> Result<QueryResult> {
    let p = prepare(bn, query, ev)?;
    let (mut factors, mut hidden) = initial_factors(&p)?;
    while let Some(v) = hidden
        .iter()
        .copied()
        .min_by_key(|&v| (degree(&factors, v), v))
    {
        eliminate(&mut factors, v);
        hidden.remove(&v);
    }
    finish(&p, factors, "ve")
}

/// Variable elimination along a caller-supplied order. Nodes in `order` that
/// are queried or observed are skipped; hidden nodes missing from it are
/// eliminated last in name order.
pub fn variable_elimination_ordered(
    bn: &BayesianNetwork,
    query: &[&str],
    ev: &Evidence,
    order: &[&str],
) -> Result<QueryResult> {
    let p = prepare(bn, query, ev)?;
    let (mut factors, mut hidden) = initial_factors(&p)?;
    for name in order {
        let v = p.bn.dag().require(name)?;
        if hidden.remove(&v) {
            eliminate(&mut factors, v);
        }
    }
    for v in std::mem::take(&mut hidden) {
        eliminate(&mut factors, v);
    }
    finish(&p, factors, "ve")
}

/// Draws one value from a discrete distribution with a single uniform.
fn draw(row: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // Rounding can leave the cumulative sum just under one.
    row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
}

fn block_sizes(n: usize) -> Vec<usize> {
    let full = n / BLOCK;
    let mut v = vec![BLOCK; full];
    if !n.is_multiple_of(BLOCK) {
        v.push(n % BLOCK);
    }
    v
}

fn parent_values(bn: &BayesianNetwork, i: usize, values: &[usize]) -> Vec<usize> {
    bn.dag().parents(i).iter().map(|&q| values[q]).collect()
}

/// Forward sampling with rejection of draws that contradict hard evidence.
pub fn logic_sampling(
    bn: &BayesianNetwork,
    query: &[&str],
    ev: &Evidence,
    samples: usize,
    seed: u64,
) -> Result<QueryResult> {
    if samples < 1 {
        return Err(PgmError::arg("sample size must be at least 1"));
    }
    let p = prepare(bn, query, ev)?;
    let order = p.bn.dag().topological_order();
    let cells = query_cells(&p);
    let blocks: Vec<Vec<u64>> = block_sizes(samples)
        .into_par_iter()
        .enumerate()
        .map(|(k, size)| {
            let mut rng = substream(seed, k as u64);
            let mut counts = vec![0u64; cells];
            let mut values = vec![0usize; order.len()];
            'draw: for _ in 0..size {
                for &i in &order {
                    let cpt = p.bn.cpt(i).expect("discrete network");
                    let row = &cpt.rows[cpt.row_index(&parent_values(&p.bn, i, &values))];
                    values[i] = draw(row, &mut rng);
                }
                for (i, e) in p.hard.iter().enumerate() {
                    if e.is_some_and(|v| v != values[i]) {
                        continue 'draw;
                    }
                }
                counts[query_index(&p, &values)] += 1;
            }
            counts
        })
        .collect();
    let mut counts = vec![0u64; cells];
    for b in &blocks {
        for (c, x) in counts.iter_mut().zip(b) {
            *c += x;
        }
    }
    let accepted: u64 = counts.iter().sum();
    if accepted == 0 {
        return Err(PgmError::InsufficientAcceptance(samples));
    }
    let table = counts.iter().map(|&c| c as f64 / accepted as f64).collect();
    let mut r = result_shell(&p, "ls", table);
    r.samples = Some(samples);
    r.accepted = Some(accepted as usize);
    r.effective_weight = Some(accepted as f64);
    Ok(r)
}

/// Forward sampling with observed nodes clamped and each draw weighted by
/// the likelihood of the evidence given its sampled parents.
pub fn likelihood_weighting(
    bn: &BayesianNetwork,
    query: &[&str],
    ev: &Evidence,
    samples: usize,
    seed: u64,
) -> Result<QueryResult> {
    if samples < 1 {
        return Err(PgmError::arg("sample size must be at least 1"));
    }
    let p = prepare(bn, query, ev)?;
    let order = p.bn.dag().topological_order();
    let cells = query_cells(&p);
    let blocks: Vec<(Vec<f64>, f64)> = block_sizes(samples)
        .into_par_iter()
        .enumerate()
        .map(|(k, size)| {
            let mut rng = substream(seed, k as u64);
            let mut sums = vec![0.0; cells];
            let mut sq = 0.0;
            let mut values = vec![0usize; order.len()];
            for _ in 0..size {
                let mut w = 1.0;
                for &i in &order {
                    let cpt = p.bn.cpt(i).expect("discrete network");
                    let row = &cpt.rows[cpt.row_index(&parent_values(&p.bn, i, &values))];
                    match p.hard[i] {
                        Some(v) => {
                            values[i] = v;
                            w *= row[v];
                        }
                        None => values[i] = draw(row, &mut rng),
                    }
                }
                sums[query_index(&p, &values)] += w;
                sq += w * w;
            }
            (sums, sq)
        })
        .collect();
    let mut sums = vec![0.0; cells];
    let mut sq = 0.0;
    for (b, s) in &blocks {
        for (c, x) in sums.iter_mut().zip(b) {
            *c += x;
        }
        sq += s;
    }
    let total: f64 = sums.iter().sum();
    if !(total > 0.0) {
        return Err(PgmError::InconsistentEvidence(
            "every sample has zero weight under the evidence".to_owned(),
        ));
    }
    let table = sums.iter().map(|&s| s / total).collect();
    let mut r = result_shell(&p, "lw", table);
    r.samples = Some(samples);
    r.effective_weight = Some(total * total / sq);
    Ok(r)
}

/// Draws `n` rows from the network by forward sampling.
pub fn simulate(bn: &BayesianNetwork, n: usize, seed: u64) -> Result<Dataset> {
    if n < 1 {
        return Err(PgmError::arg("sample size must be at least 1"));
    }
    let g = bn.dag();
    let order = g.topological_order();
    let p = g.n();
    let discrete = bn.is_discrete();
    let blocks: Vec<Vec<Vec<f64>>> = block_sizes(n)
        .into_par_iter()
        .enumerate()
        .map(|(k, size)| {
            let mut rng = substream(seed, k as u64);
            let mut cols = vec![Vec::with_capacity(size); p];
            let mut values = vec![0.0f64; p];
            for _ in 0..size {
                for &i in &order {
                    values[i] = match bn.local(i) {
                        LocalDistribution::Cpt(cpt) => {
                            let pv: Vec<usize> =
                                g.parents(i).iter().map(|&q| values[q] as usize).collect();
                            draw(&cpt.rows[cpt.row_index(&pv)], &mut rng) as f64
                        }
                        LocalDistribution::Gaussian(gl) => {
                            let pv: Vec<f64> = g.parents(i).iter().map(|&q| values[q]).collect();
                            let z: f64 = rng.sample(StandardNormal);
                            gl.mean(&pv) + gl.residual_variance.sqrt() * z
                        }
                    };
                }
                for (c, v) in cols.iter_mut().zip(&values) {
                    c.push(*v);
                }
            }
            cols
        })
        .collect();
    let columns: Vec<Column> = (0..p)
        .map(|i| {
            let all = blocks.iter().flat_map(|b| b[i].iter().copied());
            if discrete {
                Column::Discrete(all.map(|v| v as u32).collect())
            } else {
                Column::Continuous(all.collect())
            }
        })
        .collect();
    Dataset::new(bn.variables().to_vec(), columns)
}
