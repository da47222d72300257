//! Bootstrap edge confidence and cross-validated predictive loss.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{PgmError, Result};
use crate::graph::MixedGraph;
use crate::infer::{variable_elimination, Evidence};
use crate::learn::Learner;
use crate::params::{fit_network, BayesianNetwork, LocalDistribution};
use crate::rng::{child_seed, substream};

/// Edge counts over successful bootstrap replicates. Directed counts only
/// include arcs with a definite direction; undirected edges of a learned
/// equivalence class contribute to the skeleton count alone.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeConfidence {
    pub replicates: usize,
    pub failed: usize,
    /// `(from, to)` → number of replicates containing the arc.
    pub arcs: BTreeMap<(String, String), usize>,
    /// `(a, b)` with `a < b` → number of replicates with the pair adjacent.
    pub skeleton: BTreeMap<(String, String), usize>,
}

impl EdgeConfidence {
    pub fn arc_frequency(&self, from: &str, to: &str) -> f64 {
        let c = self
            .arcs
            .get(&(from.to_owned(), to.to_owned()))
            .copied()
            .unwrap_or(0);
        c as f64 / self.replicates as f64
    }

    pub fn skeleton_frequency(&self, a: &str, b: &str) -> f64 {
        let key = if a < b {
            (a.to_owned(), b.to_owned())
        } else {
            (b.to_owned(), a.to_owned())
        };
        self.skeleton.get(&key).copied().unwrap_or(0) as f64 / self.replicates as f64
    }

    /// `a,b,a_to_b,b_to_a,skeleton` rows for every pair seen adjacent at least once.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| PgmError::Io(e.to_string());
        out.write_record(["a", "b", "a_to_b", "b_to_a", "skeleton"])
            .map_err(io)?;
        for (a, b) in self.skeleton.keys() {
            out.write_record([
                a.clone(),
                b.clone(),
                self.arc_frequency(a, b).to_string(),
                self.arc_frequency(b, a).to_string(),
                self.skeleton_frequency(a, b).to_string(),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn resample(d: &Dataset, seed: u64, r: usize) -> Result<Dataset> {
    let mut rng = substream(seed, r as u64);
    let n = d.n_rows();
    let rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    d.select_rows(&rows)
}

/// Learns a structure on each of `replicates` bootstrap resamples and counts
/// how often each arc and each adjacency appears.
pub fn bootstrap_confidence(
    d: &Dataset,
    learner: &Learner,
    replicates: usize,
    seed: u64,
) -> Result<EdgeConfidence> {
    if replicates < 10 {
        return Err(PgmError::arg("bootstrap needs at least 10 replicates"));
    }
    let graphs: Vec<Option<MixedGraph>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let sample = resample(d, seed, r).ok()?;
            match learner.reseeded(child_seed(seed, r as u64)).learn(&sample) {
                Ok(l) => Some(l.graph().clone()),
                Err(e) => {
                    log::warn!("bootstrap replicate {r} failed: {e}");
                    None
                }
            }
        })
        .collect();
    let failed = graphs.iter().filter(|g| g.is_none()).count();
    if failed * 5 > replicates || failed == replicates {
        return Err(PgmError::TooManyFailures {
            failed,
            total: replicates,
        });
    }
    let mut arcs = BTreeMap::new();
    let mut skeleton = BTreeMap::new();
    for g in graphs.iter().flatten() {
        for (a, b) in g.arcs() {
            *arcs
                .entry((g.name(a).to_owned(), g.name(b).to_owned()))
                .or_insert(0) += 1;
        }
        let pairs = g.arcs().chain(g.edges()).map(|(a, b)| (a.min(b), a.max(b)));
        for (a, b) in pairs {
            *skeleton
                .entry((g.name(a).to_owned(), g.name(b).to_owned()))
                .or_insert(0) += 1;
        }
    }
    Ok(EdgeConfidence {
        replicates: replicates - failed,
        failed,
        arcs,
        skeleton,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Loss {
    /// Error rate of the most probable level of a discrete target.
    Misclassification(String),
    /// Residual sum of squares of a continuous target.
    Rss(String),
}

impl Loss {
    pub fn target(&self) -> &str {
        match self {
            Loss::Misclassification(t) | Loss::Rss(t) => t,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Loss::Misclassification(_) => "misclassification",
            Loss::Rss(_) => "rss",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub folds: usize,
    pub per_fold: Vec<f64>,
    pub mean: f64,
    pub loss: String,
}

/// Seed-shuffled assignment of rows to `k` folds of near-equal size.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut substream(seed, 0));
    let mut fold = vec![0; n];
    for (pos, &row) in perm.iter().enumerate() {
        fold[row] = pos * k / n;
    }
    fold
}

fn predict_discrete(bn: &BayesianNetwork, test: &Dataset, target: usize) -> Result<Vec<usize>> {
    let g = bn.dag();
    let blanket: Vec<usize> = g.markov_blanket_idx(target).into_iter().collect();
    let target_name = g.name(target);
    let cols: Vec<usize> = blanket
        .iter()
        .map(|&v| test.require(g.name(v)))
        .collect::<Result<_>>()?;
    let mut cache: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut prior: Option<usize> = None;
    let mut out = Vec::with_capacity(test.n_rows());
    for row in 0..test.n_rows() {
        let key: Vec<u32> = cols
            .iter()
            .map(|&c| test.discrete(c).map(|x| x[row]))
            .collect::<Result<_>>()?;
        if let Some(&p) = cache.get(&key) {
            out.push(p);
            continue;
        }
        let mut ev = Evidence::new();
        for (&v, &val) in blanket.iter().zip(&key) {
            let level = &bn.variables()[v].levels().unwrap_or_default()[val as usize];
            ev = ev.hard(g.name(v), level);
        }
        let pred = match variable_elimination(bn, &[target_name], &ev) {
            Ok(r) => argmax(&r.table),
            Err(e) => {
                log::warn!("row {row}: {e}; predicting '{target_name}' from its prior");
                match prior {
                    Some(p) => p,
                    None => {
                        let r = variable_elimination(bn, &[target_name], &Evidence::new())?;
                        *prior.insert(argmax(&r.table))
                    }
                }
            }
        };
        cache.insert(key, pred);
        out.push(pred);
    }
    Ok(out)
}

/// Index of the largest entry, earliest on ties.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (k, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = k;
        }
    }
    best
}

fn fold_loss(train: &Dataset, test: &Dataset, learner: &Learner, loss: &Loss) -> Result<f64> {
    let dag = learner.learn(train)?.to_dag();
    let bn = fit_network(train, &dag, learner.config.iss)?;
    let t = bn.dag().require(loss.target())?;
    let tc = test.require(loss.target())?;
    match loss {
        Loss::Misclassification(_) => {
            let truth = test.discrete(tc)?;
            let pred = predict_discrete(&bn, test, t)?;
            let wrong = pred
                .iter()
                .zip(truth)
                .filter(|(p, y)| **p != **y as usize)
                .count();
            Ok(wrong as f64 / test.n_rows() as f64)
        }
        Loss::Rss(_) => {
            let LocalDistribution::Gaussian(gl) = bn.local(t) else {
                return Err(PgmError::arg("rss loss needs a continuous target"));
            };
            let parents: Vec<&[f64]> = gl
                .parents
                .iter()
                .map(|p| test.require(p).and_then(|c| test.continuous(c)))
                .collect::<Result<_>>()?;
            let y = test.continuous(tc)?;
            Ok((0..test.n_rows())
                .map(|r| {
                    let x: Vec<f64> = parents.iter().map(|c| c[r]).collect();
                    (y[r] - gl.mean(&x)).powi(2)
                })
                .sum())
        }
    }
}

/// K-fold cross-validation of `learner` followed by parameter fitting.
pub fn cross_validate(
    d: &Dataset,
    learner: &Learner,
    folds: usize,
    loss: &Loss,
    seed: u64,
) -> Result<CvResult> {
    let n = d.n_rows();
    if folds < 2 || folds > n {
        return Err(PgmError::arg(format!("fold count must lie in [2, {n}]")));
    }
    let t = d.require(loss.target())?;
    match loss {
        Loss::Misclassification(_) if !d.var(t).is_discrete() => {
            return Err(PgmError::arg(
                "misclassification loss needs a discrete target",
            ))
        }
        Loss::Rss(_) if d.var(t).is_discrete() => {
            return Err(PgmError::arg("rss loss needs a continuous target"))
        }
        _ => {}
    }
    let assignment = fold_assignment(n, folds, seed);
    let per_fold: Vec<f64> = (0..folds)
        .into_par_iter()
        .map(|k| {
            let test: Vec<usize> = (0..n).filter(|&r| assignment[r] == k).collect();
            let train: Vec<usize> = (0..n).filter(|&r| assignment[r] != k).collect();
            let learner = learner.reseeded(child_seed(seed, k as u64));
            fold_loss(
                &d.select_rows(&train)?,
                &d.select_rows(&test)?,
                &learner,
                loss,
            )
        })
        .collect::<Result<_>>()?;
    let mean = per_fold.iter().sum::<f64>() / folds as f64;
    Ok(CvResult {
        folds,
        per_fold,
        mean,
        loss: loss.name().to_owned(),
    })
}
