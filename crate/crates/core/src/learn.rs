//! Structure learning: Grow-Shrink (constraint-based), hill climbing with
//! optional tabu steps and random restarts (score-based), and the hybrid
//! restrict-then-maximise combination of the two.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use rayon::prelude::*;

use crate::citests::{test_discrete, test_fisher_z, TestKind};
use crate::data::{contingency_table, gauss_stats, Dataset, GaussStats};
use crate::error::{PgmError, Result};
use crate::graph::{Dag, MixedGraph, Pdag, UGraph};
use crate::rng::substream;
use crate::scores::{EdgeChange, ScoreKind, Scorer};

const SCORE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LearnConfig {
    pub test: TestKind,
    pub alpha: f64,
    pub score: ScoreKind,
    pub iss: f64,
    pub restarts: usize,
    /// Number of consecutive non-improving moves tolerated by the tabu phase;
    /// also the length of the tabu list. Zero gives plain greedy ascent.
    pub tabu_length: usize,
    pub max_parents: usize,
    /// Random moves applied to the incumbent before each restart.
    pub perturb: usize,
    pub seed: u64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            test: TestKind::G2,
            alpha: 0.05,
            score: ScoreKind::Bic,
            iss: 1.0,
            restarts: 0,
            tabu_length: 0,
            max_parents: 5,
            perturb: 2,
            seed: 0,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(PgmError::arg("alpha must lie in (0, 1)"));
        }
        if self.max_parents < 1 {
            return Err(PgmError::arg("max_parents must be at least 1"));
        }
        if !(self.iss >= 0.0) || !self.iss.is_finite() {
            return Err(PgmError::arg("imaginary sample size must be nonnegative"));
        }
        Ok(())
    }
}

/// Source of conditional-independence decisions, by variable index.
pub trait IndependenceOracle: Sync {
    fn n_vars(&self) -> usize;
    fn name(&self, i: usize) -> &str;
    /// p-value of the test of `x ⊥ y | z`; small values mean dependence.
    fn p_value(&self, x: usize, y: usize, z: &[usize]) -> Result<f64>;
}

/// Independence tests computed from a dataset.
pub struct DataOracle<'a> {
    data: &'a Dataset,
    kind: TestKind,
    stats: Option<GaussStats>,
}

impl<'a> DataOracle<'a> {
    pub fn new(data: &'a Dataset, kind: TestKind) -> Result<Self> {
        let stats = if kind.is_discrete() {
            if !data.all_discrete() {
                return Err(PgmError::arg(format!(
                    "the {} test needs all-discrete data",
                    kind.name()
                )));
            }
            None
        } else {
            if !data.all_continuous() {
                return Err(PgmError::arg("Fisher's Z needs all-continuous data"));
            }
            Some(gauss_stats(data)?)
        };
        Ok(DataOracle { data, kind, stats })
    }
}

impl IndependenceOracle for DataOracle<'_> {
    fn n_vars(&self) -> usize {
        self.data.n_vars()
    }

    fn name(&self, i: usize) -> &str {
        &self.data.var(i).name
    }

    fn p_value(&self, x: usize, y: usize, z: &[usize]) -> Result<f64> {
        let res = match &self.stats {
            Some(s) => test_fisher_z(s, x, y, z),
            None => test_discrete(&contingency_table(self.data, &[x, y], z)?, self.kind),
        };
        res.map(|r| r.p_value).map_err(|e| {
            PgmError::arg(format!(
                "testing {} vs {} given {:?}: {e}",
                self.name(x),
                self.name(y),
                z.iter().map(|&v| self.name(v)).collect::<Vec<_>>()
            ))
        })
    }
}

fn name_order(o: &dyn IndependenceOracle) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..o.n_vars()).collect();
    idx.sort_by(|&a, &b| o.name(a).cmp(o.name(b)));
    idx
}

/// Grow-Shrink Markov blanket of `x` under an arbitrary oracle; returned in
/// name order.
pub fn grow_shrink_mb_with(o: &dyn IndependenceOracle, x: usize, alpha: f64) -> Result<Vec<usize>> {
    let order = name_order(o);
    let mut mb: Vec<usize> = Vec::new();
    loop {
        let mut grew = false;
        for &y in &order {
            if y == x || mb.contains(&y) {
                continue;
            }
            if o.p_value(x, y, &mb)? <= alpha {
                mb.push(y);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    loop {
        let mut shrunk = false;
        for y in sorted_by_name(o, &mb) {
            let rest: Vec<usize> = mb.iter().copied().filter(|&v| v != y).collect();
            if o.p_value(x, y, &rest)? > alpha {
                mb = rest;
                shrunk = true;
            }
        }
        if !shrunk {
            break;
        }
    }
    Ok(sorted_by_name(o, &mb))
}

fn sorted_by_name(o: &dyn IndependenceOracle, set: &[usize]) -> Vec<usize> {
    let mut v = set.to_vec();
    v.sort_by(|&a, &b| o.name(a).cmp(o.name(b)));
    v
}

/// Markov blanket of the variable named `x`, as names.
pub fn grow_shrink_mb(d: &Dataset, x: &str, cfg: &LearnConfig) -> Result<Vec<String>> {
    cfg.validate()?;
    let o = DataOracle::new(d, cfg.test)?;
    let xi = d.require(x)?;
    Ok(grow_shrink_mb_with(&o, xi, cfg.alpha)?
        .into_iter()
        .map(|i| d.var(i).name.clone())
        .collect())
}

/// Output of Grow-Shrink structure learning.
#[derive(Debug, Clone, PartialEq)]
pub struct GsResult {
    pub pdag: Pdag,
    /// Symmetrised Markov blankets, by graph node.
    pub blankets: Vec<Vec<String>>,
    /// Edges left undirected because the v-structure evidence disagreed.
    pub conflicts: Vec<(String, String)>,
}

fn symmetric_blankets(o: &dyn IndependenceOracle, alpha: f64) -> Result<Vec<BTreeSet<usize>>> {
    let raw: Vec<Vec<usize>> = (0..o.n_vars())
        .into_par_iter()
        .map(|x| grow_shrink_mb_with(o, x, alpha))
        .collect::<Result<_>>()?;
    Ok((0..o.n_vars())
        .map(|x| {
            raw[x]
                .iter()
                .copied()
                .filter(|&y| raw[y].contains(&x))
                .collect()
        })
        .collect())
}

/// Subsets of `items` of size `k`, lexicographic by position.
fn subsets_of_size(items: &[usize], k: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut Vec::new(), out);
}

/// Grow-Shrink structure learning under an arbitrary oracle.
pub fn gs_structure_with(
    o: &dyn IndependenceOracle,
    alpha: f64,
    max_separator: usize,
) -> Result<GsResult> {
    let p = o.n_vars();
    let names: Vec<String> = (0..p).map(|i| o.name(i).to_owned()).collect();
    let mut g = MixedGraph::new(names.iter().cloned())?;
    // oracle index -> graph index
    let gi: Vec<usize> = names.iter().map(|n| g.index(n).unwrap()).collect();
    let mb = symmetric_blankets(o, alpha)?;

    let pairs: Vec<(usize, usize)> = (0..p)
        .flat_map(|x| {
            mb[x]
                .iter()
                .copied()
                .filter(move |&y| x < y)
                .map(move |y| (x, y))
        })
        .collect();
    let decisions: Vec<(usize, usize, Option<Vec<usize>>)> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let tx: Vec<usize> = mb[x].iter().copied().filter(|&v| v != y).collect();
            let ty: Vec<usize> = mb[y].iter().copied().filter(|&v| v != x).collect();
            let base = sorted_by_name(o, if ty.len() < tx.len() { &ty } else { &tx });
            for k in 0..=base.len().min(max_separator) {
                let mut subsets = Vec::new();
                subsets_of_size(&base, k, &mut subsets);
                for s in subsets {
                    if o.p_value(x, y, &s)? > alpha {
                        return Ok((x, y, Some(s)));
                    }
                }
            }
            Ok((x, y, None))
        })
        .collect::<Result<_>>()?;

    let mut sepsets: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (x, y, sep) in decisions {
        match sep {
            None => g.add_edge(gi[x], gi[y])?,
            Some(s) => {
                sepsets.insert(
                    (gi[x].min(gi[y]), gi[x].max(gi[y])),
                    s.iter().map(|&v| gi[v]).collect(),
                );
            }
        }
    }

    // Proposed collider orientations, (tail, head) in graph indices.
    let mut proposals: BTreeSet<(usize, usize)> = BTreeSet::new();
    for z in 0..p {
        let nb: Vec<usize> = g.neighbors(z).iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if g.adjacent(a, b) {
                    continue;
                }
                // Pairs outside each other's blanket are separated by a
                // blanket, which contains every neighbour, hence z.
                if let Some(sep) = sepsets.get(&(a.min(b), a.max(b))) {
                    if !sep.contains(&z) {
                        proposals.insert((a, z));
                        proposals.insert((b, z));
                    }
                }
            }
        }
    }
    let mut conflicts = Vec::new();
    for &(a, z) in &proposals {
        if proposals.contains(&(z, a)) {
            if a < z {
                conflicts.push((g.name(a).to_owned(), g.name(z).to_owned()));
                log::warn!(
                    "conflicting v-structure orientations for {} - {}; left undirected",
                    g.name(a),
                    g.name(z)
                );
            }
            continue;
        }
        if g.has_edge(a, z) {
            if g.has_directed_path(z, a) {
                conflicts.push((g.name(a.min(z)).to_owned(), g.name(a.max(z)).to_owned()));
                continue;
            }
            g.orient(a, z);
        }
    }
    crate::graph::propagate_orientations(&mut g);

    let mut blankets = vec![Vec::new(); p];
    for x in 0..p {
        blankets[gi[x]] = sorted_by_name(o, &mb[x].iter().copied().collect::<Vec<_>>())
            .into_iter()
            .map(|v| names[v].clone())
            .collect();
    }
    Ok(GsResult {
        pdag: Pdag::try_from(g)?,
        blankets,
        conflicts,
    })
}

pub fn gs_structure(d: &Dataset, cfg: &LearnConfig) -> Result<GsResult> {
    cfg.validate()?;
    let o = DataOracle::new(d, cfg.test)?;
    gs_structure_with(&o, cfg.alpha, cfg.max_parents)
}

/// Markov-network variant: the undirected graph of symmetric blankets.
pub fn gs_markov_network(d: &Dataset, cfg: &LearnConfig) -> Result<UGraph> {
    cfg.validate()?;
    let o = DataOracle::new(d, cfg.test)?;
    let mb = symmetric_blankets(&o, cfg.alpha)?;
    let mut g = UGraph::empty(d.names())?;
    for x in 0..d.n_vars() {
        for &y in &mb[x] {
            let (a, b) = (
                g.require(d.var(x).name.as_str())?,
                g.require(d.var(y).name.as_str())?,
            );
            if a < b {
                g.add_edge(a, b)?;
            }
        }
    }
    Ok(g)
}

/// Result of score-based search.
#[derive(Debug, Clone, PartialEq)]
pub struct HcResult {
    pub dag: Dag,
    pub score: f64,
}

/// Search state: a DAG over the dataset's variables plus bookkeeping.
struct Search<'s, 'd> {
    scorer: &'s Scorer<'d>,
    cols: Vec<usize>,
    max_parents: usize,
    allowed: Option<&'s [Vec<bool>]>,
}

impl Search<'_, '_> {
    fn total(&self, g: &Dag) -> Result<f64> {
        let mut s = 0.0;
        for i in 0..g.n() {
            s += self.local(g, i, None)?;
        }
        Ok(s)
    }

    /// Local score of node `i`, optionally with one parent added/removed.
    fn local(&self, g: &Dag, i: usize, edit: Option<(usize, bool)>) -> Result<f64> {
        let mut pa: Vec<usize> = g.parents(i).iter().copied().collect();
        match edit {
            Some((p, true)) => pa.push(p),
            Some((p, false)) => pa.retain(|&v| v != p),
            None => {}
        }
        let cols: Vec<usize> = pa.iter().map(|&v| self.cols[v]).collect();
        self.scorer.local(self.cols[i], &cols)
    }

    fn permitted(&self, a: usize, b: usize) -> bool {
        self.allowed.is_none_or(|m| m[a][b])
    }

    /// Every legal single-arc move with its score delta, in move order.
    fn moves(&self, g: &Dag) -> Result<Vec<(EdgeChange, f64)>> {
        let n = g.n();
        let reach = reachability(g);
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                if g.has_arc(a, b) {
                    let rm = self.local(g, b, Some((a, false)))? - self.local(g, b, None)?;
                    out.push((EdgeChange::Remove(a, b), rm));
                    // Reversal is legal unless another directed path a ⇝ b exists.
                    let other_path = g.children(a).iter().any(|&c| c != b && reach[c][b]);
                    if !other_path && g.parents(a).len() < self.max_parents && self.permitted(b, a)
                    {
                        let add = self.local(g, a, Some((b, true)))? - self.local(g, a, None)?;
                        out.push((EdgeChange::Reverse(a, b), rm + add));
                    }
                } else if !g.adjacent(a, b)
                    && !reach[b][a]
                    && g.parents(b).len() < self.max_parents
                    && self.permitted(a, b)
                {
                    let add = self.local(g, b, Some((a, true)))? - self.local(g, b, None)?;
                    out.push((EdgeChange::Add(a, b), add));
                }
            }
        }
        out.sort_by_key(|x| x.0);
        Ok(out)
    }

    /// Greedy ascent with optional tabu phase; returns the best DAG seen.
    fn climb(&self, start: Dag, tabu_length: usize) -> Result<(Dag, f64)> {
        let mut current = start;
        let mut current_score = self.total(&current)?;
        let mut best = current.clone();
        let mut best_score = current_score;
        let mut tabu: VecDeque<EdgeChange> = VecDeque::new();
        let mut idle = 0;
        for _ in 0..100_000 {
            let moves = self.moves(&current)?;
            let mut pick: Option<(EdgeChange, f64)> = None;
            for &(m, delta) in &moves {
                if tabu.contains(&m) {
                    continue;
                }
                if pick.is_none_or(|(_, d)| delta > d + SCORE_EPS) {
                    pick = Some((m, delta));
                }
            }
            let Some((m, delta)) = pick else { break };
            if delta > SCORE_EPS {
                idle = 0;
            } else if idle < tabu_length {
                idle += 1;
            } else {
                break;
            }
            m.apply(&mut current)?;
            current_score += delta;
            if tabu_length > 0 {
                tabu.push_back(inverse(m));
                if tabu.len() > tabu_length {
                    tabu.pop_front();
                }
            }
            if current_score > best_score + SCORE_EPS {
                best = current.clone();
                best_score = current_score;
            }
        }
        if tabu_length > 0 {
            // Polish so the returned graph is a local optimum without tabu.
            return self.climb(best, 0);
        }
        let total = self.total(&best)?;
        Ok((best, total))
    }

    fn perturb(&self, g: &Dag, steps: usize, rng: &mut impl Rng) -> Result<Dag> {
        let mut g = g.clone();
        for _ in 0..steps {
            let moves = self.moves(&g)?;
            if moves.is_empty() {
                break;
            }
            let (m, _) = moves[rng.gen_range(0..moves.len())];
            m.apply(&mut g)?;
        }
        Ok(g)
    }
}

fn inverse(m: EdgeChange) -> EdgeChange {
    match m {
        EdgeChange::Add(a, b) => EdgeChange::Remove(a, b),
        EdgeChange::Remove(a, b) => EdgeChange::Add(a, b),
        EdgeChange::Reverse(a, b) => EdgeChange::Reverse(b, a),
    }
}

/// `reach[a][b]`: a directed path of length ≥ 1 leads from `a` to `b`.
fn reachability(g: &Dag) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut reach = vec![vec![false; n]; n];
    for v in g.topological_order().into_iter().rev() {
        let mut row = vec![false; n];
        for &c in g.children(v) {
            row[c] = true;
            for (k, r) in reach[c].iter().enumerate() {
                row[k] |= *r;
            }
        }
        reach[v] = row;
    }
    reach
}

/// Lexicographic arc encoding used to break score ties deterministically.
fn encoding(g: &Dag) -> Vec<(usize, usize)> {
    g.arcs().collect()
}

fn hill_climb_restricted(
    d: &Dataset,
    cfg: &LearnConfig,
    allowed: Option<&[Vec<bool>]>,
) -> Result<HcResult> {
    cfg.validate()?;
    let scorer = Scorer::new(d, cfg.score, cfg.iss)?;
    let start = Dag::empty(d.names())?;
    let search = Search {
        scorer: &scorer,
        cols: scorer.columns_for(&start)?,
        max_parents: cfg.max_parents,
        allowed,
    };
    let (first, first_score) = search.climb(start, cfg.tabu_length)?;
    let restarts: Vec<(Dag, f64)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(cfg.seed, r as u64);
            let from = search.perturb(&first, cfg.perturb.max(1), &mut rng)?;
            search.climb(from, cfg.tabu_length)
        })
        .collect::<Result<_>>()?;
    let mut best = (first, first_score);
    for cand in restarts {
        let better = cand.1 > best.1 + SCORE_EPS
            || ((cand.1 - best.1).abs() <= SCORE_EPS && encoding(&cand.0) < encoding(&best.0));
        if better {
            best = cand;
        }
    }
    Ok(HcResult {
        dag: best.0,
        score: best.1,
    })
}

/// Score-based search from the empty graph.
pub fn hill_climb(d: &Dataset, cfg: &LearnConfig) -> Result<HcResult> {
    hill_climb_restricted(d, cfg, None)
}

/// Whether no single legal add/remove/reverse move improves the score by
/// more than the search tolerance.
pub fn is_local_optimum(d: &Dataset, g: &Dag, cfg: &LearnConfig) -> Result<bool> {
    let scorer = Scorer::new(d, cfg.score, cfg.iss)?;
    let search = Search {
        scorer: &scorer,
        cols: scorer.columns_for(g)?,
        max_parents: cfg.max_parents,
        allowed: None,
    };
    Ok(search
        .moves(g)?
        .iter()
        .all(|&(_, delta)| delta <= SCORE_EPS))
}

/// Hill climbing restricted to the pairs adjacent in `superstructure`.
pub fn hill_climb_within(
    d: &Dataset,
    cfg: &LearnConfig,
    superstructure: &UGraph,
) -> Result<HcResult> {
    let names = d.names();
    let probe = Dag::empty(names.iter().cloned())?;
    if probe.names() != superstructure.names() {
        return Err(PgmError::arg(
            "superstructure nodes must match the dataset variables",
        ));
    }
    let n = probe.n();
    let allowed: Vec<Vec<bool>> = (0..n)
        .map(|a| (0..n).map(|b| superstructure.has_edge(a, b)).collect())
        .collect();
    hill_climb_restricted(d, cfg, Some(&allowed))
}

/// Grow-Shrink skeleton as candidate set, then restricted hill climbing.
pub fn hybrid_learn(d: &Dataset, cfg: &LearnConfig) -> Result<HcResult> {
    let gs = gs_structure(d, cfg)?;
    hill_climb_within(d, cfg, &gs.pdag.skeleton())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    GrowShrink,
    HillClimb,
    Hybrid,
}

impl std::str::FromStr for Algorithm {
    type Err = PgmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gs" => Ok(Algorithm::GrowShrink),
            "hc" => Ok(Algorithm::HillClimb),
            "hybrid" => Ok(Algorithm::Hybrid),
            other => Err(PgmError::arg(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// A learning algorithm together with its configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Learner {
    pub algorithm: Algorithm,
    pub config: LearnConfig,
}

/// What a learner produced: an equivalence-class graph or a DAG.
#[derive(Debug, Clone, PartialEq)]
pub enum Learned {
    Pdag(Pdag),
    Dag(Dag),
}

impl Learned {
    pub fn graph(&self) -> &MixedGraph {
        match self {
            Learned::Pdag(p) => p.as_graph(),
            Learned::Dag(d) => d.as_graph(),
        }
    }

    /// A DAG member of the learned class.
    pub fn to_dag(&self) -> Dag {
        match self {
            Learned::Pdag(p) => p.extension_or_fallback(),
            Learned::Dag(d) => d.clone(),
        }
    }
}

impl Learner {
    pub fn new(algorithm: Algorithm, config: LearnConfig) -> Self {
        Learner { algorithm, config }
    }

    pub fn learn(&self, d: &Dataset) -> Result<Learned> {
        Ok(match self.algorithm {
            Algorithm::GrowShrink => Learned::Pdag(gs_structure(d, &self.config)?.pdag),
            Algorithm::HillClimb => Learned::Dag(hill_climb(d, &self.config)?.dag),
            Algorithm::Hybrid => Learned::Dag(hybrid_learn(d, &self.config)?.dag),
        })
    }

    /// Same learner with its seed replaced.
    pub fn reseeded(&self, seed: u64) -> Learner {
        let mut l = self.clone();
        l.config.seed = seed;
        l
    }
}
