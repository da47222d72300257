//! Graph representations and structural algorithms.
//!
//! Every graph stores its node labels in lexicographic order, and node
//! indices are positions in that order. Index order therefore *is* name
//! order, which is what makes every listing in this module deterministic.

mod chordal;
mod equivalence;
mod separation;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::Deref;

use crate::error::{PgmError, Result};

pub use chordal::running_intersection_holds;
pub(crate) use equivalence::propagate_orientations;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Directed,
    Undirected,
}

/// Nodes plus directed arcs and undirected edges, at most one per node pair.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MixedGraph {
    names: Vec<String>,
    parents: Vec<BTreeSet<usize>>,
    children: Vec<BTreeSet<usize>>,
    neighbors: Vec<BTreeSet<usize>>,
}

impl fmt::Debug for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs: Vec<String> = self
            .arcs()
            .map(|(a, b)| format!("{}->{}", self.names[a], self.names[b]))
            .collect();
        let edges: Vec<String> = self
            .edges()
            .map(|(a, b)| format!("{}--{}", self.names[a], self.names[b]))
            .collect();
        f.debug_struct("MixedGraph")
            .field("nodes", &self.names)
            .field("arcs", &arcs)
            .field("edges", &edges)
            .finish()
    }
}

impl MixedGraph {
    /// Creates an edgeless graph. Labels are sorted; duplicates and empty
    /// labels are rejected.
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.iter().any(|n| n.is_empty()) {
            return Err(PgmError::arg("node labels must be non-empty"));
        }
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(PgmError::arg(format!("duplicate node label '{}'", w[0])));
            }
        }
        let n = names.len();
        Ok(MixedGraph {
            names,
            parents: vec![BTreeSet::new(); n],
            children: vec![BTreeSet::new(); n],
            neighbors: vec![BTreeSet::new(); n],
        })
    }

    /// An edgeless graph over the same nodes.
    pub fn empty_like(&self) -> Self {
        let n = self.n();
        MixedGraph {
            names: self.names.clone(),
            parents: vec![BTreeSet::new(); n],
            children: vec![BTreeSet::new(); n],
            neighbors: vec![BTreeSet::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| PgmError::arg(format!("unknown node '{name}'")))
    }

    pub(crate) fn require_all(&self, names: &[&str]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.require(n)).collect()
    }

    pub fn names_of(&self, idx: impl IntoIterator<Item = usize>) -> Vec<String> {
        idx.into_iter().map(|i| self.names[i].clone()).collect()
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        if a >= self.n() || b >= self.n() {
            return Err(PgmError::arg("node index out of range"));
        }
        if a == b {
            return Err(PgmError::Structural(format!(
                "self-loop on '{}'",
                self.names[a]
            )));
        }
        if self.adjacent(a, b) {
            return Err(PgmError::Structural(format!(
                "'{}' and '{}' are already adjacent",
                self.names[a], self.names[b]
            )));
        }
        Ok(())
    }

    pub fn add_arc(&mut self, from: usize, to: usize) -> Result<()> {
        self.check_pair(from, to)?;
        self.children[from].insert(to);
        self.parents[to].insert(from);
        Ok(())
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        self.neighbors[a].insert(b);
        self.neighbors[b].insert(a);
        Ok(())
    }

    /// Removes whatever edge joins `a` and `b`; returns whether one existed.
    pub fn remove_between(&mut self, a: usize, b: usize) -> bool {
        let mut removed = false;
        removed |= self.children[a].remove(&b) && self.parents[b].remove(&a);
        removed |= self.children[b].remove(&a) && self.parents[a].remove(&b);
        removed |= self.neighbors[a].remove(&b) && self.neighbors[b].remove(&a);
        removed
    }

    /// Turns the undirected edge `from`–`to` into `from → to`.
    pub(crate) fn orient(&mut self, from: usize, to: usize) {
        debug_assert!(self.has_edge(from, to));
        self.neighbors[from].remove(&to);
        self.neighbors[to].remove(&from);
        self.children[from].insert(to);
        self.parents[to].insert(from);
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.children[from].contains(&to)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].contains(&b)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_arc(a, b) || self.has_arc(b, a) || self.has_edge(a, b)
    }

    pub fn parents(&self, i: usize) -> &BTreeSet<usize> {
        &self.parents[i]
    }

    pub fn children(&self, i: usize) -> &BTreeSet<usize> {
        &self.children[i]
    }

    /// Endpoints of undirected edges at `i`.
    pub fn neighbors(&self, i: usize) -> &BTreeSet<usize> {
        &self.neighbors[i]
    }

    /// Every node joined to `i` by any kind of edge.
    pub fn adjacents(&self, i: usize) -> BTreeSet<usize> {
        self.parents[i]
            .iter()
            .chain(&self.children[i])
            .chain(&self.neighbors[i])
            .copied()
            .collect()
    }

    /// Directed arcs in lexicographic `(tail, head)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(a, ch)| ch.iter().map(move |&b| (a, b)))
    }

    /// Undirected edges as `(lo, hi)` pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(a, ne)| ne.range(a + 1..).map(move |&b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.arcs().count() + self.edges().count()
    }

    pub fn is_fully_directed(&self) -> bool {
        self.neighbors.iter().all(BTreeSet::is_empty)
    }

    pub fn is_fully_undirected(&self) -> bool {
        self.parents.iter().all(BTreeSet::is_empty)
    }

    /// Kahn's algorithm over the directed part; `Err` carries one directed cycle.
    pub(crate) fn directed_topological_order(&self) -> std::result::Result<Vec<usize>, Vec<usize>> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        let n = self.n();
        let mut indeg: Vec<usize> = self.parents.iter().map(BTreeSet::len).collect();
        let mut heap: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = heap.pop() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    heap.push(Reverse(c));
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // Every leftover node has a leftover parent; walk parents until one repeats.
        let leftover: Vec<bool> = (0..n).map(|i| indeg[i] > 0).collect();
        let start = (0..n).find(|&i| leftover[i]).unwrap();
        let mut seen_at = HashMap::new();
        let mut walk = vec![start];
        let mut cur = start;
        loop {
            seen_at.insert(cur, walk.len() - 1);
            let next = *self.parents[cur].iter().find(|&&p| leftover[p]).unwrap();
            if let Some(&pos) = seen_at.get(&next) {
                let mut cycle: Vec<usize> = walk[pos..].to_vec();
                cycle.reverse();
                let lo = (0..cycle.len()).min_by_key(|&k| cycle[k]).unwrap();
                cycle.rotate_left(lo);
                return Err(cycle);
            }
            walk.push(next);
            cur = next;
        }
    }

    /// Topological order of the directed part; ties broken by name.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        self.directed_topological_order()
            .map_err(|cycle| PgmError::Structural(self.cycle_message(&cycle)))
    }

    pub fn has_directed_cycle(&self) -> bool {
        self.directed_topological_order().is_err()
    }

    /// Whether `to` can be reached from `from` along directed arcs.
    pub(crate) fn has_directed_path(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.n()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(v) = queue.pop_front() {
            if v == to {
                return true;
            }
            for &c in &self.children[v] {
                if !seen[c] {
                    seen[c] = true;
                    queue.push_back(c);
                }
            }
        }
        false
    }

    pub(crate) fn cycle_message(&self, cycle: &[usize]) -> String {
        let mut parts: Vec<&str> = cycle.iter().map(|&i| self.name(i)).collect();
        parts.push(self.name(cycle[0]));
        format!("directed cycle {}", parts.join(" -> "))
    }

    /// Undirected version: every arc and edge becomes an undirected edge.
    pub fn skeleton(&self) -> UGraph {
        let mut g = self.empty_like();
        for i in 0..self.n() {
            for j in self.adjacents(i) {
                if i < j {
                    g.add_edge(i, j).expect("pairs are unique");
                }
            }
        }
        UGraph(g)
    }
}

fn build(names: &[&str], arcs: &[(&str, &str)], edges: &[(&str, &str)]) -> Result<MixedGraph> {
    let mut g = MixedGraph::new(names.iter().copied())?;
    for (a, b) in arcs {
        let (a, b) = (g.require(a)?, g.require(b)?);
        g.add_arc(a, b)?;
    }
    for (a, b) in edges {
        let (a, b) = (g.require(a)?, g.require(b)?);
        g.add_edge(a, b)?;
    }
    Ok(g)
}

/// Directed acyclic graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dag(MixedGraph);

/// Undirected graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UGraph(MixedGraph);

/// Partially directed graph whose directed part is acyclic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pdag(MixedGraph);

macro_rules! graph_deref {
    ($t:ty) => {
        impl Deref for $t {
            type Target = MixedGraph;
            fn deref(&self) -> &MixedGraph {
                &self.0
            }
        }

        impl $t {
            pub fn as_graph(&self) -> &MixedGraph {
                &self.0
            }

            pub fn into_graph(self) -> MixedGraph {
                self.0
            }
        }
    };
}

graph_deref!(Dag);
graph_deref!(UGraph);
graph_deref!(Pdag);

impl Dag {
    pub fn empty<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ok(Dag(MixedGraph::new(names)?))
    }

    pub fn from_arcs(names: &[&str], arcs: &[(&str, &str)]) -> Result<Self> {
        Dag::try_from(build(names, arcs, &[])?)
    }

    /// Adds `from → to`, refusing arcs that would close a directed cycle.
    pub fn add_arc(&mut self, from: usize, to: usize) -> Result<()> {
        if from < self.n() && to < self.n() && self.0.has_directed_path(to, from) {
            return Err(PgmError::Structural(format!(
                "arc {} -> {} would create a directed cycle",
                self.name(from),
                self.name(to)
            )));
        }
        self.0.add_arc(from, to)
    }

    pub fn remove_arc(&mut self, from: usize, to: usize) -> bool {
        self.0.has_arc(from, to) && self.0.remove_between(from, to)
    }

    /// Node indices with every arc tail before its head; ties by name.
    pub fn topological_order(&self) -> Vec<usize> {
        self.0
            .directed_topological_order()
            .expect("Dag invariant: acyclic")
    }

    pub fn topological_names(&self) -> Vec<String> {
        self.names_of(self.topological_order())
    }

    /// Parents, children, and the children's other parents of `x`.
    pub fn markov_blanket_idx(&self, x: usize) -> BTreeSet<usize> {
        let mut mb: BTreeSet<usize> = self.parents(x).clone();
        for &c in self.children(x) {
            mb.insert(c);
            mb.extend(self.parents(c).iter().copied());
        }
        mb.remove(&x);
        mb
    }

    pub fn markov_blanket(&self, x: &str) -> Result<Vec<String>> {
        let i = self.require(x)?;
        Ok(self.names_of(self.markov_blanket_idx(i)))
    }

    /// Skeleton plus an edge between every pair of parents sharing a child.
    pub fn moralize(&self) -> UGraph {
        let mut g = self.skeleton().0;
        for c in 0..self.n() {
            let pa: Vec<usize> = self.parents(c).iter().copied().collect();
            for (k, &a) in pa.iter().enumerate() {
                for &b in &pa[k + 1..] {
                    if !g.adjacent(a, b) {
                        g.add_edge(a, b).expect("checked adjacency");
                    }
                }
            }
        }
        UGraph(g)
    }

    /// Unshielded colliders `(a, c, b)` with `a < b`, sorted.
    pub fn v_structures_idx(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for c in 0..self.n() {
            let pa: Vec<usize> = self.parents(c).iter().copied().collect();
            for (k, &a) in pa.iter().enumerate() {
                for &b in &pa[k + 1..] {
                    if !self.adjacent(a, b) {
                        out.push((a, c, b));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn v_structures(&self) -> Vec<(String, String, String)> {
        self.v_structures_idx()
            .into_iter()
            .map(|(a, c, b)| {
                (
                    self.name(a).to_owned(),
                    self.name(c).to_owned(),
                    self.name(b).to_owned(),
                )
            })
            .collect()
    }

    /// Parent sets in node-index order.
    pub fn parent_sets(&self) -> Vec<Vec<usize>> {
        (0..self.n())
            .map(|i| self.parents(i).iter().copied().collect())
            .collect()
    }
}

impl TryFrom<MixedGraph> for Dag {
    type Error = PgmError;

    fn try_from(g: MixedGraph) -> Result<Self> {
        if !g.is_fully_directed() {
            return Err(PgmError::Structural(
                "a DAG cannot contain undirected edges".into(),
            ));
        }
        if let Err(cycle) = g.directed_topological_order() {
            return Err(PgmError::Structural(g.cycle_message(&cycle)));
        }
        Ok(Dag(g))
    }
}

impl UGraph {
    pub fn empty<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ok(UGraph(MixedGraph::new(names)?))
    }

    pub fn from_edges(names: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        UGraph::try_from(build(names, &[], edges)?)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        self.0.add_edge(a, b)
    }

    pub fn markov_blanket_idx(&self, x: usize) -> BTreeSet<usize> {
        self.neighbors(x).clone()
    }

    /// In an undirected graph the blanket is the neighbourhood.
    pub fn markov_blanket(&self, x: &str) -> Result<Vec<String>> {
        let i = self.require(x)?;
        Ok(self.names_of(self.markov_blanket_idx(i)))
    }

    /// Edge list as name pairs `(lo, hi)`.
    pub fn edge_names(&self) -> Vec<(String, String)> {
        self.edges()
            .map(|(a, b)| (self.name(a).to_owned(), self.name(b).to_owned()))
            .collect()
    }
}

impl TryFrom<MixedGraph> for UGraph {
    type Error = PgmError;

    fn try_from(g: MixedGraph) -> Result<Self> {
        if !g.is_fully_undirected() {
            return Err(PgmError::Structural(
                "an undirected graph cannot contain arcs".into(),
            ));
        }
        Ok(UGraph(g))
    }
}

impl From<Dag> for Pdag {
    fn from(d: Dag) -> Self {
        Pdag(d.0)
    }
}

impl From<UGraph> for Pdag {
    fn from(u: UGraph) -> Self {
        Pdag(u.0)
    }
}

impl TryFrom<MixedGraph> for Pdag {
    type Error = PgmError;

    fn try_from(g: MixedGraph) -> Result<Self> {
        if let Err(cycle) = g.directed_topological_order() {
            return Err(PgmError::Structural(g.cycle_message(&cycle)));
        }
        Ok(Pdag(g))
    }
}

impl Pdag {
    pub fn from_parts(
        names: &[&str],
        arcs: &[(&str, &str)],
        edges: &[(&str, &str)],
    ) -> Result<Self> {
        Pdag::try_from(build(names, arcs, edges)?)
    }

    /// A DAG in the class this graph describes, following Dor and Tarsi:
    /// repeatedly remove a sink whose undirected neighbours are adjacent to
    /// all of its other adjacents, orienting its undirected edges inwards.
    pub fn consistent_extension(&self) -> Result<Dag> {
        let mut work = self.0.clone();
        let mut out = self.0.clone();
        let mut alive = vec![true; self.n()];
        for _ in 0..self.n() {
            let pick = (0..self.n()).find(|&x| {
                if !alive[x] || !work.children(x).is_empty() {
                    return false;
                }
                let adj = work.adjacents(x);
                work.neighbors(x)
                    .iter()
                    .all(|&y| adj.iter().all(|&z| z == y || work.adjacent(y, z)))
            });
            let Some(x) = pick else {
                return Err(PgmError::Structural(
                    "partially directed graph has no consistent DAG extension".into(),
                ));
            };
            let undirected: Vec<usize> = work.neighbors(x).iter().copied().collect();
            for y in undirected {
                if out.has_edge(y, x) {
                    out.orient(y, x);
                }
            }
            let adj: Vec<usize> = work.adjacents(x).into_iter().collect();
            for y in adj {
                work.remove_between(x, y);
            }
            alive[x] = false;
        }
        Dag::try_from(out)
    }

    /// Like [`Pdag::consistent_extension`], but when no extension exists the
    /// remaining undirected edges are oriented along a topological order of
    /// the directed part, which always yields a DAG.
    pub fn extension_or_fallback(&self) -> Dag {
        if let Ok(d) = self.consistent_extension() {
            return d;
        }
        let order = self
            .0
            .directed_topological_order()
            .expect("Pdag invariant: directed part acyclic");
        let mut rank = vec![0; self.n()];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r;
        }
        let mut g = self.0.clone();
        let edges: Vec<(usize, usize)> = self.edges().collect();
        for (a, b) in edges {
            if rank[a] < rank[b] {
                g.orient(a, b);
            } else {
                g.orient(b, a);
            }
        }
        Dag::try_from(g).expect("rank order is acyclic")
    }
}
