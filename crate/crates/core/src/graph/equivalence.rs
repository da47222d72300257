//! Equivalence classes of DAGs: CPDAG construction and orientation propagation.

use super::{Dag, MixedGraph, Pdag};

impl Dag {
    /// The completed partially directed graph of this DAG's equivalence
    /// class: the skeleton with v-structures oriented, then closed under the
    /// three orientation rules. The remaining arcs are the compelled edges.
    pub fn cpdag(&self) -> Pdag {
        let mut g = self.skeleton().into_graph();
        for (a, c, b) in self.v_structures_idx() {
            if g.has_edge(a, c) {
                g.orient(a, c);
            }
            if g.has_edge(b, c) {
                g.orient(b, c);
            }
        }
        propagate_orientations(&mut g);
        Pdag(g)
    }
}

/// Applies the three local orientation rules until nothing changes.
///
/// 1. `c → a – b`, `c` and `b` non-adjacent: orient `a → b`.
/// 2. `a → c → b` and `a – b`: orient `a → b`.
/// 3. `a – c1 → b`, `a – c2 → b`, `c1` and `c2` non-adjacent, `a – b`:
///    orient `a → b`.
///
/// An orientation that would close a directed cycle is skipped, which only
/// matters for graphs produced from noisy independence tests.
pub(crate) fn propagate_orientations(g: &mut MixedGraph) {
    loop {
        let mut changed = false;
        let edges: Vec<(usize, usize)> = g.edges().collect();
        for (x, y) in edges {
            for (a, b) in [(x, y), (y, x)] {
                if !g.has_edge(a, b) {
                    continue;
                }
                if should_orient(g, a, b) && !g.has_directed_path(b, a) {
                    g.orient(a, b);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn should_orient(g: &MixedGraph, a: usize, b: usize) -> bool {
    // rule 1
    if g.parents(a).iter().any(|&c| !g.adjacent(c, b)) {
        return true;
    }
    // rule 2
    if g.children(a).iter().any(|&c| g.has_arc(c, b)) {
        return true;
    }
    // rule 3
    let cands: Vec<usize> = g
        .neighbors(a)
        .iter()
        .copied()
        .filter(|&c| c != b && g.has_arc(c, b))
        .collect();
    for (i, &c1) in cands.iter().enumerate() {
        for &c2 in &cands[i + 1..] {
            if !g.adjacent(c1, c2) {
                return true;
            }
        }
    }
    false
}
