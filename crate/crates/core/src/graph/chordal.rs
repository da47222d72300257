use std::collections::BTreeSet;

use super::UGraph;

impl UGraph {
    /// Maximum-cardinality search visit order. Ties go to the smallest index.
    pub(crate) fn mcs_order(&self) -> Vec<usize> {
        let n = self.n();
        let mut weight = vec![0usize; n];
        let mut done = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| !done[v])
                .max_by(|&x, &y| weight[x].cmp(&weight[y]).then(y.cmp(&x)))
                .unwrap();
            done[v] = true;
            order.push(v);
            for &w in self.neighbors(v) {
                if !done[w] {
                    weight[w] += 1;
                }
            }
        }
        order
    }

    /// A perfect elimination ordering when the graph is chordal.
    pub fn perfect_elimination_order(&self) -> Option<Vec<usize>> {
        let visit = self.mcs_order();
        let mut pos = vec![0; self.n()];
        for (k, &v) in visit.iter().enumerate() {
            pos[v] = k;
        }
        for &v in &visit {
            let earlier: Vec<usize> = self
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&w| pos[w] < pos[v])
                .collect();
            let Some(&u) = earlier.iter().max_by_key(|&&w| pos[w]) else {
                continue;
            };
            for &w in &earlier {
                if w != u && !self.has_edge(u, w) {
                    return None;
                }
            }
        }
        let mut peo = visit;
        peo.reverse();
        Some(peo)
    }

    /// No induced cycle longer than three.
    pub fn is_chordal(&self) -> bool {
        self.perfect_elimination_order().is_some()
    }

    /// Maximal cliques as sorted index lists.
    ///
    /// For chordal graphs the cliques come out in maximum-cardinality-search
    /// order, which has the running-intersection property. Otherwise all
    /// maximal cliques are enumerated (Bron–Kerbosch with pivoting) and sorted
    /// lexicographically.
    pub fn cliques_idx(&self) -> Vec<Vec<usize>> {
        if self.is_chordal() {
            self.chordal_cliques()
        } else {
            let mut out = Vec::new();
            let all: BTreeSet<usize> = (0..self.n()).collect();
            self.bron_kerbosch(BTreeSet::new(), all, BTreeSet::new(), &mut out);
            out.sort();
            out
        }
    }

    pub fn cliques(&self) -> Vec<Vec<String>> {
        self.cliques_idx()
            .into_iter()
            .map(|c| self.names_of(c))
            .collect()
    }

    fn chordal_cliques(&self) -> Vec<Vec<usize>> {
        let visit = self.mcs_order();
        let mut pos = vec![0; self.n()];
        for (k, &v) in visit.iter().enumerate() {
            pos[v] = k;
        }
        let candidates: Vec<BTreeSet<usize>> = visit
            .iter()
            .map(|&v| {
                let mut c: BTreeSet<usize> = self
                    .neighbors(v)
                    .iter()
                    .copied()
                    .filter(|&w| pos[w] < pos[v])
                    .collect();
                c.insert(v);
                c
            })
            .collect();
        // A candidate is maximal unless the next vertex's candidate extends it.
        let mut out = Vec::new();
        for (k, c) in candidates.iter().enumerate() {
            let absorbed = candidates
                .get(k + 1)
                .is_some_and(|next| next.len() == c.len() + 1 && c.is_subset(next));
            if !absorbed {
                out.push(c.iter().copied().collect());
            }
        }
        out
    }

    fn bron_kerbosch(
        &self,
        r: BTreeSet<usize>,
        mut p: BTreeSet<usize>,
        mut x: BTreeSet<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r.into_iter().collect());
            return;
        }
        let pivot = *p
            .union(&x)
            .max_by_key(|&&u| self.neighbors(u).intersection(&p).count())
            .unwrap();
        let branch: Vec<usize> = p
            .iter()
            .copied()
            .filter(|v| !self.neighbors(pivot).contains(v))
            .collect();
        for v in branch {
            let nv = self.neighbors(v);
            let mut r2 = r.clone();
            r2.insert(v);
            self.bron_kerbosch(
                r2,
                p.intersection(nv).copied().collect(),
                x.intersection(nv).copied().collect(),
                out,
            );
            p.remove(&v);
            x.insert(v);
        }
    }
}

/// Checks that every clique's overlap with the union of its predecessors is
/// contained in a single predecessor.
pub fn running_intersection_holds(cliques: &[Vec<usize>]) -> bool {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for (i, c) in cliques.iter().enumerate() {
        if i > 0 {
            let sep: Vec<usize> = c.iter().copied().filter(|v| seen.contains(v)).collect();
            let covered = cliques[..i]
                .iter()
                .any(|prev| sep.iter().all(|v| prev.contains(v)));
            if !covered {
                return false;
            }
        }
        seen.extend(c.iter().copied());
    }
    true
}
