use std::collections::VecDeque;

use super::{Dag, MixedGraph, UGraph};
use crate::error::{PgmError, Result};

/// Membership masks for a separation query after validating disjointness.
struct Query {
    in_b: Vec<bool>,
    in_c: Vec<bool>,
}

fn prepare(g: &MixedGraph, a: &[usize], b: &[usize], c: &[usize]) -> Result<Query> {
    if a.is_empty() || b.is_empty() {
        return Err(PgmError::arg("separation query needs non-empty A and B"));
    }
    let n = g.n();
    let mut owner = vec![0u8; n];
    for (tag, set) in [(1u8, a), (2, b), (3, c)] {
        for &v in set {
            if v >= n {
                return Err(PgmError::arg("node index out of range"));
            }
            if owner[v] != 0 && owner[v] != tag {
                return Err(PgmError::arg(format!(
                    "node '{}' appears in more than one of A, B, C",
                    g.name(v)
                )));
            }
            owner[v] = tag;
        }
    }
    Ok(Query {
        in_b: owner.iter().map(|&o| o == 2).collect(),
        in_c: owner.iter().map(|&o| o == 3).collect(),
    })
}

impl UGraph {
    /// Whether every path from `a` to `b` passes through `c`.
    pub fn u_separated_idx(&self, a: &[usize], b: &[usize], c: &[usize]) -> Result<bool> {
        let q = prepare(self, a, b, c)?;
        let mut seen = q.in_c.clone();
        let mut queue: VecDeque<usize> = a.iter().copied().collect();
        for &v in a {
            seen[v] = true;
        }
        while let Some(v) = queue.pop_front() {
            if q.in_b[v] {
                return Ok(false);
            }
            for &w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        Ok(true)
    }

    pub fn u_separated(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<bool> {
        self.u_separated_idx(
            &self.require_all(a)?,
            &self.require_all(b)?,
            &self.require_all(c)?,
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Travel {
    /// Arrived from a child, moving against arc direction.
    Up,
    /// Arrived from a parent, moving along arc direction.
    Down,
}

impl Dag {
    /// d-separation by reachability over (node, direction) states.
    ///
    /// A trail may pass a collider only when the collider or one of its
    /// descendants is in `c`, i.e. the collider is an ancestor of `c`
    /// (ancestors here include `c` itself); it may pass a non-collider only
    /// when the non-collider is outside `c`.
    pub fn d_separated_idx(&self, a: &[usize], b: &[usize], c: &[usize]) -> Result<bool> {
        let q = prepare(self, a, b, c)?;
        let n = self.n();

        let mut anc_c = q.in_c.clone();
        let mut stack: Vec<usize> = c.to_vec();
        while let Some(v) = stack.pop() {
            for &p in self.parents(v) {
                if !anc_c[p] {
                    anc_c[p] = true;
                    stack.push(p);
                }
            }
        }

        let mut seen_up = vec![false; n];
        let mut seen_down = vec![false; n];
        let mut queue: VecDeque<(usize, Travel)> = a.iter().map(|&v| (v, Travel::Up)).collect();
        while let Some((v, dir)) = queue.pop_front() {
            let seen = match dir {
                Travel::Up => &mut seen_up[v],
                Travel::Down => &mut seen_down[v],
            };
            if *seen {
                continue;
            }
            *seen = true;
            if q.in_b[v] {
                return Ok(false);
            }
            let observed = q.in_c[v];
            match dir {
                Travel::Up if !observed => {
                    queue.extend(self.parents(v).iter().map(|&p| (p, Travel::Up)));
                    queue.extend(self.children(v).iter().map(|&ch| (ch, Travel::Down)));
                }
                Travel::Up => {}
                Travel::Down => {
                    if !observed {
                        queue.extend(self.children(v).iter().map(|&ch| (ch, Travel::Down)));
                    }
                    if anc_c[v] {
                        queue.extend(self.parents(v).iter().map(|&p| (p, Travel::Up)));
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn d_separated(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<bool> {
        self.d_separated_idx(
            &self.require_all(a)?,
            &self.require_all(b)?,
            &self.require_all(c)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> UGraph {
        UGraph::from_edges(&["A", "B", "C"], &[("A", "C"), ("C", "B")]).unwrap()
    }

    #[test]
    fn undirected_chain_is_separated_by_middle() {
        assert!(chain().u_separated(&["A"], &["B"], &["C"]).unwrap());
        assert!(!chain().u_separated(&["A"], &["B"], &[]).unwrap());
    }

    #[test]
    fn triangle_is_not_separated() {
        let g =
            UGraph::from_edges(&["A", "B", "C"], &[("A", "B"), ("B", "C"), ("A", "C")]).unwrap();
        assert!(!g.u_separated(&["A"], &["B"], &["C"]).unwrap());
    }

    #[test]
    fn disconnected_nodes_are_separated_by_nothing() {
        let g = UGraph::empty(["A", "B"]).unwrap();
        assert!(g.u_separated(&["A"], &["B"], &[]).unwrap());
    }

    #[test]
    fn fundamental_connections() {
        let names = ["A", "B", "C"];
        let converging = Dag::from_arcs(&names, &[("A", "C"), ("B", "C")]).unwrap();
        let serial = Dag::from_arcs(&names, &[("A", "C"), ("C", "B")]).unwrap();
        let diverging = Dag::from_arcs(&names, &[("C", "A"), ("C", "B")]).unwrap();

        assert!(!converging.d_separated(&["A"], &["B"], &["C"]).unwrap());
        assert!(converging.d_separated(&["A"], &["B"], &[]).unwrap());
        assert!(serial.d_separated(&["A"], &["B"], &["C"]).unwrap());
        assert!(!serial.d_separated(&["A"], &["B"], &[]).unwrap());
        assert!(diverging.d_separated(&["A"], &["B"], &["C"]).unwrap());
        assert!(!diverging.d_separated(&["A"], &["B"], &[]).unwrap());
    }

    #[test]
    fn observed_descendant_of_collider_opens_path() {
        let g =
            Dag::from_arcs(&["A", "B", "C", "D"], &[("A", "C"), ("B", "C"), ("C", "D")]).unwrap();
        assert!(!g.d_separated(&["A"], &["B"], &["D"]).unwrap());
    }

    #[test]
    fn bad_queries_are_argument_errors() {
        let g = Dag::from_arcs(&["A", "B"], &[("A", "B")]).unwrap();
        assert!(matches!(
            g.d_separated(&["A"], &["A"], &[]),
            Err(PgmError::Argument(_))
        ));
        assert!(matches!(
            g.d_separated(&["A"], &["Z"], &[]),
            Err(PgmError::Argument(_))
        ));
        assert!(matches!(
            g.d_separated(&[], &["B"], &[]),
            Err(PgmError::Argument(_))
        ));
    }
}
