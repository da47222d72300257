//! Fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use pgmkit::data::{Column, Dataset, VariableMeta};
use pgmkit::graph::{Dag, UGraph};
use pgmkit::params::{all_assignments, BayesianNetwork, Cpt, LocalDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("N{i}")).collect()
}

/// Every labelled DAG on `n` nodes named `N0..`, so node index = position.
pub fn all_dags(n: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let total = 3usize.pow(pairs.len() as u32);
    let nm = names(n);
    let mut out = Vec::new();
    'cand: for mut code in 0..total {
        let mut g = Dag::empty(nm.iter().cloned()).unwrap();
        for &(i, j) in &pairs {
            let r = code % 3;
            code /= 3;
            let ok = match r {
                1 => g.add_arc(i, j).is_ok(),
                2 => g.add_arc(j, i).is_ok(),
                _ => true,
            };
            if !ok {
                continue 'cand;
            }
        }
        out.push(g);
    }
    out
}

/// Random DAG: arcs only from lower to higher index of a random permutation.
pub fn random_dag(n: usize, density: f64, r: &mut impl Rng) -> Dag {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, r.gen_range(0..=i));
    }
    let mut g = Dag::empty(names(n)).unwrap();
    for a in 0..n {
        for b in a + 1..n {
            if r.gen::<f64>() < density {
                g.add_arc(perm[a], perm[b]).unwrap();
            }
        }
    }
    g
}

pub fn binary(name: &str) -> VariableMeta {
    VariableMeta::discrete(name, ["no", "yes"])
}

pub fn cpt(node: &str, parents: &[&str], rows: Vec<Vec<f64>>) -> LocalDistribution {
    LocalDistribution::Cpt(Cpt {
        node: node.into(),
        parents: parents.iter().map(|s| s.to_string()).collect(),
        parent_levels: vec![2; parents.len()],
        rows,
        unseen_rows: vec![],
    })
}

/// Binary network on `dag` with rows drawn uniformly from the simplex
/// interior (bounded away from 0).
pub fn random_binary_network(dag: &Dag, r: &mut impl Rng) -> BayesianNetwork {
    let vars: Vec<VariableMeta> = dag.names().iter().map(|n| binary(n)).collect();
    let locals = (0..dag.n())
        .map(|i| {
            let parents: Vec<&str> = dag.parents(i).iter().map(|&p| dag.name(p)).collect();
            let rows = (0..1usize << parents.len())
                .map(|_| {
                    let p = 0.05 + 0.9 * r.gen::<f64>();
                    vec![1.0 - p, p]
                })
                .collect();
            cpt(dag.name(i), &parents, rows)
        })
        .collect();
    BayesianNetwork::new(dag.clone(), vars, locals).unwrap()
}

pub fn serial() -> Dag {
    Dag::from_arcs(&["A", "B", "C"], &[("A", "C"), ("C", "B")]).unwrap()
}

pub fn diverging() -> Dag {
    Dag::from_arcs(&["A", "B", "C"], &[("C", "A"), ("C", "B")]).unwrap()
}

pub fn converging() -> Dag {
    Dag::from_arcs(&["A", "B", "C"], &[("A", "C"), ("B", "C")]).unwrap()
}

/// Converging connection with strong tables: C is "yes" with probability
/// 0.9 when either parent is "yes" and 0.1 otherwise.
pub fn converging_network() -> BayesianNetwork {
    let vars = ["A", "B", "C"].map(binary).to_vec();
    BayesianNetwork::new(
        converging(),
        vars,
        vec![
            cpt("A", &[], vec![vec![0.5, 0.5]]),
            cpt("B", &[], vec![vec![0.5, 0.5]]),
            cpt(
                "C",
                &["A", "B"],
                vec![
                    vec![0.9, 0.1],
                    vec![0.1, 0.9],
                    vec![0.1, 0.9],
                    vec![0.1, 0.9],
                ],
            ),
        ],
    )
    .unwrap()
}

/// Serial chain A → C → B, each child copying its parent with probability 0.9.
pub fn serial_network() -> BayesianNetwork {
    let vars = ["A", "B", "C"].map(binary).to_vec();
    BayesianNetwork::new(
        serial(),
        vars,
        vec![
            cpt("A", &[], vec![vec![0.5, 0.5]]),
            cpt("C", &["A"], vec![vec![0.9, 0.1], vec![0.1, 0.9]]),
            cpt("B", &["C"], vec![vec![0.9, 0.1], vec![0.1, 0.9]]),
        ],
    )
    .unwrap()
}

/// The eight-node chest-clinic network with its customary tables.
pub fn asia() -> BayesianNetwork {
    let arcs = [
        ("asia", "tub"),
        ("smoke", "lung"),
        ("smoke", "bronc"),
        ("tub", "either"),
        ("lung", "either"),
        ("either", "xray"),
        ("either", "dysp"),
        ("bronc", "dysp"),
    ];
    let nodes = [
        "asia", "bronc", "dysp", "either", "lung", "smoke", "tub", "xray",
    ];
    let dag = Dag::from_arcs(&nodes, &arcs).unwrap();
    let vars = nodes.map(binary).to_vec();
    let p = |yes: f64| vec![1.0 - yes, yes];
    let locals = vec![
        cpt("asia", &[], vec![p(0.01)]),
        cpt("smoke", &[], vec![p(0.5)]),
        cpt("tub", &["asia"], vec![p(0.01), p(0.05)]),
        cpt("lung", &["smoke"], vec![p(0.01), p(0.1)]),
        cpt("bronc", &["smoke"], vec![p(0.3), p(0.6)]),
        // either is a logical OR of its parents (lung, tub).
        cpt(
            "either",
            &["lung", "tub"],
            vec![p(0.0), p(1.0), p(1.0), p(1.0)],
        ),
        cpt("xray", &["either"], vec![p(0.05), p(0.98)]),
        cpt(
            "dysp",
            &["bronc", "either"],
            vec![p(0.1), p(0.7), p(0.8), p(0.9)],
        ),
    ];
    BayesianNetwork::new(dag, vars, locals).unwrap()
}

/// Dataset of discrete columns given as level indices.
pub fn discrete_data(cols: &[(&str, usize, Vec<u32>)]) -> Dataset {
    let vars = cols
        .iter()
        .map(|(n, k, _)| VariableMeta::discrete(n, (0..*k).map(|l| format!("l{l}"))))
        .collect();
    let columns = cols
        .iter()
        .map(|(_, _, v)| Column::Discrete(v.clone()))
        .collect();
    Dataset::new(vars, columns).unwrap()
}

/// Full joint table of a discrete network, in `all_assignments` order.
pub fn joint_table(bn: &BayesianNetwork) -> (Vec<usize>, Vec<(Vec<usize>, f64)>) {
    let cards: Vec<usize> = (0..bn.dag().n()).map(|i| bn.cardinality(i)).collect();
    let rows = all_assignments(&cards)
        .map(|a| {
            let p = bn.joint_probability(&a).unwrap();
            (a, p)
        })
        .collect();
    (cards, rows)
}

/// Conditional mutual information I(X; Y | Z) of an exact joint table.
pub fn conditional_mi(joint: &[(Vec<usize>, f64)], x: &[usize], y: &[usize], z: &[usize]) -> f64 {
    use std::collections::HashMap;
    let key = |a: &[usize], vs: &[usize]| vs.iter().map(|&v| a[v]).collect::<Vec<_>>();
    let (mut pxyz, mut pxz, mut pyz, mut pz) = (
        HashMap::new(),
        HashMap::new(),
        HashMap::new(),
        HashMap::new(),
    );
    for (a, p) in joint {
        let (kx, ky, kz) = (key(a, x), key(a, y), key(a, z));
        *pxyz
            .entry((kx.clone(), ky.clone(), kz.clone()))
            .or_insert(0.0) += p;
        *pxz.entry((kx, kz.clone())).or_insert(0.0) += p;
        *pyz.entry((ky, kz.clone())).or_insert(0.0) += p;
        *pz.entry(kz).or_insert(0.0) += p;
    }
    let mut mi = 0.0;
    for ((kx, ky, kz), &p) in &pxyz {
        if p > 0.0 {
            let num = p * pz[kz];
            let den = pxz[&(kx.clone(), kz.clone())] * pyz[&(ky.clone(), kz.clone())];
            mi += p * (num / den).ln();
        }
    }
    mi
}

/// d-separation by enumerating every simple path of the skeleton.
pub fn dsep_by_paths(g: &Dag, a: &[usize], b: &[usize], c: &[usize]) -> bool {
    let n = g.n();
    let cset: BTreeSet<usize> = c.iter().copied().collect();
    // descendants (including self) of each node
    let mut desc = vec![BTreeSet::new(); n];
    for v in 0..n {
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if desc[v].insert(u) {
                stack.extend(g.children(u).iter().copied());
            }
        }
    }
    fn walk(
        g: &Dag,
        path: &mut Vec<usize>,
        targets: &[usize],
        cset: &BTreeSet<usize>,
        desc: &[BTreeSet<usize>],
    ) -> bool {
        let last = *path.last().unwrap();
        if path.len() > 1 && targets.contains(&last) {
            return active(g, path, cset, desc);
        }
        for nb in g.adjacents(last) {
            if path.contains(&nb) {
                continue;
            }
            path.push(nb);
            // prune early once a prefix is already blocked
            let ok = path.len() < 3 || active(g, &path[path.len() - 3..], cset, desc);
            if ok && walk(g, path, targets, cset, desc) {
                return true;
            }
            path.pop();
        }
        false
    }
    fn active(g: &Dag, path: &[usize], cset: &BTreeSet<usize>, desc: &[BTreeSet<usize>]) -> bool {
        for w in path.windows(3) {
            let (p, v, q) = (w[0], w[1], w[2]);
            let collider = g.has_arc(p, v) && g.has_arc(q, v);
            if collider {
                if !desc[v].iter().any(|d| cset.contains(d)) {
                    return false;
                }
            } else if cset.contains(&v) {
                return false;
            }
        }
        true
    }
    for &s in a {
        let mut path = vec![s];
        if walk(g, &mut path, b, &cset, &desc) {
            return false;
        }
    }
    true
}

/// u-separation by removing `c` and labelling connected components.
pub fn usep_by_components(g: &UGraph, a: &[usize], b: &[usize], c: &[usize]) -> bool {
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (u, v) in g.edges() {
        if c.contains(&u) || c.contains(&v) {
            continue;
        }
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        parent[ru] = rv;
    }
    for &x in a {
        for &y in b {
            if find(&mut parent, x) == find(&mut parent, y) {
                return false;
            }
        }
    }
    true
}

/// Random disjoint (A, B, C) with A and B nonempty.
pub fn random_triple(n: usize, r: &mut impl Rng) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    loop {
        let (mut a, mut b, mut c) = (vec![], vec![], vec![]);
        for v in 0..n {
            match r.gen_range(0..4) {
                0 => a.push(v),
                1 => b.push(v),
                2 => c.push(v),
                _ => {}
            }
        }
        if !a.is_empty() && !b.is_empty() {
            return (a, b, c);
        }
    }
}

pub fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0..1usize << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// P(query | evidence) by summing the full joint.
pub fn enumerate_query(
    bn: &BayesianNetwork,
    query: &[usize],
    evidence: &[(usize, usize)],
) -> Vec<f64> {
    let (_, joint) = joint_table(bn);
    let qcards: Vec<usize> = query.iter().map(|&q| bn.cardinality(q)).collect();
    let mut table = vec![0.0; qcards.iter().product()];
    for (a, p) in &joint {
        if evidence.iter().all(|&(v, val)| a[v] == val) {
            let idx = query
                .iter()
                .zip(&qcards)
                .fold(0, |acc, (&q, &c)| acc * c + a[q]);
            table[idx] += p;
        }
    }
    let total: f64 = table.iter().sum();
    table.iter().map(|p| p / total).collect()
}
