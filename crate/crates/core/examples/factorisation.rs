//! Fitting a network from data and checking the two factorisations: the
//! DAG product of local tables and the clique/separator ratio for a
//! decomposable undirected graph.

use pgmkit::data::load_dataset;
use pgmkit::graph::{Dag, UGraph};
use pgmkit::params::{clique_factorization, fit_network};

const DATA: &str = "\
A,B,C
yes,yes,yes
yes,no,yes
no,no,no
no,no,no
yes,yes,yes
no,yes,yes
no,no,no
yes,yes,no
no,no,yes
yes,yes,yes
";

fn main() -> pgmkit::Result<()> {
    let d = load_dataset(DATA.as_bytes(), None)?;
    let chain = Dag::from_arcs(&["A", "B", "C"], &[("A", "C"), ("C", "B")])?;
    let bn = fit_network(&d, &chain, 0.0)?;

    let yes = bn.assignment(&[("A", "yes"), ("B", "yes"), ("C", "yes")])?;
    println!(
        "P(A=yes, B=yes, C=yes) = {:.4} under A -> C -> B",
        bn.joint_probability(&yes)?
    );
    println!("log-likelihood of the sample: {:?}", bn.log_likelihood(&d)?);

    // The undirected chain A - C - B factorises as P(A,C) P(B,C) / P(C).
    let u = UGraph::from_edges(&["A", "B", "C"], &[("A", "C"), ("C", "B")])?;
    let f = clique_factorization(&d, &u)?;
    println!("cliques: {:?}", u.cliques());
    println!("clique form at (yes, yes, yes): {:.4}", f.joint(&yes));
    Ok(())
}
