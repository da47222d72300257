//! Graphical separation on the three fundamental connections, plus the
//! structural summaries derived from a DAG.
//!
//! ```bash
//! cargo run --example separation
//! ```

use pgmkit::graph::{Dag, UGraph};

fn main() -> pgmkit::Result<()> {
    let nodes = ["A", "B", "C"];
    let serial = Dag::from_arcs(&nodes, &[("A", "C"), ("C", "B")])?;
    let diverging = Dag::from_arcs(&nodes, &[("C", "A"), ("C", "B")])?;
    let converging = Dag::from_arcs(&nodes, &[("A", "C"), ("B", "C")])?;

    for (label, g) in [
        ("serial", &serial),
        ("diverging", &diverging),
        ("converging", &converging),
    ] {
        println!(
            "{label:>10}: A _||_ B | C = {:<5}  A _||_ B = {:<5}  cpdag = {:?}",
            g.d_separated(&["A"], &["B"], &["C"])?,
            g.d_separated(&["A"], &["B"], &[])?,
            g.cpdag().as_graph(),
        );
    }

    println!(
        "blanket of A in the collider: {:?}",
        converging.markov_blanket("A")?
    );
    println!("v-structures: {:?}", converging.v_structures());
    println!("moral graph: {:?}", converging.moralize().edge_names());

    let chain = UGraph::from_edges(&nodes, &[("A", "C"), ("C", "B")])?;
    println!(
        "undirected chain: A sep B by C = {}, cliques = {:?}",
        chain.u_separated(&["A"], &["B"], &["C"])?,
        chain.cliques()
    );

    let square = UGraph::from_edges(
        &["A", "B", "C", "D"],
        &[("A", "B"), ("B", "C"), ("C", "D"), ("D", "A")],
    )?;
    println!("4-cycle chordal: {}", square.is_chordal());
    Ok(())
}
