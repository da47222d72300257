//! Network scores on simulated data: equivalent DAGs score alike, and a
//! single-arc change can be scored from the two affected local terms.

use pgmkit::graph::Dag;
use pgmkit::infer::simulate;
use pgmkit::scores::{EdgeChange, ScoreKind, Scorer};

mod common;

fn main() -> pgmkit::Result<()> {
    let d = simulate(&common::asia(), 5000, 1)?.select_columns(&["either", "lung", "smoke"])?;
    let nodes = ["either", "lung", "smoke"];
    let forward = Dag::from_arcs(&nodes, &[("smoke", "lung"), ("lung", "either")])?;
    let backward = Dag::from_arcs(&nodes, &[("either", "lung"), ("lung", "smoke")])?;
    let collider = Dag::from_arcs(&nodes, &[("smoke", "lung"), ("either", "lung")])?;

    for kind in [
        ScoreKind::LogLik,
        ScoreKind::Aic,
        ScoreKind::Bic,
        ScoreKind::Bdeu,
    ] {
        let s = Scorer::new(&d, kind, 1.0)?;
        println!(
            "{kind:?}: chain {:.2}  reversed chain {:.2}  collider {:.2}",
            s.score(&forward)?.total,
            s.score(&backward)?.total,
            s.score(&collider)?.total
        );
    }

    let s = Scorer::new(&d, ScoreKind::Bic, 1.0)?;
    let (smoke, lung) = (forward.require("smoke")?, forward.require("lung")?);
    let change = EdgeChange::Remove(smoke, lung);
    println!(
        "BIC change from dropping smoke -> lung: {:.2}",
        s.delta(&forward, change)?
    );
    println!("local terms cached: {}", s.cache().len());
    Ok(())
}
