//! The eight-node chest-clinic network shared by several examples.
#![allow(dead_code)]

use pgmkit::data::VariableMeta;
use pgmkit::graph::Dag;
use pgmkit::params::{BayesianNetwork, Cpt, LocalDistribution};

fn table(node: &str, parents: &[&str], yes: &[f64]) -> LocalDistribution {
    LocalDistribution::Cpt(Cpt {
        node: node.into(),
        parents: parents.iter().map(|s| s.to_string()).collect(),
        parent_levels: vec![2; parents.len()],
        rows: yes.iter().map(|&p| vec![1.0 - p, p]).collect(),
        unseen_rows: vec![],
    })
}

pub fn asia() -> BayesianNetwork {
    let nodes = [
        "asia", "bronc", "dysp", "either", "lung", "smoke", "tub", "xray",
    ];
    let dag = Dag::from_arcs(
        &nodes,
        &[
            ("asia", "tub"),
            ("smoke", "lung"),
            ("smoke", "bronc"),
            ("tub", "either"),
            ("lung", "either"),
            ("either", "xray"),
            ("either", "dysp"),
            ("bronc", "dysp"),
        ],
    )
    .unwrap();
    let vars = nodes
        .map(|n| VariableMeta::discrete(n, ["no", "yes"]))
        .to_vec();
    // Rows follow the parents' sorted-name order, last parent fastest.
    let locals = vec![
        table("asia", &[], &[0.01]),
        table("smoke", &[], &[0.5]),
        table("tub", &["asia"], &[0.01, 0.05]),
        table("lung", &["smoke"], &[0.01, 0.1]),
        table("bronc", &["smoke"], &[0.3, 0.6]),
        table("either", &["lung", "tub"], &[0.0, 1.0, 1.0, 1.0]),
        table("xray", &["either"], &[0.05, 0.98]),
        table("dysp", &["bronc", "either"], &[0.1, 0.7, 0.8, 0.9]),
    ];
    BayesianNetwork::new(dag, vars, locals).unwrap()
}
