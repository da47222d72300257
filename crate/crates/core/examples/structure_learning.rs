//! Constraint-based, score-based and hybrid structure learning on data
//! simulated from the chest-clinic network.
//!
//! `either` is a deterministic OR of `lung` and `tub`, so some of its
//! dependencies vanish once both parents are conditioned on. Tests cannot
//! see those edges, and the Grow-Shrink and hybrid graphs come out sparser
//! than the score-based one.
//!
//! ```bash
//! cargo run --release --example structure_learning
//! ```

use pgmkit::cli::{emit_dot, DotStyles};
use pgmkit::infer::simulate;
use pgmkit::learn::{gs_structure, hill_climb, hybrid_learn, LearnConfig};
use pgmkit::scores::ScoreKind;

mod common;

fn main() -> pgmkit::Result<()> {
    let truth = common::asia();
    let d = simulate(&truth, 5000, 42)?;

    let cfg = LearnConfig {
        alpha: 0.01,
        ..LearnConfig::default()
    };
    let gs = gs_structure(&d, &cfg)?;
    println!(
        "Grow-Shrink equivalence class:\n{}",
        emit_dot(&gs.pdag, &DotStyles::new())
    );
    if !gs.conflicts.is_empty() {
        println!(
            "conflicting orientations left undirected: {:?}",
            gs.conflicts
        );
    }

    let cfg = LearnConfig {
        score: ScoreKind::Bic,
        restarts: 5,
        tabu_length: 10,
        seed: 1,
        ..LearnConfig::default()
    };
    let hc = hill_climb(&d, &cfg)?;
    println!(
        "hill climbing (BIC {:.1}):\n{}",
        hc.score,
        emit_dot(&hc.dag, &DotStyles::new())
    );

    let hy = hybrid_learn(&d, &cfg)?;
    println!(
        "hybrid (BIC {:.1}):\n{}",
        hy.score,
        emit_dot(&hy.dag, &DotStyles::new())
    );

    let same = hc.dag.cpdag() == truth.dag().cpdag();
    println!("hill climbing recovered the true equivalence class: {same}");
    Ok(())
}
