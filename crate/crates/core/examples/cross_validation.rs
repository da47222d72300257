//! Ten-fold cross-validation of a learner plus parameter fit, scored by
//! misclassification of one target node.

use pgmkit::infer::simulate;
use pgmkit::learn::{Algorithm, LearnConfig, Learner};
use pgmkit::validate::{cross_validate, Loss};

mod common;

fn main() -> pgmkit::Result<()> {
    let d = simulate(&common::asia(), 2000, 11)?;
    for algo in [
        Algorithm::HillClimb,
        Algorithm::GrowShrink,
        Algorithm::Hybrid,
    ] {
        let learner = Learner::new(algo, LearnConfig::default());
        let cv = cross_validate(
            &d,
            &learner,
            10,
            &Loss::Misclassification("either".into()),
            3,
        )?;
        println!(
            "{algo:?}: mean {} {:.4} over {} folds",
            cv.loss, cv.mean, cv.folds
        );
    }
    Ok(())
}
