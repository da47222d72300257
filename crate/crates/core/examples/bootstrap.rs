//! Arc strength by nonparametric bootstrap: how often each adjacency and
//! each direction reappears when the learner is rerun on resampled data.

use pgmkit::infer::simulate;
use pgmkit::learn::{Algorithm, LearnConfig, Learner};
use pgmkit::validate::bootstrap_confidence;

mod common;

fn main() -> pgmkit::Result<()> {
    let d = simulate(&common::asia(), 1000, 5)?;
    let learner = Learner::new(Algorithm::HillClimb, LearnConfig::default());
    let conf = bootstrap_confidence(&d, &learner, 50, 9)?;
    println!("{} replicates ({} failed)", conf.replicates, conf.failed);
    conf.write_csv(std::io::stdout())?;
    Ok(())
}
