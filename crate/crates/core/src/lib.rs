//! Bayesian networks, Markov networks and Gaussian graphical models over
//! complete discrete or continuous data.
//!
//! - [`graph`]: DAGs, undirected and partially directed graphs; d- and
//!   u-separation, Markov blankets, equivalence classes, chordality.
//! - [`data`], [`params`]: CSV ingestion, contingency tables, CPT and
//!   linear-Gaussian fitting, factorised joints.
//! - [`citests`], [`scores`]: conditional independence tests and
//!   decomposable network scores.
//! - [`learn`]: Grow-Shrink, hill climbing with tabu and restarts, and the
//!   hybrid of the two.
//! - [`ggm`]: shrinkage correlation, partial correlations, FDR selection.
//! - [`infer`]: variable elimination, logic sampling, likelihood weighting.
//! - [`validate`]: bootstrap edge confidence and cross-validation.
//! - [`cli`]: the `pgm` command line, model files and DOT output.
//!
//! Node indices are positions in sorted-name order, and every randomised
//! routine takes an explicit seed, so results do not depend on the thread
//! count.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod citests;
pub mod cli;
pub mod data;
pub mod error;
pub mod factor;
pub mod ggm;
pub mod graph;
pub mod infer;
pub mod learn;
pub mod linalg;
pub mod params;
pub mod rng;
pub mod scores;
pub mod validate;

pub use error::{PgmError, Result};
