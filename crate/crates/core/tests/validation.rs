mod common;

use common::*;
use pgmkit::data::{Column, Dataset, VariableMeta};
use pgmkit::infer::simulate;
use pgmkit::learn::{Algorithm, LearnConfig, Learner};
use pgmkit::validate::{bootstrap_confidence, cross_validate, fold_assignment, Loss};
use proptest::prelude::*;
use rand::Rng;

fn hc() -> Learner {
    Learner::new(Algorithm::HillClimb, LearnConfig::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn folds_cover_rows_evenly(n in 2usize..300, k in 2usize..20, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let f = fold_assignment(n, k, seed);
        let mut sizes = vec![0usize; k];
        for &x in &f {
            sizes[x] += 1;
        }
        let (lo, hi) = (n / k, n.div_ceil(k));
        prop_assert!(sizes.iter().all(|&s| s == lo || s == hi));
    }
}

#[test]
fn bootstrap_counts_are_whole_replicates() {
    let d = simulate(&asia(), 500, 1).unwrap();
    for algo in [Algorithm::HillClimb, Algorithm::GrowShrink] {
        let learner = Learner::new(algo, LearnConfig::default());
        let conf = bootstrap_confidence(&d, &learner, 20, 2).unwrap();
        assert_eq!(conf.replicates + conf.failed, 20);
        for (a, b) in conf.skeleton.keys() {
            let s = conf.skeleton_frequency(a, b);
            assert!((s * 20.0 - (s * 20.0).round()).abs() < 1e-12);
            assert!(conf.arc_frequency(a, b) + conf.arc_frequency(b, a) <= s + 1e-12);
        }
        assert_eq!(conf, bootstrap_confidence(&d, &learner, 20, 2).unwrap());
    }
    assert!(bootstrap_confidence(&d, &hc(), 5, 2).is_err());
}

#[test]
fn copied_target_is_predicted_without_error() {
    let mut r = rng(3);
    let x: Vec<u32> = (0..400).map(|_| r.gen_range(0..2)).collect();
    let z: Vec<u32> = (0..400).map(|_| r.gen_range(0..3)).collect();
    let d = discrete_data(&[("T", 2, x.clone()), ("X", 2, x), ("Z", 3, z)]);
    let res = cross_validate(&d, &hc(), 10, &Loss::Misclassification("T".into()), 4).unwrap();
    assert!(res.mean < 1e-12, "{res:?}");
}

#[test]
fn noise_target_is_a_coin_flip() {
    let mut r = rng(5);
    let n = 1000;
    let cols: Vec<(&str, usize, Vec<u32>)> = ["F1", "F2", "T"]
        .iter()
        .map(|&name| (name, 2, (0..n).map(|_| r.gen_range(0..2)).collect()))
        .collect();
    let d = discrete_data(&cols);
    let res = cross_validate(&d, &hc(), 10, &Loss::Misclassification("T".into()), 6).unwrap();
    assert!((res.mean - 0.5).abs() <= 0.1, "{}", res.mean);
}

#[test]
fn leave_one_out_misclassification_by_hand() {
    // Without a held-out "no" the training split ties 2/2 and the first level
    // wins; without a held-out "yes" the majority "no" is predicted.
    let t = vec![0, 0, 0, 1, 1];
    let d = discrete_data(&[("T", 2, t.clone())]);
    let res = cross_validate(&d, &hc(), 5, &Loss::Misclassification("T".into()), 7).unwrap();
    let fold = fold_assignment(5, 5, 7);
    for row in 0..5 {
        assert_eq!(res.per_fold[fold[row]], t[row] as f64);
    }
    assert!((res.mean - 0.4).abs() < 1e-12);
}

#[test]
fn leave_one_out_rss_by_hand() {
    let y = vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
    let d = Dataset::new(
        vec![VariableMeta::continuous("Y")],
        vec![Column::Continuous(y.clone())],
    )
    .unwrap();
    let res = cross_validate(&d, &hc(), 6, &Loss::Rss("Y".into()), 8).unwrap();
    let fold = fold_assignment(6, 6, 8);
    let total: f64 = y.iter().sum();
    for (row, v) in y.iter().enumerate() {
        let rest = (total - v) / 5.0;
        assert!((res.per_fold[fold[row]] - (v - rest).powi(2)).abs() < 1e-9);
    }
}

#[test]
fn mismatched_losses_are_rejected() {
    let d = discrete_data(&[("T", 2, vec![0, 1, 0, 1])]);
    assert!(cross_validate(&d, &hc(), 2, &Loss::Rss("T".into()), 0).is_err());
    assert!(cross_validate(&d, &hc(), 5, &Loss::Misclassification("T".into()), 0).is_err());
    assert!(cross_validate(&d, &hc(), 2, &Loss::Misclassification("U".into()), 0).is_err());
}
