mod common;

use common::{rng, wilcoxon_brute_force};
use nntf_core::stats::{wilcoxon_exact, wilcoxon_normal, wilcoxon_signed_rank};
use proptest::prelude::*;
use rand::Rng as _;

/// Paired samples whose differences include exact ties and zeros.
fn tied_pairs(r: &mut nntf_core::rng::Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let a: Vec<f64> = (0..n).map(|_| r.random_range(0..6) as f64 * 0.5).collect();
    let b: Vec<f64> = (0..n).map(|_| r.random_range(0..6) as f64 * 0.5).collect();
    (a, b)
}

#[test]
fn exact_branch_matches_enumeration() {
    let mut r = rng(51);
    for case in 0..200 {
        let n = r.random_range(1..=12);
        let (a, b) = if case % 2 == 0 {
            tied_pairs(&mut r, n)
        } else {
            let a: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
            let b: Vec<f64> = (0..n).map(|_| r.random::<f64>() + 0.2).collect();
            (a, b)
        };
        let got = wilcoxon_signed_rank(&a, &b).unwrap();
        assert!(got.exact);
        assert_eq!(got.p_value, wilcoxon_brute_force(&a, &b), "{a:?} {b:?}");
    }
}

#[test]
fn exact_and_normal_agree_for_moderate_n() {
    let mut r = rng(52);
    for _ in 0..100 {
        let n = r.random_range(15..=20);
        let shift = r.random_range(-0.5..0.5);
        let a: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
        let b: Vec<f64> = (0..n).map(|_| r.random::<f64>() + shift).collect();
        let exact = wilcoxon_exact(&a, &b).unwrap().p_value;
        let normal = wilcoxon_normal(&a, &b).unwrap().p_value;
        assert!((exact - normal).abs() <= 0.02, "n={n}: {exact} vs {normal}");
    }
}

#[test]
fn thirty_two_one_sided_pairs() {
    let mut r = rng(53);
    let a: Vec<f64> = (0..32).map(|_| -2.0 - r.random::<f64>()).collect();
    let b: Vec<f64> = a.iter().map(|x| x + 0.01 + r.random::<f64>()).collect();
    let res = wilcoxon_signed_rank(&a, &b).unwrap();
    assert!(!res.exact);
    assert_eq!(res.n_effective, 32);
    assert_eq!(res.w_plus, 0.0);
    assert!(res.p_value < 1e-5);
}

#[test]
fn zero_differences_are_dropped() {
    let res = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 2.0, 5.0]).unwrap();
    assert_eq!(res.n_effective, 2);
    let same = wilcoxon_signed_rank(&[0.5; 5], &[0.5; 5]).unwrap();
    assert_eq!((same.p_value, same.n_effective), (1.0, 0));
}

proptest! {
    #[test]
    fn swapping_samples_keeps_the_p_value(
        a in prop::collection::vec(-3.0f64..3.0, 1..40),
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let b: Vec<f64> = a.iter().map(|x| x + r.random_range(-1.0..1.0)).collect();
        let ab = wilcoxon_signed_rank(&a, &b).unwrap();
        let ba = wilcoxon_signed_rank(&b, &a).unwrap();
        prop_assert_eq!(ab.p_value, ba.p_value);
        prop_assert_eq!(ab.statistic, -ba.statistic);
    }

    #[test]
    fn p_value_is_a_probability(a in prop::collection::vec(-3.0f64..3.0, 1..40), seed in any::<u64>()) {
        let mut r = rng(seed);
        let b: Vec<f64> = a.iter().map(|x| x + r.random_range(-1.0..1.0)).collect();
        let p = wilcoxon_signed_rank(&a, &b).unwrap().p_value;
        prop_assert!((0.0..=1.0).contains(&p));
    }

    /// Flipping a difference that opposes the statistic's sign keeps every
    /// rank but moves the statistic further out, so p cannot rise.
    #[test]
    fn flipping_a_dissenting_difference_does_not_raise_p(
        diffs in prop::collection::vec(-1.0f64..1.0, 2..12),
    ) {
        let zeros = vec![0.0; diffs.len()];
        let before = wilcoxon_exact(&diffs, &zeros).unwrap();
        let side = before.statistic.signum();
        prop_assume!(side != 0.0);
        let dissent = diffs.iter().position(|d| d.signum() == -side && *d != 0.0);
        prop_assume!(dissent.is_some());
        let mut flipped = diffs.clone();
        flipped[dissent.unwrap()] *= -1.0;
        let after = wilcoxon_exact(&flipped, &zeros).unwrap();
        prop_assert!(after.statistic.abs() > before.statistic.abs());
        prop_assert!(after.p_value <= before.p_value, "{} → {}", before.p_value, after.p_value);
    }
}
