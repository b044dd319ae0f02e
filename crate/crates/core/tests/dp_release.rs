mod common;

use proptest::prelude::*;
use pwleak_core::dp::{l1_report, release, release_corpus};
use pwleak_core::{DPParams, Error, FrequencyList};

fn delta() -> f64 {
    2f64.powi(-100)
}

#[test]
fn mean_l1_at_ten_thousand_users_is_within_the_bound() {
    let list = common::zipf_list(10_000, 4);
    let mut ratios = Vec::new();
    for seed in 0..100 {
        let params = DPParams::new(0.25, delta(), seed).unwrap();
        ratios.push(l1_report(&list, &release(&list, &params).unwrap(), &params).ratio);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    println!("mean L1 / bound at N=10^4: {mean:.3}");
    assert!(mean <= 1.0, "mean ratio {mean}");
}

#[test]
fn corpus_release_splits_budget_and_refuses_noisy_input() {
    let corpus = common::corpus_of(&common::random_users(8, 800, 5));
    let a = release_corpus(&corpus, 0.5, delta(), 1).unwrap();
    let b = release_corpus(&corpus, 0.5, delta(), 1).unwrap();
    assert_eq!(a.overall(), b.overall());
    assert_eq!(a.by_length(), b.by_length());
    assert!(!a.is_consistent());
    assert!(a.length_tags().is_none());
    assert_eq!(a.lengths().collect::<Vec<_>>(), corpus.lengths().collect::<Vec<_>>());
    assert!(matches!(release_corpus(&a, 0.5, delta(), 2), Err(Error::InconsistentInput)));

    // each list at ε/2: the overall list matches a direct release at 0.25
    let direct = release(corpus.overall(), &DPParams::new(0.25, delta(), 1).unwrap()).unwrap();
    assert_eq!(a.overall(), &direct);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn noiseless_release_reconstructs_any_list(mut counts in prop::collection::vec(1u64..3_000, 1..200)) {
        counts.sort_unstable_by(|a, b| b.cmp(a));
        let list = FrequencyList::from_counts(&counts).unwrap();
        let params = DPParams::new(f64::INFINITY, 0.5, 0).unwrap();
        prop_assert_eq!(release(&list, &params).unwrap(), list);
    }

    #[test]
    fn releases_are_valid_lists(
        mut counts in prop::collection::vec(1u64..1_000, 1..100),
        eps in 0.01f64..4.0,
        seed in any::<u64>(),
    ) {
        counts.sort_unstable_by(|a, b| b.cmp(a));
        let list = FrequencyList::from_counts(&counts).unwrap();
        let params = DPParams::new(eps, delta(), seed).unwrap();
        let out = release(&list, &params).unwrap();
        prop_assert!(out.counts().all(|c| c > 0));
        prop_assert_eq!(FrequencyList::from_counts(&out.to_vec()).unwrap(), out.clone());
        let report = l1_report(&list, &out, &params);
        prop_assert_eq!(report.l1_error, pwleak_core::dp::l1_distance(&out, &list));
    }
}
