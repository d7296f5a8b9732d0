use std::collections::BTreeSet;

use proptest::prelude::*;
use titledup_core::corpus::{mode_word_count, Corpus, TitleRecord};
use titledup_core::pairing::{
    complete_pairs, cross_source_pairs, generate, length_diff_pairs, mode_window_pairs,
    short_title_pairs, PairingConfig, Strategy,
};

type Key = (String, String);

fn build(rows: &[(usize, u8)]) -> Corpus {
    Corpus::new(
        rows.iter()
            .enumerate()
            .map(|(i, &(wc, src))| {
                TitleRecord::new(format!("r{i:04}"), vec!["w"; wc].join(" "), format!("S{src}"))
            })
            .collect(),
    )
    .unwrap()
}

/// Every unordered pair of eligible records, by double loop.
fn brute_force(c: &Corpus, pred: impl Fn(&TitleRecord, &TitleRecord) -> bool) -> BTreeSet<Key> {
    let recs = c.records();
    let mut out = BTreeSet::new();
    for i in 0..recs.len() {
        for j in 0..recs.len() {
            let (a, b) = (&recs[i], &recs[j]);
            if a.id < b.id && a.word_count > 0 && b.word_count > 0 && pred(a, b) {
                out.insert((a.id.clone(), b.id.clone()));
            }
        }
    }
    out
}

fn collect(pairs: impl Iterator<Item = titledup_core::CandidatePair>) -> Vec<Key> {
    pairs.map(|p| (p.left_id, p.right_id)).collect()
}

fn as_set(v: &[Key]) -> BTreeSet<Key> {
    v.iter().cloned().collect()
}

fn corpus_rows() -> impl proptest::strategy::Strategy<Value = Vec<(usize, u8)>> {
    prop::collection::vec((0usize..=15, 0u8..4), 0..300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn strategies_equal_predicate_filters(rows in corpus_rows(), delta in 0usize..7, lambda in 0usize..4, tau in 0usize..5) {
        let c = build(&rows);
        let cfg = PairingConfig { delta, lambda, tau, strategy: Strategy::Complete };

        let complete = collect(complete_pairs(&c));
        prop_assert_eq!(as_set(&complete), brute_force(&c, |_, _| true));

        let cross = collect(cross_source_pairs(&c));
        prop_assert_eq!(as_set(&cross), brute_force(&c, |a, b| a.source != b.source));

        let ld = collect(length_diff_pairs(&c, &cfg));
        prop_assert_eq!(as_set(&ld), brute_force(&c, |a, b| a.word_count.abs_diff(b.word_count) <= delta));

        let st = collect(short_title_pairs(&c, &cfg));
        prop_assert_eq!(as_set(&st), brute_force(&c, |a, b| a.word_count <= tau && b.word_count <= tau));

        if !c.is_empty() {
            let mu = mode_word_count(&c).unwrap();
            let mw = collect(mode_window_pairs(&c, &cfg).unwrap());
            prop_assert_eq!(as_set(&mw), brute_force(&c, |a, b| {
                a.word_count.abs_diff(mu) <= lambda && b.word_count.abs_diff(mu) <= lambda && a.source != b.source
            }));
        }

        for v in [&complete, &cross, &ld, &st] {
            // canonical, strictly increasing, so no self-pairs and no repeats
            prop_assert!(v.iter().all(|(l, r)| l < r));
            prop_assert!(v.windows(2).all(|w| w[0] < w[1]));
        }
        let eligible = c.eligible().count();
        prop_assert_eq!(complete.len(), eligible * eligible.saturating_sub(1) / 2);
    }

    #[test]
    fn thresholds_are_monotone(rows in corpus_rows(), a in 0usize..8, b in 0usize..8) {
        let c = build(&rows);
        prop_assume!(!c.is_empty());
        let (lo, hi) = (a.min(b), a.max(b));
        let at = |d: usize, l: usize, t: usize| PairingConfig { delta: d, lambda: l, tau: t, strategy: Strategy::Complete };
        prop_assert!(as_set(&collect(length_diff_pairs(&c, &at(lo, 0, 0))))
            .is_subset(&as_set(&collect(length_diff_pairs(&c, &at(hi, 0, 0))))));
        prop_assert!(as_set(&collect(short_title_pairs(&c, &at(0, 0, lo))))
            .is_subset(&as_set(&collect(short_title_pairs(&c, &at(0, 0, hi))))));
        prop_assert!(as_set(&collect(mode_window_pairs(&c, &at(0, lo, 0)).unwrap()))
            .is_subset(&as_set(&collect(mode_window_pairs(&c, &at(0, hi, 0)).unwrap()))));
    }

    #[test]
    fn output_ignores_record_order(rows in corpus_rows(), seed in any::<u64>()) {
        let c = build(&rows);
        prop_assume!(!c.is_empty());
        let mut shuffled: Vec<TitleRecord> = c.records().to_vec();
        // deterministic Fisher-Yates driven by a simple LCG
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let d = Corpus::new(shuffled).unwrap();
        for s in Strategy::ALL {
            let cfg = PairingConfig::with_strategy(s);
            prop_assert_eq!(collect(generate(&c, &cfg).unwrap()), collect(generate(&d, &cfg).unwrap()));
        }
    }
}

#[test]
fn fifty_record_fixture_length_diff() {
    let rows: Vec<(usize, u8)> = (0..50).map(|i| ((i * 7) % 16, (i % 3) as u8)).collect();
    let c = build(&rows);
    let cfg = PairingConfig::with_strategy(Strategy::LengthDiff);
    let got = as_set(&collect(generate(&c, &cfg).unwrap()));
    assert_eq!(got, brute_force(&c, |a, b| a.word_count.abs_diff(b.word_count) <= 5));
}

#[test]
fn complete_count_at_two_thousand() {
    let rows: Vec<(usize, u8)> = (0..2_000).map(|i| (1 + i % 9, 0)).collect();
    assert_eq!(complete_pairs(&build(&rows)).count(), 1_999_000);
}
