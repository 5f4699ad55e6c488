mod common;

use common::*;
use maxcut_select::features::{compute_features, sets::*};
use maxcut_select::graph::{brute_force_max, generate_regular, Graph};
use maxcut_select::gw::estimate_gw;
use maxcut_select::qaoa::{expected_cost, QaoaAngles, QaoaSimulator};
use maxcut_select::selector::{
    balanced_accuracy, fit_pipeline, label_criterion1, label_criterion2, stratified_folds, PipelineSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_connected(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n, 0.0..0.7f64, any::<u64>())
        .prop_map(|(n, p, seed)| random_connected_graph(n, p, false, &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn arb_angles(p: usize) -> impl Strategy<Value = QaoaAngles> {
    (prop::collection::vec(-6.3..6.3f64, p), prop::collection::vec(-3.2..3.2f64, p))
        .prop_map(|(g, b)| QaoaAngles::new(g, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relabeling_preserves_optimum_and_set_numbers(g in arb_connected(9), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let h = g.relabeled(&perm).unwrap();
        prop_assert_eq!(brute_force_max(&g).unwrap().cost, brute_force_max(&h).unwrap().cost);
        prop_assert_eq!(set_numbers(&g).unwrap(), set_numbers(&h).unwrap());
    }

    #[test]
    fn set_number_inequalities(g in arb_connected(12)) {
        let s = set_numbers(&g).unwrap();
        let n = g.n();
        prop_assert!(s.power_domination <= s.domination);
        prop_assert!(s.power_domination <= s.zero_forcing);
        prop_assert!(s.domination <= s.independence);
        prop_assert!(2 * s.matching <= n);
        prop_assert!(s.independence + s.matching <= n);
        prop_assert!(s.independence * (g.max_degree() + 1) >= n);
        prop_assert!(s.diameter < n);
        let min_degree = (0..n).map(|v| g.degree(v)).min().unwrap();
        prop_assert!(s.zero_forcing >= min_degree);
    }

    #[test]
    fn qaoa_expectation_is_bounded_and_norm_preserved(g in arb_connected(8), angles in arb_angles(3)) {
        let sim = QaoaSimulator::new(&g).unwrap();
        let c_max = brute_force_max(&g).unwrap().cost;
        sim.run_with(&angles, |_, state| assert!((state.norm_sqr() - 1.0).abs() < 1e-9));
        let f = sim.expected_cost(&angles);
        prop_assert!(f >= -1e-9 && f <= c_max + 1e-9);
        prop_assert!((f - expected_cost(&g, &angles).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn zero_padding_keeps_the_expectation(g in arb_connected(7), angles in arb_angles(2)) {
        let f2 = expected_cost(&g, &angles).unwrap();
        let f4 = expected_cost(&g, &angles.zero_padded(4)).unwrap();
        prop_assert!((f2 - f4).abs() < 1e-9);
    }

    #[test]
    fn labels_are_mutually_exclusive(q in 0.0..1.0f64, w in 0.0..1.0f64) {
        let (c1, c2) = (label_criterion1(q, w), label_criterion2(q, w));
        prop_assert!(c1 + c2 <= 1);
        prop_assert_eq!(c1, usize::from(w > q));
    }

    #[test]
    fn folds_are_stratified(y in prop::collection::vec(0usize..3, 12..60), k in 2usize..5, seed in any::<u64>()) {
        let counts: Vec<usize> = (0..3).map(|c| y.iter().filter(|&&v| v == c).count()).collect();
        prop_assume!(counts.iter().all(|&c| c == 0 || c >= k));
        let folds = stratified_folds(&y, k, seed).unwrap();
        for c in 0..3 {
            let per_fold: Vec<usize> = (0..k)
                .map(|f| y.iter().zip(&folds).filter(|&(&v, &fo)| v == c && fo == f).count())
                .collect();
            let (lo, hi) = (per_fold.iter().min().unwrap(), per_fold.iter().max().unwrap());
            prop_assert!(hi - lo <= 1);
        }
    }

    #[test]
    fn balanced_accuracy_is_a_mean_of_recalls(pairs in prop::collection::vec((0usize..2, 0usize..2), 4..40)) {
        let (t, p): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        prop_assume!(t.contains(&0) && t.contains(&1));
        let recall = |c: usize| {
            let hits = t.iter().zip(&p).filter(|&(&a, &b)| a == c && b == c).count() as f64;
            hits / t.iter().filter(|&&a| a == c).count() as f64
        };
        let ba = balanced_accuracy(&t, &p).unwrap();
        prop_assert!((ba - (recall(0) + recall(1)) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn pipeline_probabilities_are_distributions(
        rows in prop::collection::vec(prop::collection::vec(0.01..1.0f64, 2), 16..40),
        seed in any::<u64>(),
    ) {
        let y: Vec<usize> = (0..rows.len()).map(|i| (i + seed as usize) % 2).collect();
        let model = fit_pipeline(&PipelineSpec::crit1(), &rows, &y).unwrap();
        let proba = model.predict_proba(&rows).unwrap();
        let pred = model.predict(&rows).unwrap();
        for (p, &c) in proba.iter().zip(&pred) {
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
            let best = if p[1] > p[0] { 1 } else { 0 };
            prop_assert_eq!(c, model.classes[best]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn features_are_isomorphism_invariant(n in 6usize..=10, seed in 0u64..1000, shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        let g = generate_regular(n + n % 2, 4, seed).unwrap();
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let h = g.relabeled(&perm).unwrap();
        let fg = compute_features(&g, &estimate_gw(&g, 200, 1).unwrap()).unwrap();
        let fh = compute_features(&h, &estimate_gw(&h, 200, 1).unwrap()).unwrap();
        // Groups (i) and (ii) are graph invariants; the relaxation columns
        // depend on the random start and labelling, so only C_rlx is compared.
        for i in 0..14 {
            prop_assert!((fg.values()[i] - fh.values()[i]).abs() < 1e-9, "feature {}", i);
        }
        prop_assert!((fg.values()[14] - fh.values()[14]).abs() < 1e-5);
    }
}
