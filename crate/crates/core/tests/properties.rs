mod common;

use common::props::*;
use common::*;
use persuasion::game::weighted_outcome;
use persuasion::numerics::{EpsRational, Rational};
use persuasion::persuasion::s2_best_response_masses;
use persuasion::strategy::{permute_signals, Response};
use proptest::prelude::*;

fn arb_interim() -> impl Strategy<Value = (GridSpec, Vec<Rational>)> {
    arb_small_grid().prop_flat_map(|g| {
        let n = g.rows * g.cols;
        (Just(g), prop::collection::vec(0i64..=6, n).prop_filter("needs mass", |m| m.iter().any(|&x| x > 0)))
            .prop_map(|(g, m)| (g, m.into_iter().map(ri).collect()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn posterior_is_normalized((spec, g1, g2) in arb_scenario_with_pair()) {
        posterior_is_normalized_bayes(&spec, &g1, &g2)?;
    }

    #[test]
    fn best_response_is_lexicographic((spec, m) in arb_grid_with_masses()) {
        best_response_is_lexicographic_optimum(&spec, &m)?;
    }

    #[test]
    fn utilities_equal_enumeration((spec, g1, g2) in arb_scenario_with_pair()) {
        utilities_match_enumeration(&spec, &g1, &g2)?;
    }

    #[test]
    fn relabeling_keeps_utilities((spec, g1, g2) in arb_scenario_with_pair(), shift1 in 0usize..3, shift2 in 0usize..3) {
        utilities_invariant_under_relabeling(&spec, &g1, &g2, shift1, shift2)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn s2_value_on_grid_matches_oracle(spec in arb_grid(2, 2, false).prop_filter("action-only", |g| g.action_only), pows in arb_dyadic()) {
        s2_value_matches_grid_oracle(&spec, &pows)?;
    }

    #[test]
    fn s2_value_at_least_oracle(spec in arb_grid(2, 2, false), pows in arb_dyadic()) {
        s2_value_dominates_grid_oracle(&spec, &pows)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn disclosure_beats_silence((spec, masses) in arb_interim()) {
        let s = spec.scenario();
        let set = s2_best_response_masses(&s, &masses);
        let w: Vec<EpsRational> = masses.iter().cloned().map(EpsRational::exact).collect();
        let silent = Response::constant(s.partition2().len(), s.num_states());
        prop_assert!(set.s2_value >= weighted_outcome(&s, &w, &silent).s2);
    }

    #[test]
    fn returned_strategies_lie_in_s1_range((spec, masses) in arb_interim()) {
        let s = spec.scenario();
        let set = s2_best_response_masses(&s, &masses);
        prop_assert!(set.s1_value_min <= set.s1_value_max);
        let w: Vec<EpsRational> = masses.iter().cloned().map(EpsRational::exact).collect();
        for strategy in &set.strategies {
            let u = weighted_outcome(&s, &w, strategy);
            prop_assert_eq!(&u.s2, &set.s2_value);
            prop_assert!(set.s1_value_min <= u.s1 && u.s1 <= set.s1_value_max);
        }
    }

    #[test]
    fn swap_is_an_involution((_, g1, _) in arb_scenario_with_pair()) {
        let m = g1.num_signals();
        let swap: Vec<usize> = (0..m).map(|i| if m > 1 && i < 2 { 1 - i } else { i }).collect();
        let twice = permute_signals(&permute_signals(&g1, &swap).unwrap(), &swap).unwrap();
        prop_assert_eq!(twice, g1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn aligned_senders_order_irrelevant(spec in arb_grid(2, 2, true)) {
        aligned_senders_order_never_matters(&spec)?;
    }
}
