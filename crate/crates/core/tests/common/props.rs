use persuasion::equilibrium::{order_matters, solve_s1_first, solve_s2_first, S2FirstOptions};
use persuasion::game::{expected_utilities, weighted_outcome};
use persuasion::grid::GridConfig;
use persuasion::model::Scenario;
use persuasion::numerics::{EpsRational, Rational};
use persuasion::persuasion::s2_best_response_masses;
use persuasion::receiver::{best_response_masses, posterior};
use persuasion::strategy::{permute_signals, Commitment1, Commitment2, Response};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::*;

type Check = Result<(), TestCaseError>;

fn eps(v: i64, tilt: i64) -> EpsRational {
    EpsRational::new(ri(v), ri(tilt))
}

/// Masses drawn from a tiny set so that ties are common.
pub fn arb_masses(n: usize) -> impl Strategy<Value = Vec<EpsRational>> {
    prop::collection::vec((0i64..=2, -1i64..=1), n)
        .prop_map(|v| v.into_iter().map(|(x, t)| if x == 0 { eps(0, t.max(0)) } else { eps(x, t) }).collect::<Vec<_>>())
        .prop_filter("needs mass", |m| m.iter().any(|x| x.is_positive()))
}

pub fn arb_grid_with_masses() -> impl Strategy<Value = (GridSpec, Vec<EpsRational>)> {
    arb_small_grid().prop_flat_map(|g| {
        let n = g.rows * g.cols;
        (Just(g), arb_masses(n))
    })
}

/// Dyadic interim masses over the four states of a 2x2 grid.
pub fn arb_dyadic() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(prop::sample::select(vec![0i64, 1, 2, 4, 8]), 4).prop_filter("needs mass", |p| p.iter().any(|&x| x > 0))
}

/// Best S2 value over two-signal rules whose entries lie on the 1/64 grid,
/// each entry optionally tilted by ±ε. A lower bound on the true optimum.
pub fn grid_oracle(s: &Scenario, masses: &[Rational]) -> Rational {
    let n = s.num_states();
    let w: Vec<EpsRational> = masses.iter().cloned().map(EpsRational::exact).collect();
    let row = |x: i64, t: i64| {
        let p = EpsRational::new(r(x, 64), ri(t));
        let mut row = vec![EpsRational::zero(); n];
        row[1] = &EpsRational::one() - &p;
        row[0] = p;
        row
    };
    let tilts = |x: i64| [-1i64, 0, 1].into_iter().filter(move |&t| !(x == 0 && t < 0) && !(x == 64 && t > 0));
    let mut best: Option<Rational> = None;
    for x in 0..=64 {
        for tx in tilts(x) {
            for y in 0..=64 {
                for ty in tilts(y) {
                    let resp = Response { rows: vec![row(x, tx), row(y, ty)] };
                    let v = weighted_outcome(s, &w, &resp).s2;
                    if best.as_ref().is_none_or(|b| v > *b) {
                        best = Some(v);
                    }
                }
            }
        }
    }
    best.unwrap()
}

pub fn posterior_is_normalized_bayes(spec: &GridSpec, g1: &Commitment1, g2: &Commitment2) -> Check {
    let s = spec.scenario();
    for (i, w1) in g1.signals.iter().enumerate() {
        for (j, w2) in g2.signals.iter().enumerate() {
            let m = bayes_masses(&s, g1, g2, i, j);
            let total: EpsRational = m.iter().sum();
            match posterior(&s, g1, g2, w1, w2) {
                Ok(b) => {
                    let sum: EpsRational = b.probabilities.iter().sum();
                    prop_assert_eq!(sum, EpsRational::one());
                    for (p, mt) in b.probabilities.iter().zip(&m) {
                        prop_assert!(!p.is_negative());
                        prop_assert_eq!(p.limit() * total.limit(), mt.limit().clone());
                    }
                }
                Err(_) => prop_assert!(!total.is_positive()),
            }
        }
    }
    Ok(())
}

pub fn best_response_is_lexicographic_optimum(spec: &GridSpec, m: &[EpsRational]) -> Check {
    let s = spec.scenario();
    prop_assert_eq!(best_response_masses(&s, m), oracle_action(&s, m));
    Ok(())
}

pub fn utilities_match_enumeration(spec: &GridSpec, g1: &Commitment1, g2: &Commitment2) -> Check {
    let s = spec.scenario();
    prop_assert_eq!(expected_utilities(&s, g1, g2), oracle_utilities(&s, g1, g2));
    Ok(())
}

/// Relabels S1's signals, S2's signals and the states in turn.
pub fn utilities_invariant_under_relabeling(
    spec: &GridSpec,
    g1: &Commitment1,
    g2: &Commitment2,
    shift1: usize,
    shift2: usize,
) -> Check {
    let s = spec.scenario();
    let base = expected_utilities(&s, g1, g2);

    let m1 = g1.num_signals();
    let perm: Vec<usize> = (0..m1).map(|i| (i + shift1) % m1).collect();
    let h1 = permute_signals(g1, &perm).unwrap();
    let mut h2 = g2.clone();
    for (k, per) in g2.kernel.iter().enumerate() {
        for (i, row) in per.iter().enumerate() {
            h2.kernel[k][perm[i]] = row.clone();
        }
    }
    prop_assert_eq!(&expected_utilities(&s, &h1, &h2), &base);

    let m2 = g2.num_signals();
    let q: Vec<usize> = (0..m2).map(|i| (i + shift2) % m2).collect();
    let mut k2 = g2.clone();
    for (k, per) in g2.kernel.iter().enumerate() {
        for (i, row) in per.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                k2.kernel[k][i][q[j]] = x.clone();
            }
        }
    }
    prop_assert_eq!(&expected_utilities(&s, g1, &k2), &base);

    let renamed = Scenario::from_file(s.file().renamed(|x| format!("s_{x}"))).unwrap();
    prop_assert_eq!(&expected_utilities(&renamed, g1, g2), &base);
    Ok(())
}

/// Action-only utilities and dyadic masses keep every vertex of S2's
/// problem on the oracle's grid.
pub fn s2_value_matches_grid_oracle(spec: &GridSpec, pows: &[i64]) -> Check {
    let s = spec.scenario();
    let masses: Vec<Rational> = pows.iter().map(|&x| r(x, 8)).collect();
    prop_assert_eq!(s2_best_response_masses(&s, &masses).s2_value, grid_oracle(&s, &masses));
    Ok(())
}

pub fn s2_value_dominates_grid_oracle(spec: &GridSpec, pows: &[i64]) -> Check {
    let s = spec.scenario();
    let masses: Vec<Rational> = pows.iter().map(|&x| r(x, 8)).collect();
    let set = s2_best_response_masses(&s, &masses);
    prop_assert!(set.s2_value >= grid_oracle(&s, &masses));
    let w: Vec<EpsRational> = masses.iter().cloned().map(EpsRational::exact).collect();
    for (strategy, value) in set.strategies.iter().zip(&set.values) {
        prop_assert_eq!(&weighted_outcome(&s, &w, strategy), value);
        prop_assert_eq!(&value.s2, &set.s2_value);
    }
    Ok(())
}

/// S2's rule library is as fine as S1's grid so both orders search the same
/// interim beliefs.
pub fn aligned_senders_order_never_matters(spec: &GridSpec) -> Check {
    let s = spec.scenario();
    let grid = GridConfig::with_step(12);
    let r1 = solve_s1_first(&s, &grid).unwrap();
    let r2 = solve_s2_first(&s, &S2FirstOptions { grid, library_step: 12, ..Default::default() }).unwrap();
    let v = order_matters(&r1, &r2, &Rational::zero());
    prop_assert!(!v.matters, "s1_first {} vs s2_first {}", r1.utilities, r2.utilities);
    Ok(())
}
