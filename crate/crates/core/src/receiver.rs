//! Posteriors and the receiver's lexicographic best response.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::numerics::EpsRational;
use crate::strategy::{Commitment1, Commitment2};

/// Probability over states, indexed like the scenario's state list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Belief {
    pub probabilities: Vec<EpsRational>,
}

impl Belief {
    /// Normalizes non-negative masses. `None` when they sum to zero.
    pub fn from_masses(masses: &[EpsRational]) -> Option<Belief> {
        let total: EpsRational = masses.iter().sum();
        if !total.is_positive() {
            return None;
        }
        let probabilities = masses.iter().map(|m| m.checked_div(&total)).collect::<Option<Vec<_>>>()?;
        Some(Belief { probabilities })
    }

    pub fn prior(s: &Scenario) -> Belief {
        Belief { probabilities: s.prior().iter().cloned().map(EpsRational::exact).collect() }
    }
}

/// Joint probability of each state together with signals `(w1, w2)`.
pub fn joint_masses(s: &Scenario, g1: &Commitment1, g2: &Commitment2, w1: usize, w2: usize) -> Vec<EpsRational> {
    (0..s.num_states())
        .map(|t| {
            let p = EpsRational::exact(s.prior()[t].clone());
            let a = &g1.kernel[s.partition1().block_of(t)][w1];
            let b = &g2.kernel[s.partition2().block_of(t)][w1][w2];
            &(&p * a) * b
        })
        .collect()
}

/// Bayes posterior after S1 signal `w1` and S2 signal `w2`, given by name.
pub fn posterior(s: &Scenario, g1: &Commitment1, g2: &Commitment2, w1: &str, w2: &str) -> Result<Belief> {
    let unreachable = || Error::UnreachableSignal(w1.to_string(), w2.to_string());
    let i = g1.signal_index(w1).ok_or_else(unreachable)?;
    let j = g2.signal_index(w2).ok_or_else(unreachable)?;
    Belief::from_masses(&joint_masses(s, g1, g2, i, j)).ok_or_else(unreachable)
}

/// Best response to a normalized belief.
pub fn best_response(s: &Scenario, b: &Belief) -> usize {
    best_response_masses(s, &b.probabilities)
}

/// Best response to unnormalized non-negative masses; equivalent to
/// normalizing first. Ties go to S1's conditional utility, then S2's,
/// then the state order.
pub fn best_response_masses(s: &Scenario, masses: &[EpsRational]) -> usize {
    let mut best = 0;
    let mut ties: Vec<usize> = Vec::new();
    for a in 1..masses.len() {
        match masses[a].cmp(&masses[best]) {
            Ordering::Greater => {
                best = a;
                ties.clear();
            }
            Ordering::Equal => ties.push(a),
            Ordering::Less => {}
        }
    }
    if ties.is_empty() {
        return best;
    }
    ties.insert(0, best);
    if s.action_only() {
        // every candidate carries positive mass, so it is a supported state
        return *ties
            .iter()
            .max_by(|&&a, &&b| s.u1_diag(a).cmp(s.u1_diag(b)).then_with(|| s.u2_diag(a).cmp(s.u2_diag(b))).then_with(|| b.cmp(&a)))
            .expect("non-empty");
    }
    let conditional = |a: usize, which: u8| -> EpsRational {
        masses
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(t, m)| m.scale(if which == 1 { s.u1(t, a) } else { s.u2(t, a) }))
            .sum()
    };
    let key: Vec<(EpsRational, EpsRational)> = ties.iter().map(|&a| (conditional(a, 1), conditional(a, 2))).collect();
    let mut pick = 0;
    for i in 1..ties.len() {
        if key[i] > key[pick] {
            pick = i;
        }
    }
    ties[pick]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn e(x: &str) -> EpsRational {
        x.parse().unwrap()
    }

    fn belief(xs: &[&str]) -> Belief {
        Belief { probabilities: xs.iter().map(|x| e(x)).collect() }
    }

    #[test]
    fn worked_best_responses() {
        let s = fixtures::example_3_1();
        assert_eq!(best_response(&s, &belief(&["0", "1", "0", "0"])), 1);
        assert_eq!(best_response(&s, &belief(&["2/13", "4/13", "4/13", "3/13"])), 1);
        assert_eq!(best_response(&s, &belief(&["0", "0", "1/2", "1/2"])), 3);
        // a positive tilt wins an exact tie
        assert_eq!(best_response(&s, &belief(&["0", "1/2 - e", "1/2 + e", "0"])), 2);
    }

    #[test]
    fn conservative_pair_posterior() {
        let s = fixtures::example_3_1();
        let (g1, g2) = fixtures::example_3_1_s2_first();
        let b = posterior(&s, &g1, &g2, "T-sugg", "R-sugg").unwrap();
        let want = ["2/13", "4/13", "4/13", "3/13"].map(e);
        assert_eq!(b.probabilities, want);
        let total: EpsRational = b.probabilities.iter().sum();
        assert_eq!(total, EpsRational::one());
    }

    #[test]
    fn truthful_pair_reveals() {
        let s = fixtures::example_3_1();
        let g1 = Commitment1::truthful(&s);
        let g2 = Commitment2::truthful(&s, g1.num_signals());
        let b = posterior(&s, &g1, &g2, "T", "R").unwrap();
        assert_eq!(b.probabilities, ["0", "1", "0", "0"].map(e));
        assert!(matches!(posterior(&s, &g1, &g2, "T", "nope"), Err(Error::UnreachableSignal(..))));
    }

    #[test]
    fn silent_pair_gives_prior() {
        let s = fixtures::example_3_1();
        let g1 = Commitment1::silent(&s);
        let g2 = Commitment2::constant(&crate::strategy::Response::constant(2, 1), vec!["x".into()], 1);
        let b = posterior(&s, &g1, &g2, "silent", "x").unwrap();
        assert_eq!(b, Belief::prior(&s));
    }

    #[test]
    fn unreachable_pair_is_an_error() {
        let s = fixtures::example_3_1();
        let g1 = Commitment1::truthful(&s);
        let mut g2 = Commitment2::truthful(&s, 2);
        g2.kernel[0][0] = vec![e("0"), e("1")];
        // L never sends `L` after `T`
        assert!(posterior(&s, &g1, &g2, "T", "L").is_err());
    }
}
