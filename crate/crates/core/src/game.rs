//! Expected utilities by enumerating signal outcomes.

use std::iter::Sum;
use std::ops::Add;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::model::Scenario;
use crate::numerics::{EpsRational, Rational};
use crate::receiver::best_response_masses;
use crate::strategy::{Commitment1, Commitment2, Response};

/// Limit expected utilities of S1, S2 and the receiver.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct UtilityTriple {
    pub s1: Rational,
    pub s2: Rational,
    pub receiver: Rational,
}

impl UtilityTriple {
    pub fn new(s1: Rational, s2: Rational, receiver: Rational) -> Self {
        UtilityTriple { s1, s2, receiver }
    }

    pub fn scale(&self, k: &Rational) -> UtilityTriple {
        UtilityTriple { s1: &self.s1 * k, s2: &self.s2 * k, receiver: &self.receiver * k }
    }

    pub fn get(&self, agent: Agent) -> &Rational {
        match agent {
            Agent::S1 => &self.s1,
            Agent::S2 => &self.s2,
            Agent::Receiver => &self.receiver,
        }
    }
}

impl std::fmt::Display for UtilityTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.s1, self.s2, self.receiver)
    }
}

impl Serialize for UtilityTriple {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("UtilityTriple", 4)?;
        st.serialize_field("s1", &self.s1)?;
        st.serialize_field("s2", &self.s2)?;
        st.serialize_field("receiver", &self.receiver)?;
        let decimal = [&self.s1, &self.s2, &self.receiver].map(|x| x.to_decimal_string());
        st.serialize_field("decimal", &decimal)?;
        st.end()
    }
}

impl Add for UtilityTriple {
    type Output = UtilityTriple;
    fn add(self, o: UtilityTriple) -> UtilityTriple {
        &self + &o
    }
}

impl Add<&UtilityTriple> for &UtilityTriple {
    type Output = UtilityTriple;
    fn add(self, o: &UtilityTriple) -> UtilityTriple {
        UtilityTriple { s1: &self.s1 + &o.s1, s2: &self.s2 + &o.s2, receiver: &self.receiver + &o.receiver }
    }
}

impl Sum for UtilityTriple {
    fn sum<I: Iterator<Item = UtilityTriple>>(iter: I) -> Self {
        iter.fold(UtilityTriple::default(), |a, b| a + b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Agent {
    S1,
    S2,
    Receiver,
}

impl Agent {
    pub const ALL: [Agent; 3] = [Agent::S1, Agent::S2, Agent::Receiver];
}

/// One reachable `(w1, w2)` pair with its probability and the receiver's action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub w1: usize,
    pub w2: usize,
    pub action: usize,
    pub probability: EpsRational,
    /// Limit utility contributions (already weighted by probability).
    pub utilities: UtilityTriple,
}

/// Mass of each state jointly with an S1 signal whose per-information-set
/// probabilities are `column`.
pub fn column_weights(s: &Scenario, column: &[EpsRational]) -> Vec<EpsRational> {
    let p1 = s.partition1();
    (0..s.num_states())
        .map(|t| {
            let p = &s.prior()[t];
            if p.is_zero() {
                EpsRational::zero()
            } else {
                column[p1.block_of(t)].scale(p)
            }
        })
        .collect()
}

/// `masses[w2][state]` given per-state weights and S2's rule.
fn signal_masses(s: &Scenario, weights: &[EpsRational], response: &Response) -> Vec<Vec<EpsRational>> {
    let p2 = s.partition2();
    let n = s.num_states();
    let mut masses = vec![vec![EpsRational::zero(); n]; response.num_signals()];
    for (t, wt) in weights.iter().enumerate() {
        if wt.is_zero() {
            continue;
        }
        for (j, x) in response.rows[p2.block_of(t)].iter().enumerate() {
            if !x.is_zero() {
                masses[j][t] = wt * x;
            }
        }
    }
    masses
}

fn outcome_of(s: &Scenario, masses: &[EpsRational]) -> Option<(usize, UtilityTriple, EpsRational)> {
    let total: EpsRational = masses.iter().sum();
    if !total.is_positive() {
        return None;
    }
    let a = best_response_masses(s, masses);
    let mut u = UtilityTriple::default();
    for (t, m) in masses.iter().enumerate() {
        if m.value.is_zero() {
            continue;
        }
        u.s1 += &m.value * s.u1(t, a);
        u.s2 += &m.value * s.u2(t, a);
    }
    u.receiver = masses[a].value.clone();
    Some((a, u, total))
}

/// Utility contributions of one S1 signal, given its per-information-set
/// probabilities and S2's rule after it. Unnormalized: the sum over all S1
/// signals is the expected utility.
pub fn signal_outcome(s: &Scenario, column: &[EpsRational], response: &Response) -> UtilityTriple {
    weighted_outcome(s, &column_weights(s, column), response)
}

/// Like [`signal_outcome`] with the per-state masses given directly.
pub fn weighted_outcome(s: &Scenario, weights: &[EpsRational], response: &Response) -> UtilityTriple {
    signal_masses(s, weights, response).iter().filter_map(|m| outcome_of(s, m)).map(|(_, u, _)| u).sum()
}

pub fn expected_utilities(s: &Scenario, g1: &Commitment1, g2: &Commitment2) -> UtilityTriple {
    (0..g1.num_signals()).map(|j| signal_outcome(s, &g1.column(j), &g2.response(j))).sum()
}

/// Every signal pair with positive probability.
pub fn outcomes(s: &Scenario, g1: &Commitment1, g2: &Commitment2) -> Vec<Outcome> {
    let mut out = Vec::new();
    for w1 in 0..g1.num_signals() {
        let masses = signal_masses(s, &column_weights(s, &g1.column(w1)), &g2.response(w1));
        for (w2, m) in masses.iter().enumerate() {
            if let Some((action, utilities, probability)) = outcome_of(s, m) {
                out.push(Outcome { w1, w2, action, probability, utilities });
            }
        }
    }
    out
}

/// Probability of each S1 signal.
pub fn signal_probabilities(s: &Scenario, g1: &Commitment1) -> Vec<EpsRational> {
    (0..g1.num_signals())
        .map(|j| (0..s.partition1().len()).map(|k| g1.kernel[k][j].scale(&s.mass1(k))).sum())
        .collect()
}

/// S1's expected utility conditional on each S1 signal; `None` for signals
/// whose limit probability is zero.
pub fn conditional_s1_utilities(s: &Scenario, g1: &Commitment1, g2: &Commitment2) -> Vec<Option<Rational>> {
    let probs = signal_probabilities(s, g1);
    (0..g1.num_signals())
        .map(|j| {
            let p = probs[j].limit();
            if p.is_zero() {
                return None;
            }
            Some(&signal_outcome(s, &g1.column(j), &g2.response(j)).s1 / p)
        })
        .collect()
}
