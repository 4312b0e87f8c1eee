use serde::Serialize;

use crate::model::Scenario;
use crate::numerics::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleVariant {
    /// S1 strictly prefers the first action; S2 ranks third > first > second.
    Original,
    /// The same with the senders' roles exchanged.
    Swapped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NecessaryWitness {
    pub triple: [String; 3],
    pub variant: TripleVariant,
    /// S1 information sets of the first and the third state.
    pub s1_sets: [String; 2],
    /// S2 information sets of the first and the second state.
    pub s2_sets: [String; 2],
    pub u1: [Rational; 3],
    pub u2: [Rational; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NecessaryReport {
    pub order_may_matter: bool,
    pub witnesses: Vec<NecessaryWitness>,
    pub tie_break_flag: bool,
}

/// Triples of supported states on which the senders collaborate over two
/// states but disagree about mixing in a third; the order cannot matter
/// without one (or a belief-dependent tie-break).
pub fn check_necessary(s: &Scenario) -> NecessaryReport {
    let (p1, p2) = (s.partition1(), s.partition2());
    let live: Vec<usize> = s.support().collect();
    let mut witnesses = Vec::new();
    for &a in &live {
        for &b in &live {
            if b == a || p1.block_of(a) != p1.block_of(b) || p2.block_of(a) == p2.block_of(b) {
                continue;
            }
            for &c in &live {
                if p1.block_of(c) == p1.block_of(a) || (p2.block_of(c) != p2.block_of(a) && p2.block_of(c) != p2.block_of(b)) {
                    continue;
                }
                let u1 = [s.u1_diag(a).clone(), s.u1_diag(b).clone(), s.u1_diag(c).clone()];
                let u2 = [s.u2_diag(a).clone(), s.u2_diag(b).clone(), s.u2_diag(c).clone()];
                let pattern = |x: &[Rational; 3], y: &[Rational; 3]| x[0] > x[1] && x[0] > x[2] && y[2] > y[0] && y[0] > y[1];
                for (variant, ok) in [(TripleVariant::Original, pattern(&u1, &u2)), (TripleVariant::Swapped, pattern(&u2, &u1))] {
                    if ok {
                        witnesses.push(NecessaryWitness {
                            triple: [a, b, c].map(|t| s.state_name(t).to_string()),
                            variant,
                            s1_sets: [p1.name(p1.block_of(a)).to_string(), p1.name(p1.block_of(c)).to_string()],
                            s2_sets: [p2.name(p2.block_of(a)).to_string(), p2.name(p2.block_of(b)).to_string()],
                            u1: u1.clone(),
                            u2: u2.clone(),
                        });
                    }
                }
            }
        }
    }
    let tie_break_flag = s.belief_dependent_tiebreak();
    NecessaryReport { order_may_matter: !witnesses.is_empty() || tie_break_flag, witnesses, tie_break_flag }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn has(r: &NecessaryReport, t: [&str; 3]) -> bool {
        r.witnesses.iter().any(|w| w.triple == t.map(String::from) && w.variant == TripleVariant::Original)
    }

    #[test]
    fn worked_triples() {
        assert!(has(&check_necessary(&fixtures::example_4_1()), ["MC", "ML", "BC"]));
        assert!(has(&check_necessary(&fixtures::example_3_1()), ["TR", "TL", "BR"]));
    }

    #[test]
    fn aligned_senders_never_matter() {
        let r = check_necessary(&fixtures::aligned_senders());
        assert!(!r.order_may_matter && r.witnesses.is_empty());
    }
}
