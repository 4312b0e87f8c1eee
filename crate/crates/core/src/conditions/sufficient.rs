use rayon::prelude::*;
use serde::Serialize;

use super::{truthful_masses, truthful_response, Inequality};
use crate::equilibrium::s2_library;
use crate::game::{outcomes, weighted_outcome};
use crate::grid::{s1_signal_names, GridConfig};
use crate::model::Scenario;
use crate::numerics::{EpsRational, Rational};
use crate::persuasion::{s2_best_response_masses, BestResponseSet};
use crate::strategy::{Commitment1, Commitment1File, Commitment2, Commitment2File, Response};

/// Where to look for commitment pairs that leave an action group unplayed.
#[derive(Debug, Clone)]
pub enum Regularity {
    /// S1 grid commitments with up to one signal per information set, against
    /// S2's library rules.
    Grid(GridConfig),
    Pairs(Vec<(Commitment1, Commitment2)>),
    Skip,
}

#[derive(Debug, Clone)]
pub struct SufficientOptions {
    /// Mixing ratios are fractions with denominators up to this.
    pub max_denominator: u32,
    pub regularity: Regularity,
}

impl Default for SufficientOptions {
    fn default() -> Self {
        SufficientOptions { max_denominator: 24, regularity: Regularity::Grid(GridConfig::with_step(2)) }
    }
}

/// A commitment pair under which no action of `info_set` is ever taken.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityViolation {
    pub info_set: String,
    pub g1: Commitment1File,
    pub g2: Commitment2File,
}

/// S2's threat: off-optimal after the heavier mix, optimal after the lighter
/// one and after the second set alone.
#[derive(Debug, Clone, Serialize)]
pub struct ThreatStrategy {
    /// S1-worst rule at the heavier mix.
    pub at_alpha: Response,
    pub at_beta: Response,
    pub at_y: Response,
}

#[derive(Debug, Clone, Serialize)]
pub struct SufficientWitness {
    pub x: String,
    pub y: String,
    pub alpha: Rational,
    pub beta: Rational,
    pub threat: ThreatStrategy,
    /// Beliefs after the two mock signals.
    pub mock_signals: [Vec<Rational>; 2],
    /// S1 loses from the heavier mix under the threat.
    pub s1_threat: Inequality,
    /// S2 prefers the second set alone to the lighter mix.
    pub s2_separation: Inequality,
    /// S1 is better off on the first set than on the second.
    pub s1_ranking: Inequality,
    /// `None` when regularity was skipped.
    pub regularity: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairCheck {
    pub x: String,
    pub y: String,
    pub s1_ranking: Inequality,
    pub ratios_checked: usize,
    pub segments: usize,
    pub regularity: Option<bool>,
    pub regularity_violation: Option<RegularityViolation>,
    /// Mixing ratios and a threat exist, regardless of regularity.
    pub threat_found: bool,
    pub witness_found: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SufficientReport {
    pub witnesses: Vec<SufficientWitness>,
    pub pairs: Vec<PairCheck>,
    pub max_denominator: u32,
    /// Commitment pairs examined for regularity.
    pub regularity_pairs: usize,
}

impl SufficientReport {
    pub fn witness(&self) -> Option<&SufficientWitness> {
        self.witnesses.first()
    }

    pub fn witness_for(&self, x: &str, y: &str) -> Option<&SufficientWitness> {
        self.witnesses.iter().find(|w| w.x == x && w.y == y)
    }
}

/// Fractions `n/d` with `d <= dmax` in `(0, bound]`, ascending.
fn ratios(bound: &Rational, dmax: u32) -> Vec<Rational> {
    let mut out = Vec::new();
    for d in 1..=i64::from(dmax) {
        let mut n = 1;
        loop {
            let v = Rational::new(n, d);
            if v > *bound {
                break;
            }
            out.push(v);
            n += 1;
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Belief after a signal sent by all of `x` and a share of `y` such that
/// `P(y)/P(x) = ratio`.
fn mixed_belief(s: &Scenario, x: usize, y: usize, ratio: &Rational) -> Vec<Rational> {
    let (mx, my) = (truthful_masses(s, x), truthful_masses(s, y));
    let z = Rational::one() + ratio;
    mx.iter().zip(&my).map(|(a, b)| &(a + &(b * ratio)) / &z).collect()
}

/// Copy of `s` in which S2's utility is minus S1's, so that S2's best
/// response minimizes S1's utility.
fn s1_adversary(s: &Scenario) -> Scenario {
    let mut f = s.file().clone();
    f.utility_s2 = f.utility_s1.iter().map(|(k, v)| (k.clone(), -v)).collect();
    f.reference.clear();
    Scenario::from_file(f).expect("same structure as a valid scenario")
}

fn action_group_mass(s: &Scenario, g1: &Commitment1, g2: &Commitment2, k: usize) -> Rational {
    outcomes(s, g1, g2)
        .iter()
        .filter(|o| s.partition1().block_of(o.action) == k)
        .map(|o| o.probability.limit().clone())
        .sum()
}

fn regularity_pairs(s: &Scenario, mode: &Regularity) -> Vec<(Commitment1, Commitment2)> {
    match mode {
        Regularity::Skip => Vec::new(),
        Regularity::Pairs(p) => p.clone(),
        Regularity::Grid(grid) => {
            let names: Vec<String> = (0..s.num_states()).map(|i| s.state_name(i).to_string()).collect();
            let rules = s2_library(s, 0);
            let mut out = Vec::new();
            for m in 1..=s.partition1().len() {
                let g1s = grid.commitments(s, m, &s1_signal_names(s, m)).expect("grid within bounds");
                for g1 in g1s {
                    for r in &rules {
                        out.push((g1.clone(), Commitment2::constant(r, names.clone(), m)));
                    }
                }
            }
            out
        }
    }
}

/// First pair in `pairs` that never plays an action of each S1 information set.
fn unplayed_groups(s: &Scenario, pairs: &[(Commitment1, Commitment2)]) -> Vec<Option<RegularityViolation>> {
    let p1 = s.partition1();
    (0..p1.len())
        .map(|k| {
            pairs.par_iter().find_first(|(g1, g2)| !action_group_mass(s, g1, g2, k).is_positive()).map(|(g1, g2)| {
                RegularityViolation { info_set: p1.name(k).to_string(), g1: g1.to_file(s), g2: g2.to_file(s, g1) }
            })
        })
        .collect()
}

/// Searches every ordered pair of S1 information sets for mixing ratios and
/// an S2 threat under which S2 gains from separating the sets while S1
/// gains from mixing them.
pub fn check_sufficient(s: &Scenario, opts: &SufficientOptions) -> SufficientReport {
    let p1 = s.partition1();
    let live: Vec<usize> = (0..p1.len()).filter(|&k| s.mass1(k).is_positive()).collect();
    let truthful: Vec<Option<BestResponseSet>> =
        (0..p1.len()).map(|k| live.contains(&k).then(|| truthful_response(s, k))).collect();
    let library = s2_library(s, 0);
    let reg_pairs = regularity_pairs(s, &opts.regularity);
    let unplayed = unplayed_groups(s, &reg_pairs);
    let skip = matches!(opts.regularity, Regularity::Skip);
    let adversary = s1_adversary(s);
    let dmax_bound = Rational::from(i64::from(opts.max_denominator));
    let mut witnesses = Vec::new();
    let mut pairs = Vec::new();
    for &x in &live {
        for &y in &live {
            if x == y {
                continue;
            }
            let (gx, gy) = (truthful[x].as_ref().unwrap(), truthful[y].as_ref().unwrap());
            let s1_ranking = Inequality::greater(gx.s1_value_min.clone(), gy.s1_value_max.clone());
            let violation = unplayed[x].clone().or_else(|| unplayed[y].clone());
            let regularity = (!skip).then_some(violation.is_none());
            let mut check = PairCheck {
                x: p1.name(x).to_string(),
                y: p1.name(y).to_string(),
                s1_ranking: s1_ranking.clone(),
                ratios_checked: 0,
                segments: 0,
                regularity,
                regularity_violation: violation,
                threat_found: false,
                witness_found: false,
            };
            if !s1_ranking.holds {
                pairs.push(check);
                continue;
            }
            let (px, py) = (s.mass1(x), s.mass1(y));
            let bound = std::cmp::min(&py / &px, dmax_bound.clone());
            let vals = ratios(&bound, opts.max_denominator);
            let sets: Vec<BestResponseSet> =
                vals.par_iter().map(|v| s2_best_response_masses(s, &mixed_belief(s, x, y, v))).collect();
            check.ratios_checked = vals.len();
            let mut segments: Vec<Vec<usize>> = Vec::new();
            for i in 0..vals.len() {
                match segments.last_mut() {
                    Some(seg) if sets[seg[0]].same_face(&sets[i]) => seg.push(i),
                    _ => segments.push(vec![i]),
                }
            }
            check.segments = segments.len();
            let threat_possible = |i: usize| {
                let w: Vec<EpsRational> = mixed_belief(s, x, y, &vals[i]).into_iter().map(EpsRational::exact).collect();
                library.iter().any(|r| weighted_outcome(s, &w, r).s2 < sets[i].s2_value)
            };
            let mut found = None;
            'search: for seg in &segments {
                for (ja, &a) in seg.iter().enumerate() {
                    let mut punish: Option<Option<BestResponseSet>> = None;
                    for &b in &seg[..ja] {
                        let sep = Inequality::less(sets[b].s2_value.clone(), gy.s2_value.clone());
                        if !sep.holds {
                            continue;
                        }
                        let p = punish.get_or_insert_with(|| {
                            threat_possible(a).then(|| s2_best_response_masses(&adversary, &mixed_belief(s, x, y, &vals[a])))
                        });
                        let Some(p) = p else { break };
                        let denom = &px + &(&vals[a] * &py);
                        let w = &(&px + &(&vals[b] * &py)) / &denom;
                        let rhs = &(&w * &sets[b].s1_value_max) + &(&(Rational::one() - &w) * &gy.s1_value_max);
                        let s1_threat = Inequality::less(-&p.s2_value, rhs);
                        if s1_threat.holds {
                            found = Some((a, b, p.strategies[0].clone(), s1_threat, sep));
                            break 'search;
                        }
                    }
                }
            }
            check.threat_found = found.is_some();
            if let Some((a, b, punish, s1_threat, s2_separation)) = found.filter(|_| regularity != Some(false)) {
                check.witness_found = true;
                witnesses.push(SufficientWitness {
                    x: check.x.clone(),
                    y: check.y.clone(),
                    alpha: vals[a].clone(),
                    beta: vals[b].clone(),
                    threat: ThreatStrategy {
                        at_alpha: punish,
                        at_beta: sets[b].strategies[0].clone(),
                        at_y: gy.strategies[0].clone(),
                    },
                    mock_signals: [mixed_belief(s, x, y, &vals[a]), mixed_belief(s, x, y, &vals[b])],
                    s1_threat,
                    s2_separation,
                    s1_ranking,
                    regularity,
                });
            }
            pairs.push(check);
        }
    }
    SufficientReport { witnesses, pairs, max_denominator: opts.max_denominator, regularity_pairs: reg_pairs.len() }
}
