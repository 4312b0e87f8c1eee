//! Checkers for when the commitment order can or cannot matter.

mod necessary;
mod sufficient;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{solve_s1_first, solve_s2_first, EquilibriumReport, Order, S2FirstOptions};
use crate::game::conditional_s1_utilities;
use crate::grid::GridConfig;
use crate::model::Scenario;
use crate::numerics::Rational;
use crate::persuasion::{s2_best_response_masses, BestResponseSet};

pub use necessary::{check_necessary, NecessaryReport, NecessaryWitness, TripleVariant};
pub use sufficient::{check_sufficient, PairCheck, Regularity, RegularityViolation, SufficientOptions, SufficientReport, SufficientWitness, ThreatStrategy};

/// Two sides of a strict inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inequality {
    pub lhs: Rational,
    pub relation: &'static str,
    pub rhs: Rational,
    pub holds: bool,
}

impl Inequality {
    pub fn less(lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs < rhs;
        Inequality { lhs, relation: "<", rhs, holds }
    }

    pub fn greater(lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs > rhs;
        Inequality { lhs, relation: ">", rhs, holds }
    }
}

/// Supported states of S1 information set `k`.
pub(crate) fn live_states(s: &Scenario, k: usize) -> Vec<usize> {
    s.partition1().blocks[k].states.iter().copied().filter(|&t| s.prior()[t].is_positive()).collect()
}

/// Prior restricted to S1 information set `k`, normalized.
pub(crate) fn truthful_masses(s: &Scenario, k: usize) -> Vec<Rational> {
    let total = s.mass1(k);
    (0..s.num_states())
        .map(|t| if s.partition1().block_of(t) == k { &s.prior()[t] / &total } else { Rational::zero() })
        .collect()
}

/// S2's best responses when S1 truthfully reveals information set `k`;
/// values are conditional on `k`.
pub(crate) fn truthful_response(s: &Scenario, k: usize) -> BestResponseSet {
    s2_best_response_masses(s, &truthful_masses(s, k))
}

fn argmax_all(vals: impl Iterator<Item = Rational> + Clone, v: &Rational) -> bool {
    vals.clone().all(|x| x <= *v)
}

/// States whose own action is best for both senders within their S1
/// information set (zero-prior states excluded).
pub fn collaborative_states(s: &Scenario) -> Vec<usize> {
    s.support()
        .filter(|&t| {
            let block = live_states(s, s.partition1().block_of(t));
            argmax_all(block.iter().map(|&u| s.u1_diag(u).clone()), s.u1_diag(t))
                && argmax_all(block.iter().map(|&u| s.u2_diag(u).clone()), s.u2_diag(t))
        })
        .collect()
}

/// How opposed the senders' rankings of an information set's actions must be.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarMode {
    /// No pair is strictly better for both, and S2-indifference implies
    /// S1-indifference.
    #[default]
    Weak,
    /// Every strict preference of one sender is reversed by the other.
    StrictReversal,
}

pub fn polar_opposite(s: &Scenario, states: &[usize], mode: PolarMode) -> bool {
    states.iter().enumerate().all(|(i, &a)| {
        states[i + 1..].iter().all(|&b| {
            let d1 = s.u1_diag(a).cmp(s.u1_diag(b));
            let d2 = s.u2_diag(a).cmp(s.u2_diag(b));
            match mode {
                PolarMode::Weak => d1 != d2 || d1.is_eq(),
                PolarMode::StrictReversal => d1 == d2.reverse(),
            }
        })
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CollaborationCheck {
    pub state: String,
    /// S2's payoff at the collaborative action against S2's value on the set.
    pub s2_side: Inequality,
    /// S1's payoff at the collaborative action against S1's best value on the set.
    pub s1_side: Inequality,
    /// Same, against S1's worst value among S2's optimal strategies.
    pub s1_side_worst: Inequality,
}

/// Whether S1's optimal commitments keep a signal that reveals the set.
#[derive(Debug, Clone, Serialize)]
pub struct RevealingCertificate {
    /// `None` when no equilibrium could be computed.
    pub holds: Option<bool>,
    pub orders: Vec<(Order, Option<String>)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InfoSetCheck {
    pub info_set: String,
    pub phi: Vec<String>,
    pub polar_opposite: bool,
    pub s2_value: Rational,
    pub s1_value_max: Rational,
    pub s1_value_min: Rational,
    pub collaboration: Vec<CollaborationCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub revealing: Option<RevealingCertificate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropositionReport {
    pub satisfied: bool,
    pub polar_mode: PolarMode,
    pub witness_info_set: Option<String>,
    pub witness_collab_state: Option<String>,
    pub collaborative_states: Vec<String>,
    /// Collaborative states passing both payoff comparisons for some set.
    pub effective_collaborative_states: Vec<String>,
    pub info_sets: Vec<InfoSetCheck>,
}

impl PropositionReport {
    pub fn witness(&self) -> Option<(&InfoSetCheck, &CollaborationCheck)> {
        let set = self.info_sets.iter().find(|c| Some(&c.info_set) == self.witness_info_set.as_ref())?;
        let col = set.collaboration.iter().find(|c| Some(&c.state) == self.witness_collab_state.as_ref())?;
        Some((set, col))
    }
}

#[derive(Debug, Clone, Default)]
pub struct PropositionOptions {
    pub polar: PolarMode,
    /// Used for both orders when equilibria have to be computed.
    pub solver: S2FirstOptions,
}

/// Index of a signal of `g1` that occurs only under information set `k`.
pub(crate) fn revealing_signal(s: &Scenario, g1: &crate::strategy::Commitment1, k: usize) -> Option<usize> {
    let p1 = s.partition1();
    (0..g1.num_signals()).find(|&j| {
        let w = |b: usize| g1.kernel[b][j].limit() * &s.mass1(b);
        w(k).is_positive() && (0..p1.len()).filter(|&b| b != k).all(|b| w(b).is_zero())
    })
}

fn certificate(s: &Scenario, k: usize, reports: &[EquilibriumReport], grid: Option<GridConfig>) -> RevealingCertificate {
    let orders: Vec<(Order, Option<String>)> =
        reports.iter().map(|r| (r.order, revealing_signal(s, &r.g1, k).map(|j| r.g1.signals[j].clone()))).collect();
    RevealingCertificate { holds: Some(orders.iter().all(|(_, w)| w.is_some())), orders, grid, note: None }
}

/// Looks for an S1 information set with a collaborative state outside it,
/// opposed rankings on its actions, and a revealing signal in every optimal
/// S1 commitment. Equilibria are solved only when needed.
pub fn check_proposition(s: &Scenario, opts: &PropositionOptions) -> PropositionReport {
    let mut cache: Option<Result<Vec<EquilibriumReport>, String>> = None;
    let mut solve = || {
        cache
            .get_or_insert_with(|| {
                let r1 = solve_s1_first(s, &opts.solver.grid).map_err(|e| e.to_string())?;
                let r2 = solve_s2_first(s, &opts.solver).map_err(|e| e.to_string())?;
                Ok(vec![r1, r2])
            })
            .clone()
    };
    check(s, opts.polar, &mut |k| match solve() {
        Ok(reports) => certificate(s, k, &reports, Some(opts.solver.grid.clone())),
        Err(e) => RevealingCertificate { holds: None, orders: Vec::new(), grid: Some(opts.solver.grid.clone()), note: Some(e) },
    })
}

/// As [`check_proposition`], with S1's optimal commitments taken from `reports`.
pub fn check_proposition_with(s: &Scenario, polar: PolarMode, reports: &[EquilibriumReport]) -> PropositionReport {
    check(s, polar, &mut |k| certificate(s, k, reports, None))
}

fn check(s: &Scenario, polar: PolarMode, revealing: &mut dyn FnMut(usize) -> RevealingCertificate) -> PropositionReport {
    let p1 = s.partition1();
    let collab = collaborative_states(s);
    let mut effective = Vec::new();
    let mut info_sets = Vec::new();
    let mut witness = None;
    for k in 0..p1.len() {
        let live = live_states(s, k);
        if live.is_empty() {
            continue;
        }
        let g = truthful_response(s, k);
        let collaboration: Vec<CollaborationCheck> = collab
            .iter()
            .filter(|&&t| p1.block_of(t) != k)
            .map(|&t| CollaborationCheck {
                state: s.state_name(t).to_string(),
                s2_side: Inequality::less(s.u2_diag(t).clone(), g.s2_value.clone()),
                s1_side: Inequality::greater(s.u1_diag(t).clone(), g.s1_value_max.clone()),
                s1_side_worst: Inequality::greater(s.u1_diag(t).clone(), g.s1_value_min.clone()),
            })
            .collect();
        for c in collaboration.iter().filter(|c| c.s2_side.holds && c.s1_side.holds) {
            if !effective.contains(&c.state) {
                effective.push(c.state.clone());
            }
        }
        let polar_ok = polar_opposite(s, &live, polar);
        let first = collaboration.iter().find(|c| c.s2_side.holds && c.s1_side.holds).map(|c| c.state.clone());
        let mut check = InfoSetCheck {
            info_set: p1.name(k).to_string(),
            phi: live.iter().map(|&t| s.state_name(t).to_string()).collect(),
            polar_opposite: polar_ok,
            s2_value: g.s2_value.clone(),
            s1_value_max: g.s1_value_max.clone(),
            s1_value_min: g.s1_value_min.clone(),
            collaboration,
            revealing: None,
        };
        if witness.is_none() && polar_ok {
            if let Some(state) = first {
                let cert = revealing(k);
                let ok = cert.holds == Some(true);
                check.revealing = Some(cert);
                if ok {
                    witness = Some((check.info_set.clone(), state));
                }
            }
        }
        info_sets.push(check);
    }
    effective.sort_by_key(|n| s.state_index(n));
    PropositionReport {
        satisfied: witness.is_some(),
        polar_mode: polar,
        witness_info_set: witness.as_ref().map(|w| w.0.clone()),
        witness_collab_state: witness.map(|w| w.1),
        collaborative_states: collab.iter().map(|&t| s.state_name(t).to_string()).collect(),
        effective_collaborative_states: effective,
        info_sets,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimOutcome {
    /// The revealing signal is not S1's best signal.
    NotHighest,
    /// Every realized signal gives S1 the same conditional utility.
    AllTie,
    /// The revealing signal is strictly best for S1.
    Violated,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimReport {
    pub outcome: ClaimOutcome,
    pub info_set: Option<String>,
    pub revealing_signal: Option<String>,
    pub collab_state: Option<String>,
    /// S1's expected utility conditional on each signal; `None` if unrealized.
    pub conditional_utilities: Vec<(String, Option<Rational>)>,
}

/// Ranks S1's signals in an equilibrium that reveals some information set
/// whose truthful value S1 would trade for a collaborative action.
pub fn check_claim(s: &Scenario, r: &EquilibriumReport) -> ClaimReport {
    let cond = conditional_s1_utilities(s, &r.g1, &r.g2);
    let conditional_utilities = r.g1.signals.iter().cloned().zip(cond.iter().cloned()).collect();
    let realized: Vec<&Rational> = cond.iter().flatten().collect();
    let mut report =
        ClaimReport { outcome: ClaimOutcome::NotApplicable, info_set: None, revealing_signal: None, collab_state: None, conditional_utilities };
    if realized.len() <= 1 {
        report.outcome = ClaimOutcome::AllTie;
        return report;
    }
    let p1 = s.partition1();
    let collab = collaborative_states(s);
    let found = (0..p1.len()).find_map(|k| {
        let j = revealing_signal(s, &r.g1, k)?;
        let g = truthful_response(s, k);
        let t = collab.iter().find(|&&t| p1.block_of(t) != k && *s.u1_diag(t) > g.s1_value_max)?;
        Some((k, j, *t))
    });
    let Some((k, j, t)) = found else { return report };
    report.info_set = Some(p1.name(k).to_string());
    report.revealing_signal = Some(r.g1.signals[j].clone());
    report.collab_state = Some(s.state_name(t).to_string());
    let own = cond[j].as_ref().expect("revealing signal is realized");
    report.outcome = if realized.iter().any(|u| *u > own) {
        ClaimOutcome::NotHighest
    } else if realized.iter().all(|u| *u == own) {
        ClaimOutcome::AllTie
    } else {
        ClaimOutcome::Violated
    };
    report
}
