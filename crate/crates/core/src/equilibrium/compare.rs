use serde::Serialize;

use super::{EquilibriumReport, Order};
use crate::game::{Agent, UtilityTriple};
use crate::model::Scenario;
use crate::numerics::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderPreference {
    S1First,
    S2First,
    Indifferent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub matters: bool,
    pub tolerance: Rational,
    pub s1: OrderPreference,
    pub s2: OrderPreference,
    pub receiver: OrderPreference,
}

impl OrderVerdict {
    pub fn preference(&self, a: Agent) -> OrderPreference {
        match a {
            Agent::S1 => self.s1,
            Agent::S2 => self.s2,
            Agent::Receiver => self.receiver,
        }
    }
}

/// Compares an S1-first report `r1` with an S2-first report `r2`.
pub fn order_matters(r1: &EquilibriumReport, r2: &EquilibriumReport, tol: &Rational) -> OrderVerdict {
    let pref = |a: Agent| {
        let (x, y) = (r1.utilities.get(a), r2.utilities.get(a));
        let d = x - y;
        if d.abs() <= *tol {
            OrderPreference::Indifferent
        } else if d.is_positive() {
            OrderPreference::S1First
        } else {
            OrderPreference::S2First
        }
    };
    let (s1, s2, receiver) = (pref(Agent::S1), pref(Agent::S2), pref(Agent::Receiver));
    let matters = [s1, s2, receiver].iter().any(|p| *p != OrderPreference::Indifferent);
    OrderVerdict { matters, tolerance: tol.clone(), s1, s2, receiver }
}

/// Side payments from S2 to S1 that leave both better off when S2 commits first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferRange {
    pub lower: Rational,
    pub upper: Rational,
    pub empty: bool,
}

pub fn transfer_range(r1: &EquilibriumReport, r2: &EquilibriumReport) -> TransferRange {
    let lower = &r1.utilities.s1 - &r2.utilities.s1;
    let upper = &r2.utilities.s2 - &r1.utilities.s2;
    let empty = lower >= upper;
    TransferRange { lower, upper, empty }
}

/// One stored reference value against the computed one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceCheck {
    pub label: String,
    pub order: String,
    pub agent: Agent,
    pub reference: Rational,
    pub computed: Rational,
    pub matches: bool,
}

/// Every reference value of `s` whose order matches one of `reports`.
pub fn reference_checks(s: &Scenario, reports: &[&EquilibriumReport]) -> Vec<ReferenceCheck> {
    let mut out = Vec::new();
    for r in s.reference() {
        let Ok(order) = r.order.parse::<Order>() else { continue };
        let Some(rep) = reports.iter().find(|x| x.order == order) else { continue };
        for (agent, v) in [(Agent::S1, &r.s1), (Agent::S2, &r.s2), (Agent::Receiver, &r.receiver)] {
            if let Some(v) = v {
                let computed = rep.utilities.get(agent).clone();
                out.push(ReferenceCheck {
                    label: r.label.clone(),
                    order: r.order.clone(),
                    agent,
                    matches: computed == *v,
                    reference: v.clone(),
                    computed,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub s1_first: EquilibriumReport,
    pub s2_first: EquilibriumReport,
    pub verdict: OrderVerdict,
    pub transfer: TransferRange,
    pub references: Vec<ReferenceCheck>,
    /// References that disagree with the computed values.
    pub discrepancies: usize,
}

impl ComparisonReport {
    pub fn utilities(&self, order: Order) -> &UtilityTriple {
        match order {
            Order::S1First => &self.s1_first.utilities,
            Order::S2First => &self.s2_first.utilities,
        }
    }
}

pub fn compare_orders(s: &Scenario, r1: EquilibriumReport, r2: EquilibriumReport, tol: &Rational) -> ComparisonReport {
    let verdict = order_matters(&r1, &r2, tol);
    let transfer = transfer_range(&r1, &r2);
    let references = reference_checks(s, &[&r1, &r2]);
    let discrepancies = references.iter().filter(|c| !c.matches).count();
    ComparisonReport { s1_first: r1, s2_first: r2, verdict, transfer, references, discrepancies }
}
