//! Equilibria under both commitment orders, their verification and comparison.

mod compare;
mod s1_first;
mod s2_first;
pub(crate) mod tables;
mod verify;

use serde::{Deserialize, Serialize};

use crate::game::{expected_utilities, UtilityTriple};
use crate::grid::GridConfig;
use crate::model::Scenario;
use crate::strategy::{Commitment1, Commitment1File, Commitment2, Commitment2File};

pub use compare::{
    compare_orders, order_matters, reference_checks, transfer_range, ComparisonReport, OrderPreference, OrderVerdict,
    ReferenceCheck, TransferRange,
};
pub use s1_first::solve_s1_first;
pub use s2_first::{s2_library, solve_s2_first, PermutationMode, S2FirstOptions};
pub use verify::{verify_equilibrium, Deviation, DeviationReport, EarlyCheck, LateCheck, SearchMethod, SignalCheck, VerifyOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    S1First,
    S2First,
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Order::S1First => "s1_first",
            Order::S2First => "s2_first",
        })
    }
}

impl std::str::FromStr for Order {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "s1_first" | "s1-first" => Ok(Order::S1First),
            "s2_first" | "s2-first" => Ok(Order::S2First),
            _ => Err(format!("unknown order `{s}`")),
        }
    }
}

/// How a report's commitments were obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchInfo {
    /// `solve` or `given`.
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    pub points_evaluated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s2_library_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation_mode: Option<PermutationMode>,
}

impl SearchInfo {
    pub fn given() -> Self {
        SearchInfo { source: "given".into(), grid: None, points_evaluated: 0, s2_library_size: None, permutation_mode: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumReport {
    pub order: Order,
    #[serde(skip)]
    pub g1: Commitment1,
    #[serde(skip)]
    pub g2: Commitment2,
    #[serde(rename = "g1")]
    pub g1_file: Commitment1File,
    #[serde(rename = "g2")]
    pub g2_file: Commitment2File,
    pub utilities: UtilityTriple,
    pub search: SearchInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<DeviationReport>,
}

impl EquilibriumReport {
    /// Report for a given pair; utilities are evaluated exactly.
    pub fn new(s: &Scenario, order: Order, g1: Commitment1, g2: Commitment2, search: SearchInfo) -> Self {
        let utilities = expected_utilities(s, &g1, &g2);
        EquilibriumReport {
            order,
            g1_file: g1.to_file(s),
            g2_file: g2.to_file(s, &g1),
            g1,
            g2,
            utilities,
            search,
            certificate: None,
        }
    }

    pub fn with_certificate(mut self, c: DeviationReport) -> Self {
        self.certificate = Some(c);
        self
    }
}
