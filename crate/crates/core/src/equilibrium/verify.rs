//! No-deviation checks for a given commitment pair.

use std::collections::HashMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::s2_first::{identity_is_best, point_columns, s1_best_response, s2_library};
use super::tables::{better, exact_column, limit_column, ColumnGrid, ResponseTable};
use super::{EquilibriumReport, Order};
use crate::error::Result;
use crate::game::{expected_utilities, signal_outcome, Agent, UtilityTriple};
use crate::grid::{Commitment1Grid, GridConfig};
use crate::model::Scenario;
use crate::numerics::{EpsRational, Rational};
use crate::persuasion::{s2_signal_names, S1TieBreak};
use crate::strategy::{Commitment1, Commitment1File, Commitment2, Commitment2File, Response};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    /// S2's exact best response at every S1 signal.
    ExactSubSolver,
    /// Every S1 commitment on the grid.
    FullGrid,
    /// Changing one information set's row at a time to any grid row.
    Coordinate,
    /// Replacing S2's rule after one S1 signal by any library rule.
    Library,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub grid: GridConfig,
    /// Coarse step of the S2 rule library used for S2's deviations.
    pub library_step: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { grid: GridConfig::default(), library_step: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalCheck {
    pub signal: String,
    pub attained: Rational,
    pub optimum: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct Deviation {
    pub utilities: UtilityTriple,
    pub gain: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g1: Option<Commitment1File>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g2: Option<Commitment2File>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LateCheck {
    pub agent: Agent,
    pub passed: bool,
    pub method: SearchMethod,
    pub points_checked: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_signal: Vec<SignalCheck>,
    /// S2-first only: whether the given S1 commitment meets the relabeling constraint.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation_constraint_holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_deviation: Option<Deviation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EarlyCheck {
    pub agent: Agent,
    pub passed: bool,
    pub method: SearchMethod,
    pub points_checked: usize,
    pub current: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_deviation: Option<Deviation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviationReport {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    pub late: LateCheck,
    pub early: EarlyCheck,
}

impl DeviationReport {
    fn new(grid: Option<GridConfig>, late: LateCheck, early: EarlyCheck) -> Self {
        DeviationReport { passed: late.passed && early.passed, grid, late, early }
    }

    pub(crate) fn s1_first_by_construction(s: &Scenario, r: &EquilibriumReport, table: &ResponseTable, points: usize) -> Self {
        let late = s2_exact_check(s, &r.g1, &r.g2, table);
        let early = EarlyCheck {
            agent: Agent::S1,
            passed: true,
            method: SearchMethod::FullGrid,
            points_checked: points,
            current: r.utilities.s1.clone(),
            best_deviation: None,
        };
        DeviationReport::new(r.search.grid.clone(), late, early)
    }

    pub(crate) fn s2_first_by_construction(r: &EquilibriumReport, points: usize, candidates: usize) -> Self {
        let late = LateCheck {
            agent: Agent::S1,
            passed: true,
            method: SearchMethod::FullGrid,
            points_checked: points,
            per_signal: Vec::new(),
            permutation_constraint_holds: Some(true),
            best_deviation: None,
        };
        let early = EarlyCheck {
            agent: Agent::S2,
            passed: true,
            method: SearchMethod::Library,
            points_checked: candidates,
            current: r.utilities.s2.clone(),
            best_deviation: None,
        };
        DeviationReport::new(r.search.grid.clone(), late, early)
    }
}

fn s2_exact_check(s: &Scenario, g1: &Commitment1, g2: &Commitment2, table: &ResponseTable) -> LateCheck {
    let mut per_signal = Vec::new();
    for j in 0..g1.num_signals() {
        let col = limit_column(&g1.column(j));
        if col.iter().all(|c| c.is_zero()) {
            continue;
        }
        let attained = signal_outcome(s, &g1.column(j), &g2.response(j)).s2;
        let optimum = table.s2_value(&col);
        per_signal.push(SignalCheck { signal: g1.signals[j].clone(), attained, optimum });
    }
    LateCheck {
        agent: Agent::S2,
        passed: per_signal.iter().all(|c| c.attained >= c.optimum),
        method: SearchMethod::ExactSubSolver,
        points_checked: per_signal.len(),
        per_signal,
        permutation_constraint_holds: None,
        best_deviation: None,
    }
}

/// A finite set of S1 commitments described by their signal columns.
struct S1Candidates<'a> {
    method: SearchMethod,
    cols: Vec<Vec<Rational>>,
    points: Vec<Vec<usize>>,
    build: Box<dyn Fn(usize) -> Commitment1 + Sync + 'a>,
}

impl S1Candidates<'_> {
    /// Full grid when it fits the point budget, else single-row deviations
    /// from `g1` plus every single-signal commitment.
    fn around<'a>(s: &'a Scenario, g1: &Commitment1, m: usize, grid: &GridConfig) -> Result<S1Candidates<'a>> {
        let nb = s.partition1().len();
        let names: Vec<String> = (0..m).map(|j| g1.signals.get(j).cloned().unwrap_or_else(|| format!("w{}", j + 1))).collect();
        let comps = grid.compositions(m);
        if grid.size(nb, m) <= grid.max_points {
            let g = Commitment1Grid::new(grid, s, m, names)?;
            let cg = ColumnGrid { step: grid.step, blocks: nb };
            let points = point_columns(&g, &comps, &cg);
            let cols = cg.columns().collect();
            return Ok(S1Candidates { method: SearchMethod::FullGrid, cols, points, build: Box::new(move |i| g.get(i)) });
        }
        let base: Vec<Vec<Rational>> = (0..nb)
            .map(|k| (0..m).map(|j| g1.kernel[k].get(j).map_or(Rational::zero(), |x| x.limit().clone())).collect())
            .collect();
        let step = i64::from(grid.step);
        let mut kernels: Vec<Vec<Vec<Rational>>> = Vec::new();
        for k in 0..nb {
            for c in &comps {
                let mut kern = base.clone();
                kern[k] = c.iter().map(|&x| Rational::new(i64::from(x), step)).collect();
                kernels.push(kern);
            }
        }
        for j in 0..m {
            let mut row = vec![Rational::zero(); m];
            row[j] = Rational::one();
            kernels.push(vec![row; nb]);
        }
        let mut index: HashMap<Vec<Rational>, usize> = HashMap::new();
        let mut cols = Vec::new();
        let points = kernels
            .iter()
            .map(|kern| {
                (0..m)
                    .map(|j| {
                        let col: Vec<Rational> = kern.iter().map(|row| row[j].clone()).collect();
                        *index.entry(col.clone()).or_insert_with(|| {
                            cols.push(col);
                            cols.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        let build = move |i: usize| {
            let kernel = kernels[i].iter().map(|row| row.iter().cloned().map(EpsRational::exact).collect()).collect();
            Commitment1::new(names.clone(), kernel)
        };
        Ok(S1Candidates { method: SearchMethod::Coordinate, cols, points, build: Box::new(build) })
    }

    fn cells(&self, s: &Scenario, r: &Response) -> Vec<UtilityTriple> {
        self.cols.par_iter().map(|c| signal_outcome(s, &exact_column(c), r)).collect()
    }
}

fn deviation(s: &Scenario, u: UtilityTriple, gain: Rational, g1: Option<&Commitment1>, g2: Option<(&Commitment2, &Commitment1)>) -> Deviation {
    Deviation { utilities: u, gain, g1: g1.map(|g| g.to_file(s)), g2: g2.map(|(g, g1)| g.to_file(s, g1)) }
}

/// `g2` with the rule after S1 signal `j` replaced by a recommendation rule,
/// over the union of both alphabets.
fn splice(s: &Scenario, g2: &Commitment2, j: usize, r: &Response) -> Commitment2 {
    let n2 = g2.num_signals();
    let mut signals = g2.signals.clone();
    signals.extend(s2_signal_names(s).into_iter().map(|x| if g2.signals.contains(&x) { format!("{x}'") } else { x }));
    let width = n2 + s.num_states();
    let own = |row: &Vec<EpsRational>| {
        let mut v = row.clone();
        v.resize(width, EpsRational::zero());
        v
    };
    let rec = |row: &Vec<EpsRational>| {
        let mut v = vec![EpsRational::zero(); n2];
        v.extend(row.iter().cloned());
        v
    };
    let responses: Vec<Response> = g2
        .responses()
        .into_iter()
        .enumerate()
        .map(|(w, cur)| {
            let rows = if w == j { r.rows.iter().map(rec).collect() } else { cur.rows.iter().map(own).collect() };
            Response { rows }
        })
        .collect();
    Commitment2::from_responses(&responses, signals)
}

/// Checks the no-deviation conditions of `order` for `(g1, g2)`.
pub fn verify_equilibrium(
    s: &Scenario,
    order: Order,
    g1: &Commitment1,
    g2: &Commitment2,
    opts: &VerifyOptions,
) -> Result<DeviationReport> {
    g1.check(s)?;
    g2.check(s, g1)?;
    match order {
        Order::S1First => verify_s1_first(s, g1, g2, opts),
        Order::S2First => verify_s2_first(s, g1, g2, opts),
    }
}

fn verify_s1_first(s: &Scenario, g1: &Commitment1, g2: &Commitment2, opts: &VerifyOptions) -> Result<DeviationReport> {
    let nb = s.partition1().len();
    let current = expected_utilities(s, g1, g2);
    let cands = S1Candidates::around(s, g1, nb, &opts.grid)?;
    let mut table = ResponseTable::default();
    table.extend(s, cands.cols.iter().cloned().chain((0..g1.num_signals()).map(|j| limit_column(&g1.column(j)))));
    let late = s2_exact_check(s, g1, g2, &table);
    let values: Vec<UtilityTriple> = cands.cols.iter().map(|c| table.value(c, S1TieBreak::FavorS1)).collect();
    let best = cands
        .points
        .par_iter()
        .enumerate()
        .map(|(i, cols)| (cols.iter().map(|&c| values[c].clone()).sum::<UtilityTriple>(), i))
        .reduce_with(|a, b| if better((&[&a.0.s1, &a.0.s2, &a.0.receiver], a.1), (&[&b.0.s1, &b.0.s2, &b.0.receiver], b.1)) { a } else { b });
    let best_deviation = best.filter(|(u, _)| u.s1 > current.s1).map(|(u, i)| {
        let g = (cands.build)(i);
        let gain = &u.s1 - &current.s1;
        deviation(s, u, gain, Some(&g), None)
    });
    let early = EarlyCheck {
        agent: Agent::S1,
        passed: best_deviation.is_none(),
        method: cands.method,
        points_checked: cands.points.len(),
        current: current.s1,
        best_deviation,
    };
    Ok(DeviationReport::new(Some(opts.grid.clone()), late, early))
}

fn verify_s2_first(s: &Scenario, g1: &Commitment1, g2: &Commitment2, opts: &VerifyOptions) -> Result<DeviationReport> {
    let m = g1.num_signals();
    let current = expected_utilities(s, g1, g2);
    let cands = S1Candidates::around(s, g1, m, &opts.grid)?;
    let perms: Vec<Vec<usize>> = (0..m).permutations(m).filter(|p| p.iter().enumerate().any(|(i, &x)| i != x)).collect();
    let responses = g2.responses();

    // S1 against the given g2
    let own: Vec<Vec<UtilityTriple>> = responses.iter().map(|r| cands.cells(s, r)).collect();
    let own_refs: Vec<&[UtilityTriple]> = own.iter().map(|c| c.as_slice()).collect();
    let holds = {
        let slot: Vec<Vec<UtilityTriple>> =
            (0..m).map(|j| (0..m).map(|i| signal_outcome(s, &g1.column(i), &responses[j])).collect()).collect();
        let refs: Vec<&[UtilityTriple]> = slot.iter().map(|c| c.as_slice()).collect();
        identity_is_best(&refs, &(0..m).collect::<Vec<_>>(), &perms)
    };
    let late_best = s1_best_response(&own_refs, &cands.points, Some(&perms));
    let late_dev = late_best.filter(|(u, _)| u.s1 > current.s1).map(|(u, i)| {
        let g = (cands.build)(i);
        let gain = &u.s1 - &current.s1;
        deviation(s, u, gain, Some(&g), None)
    });
    let late = LateCheck {
        agent: Agent::S1,
        passed: holds && late_dev.is_none(),
        method: cands.method,
        points_checked: cands.points.len(),
        per_signal: Vec::new(),
        permutation_constraint_holds: Some(holds),
        best_deviation: late_dev,
    };

    // S2 swapping one rule for a library rule, S1 re-responding
    let lib = s2_library(s, opts.library_step);
    let lib_cells: Vec<Vec<UtilityTriple>> = lib.iter().map(|r| cands.cells(s, r)).collect();
    let mut checked = 0;
    let mut best: Option<(UtilityTriple, usize, usize, usize)> = None;
    for j in 0..m {
        for (l, r) in lib.iter().enumerate() {
            if *r == responses[j] {
                continue;
            }
            checked += 1;
            let mut refs = own_refs.clone();
            refs[j] = &lib_cells[l];
            let Some((u, i)) = s1_best_response(&refs, &cands.points, Some(&perms)) else { continue };
            let replace = match &best {
                None => u.s2 > current.s2,
                Some((b, ..)) => u.s2 > b.s2,
            };
            if replace {
                best = Some((u, i, j, l));
            }
        }
    }
    let early_dev = best.map(|(u, i, j, l)| {
        let g = (cands.build)(i);
        let dev = splice(s, g2, j, &lib[l]);
        let gain = &u.s2 - &current.s2;
        deviation(s, u, gain, Some(&g), Some((&dev, &g)))
    });
    let early = EarlyCheck {
        agent: Agent::S2,
        passed: early_dev.is_none(),
        method: SearchMethod::Library,
        points_checked: checked,
        current: current.s2,
        best_deviation: early_dev,
    };
    Ok(DeviationReport::new(Some(opts.grid.clone()), late, early))
}
