use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tables::{better, response_cells, ColumnGrid, ResponseTable};
use super::verify::DeviationReport;
use super::{EquilibriumReport, Order, SearchInfo};
use crate::error::Result;
use crate::game::UtilityTriple;
use crate::grid::{s1_signal_names, Commitment1Grid, GridConfig};
use crate::model::Scenario;
use crate::numerics::{EpsRational, Rational};
use crate::persuasion::{default_response, s2_signal_names, S1TieBreak};
use crate::strategy::{Commitment2, Response};

/// How the permutation-free requirement on S2's commitment is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationMode {
    /// S1 may only pick commitments under which no relabeling of her signals
    /// would raise S2's utility.
    Inner,
    /// S2 may only pick commitments that are permutation-free against the
    /// whole grid; S1 is then unconstrained.
    GridFilter,
    /// S2 ignores S1's signal; S1 is unconstrained.
    ConstantOnly,
}

#[derive(Debug, Clone)]
pub struct S2FirstOptions {
    pub grid: GridConfig,
    /// S2 may use her best response at interim beliefs from S1 columns on
    /// this coarser grid.
    pub library_step: u32,
    pub mode: PermutationMode,
}

impl Default for S2FirstOptions {
    fn default() -> Self {
        S2FirstOptions { grid: GridConfig::default(), library_step: 4, mode: PermutationMode::Inner }
    }
}

/// Candidate S2 rules for a single S1 signal: best responses at truthful,
/// prior and coarse-grid interim beliefs (both tie-break selections), the
/// deterministic rules when there are few, and the truthful rule.
pub fn s2_library(s: &Scenario, library_step: u32) -> Vec<Response> {
    let nb = s.partition1().len();
    let mut columns: Vec<Vec<Rational>> = (0..nb)
        .map(|k| (0..nb).map(|i| if i == k { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    columns.push(vec![Rational::one(); nb]);
    if library_step > 0 {
        let cg = ColumnGrid { step: library_step, blocks: nb };
        columns.extend(cg.columns().skip(1));
    }
    let mut table = ResponseTable::default();
    table.extend(s, columns.iter().cloned());
    let mut lib: Vec<Response> = Vec::new();
    for c in &columns {
        for tb in [S1TieBreak::FavorS1, S1TieBreak::FavorS2] {
            lib.push(table.response(s, c, tb));
        }
    }
    lib.extend(deterministic_rules(s));
    lib.push(default_response(s));
    lib.into_iter().unique().collect()
}

/// Every rule in which each S2 information set recommends one fixed
/// action; empty when there are more than `DETERMINISTIC_LIMIT`. Always
/// includes the pooling rule recommending the first state.
fn deterministic_rules(s: &Scenario) -> Vec<Response> {
    let (n, nb2) = (s.num_states(), s.partition2().len());
    let unit = |a: usize| {
        let mut row = vec![EpsRational::zero(); n];
        row[a] = EpsRational::one();
        row
    };
    let first = s.partition2().blocks[0].states[0];
    let pool = Response { rows: vec![unit(first); nb2] };
    if (n as u128).pow(nb2 as u32) > DETERMINISTIC_LIMIT {
        return vec![pool];
    }
    std::iter::once(pool)
        .chain((0..nb2).map(|_| 0..n).multi_cartesian_product().map(|acts| Response { rows: acts.into_iter().map(unit).collect() }))
        .collect()
}

const DETERMINISTIC_LIMIT: u128 = 64;

/// Per grid point, the table column of each S1 signal.
pub(crate) fn point_columns(g: &Commitment1Grid, comps: &[Vec<u32>], cg: &ColumnGrid) -> Vec<Vec<usize>> {
    let m = comps.first().map_or(0, |c| c.len());
    (0..g.len())
        .map(|i| {
            let d = g.digits(i);
            (0..m).map(|j| cg.index(d.iter().map(|&r| comps[r][j]))).collect()
        })
        .collect()
}

/// Whether the identity labeling gives S2 at least as much as every relabeling.
pub(crate) fn identity_is_best(cells: &[&[UtilityTriple]], cols: &[usize], perms: &[Vec<usize>]) -> bool {
    let base: Rational = cols.iter().enumerate().map(|(j, &c)| &cells[j][c].s2).sum();
    perms.iter().all(|p| {
        let v: Rational = cols.iter().enumerate().map(|(i, &c)| &cells[p[i]][c].s2).sum();
        v <= base
    })
}

/// S1's best grid response to fixed per-signal cells, optionally subject to
/// the relabeling constraint. Returns `(utilities, grid index)`.
pub(crate) fn s1_best_response(
    cells: &[&[UtilityTriple]],
    points: &[Vec<usize>],
    perms: Option<&[Vec<usize>]>,
) -> Option<(UtilityTriple, usize)> {
    let mut best: Option<(UtilityTriple, usize)> = None;
    for (i, cols) in points.iter().enumerate() {
        if let Some(perms) = perms {
            if !identity_is_best(cells, cols, perms) {
                continue;
            }
        }
        let u: UtilityTriple = cols.iter().enumerate().map(|(j, &c)| cells[j][c].clone()).sum();
        let replace = match &best {
            None => true,
            Some((b, bi)) => better((&[&u.s1, &u.s2, &u.receiver], i), (&[&b.s1, &b.s2, &b.receiver], *bi)),
        };
        if replace {
            best = Some((u, i));
        }
    }
    best
}

/// S2 commits first, choosing one library rule per S1 signal; S1 then
/// best-responds on the grid.
pub fn solve_s2_first(s: &Scenario, opts: &S2FirstOptions) -> Result<EquilibriumReport> {
    let nb = s.partition1().len();
    let m = nb;
    let grid = &opts.grid;
    let g = Commitment1Grid::new(grid, s, m, s1_signal_names(s, m))?;
    let comps = grid.compositions(m);
    let cg = ColumnGrid { step: grid.step, blocks: nb };
    let lib = s2_library(s, opts.library_step);
    let cells: Vec<Vec<UtilityTriple>> = lib.iter().map(|r| response_cells(s, &cg, r)).collect();
    let points = point_columns(&g, &comps, &cg);
    let perms: Vec<Vec<usize>> = (0..m).permutations(m).filter(|p| p.iter().enumerate().any(|(i, &x)| i != x)).collect();

    let num_candidates = match opts.mode {
        PermutationMode::ConstantOnly => lib.len() as u128,
        _ => (lib.len() as u128).saturating_pow(m as u32),
    };
    let points_total = num_candidates.saturating_mul(g.len() as u128);
    if points_total > grid.max_points {
        return Err(crate::Error::GridTooLarge { points: points_total, limit: grid.max_points });
    }
    let candidates: Vec<Vec<usize>> = match opts.mode {
        PermutationMode::ConstantOnly => (0..lib.len()).map(|l| vec![l; m]).collect(),
        _ => (0..m).map(|_| 0..lib.len()).multi_cartesian_product().collect(),
    };

    let best = candidates
        .par_iter()
        .enumerate()
        .filter_map(|(ci, cand)| {
            let cc: Vec<&[UtilityTriple]> = cand.iter().map(|&l| cells[l].as_slice()).collect();
            let inner = match opts.mode {
                PermutationMode::Inner => s1_best_response(&cc, &points, Some(&perms)),
                PermutationMode::GridFilter => {
                    if !points.iter().all(|cols| identity_is_best(&cc, cols, &perms)) {
                        return None;
                    }
                    s1_best_response(&cc, &points, None)
                }
                PermutationMode::ConstantOnly => s1_best_response(&cc, &points, None),
            }?;
            Some((ci, inner))
        })
        .reduce_with(|a, b| {
            let (ua, ub) = (&a.1 .0, &b.1 .0);
            if better((&[&ua.s2, &ua.s1, &ua.receiver], a.0), (&[&ub.s2, &ub.s1, &ub.receiver], b.0)) {
                a
            } else {
                b
            }
        });
    let (ci, (value, i)) = best.ok_or_else(|| crate::Error::EmptyGrid("no S2 candidate passes the permutation filter".into()))?;

    let g1 = g.get(i);
    let responses: Vec<Response> = candidates[ci].iter().map(|&l| lib[l].clone()).collect();
    let g2 = Commitment2::from_responses(&responses, s2_signal_names(s));
    let search = SearchInfo {
        source: "solve".into(),
        grid: Some(grid.clone()),
        points_evaluated: g.len() * candidates.len(),
        s2_library_size: Some(lib.len()),
        permutation_mode: Some(opts.mode),
    };
    let report = EquilibriumReport::new(s, Order::S2First, g1, g2, search);
    debug_assert_eq!(report.utilities, value);
    let cert = DeviationReport::s2_first_by_construction(&report, g.len(), candidates.len());
    Ok(report.with_certificate(cert))
}
