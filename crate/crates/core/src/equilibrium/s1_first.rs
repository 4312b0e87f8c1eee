use rayon::prelude::*;

use super::tables::{better, ColumnGrid, ResponseTable};
use super::verify::DeviationReport;
use super::{EquilibriumReport, Order, SearchInfo};
use crate::error::Result;
use crate::game::UtilityTriple;
use crate::grid::{s1_signal_names, Commitment1Grid, GridConfig};
use crate::model::Scenario;
use crate::numerics::Rational;
use crate::persuasion::{s2_signal_names, S1TieBreak};
use crate::strategy::Commitment2;

/// S1 commits first: S1 maximizes over the grid against S2's exact best
/// response (ties inside S2's optimal set resolved for S1).
pub fn solve_s1_first(s: &Scenario, grid: &GridConfig) -> Result<EquilibriumReport> {
    let nb = s.partition1().len();
    let m = nb;
    let g = Commitment1Grid::new(grid, s, m, s1_signal_names(s, m))?;
    let comps = grid.compositions(m);
    let cg = ColumnGrid { step: grid.step, blocks: nb };
    let mut table = ResponseTable::default();
    table.extend(s, cg.columns());
    let flat: Vec<UtilityTriple> = (0..cg.len()).map(|i| table.value(&cg.column(i), S1TieBreak::FavorS1)).collect();

    let (value, best) = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let d = g.digits(i);
            let u: UtilityTriple = (0..m).map(|j| flat[cg.index(d.iter().map(|&r| comps[r][j]))].clone()).sum();
            (u, i)
        })
        .reduce_with(|a, b| {
            let ka = [&a.0.s1, &a.0.s2, &a.0.receiver];
            let kb = [&b.0.s1, &b.0.s2, &b.0.receiver];
            if better((&ka, a.1), (&kb, b.1)) {
                a
            } else {
                b
            }
        })
        .expect("grid is non-empty");

    let g1 = g.get(best);
    let responses: Vec<_> = (0..m)
        .map(|j| {
            let col: Vec<Rational> = g1.column(j).iter().map(|c| c.limit().clone()).collect();
            table.response(s, &col, S1TieBreak::FavorS1)
        })
        .collect();
    let g2 = Commitment2::from_responses(&responses, s2_signal_names(s));
    let search = SearchInfo {
        source: "solve".into(),
        grid: Some(grid.clone()),
        points_evaluated: g.len(),
        s2_library_size: None,
        permutation_mode: None,
    };
    let report = EquilibriumReport::new(s, Order::S1First, g1, g2, search);
    debug_assert_eq!(report.utilities, value);
    let cert = DeviationReport::s1_first_by_construction(s, &report, &table, g.len());
    Ok(report.with_certificate(cert))
}
