//! Cached S2 best responses and per-column utility tables.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::game::{column_weights, signal_outcome, UtilityTriple};
use crate::model::Scenario;
use crate::numerics::{EpsRational, Rational};
use crate::persuasion::{default_response, s2_best_response_masses, BestResponseSet, S1TieBreak};
use crate::strategy::Response;

/// Column scaled to sum to one, with the factor removed.
pub(crate) fn normalize(column: &[Rational]) -> Option<(Rational, Vec<Rational>)> {
    let total: Rational = column.iter().sum();
    if !total.is_positive() {
        return None;
    }
    let key = column.iter().map(|c| c / &total).collect();
    Some((total, key))
}

pub(crate) fn exact_column(column: &[Rational]) -> Vec<EpsRational> {
    column.iter().cloned().map(EpsRational::exact).collect()
}

pub(crate) fn limit_column(column: &[EpsRational]) -> Vec<Rational> {
    column.iter().map(|c| c.limit().clone()).collect()
}

/// S2's best-response sets keyed by normalized S1 signal column.
#[derive(Default)]
pub(crate) struct ResponseTable {
    map: HashMap<Vec<Rational>, BestResponseSet>,
}

impl ResponseTable {
    /// Solves every missing column in parallel.
    pub fn extend<I: IntoIterator<Item = Vec<Rational>>>(&mut self, s: &Scenario, columns: I) {
        let mut keys: Vec<Vec<Rational>> = columns
            .into_iter()
            .filter_map(|c| normalize(&c).map(|(_, k)| k))
            .filter(|k| !self.map.contains_key(k))
            .collect();
        keys.sort();
        keys.dedup();
        let solved: Vec<(Vec<Rational>, BestResponseSet)> = keys
            .into_par_iter()
            .map(|k| {
                let m: Vec<Rational> = column_weights(s, &exact_column(&k)).iter().map(|w| w.limit().clone()).collect();
                let set = s2_best_response_masses(s, &m);
                (k, set)
            })
            .collect();
        self.map.extend(solved);
    }

    /// Scale factor and best-response set of a column; `None` for a zero column.
    pub fn get(&self, column: &[Rational]) -> Option<(Rational, &BestResponseSet)> {
        let (total, key) = normalize(column)?;
        let set = self.map.get(&key).expect("column was tabulated");
        Some((total, set))
    }

    pub fn value(&self, column: &[Rational], tb: S1TieBreak) -> UtilityTriple {
        match self.get(column) {
            Some((total, set)) => set.select(tb).1.scale(&total),
            None => UtilityTriple::default(),
        }
    }

    /// S2's optimal value at a column's (unnormalized) interim masses.
    pub fn s2_value(&self, column: &[Rational]) -> Rational {
        match self.get(column) {
            Some((total, set)) => &set.s2_value * &total,
            None => Rational::zero(),
        }
    }

    pub fn response(&self, s: &Scenario, column: &[Rational], tb: S1TieBreak) -> Response {
        match self.get(column) {
            Some((_, set)) => set.select(tb).0.clone(),
            None => default_response(s),
        }
    }
}

/// All columns `{0..step}^blocks / step`, indexed in mixed radix with the
/// first information set most significant.
pub(crate) struct ColumnGrid {
    pub step: u32,
    pub blocks: usize,
}

impl ColumnGrid {
    pub fn len(&self) -> usize {
        (self.step as usize + 1).pow(self.blocks as u32)
    }

    pub fn numerators(&self, mut i: usize) -> Vec<u32> {
        let r = self.step as usize + 1;
        let mut out = vec![0; self.blocks];
        for k in (0..self.blocks).rev() {
            out[k] = (i % r) as u32;
            i /= r;
        }
        out
    }

    pub fn index(&self, numerators: impl Iterator<Item = u32>) -> usize {
        let r = self.step as usize + 1;
        numerators.fold(0, |acc, x| acc * r + x as usize)
    }

    pub fn column(&self, i: usize) -> Vec<Rational> {
        let step = i64::from(self.step);
        self.numerators(i).into_iter().map(|x| Rational::new(i64::from(x), step)).collect()
    }

    pub fn columns(&self) -> impl Iterator<Item = Vec<Rational>> + '_ {
        (0..self.len()).map(|i| self.column(i))
    }
}

/// `table[c]`: utilities of a grid column under a fixed S2 response.
pub(crate) fn response_cells(s: &Scenario, grid: &ColumnGrid, response: &Response) -> Vec<UtilityTriple> {
    (0..grid.len()).into_par_iter().map(|i| signal_outcome(s, &exact_column(&grid.column(i)), response)).collect()
}

/// Lexicographic key used for deterministic argmax: larger is better,
/// earlier index wins ties.
pub(crate) fn better(a: (&[&Rational; 3], usize), b: (&[&Rational; 3], usize)) -> bool {
    match a.0.cmp(b.0) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => a.1 < b.1,
    }
}
