//! Rational grids over S1 commitments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::numerics::{EpsRational, Rational};
use crate::strategy::Commitment1;

/// Kernel probabilities are multiples of `1/step`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridConfig {
    pub step: u32,
    /// Largest number of commitments a full enumeration may visit.
    pub max_points: u128,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { step: 60, max_points: 50_000_000 }
    }
}

impl GridConfig {
    pub fn with_step(step: u32) -> Self {
        GridConfig { step, ..Default::default() }
    }

    /// Distributions over `m` signals on the grid, as numerators over `step`.
    /// The first row is `(step, 0, ..)`.
    pub fn compositions(&self, m: usize) -> Vec<Vec<u32>> {
        fn rec(left: u32, m: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if m == 1 {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
                return;
            }
            for x in (0..=left).rev() {
                cur.push(x);
                rec(left - x, m - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if m > 0 {
            rec(self.step, m, &mut Vec::with_capacity(m), &mut out);
        }
        out
    }

    pub fn rows(&self, m: usize) -> Vec<Vec<EpsRational>> {
        let step = i64::from(self.step);
        self.compositions(m)
            .into_iter()
            .map(|c| c.into_iter().map(|x| EpsRational::exact(Rational::new(i64::from(x), step))).collect())
            .collect()
    }

    /// Number of S1 commitments with `m` signals over `blocks` information sets.
    pub fn size(&self, blocks: usize, m: usize) -> u128 {
        let per_row = binomial(u128::from(self.step) + m as u128 - 1, m as u128 - 1);
        per_row.checked_pow(blocks as u32).unwrap_or(u128::MAX)
    }

    /// Every grid commitment with `m` signals named `names`.
    pub fn commitments(&self, s: &Scenario, m: usize, names: &[String]) -> Result<Vec<Commitment1>> {
        let grid = Commitment1Grid::new(self, s, m, names.to_vec())?;
        Ok((0..grid.len()).map(|i| grid.get(i)).collect())
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Indexable product of per-row grids; index `i` is read in mixed radix
/// with the first information set as the most significant digit.
#[derive(Debug, Clone)]
pub struct Commitment1Grid {
    pub rows: Vec<Vec<EpsRational>>,
    pub blocks: usize,
    pub names: Vec<String>,
}

impl Commitment1Grid {
    pub fn new(config: &GridConfig, s: &Scenario, m: usize, names: Vec<String>) -> Result<Self> {
        let blocks = s.partition1().len();
        if config.step == 0 || m == 0 {
            return Err(Error::EmptyGrid(format!("step 1/{} with {m} signals", config.step)));
        }
        let points = config.size(blocks, m);
        if points > config.max_points {
            return Err(Error::GridTooLarge { points, limit: config.max_points });
        }
        Ok(Commitment1Grid { rows: config.rows(m), blocks, names })
    }

    pub fn len(&self) -> usize {
        self.rows.len().pow(self.blocks as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row index of each information set at grid point `i`.
    pub fn digits(&self, mut i: usize) -> Vec<usize> {
        let r = self.rows.len();
        let mut d = vec![0; self.blocks];
        for k in (0..self.blocks).rev() {
            d[k] = i % r;
            i /= r;
        }
        d
    }

    pub fn get(&self, i: usize) -> Commitment1 {
        let kernel = self.digits(i).into_iter().map(|d| self.rows[d].clone()).collect();
        Commitment1::new(self.names.clone(), kernel)
    }
}

/// The S1 commitments a universally quantified check ranges over.
#[derive(Debug, Clone, Default)]
pub struct Commitment1Search {
    pub grid: Option<GridConfig>,
    pub extra: Vec<Commitment1>,
}

/// Default S1 signal names: the first `m` information set names.
pub fn s1_signal_names(s: &Scenario, m: usize) -> Vec<String> {
    let p = s.partition1();
    (0..m).map(|j| if j < p.len() { p.name(j).to_string() } else { format!("w{}", j + 1) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn composition_counts() {
        let g = GridConfig::with_step(4);
        assert_eq!(g.compositions(2).len(), 5);
        assert_eq!(g.compositions(3).len(), 15);
        assert_eq!(g.compositions(2)[0], vec![4, 0]);
        assert_eq!(g.size(2, 2), 25);
        assert_eq!(GridConfig::default().size(3, 3), 1891u128.pow(3));
    }

    #[test]
    fn grid_is_indexable() {
        let s = fixtures::example_3_1();
        let g = GridConfig::with_step(3);
        let grid = Commitment1Grid::new(&g, &s, 2, s1_signal_names(&s, 2)).unwrap();
        assert_eq!(grid.len(), 16);
        let all = g.commitments(&s, 2, &grid.names).unwrap();
        assert_eq!(all.len(), 16);
        for c in &all {
            c.check(&s).unwrap();
        }
        assert!(matches!(
            Commitment1Grid::new(&GridConfig { step: 60, max_points: 10 }, &s, 2, vec![]),
            Err(Error::GridTooLarge { .. })
        ));
    }
}
