//! Exact linear programming over rationals.
//!
//! Dense two-phase tableau simplex. Entering columns follow the largest
//! reduced cost; after a run of degenerate pivots the rule switches to
//! Bland's smallest-index choice, which cannot cycle.

use crate::numerics::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize objective·x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<(usize, Rational)>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, objective: Vec::new(), constraints: Vec::new() }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.num_vars));
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn with_objective(mut self, objective: Vec<(usize, Rational)>) -> Self {
        self.objective = objective;
        self
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

const DEGENERATE_LIMIT: usize = 8;

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    n_struct: usize,
    n_cols: usize,
    artificial_from: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let m = lp.constraints.len();
        let mut n_slack = 0;
        let mut n_art = 0;
        let mut norm = Vec::with_capacity(m);
        for c in &lp.constraints {
            let flip = c.rhs.is_negative();
            let rel = match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            match rel {
                Relation::Le => n_slack += 1,
                Relation::Ge => {
                    n_slack += 1;
                    n_art += 1
                }
                Relation::Eq => n_art += 1,
            }
            norm.push((flip, rel));
        }
        let artificial_from = n + n_slack;
        let n_cols = artificial_from + n_art;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut s, mut a) = (n, artificial_from);
        for (c, (flip, rel)) in lp.constraints.iter().zip(norm) {
            let mut row = vec![Rational::zero(); n_cols];
            for (j, v) in &c.coeffs {
                let v = if flip { -v } else { v.clone() };
                row[*j] = &row[*j] + &v;
            }
            rhs.push(if flip { -&c.rhs } else { c.rhs.clone() });
            match rel {
                Relation::Le => {
                    row[s] = Rational::one();
                    basis.push(s);
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = Rational::from_integer(-1);
                    s += 1;
                    row[a] = Rational::one();
                    basis.push(a);
                    a += 1;
                }
                Relation::Eq => {
                    row[a] = Rational::one();
                    basis.push(a);
                    a += 1;
                }
            }
            rows.push(row);
        }
        Tableau { rows, rhs, basis, n_struct: n, n_cols, artificial_from }
    }

    fn pivot(&mut self, r: usize, e: usize, cost: &mut [Rational], value: &mut Rational) {
        let p = self.rows[r][e].recip();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &p;
                }
            }
            self.rhs[r] = &self.rhs[r] * &p;
        }
        let prow = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..self.n_cols).filter(|&j| !prow[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][e].clone();
            if f.is_zero() {
                continue;
            }
            for &j in &nz {
                let d = &f * &prow[j];
                self.rows[i][j] = &self.rows[i][j] - &d;
            }
            let d = &f * &self.rhs[r];
            self.rhs[i] = &self.rhs[i] - &d;
        }
        let f = cost[e].clone();
        if !f.is_zero() {
            for &j in &nz {
                let d = &f * &prow[j];
                cost[j] = &cost[j] - &d;
            }
            *value = &*value + &(&f * &self.rhs[r]);
        }
        self.rows[r] = prow;
        self.basis[r] = e;
    }

    /// Maximizes with the given reduced costs over columns `< limit`.
    /// Returns false when unbounded.
    fn optimize(&mut self, cost: &mut [Rational], value: &mut Rational, limit: usize) -> bool {
        let mut degenerate = 0usize;
        loop {
            let bland = degenerate >= DEGENERATE_LIMIT;
            let mut enter = None;
            for j in 0..limit {
                if cost[j].is_positive() {
                    match enter {
                        None => enter = Some(j),
                        Some(k) if !bland && cost[j] > cost[k] => enter = Some(j),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some(e) = enter else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else { return false };
            if ratio.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, e, cost, value);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let n_cols = self.n_cols;
        if self.artificial_from < n_cols {
            let mut cost = vec![Rational::zero(); n_cols];
            let mut value = Rational::zero();
            for (i, &b) in self.basis.iter().enumerate() {
                if b >= self.artificial_from {
                    for j in 0..n_cols {
                        if !self.rows[i][j].is_zero() {
                            cost[j] = &cost[j] + &self.rows[i][j];
                        }
                    }
                    value = &value - &self.rhs[i];
                }
            }
            for c in cost.iter_mut().skip(self.artificial_from) {
                *c = &*c - &Rational::one();
            }
            self.optimize(&mut cost, &mut value, n_cols);
            if value.is_negative() {
                return LpOutcome::Infeasible;
            }
            // drive artificial variables out of the basis
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.artificial_from {
                    match (0..self.artificial_from).find(|&j| !self.rows[i][j].is_zero()) {
                        Some(j) => {
                            let mut dummy = vec![Rational::zero(); n_cols];
                            let mut dv = Rational::zero();
                            self.pivot(i, j, &mut dummy, &mut dv);
                            i += 1;
                        }
                        None => {
                            self.rows.remove(i);
                            self.rhs.remove(i);
                            self.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }
        let limit = self.artificial_from;
        let mut c = vec![Rational::zero(); n_cols];
        for (j, v) in &lp.objective {
            c[*j] = &c[*j] + v;
        }
        let mut cost = c.clone();
        let mut value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            if c[b].is_zero() {
                continue;
            }
            for j in 0..n_cols {
                if !self.rows[i][j].is_zero() {
                    cost[j] = &cost[j] - &(&c[b] * &self.rows[i][j]);
                }
            }
            value = &value + &(&c[b] * &self.rhs[i]);
        }
        if !self.optimize(&mut cost, &mut value, limit) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); self.n_struct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.rhs[i].clone();
            }
        }
        LpOutcome::Optimal(LpSolution { value, x })
    }
}
