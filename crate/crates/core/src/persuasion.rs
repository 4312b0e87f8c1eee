//! S2's best response to a fixed interim belief.
//!
//! S2 recommends actions. Weak obedience gives a linear program whose optimum
//! bounds what S2 can get; the optimum is then realized by a strategy with
//! ε-tilted probabilities so that the receiver breaks every tie the right way.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{column_weights, weighted_outcome, UtilityTriple};
use crate::lp::{Constraint, LinearProgram, LpSolution, Relation};
use crate::model::Scenario;
use crate::numerics::{EpsRational, Rational};
use crate::receiver::{best_response_masses, Belief};
use crate::strategy::{Commitment1, Commitment2, Response};

/// Distribution over S1's information sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfoSetDistribution {
    pub weights: Vec<Rational>,
}

/// Belief after S1's signal `w1` and its aggregation by S1's partition.
pub fn interim_belief(s: &Scenario, g1: &Commitment1, w1: &str) -> Result<(Belief, InfoSetDistribution)> {
    let j = g1.signal_index(w1).ok_or_else(|| Error::ZeroProbabilitySignal(w1.to_string()))?;
    let weights = column_weights(s, &g1.column(j));
    let belief = Belief::from_masses(&weights).ok_or_else(|| Error::ZeroProbabilitySignal(w1.to_string()))?;
    let p1 = s.partition1();
    let mut agg = vec![Rational::zero(); p1.len()];
    for (t, b) in belief.probabilities.iter().enumerate() {
        agg[p1.block_of(t)] += b.limit().clone();
    }
    Ok((belief, InfoSetDistribution { weights: agg }))
}

/// Which S2-optimal strategy to pick when they differ for S1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum S1TieBreak {
    FavorS1,
    FavorS2,
}

/// S2's optimal strategies at one interim belief.
#[derive(Debug, Clone, Serialize)]
pub struct BestResponseSet {
    pub s2_value: Rational,
    pub s1_value_min: Rational,
    pub s1_value_max: Rational,
    /// The S1-best and S1-worst optimal strategies, in that order. Signals
    /// are indexed like states: signal `a` recommends action `a`.
    pub strategies: Vec<Response>,
    /// Limit utilities of each listed strategy at the given masses.
    pub values: Vec<UtilityTriple>,
    pub face: Face,
}

impl BestResponseSet {
    pub fn select(&self, t: S1TieBreak) -> (&Response, &UtilityTriple) {
        let i = match t {
            S1TieBreak::FavorS1 => 0,
            S1TieBreak::FavorS2 => 1,
        };
        (&self.strategies[i], &self.values[i])
    }

    /// Whether both optimizer faces are the same set, decided by mutual
    /// containment of their closures.
    pub fn same_face(&self, other: &BestResponseSet) -> bool {
        let (a, b) = (&self.face, &other.face);
        if a.blocks != b.blocks || a.actions != b.actions {
            return false;
        }
        let covered = |p: &Face, q: &Face| p.pieces.iter().all(|pp| q.pieces.iter().any(|qq| contains(p.num_vars, pp, qq)));
        covered(a, b) && covered(b, a)
    }
}

/// Closure of the optimal set: a union of polytopes over `x[block][action]`.
#[derive(Debug, Clone, Serialize)]
pub struct Face {
    pub blocks: Vec<usize>,
    pub actions: Vec<usize>,
    /// Actions that may be recommended in each piece.
    pub supports: Vec<Vec<usize>>,
    #[serde(skip)]
    num_vars: usize,
    #[serde(skip)]
    pieces: Vec<Vec<Constraint>>,
}

/// Whether polytope `p` lies inside polytope `q`.
fn contains(num_vars: usize, p: &[Constraint], q: &[Constraint]) -> bool {
    let over = |obj: Vec<(usize, Rational)>| {
        let lp = LinearProgram { num_vars, objective: obj, constraints: p.to_vec() };
        lp.solve().optimal().map(|s| s.value)
    };
    q.iter().all(|c| {
        let neg: Vec<(usize, Rational)> = c.coeffs.iter().map(|(j, v)| (*j, -v)).collect();
        let upper_ok = || over(c.coeffs.clone()).is_some_and(|v| v <= c.rhs);
        let lower_ok = || over(neg.clone()).is_some_and(|v| -v >= c.rhs);
        match c.relation {
            Relation::Le => upper_ok(),
            Relation::Ge => lower_ok(),
            Relation::Eq => upper_ok() && lower_ok(),
        }
    })
}

struct Problem<'a> {
    s: &'a Scenario,
    m: Vec<Rational>,
    blocks: Vec<usize>,
    actions: Vec<usize>,
    block_pos: Vec<Option<usize>>,
    s1_obj: Vec<(usize, Rational)>,
    s2_obj: Vec<(usize, Rational)>,
    r_obj: Vec<(usize, Rational)>,
}

type Coeffs = Vec<(usize, Rational)>;

impl<'a> Problem<'a> {
    fn new(s: &'a Scenario, m: Vec<Rational>) -> Self {
        let p2 = s.partition2();
        let actions: Vec<usize> = (0..m.len()).filter(|&t| m[t].is_positive()).collect();
        let mut blocks: Vec<usize> = actions.iter().map(|&t| p2.block_of(t)).collect();
        blocks.sort_unstable();
        blocks.dedup();
        let mut block_pos = vec![None; p2.len()];
        for (i, &k) in blocks.iter().enumerate() {
            block_pos[k] = Some(i);
        }
        let mut pr = Problem { s, m, blocks, actions, block_pos, s1_obj: Vec::new(), s2_obj: Vec::new(), r_obj: Vec::new() };
        pr.s1_obj = pr.objective(|t, a| s.u1(t, a));
        pr.s2_obj = pr.objective(|t, a| s.u2(t, a));
        pr.r_obj = (0..pr.na()).map(|ai| {
            let a = pr.actions[ai];
            let m: Vec<Rational> = pr.actions.iter().map(|&t| &pr.m[t] * &s.ur(t, a)).collect();
            pr.actions.iter().zip(m).map(|(&t, v)| (pr.var(pr.pos_of_state(t), ai), v)).filter(|(_, v)| !v.is_zero()).collect::<Vec<_>>()
        }).flatten().collect();
        pr.r_obj = merge(std::mem::take(&mut pr.r_obj));
        pr
    }

    fn na(&self) -> usize {
        self.actions.len()
    }

    fn num_vars(&self) -> usize {
        self.blocks.len() * self.na()
    }

    fn var(&self, bi: usize, ai: usize) -> usize {
        bi * self.na() + ai
    }

    fn pos_of_state(&self, t: usize) -> usize {
        self.block_pos[self.s.partition2().block_of(t)].expect("active state lies in an active block")
    }

    fn objective(&self, u: impl Fn(usize, usize) -> &'a Rational) -> Coeffs {
        let mut out = Vec::new();
        for (ai, &a) in self.actions.iter().enumerate() {
            for &t in &self.actions {
                let v = &self.m[t] * u(t, a);
                if !v.is_zero() {
                    out.push((self.var(self.pos_of_state(t), ai), v));
                }
            }
        }
        merge(out)
    }

    /// `mass(a | signal a) − mass(b | signal a)`.
    fn obedience(&self, ai: usize, bi: usize) -> Coeffs {
        let a = self.actions[ai];
        let b = self.actions[bi];
        merge(vec![(self.var(self.pos_of_state(a), ai), self.m[a].clone()), (self.var(self.pos_of_state(b), ai), -&self.m[b])])
    }

    /// Total mass of signal `ai`.
    fn usage(&self, ai: usize) -> Coeffs {
        merge(self.actions.iter().map(|&t| (self.var(self.pos_of_state(t), ai), self.m[t].clone())).collect())
    }

    /// Whether the receiver, indifferent between `a` and `b`, is sure to pick `a`.
    fn surely_beats(&self, a: usize, b: usize) -> bool {
        let s = self.s;
        let all = |f: &dyn Fn(usize) -> bool| self.actions.iter().all(|&t| f(t));
        if all(&|t| s.u1(t, a) > s.u1(t, b)) {
            return true;
        }
        if !all(&|t| s.u1(t, a) == s.u1(t, b)) {
            return false;
        }
        if all(&|t| s.u2(t, a) > s.u2(t, b)) {
            return true;
        }
        all(&|t| s.u2(t, a) == s.u2(t, b)) && a < b
    }

    /// `c(a) − c(b)` after signal `ai`, where `c` is a sender's conditional utility.
    fn gap(&self, ai: usize, bj: usize, u: impl Fn(usize, usize) -> &'a Rational) -> Coeffs {
        let (a, b) = (self.actions[ai], self.actions[bj]);
        merge(self.actions.iter().map(|&t| (self.var(self.pos_of_state(t), ai), &self.m[t] * &(u(t, a) - u(t, b)))).collect())
    }

    /// Rows the receiver compares, in order, when deciding between `ai` and
    /// `bj` after signal `ai`.
    fn chain(&self, ai: usize, bj: usize) -> [Coeffs; 3] {
        let s = self.s;
        [self.obedience(ai, bj), self.gap(ai, bj, |t, a| s.u1(t, a)), self.gap(ai, bj, |t, a| s.u2(t, a))]
    }

    /// First row of the chain that is not identically zero.
    fn lead(&self, ai: usize, bj: usize) -> Option<Coeffs> {
        self.chain(ai, bj).into_iter().find(|row| !row.is_empty())
    }

    /// Simplex rows, zero outside `support`, weak obedience inside.
    fn base(&self, support: &[bool]) -> LinearProgram {
        let mut lp = LinearProgram::new(self.num_vars());
        for bi in 0..self.blocks.len() {
            lp.add((0..self.na()).map(|ai| (self.var(bi, ai), Rational::one())).collect(), Relation::Eq, Rational::one());
            for ai in 0..self.na() {
                if !support[ai] {
                    lp.add(vec![(self.var(bi, ai), Rational::one())], Relation::Eq, Rational::zero());
                }
            }
        }
        for ai in (0..self.na()).filter(|&ai| support[ai]) {
            for bj in (0..self.na()).filter(|&bj| bj != ai) {
                match self.lead(ai, bj) {
                    Some(row) => lp.add(row, Relation::Ge, Rational::zero()),
                    None if ai > bj => lp.add(self.usage(ai), Relation::Eq, Rational::zero()),
                    None => {}
                }
            }
        }
        lp
    }

    fn value(coeffs: &Coeffs, x: &[Rational]) -> Rational {
        coeffs.iter().map(|(j, v)| v * &x[*j]).sum()
    }

    /// Extremes of S1's value over `{x in base : S2 value ≥ v}`.
    fn s1_extremes(&self, base: &LinearProgram, v: &Rational) -> (LpSolution, LpSolution) {
        let mut lp = base.clone();
        lp.add(self.s2_obj.clone(), Relation::Ge, v.clone());
        let hi = lp.clone().with_objective(self.s1_obj.clone()).solve().optimal().expect("optimal face is non-empty");
        let neg = self.s1_obj.iter().map(|(j, c)| (*j, -c)).collect();
        let mut lo = lp.with_objective(neg).solve().optimal().expect("optimal face is non-empty");
        lo.value = -lo.value;
        (hi, lo)
    }

    /// Best point for the receiver among those where S2 gets `v` and S1 gets
    /// `sol.value`.
    fn receiver_best(&self, base: &LinearProgram, v: &Rational, sol: &LpSolution) -> Option<LpSolution> {
        let mut lp = base.clone();
        lp.add(self.s2_obj.clone(), Relation::Ge, v.clone());
        lp.add(self.s1_obj.clone(), Relation::Eq, sol.value.clone());
        let mut best = lp.with_objective(self.r_obj.clone()).solve().optimal()?;
        best.value = sol.value.clone();
        Some(best)
    }

    fn face_piece(&self, support: &[bool], v: &Rational) -> Vec<Constraint> {
        let mut lp = self.base(support);
        lp.add(self.s2_obj.clone(), Relation::Ge, v.clone());
        lp.constraints
    }

    fn response(&self, x: &[Rational], d: &[Rational]) -> Response {
        let s = self.s;
        let n = s.num_states();
        let rows = (0..s.partition2().len())
            .map(|k| match self.block_pos[k] {
                Some(bi) => {
                    let mut row = vec![EpsRational::zero(); n];
                    for ai in 0..self.na() {
                        let j = self.var(bi, ai);
                        row[self.actions[ai]] = EpsRational::new(x[j].clone(), d[j].clone());
                    }
                    row
                }
                None => default_row(s, k),
            })
            .collect();
        Response { rows }
    }

    fn evaluate(&self, r: &Response) -> UtilityTriple {
        let weights: Vec<EpsRational> = self.m.iter().cloned().map(EpsRational::exact).collect();
        weighted_outcome(self.s, &weights, r)
    }

    /// Finds a tilt direction making every tight obedience row that the
    /// receiver's tie-break could lose strict.
    fn realize(&self, x: &[Rational]) -> Option<Response> {
        let na = self.na();
        let nb = self.blocks.len();
        let used: Vec<bool> = (0..na).map(|ai| (0..nb).any(|bi| x[self.var(bi, ai)].is_positive())).collect();
        let mut strict = Vec::new();
        let mut weak = Vec::new();
        for ai in (0..na).filter(|&ai| used[ai]) {
            for bj in (0..na).filter(|&bj| bj != ai) {
                let chain = self.chain(ai, bj);
                let k = chain.iter().position(|row| !Self::value(row, x).is_zero());
                let favored = match k {
                    Some(k) => Self::value(&chain[k], x).is_positive(),
                    None => ai < bj,
                };
                let mut tied = chain.into_iter().take(k.unwrap_or(3)).filter(|row| !row.is_empty());
                if favored {
                    weak.extend(tied);
                } else {
                    strict.push(tied.next()?);
                }
            }
        }
        let nv = self.num_vars();
        if strict.is_empty() {
            return Some(self.response(x, &vec![Rational::zero(); nv]));
        }
        // d = d⁺ − d⁻, variables 2j and 2j+1
        let mut lp = LinearProgram::new(2 * nv);
        let split = |coeffs: &Coeffs| -> Coeffs {
            coeffs.iter().flat_map(|(j, v)| [(2 * j, v.clone()), (2 * j + 1, -v)]).collect()
        };
        for bi in 0..nb {
            let row: Coeffs = (0..na).filter(|&ai| used[ai]).map(|ai| (self.var(bi, ai), Rational::one())).collect();
            lp.add(split(&row), Relation::Eq, Rational::zero());
            for ai in 0..na {
                let j = self.var(bi, ai);
                if !used[ai] {
                    lp.add(vec![(2 * j, Rational::one())], Relation::Eq, Rational::zero());
                    lp.add(vec![(2 * j + 1, Rational::one())], Relation::Eq, Rational::zero());
                } else if x[j].is_zero() {
                    lp.add(vec![(2 * j + 1, Rational::one())], Relation::Eq, Rational::zero());
                }
            }
        }
        for row in &strict {
            lp.add(split(row), Relation::Ge, Rational::one());
        }
        for row in &weak {
            lp.add(split(row), Relation::Ge, Rational::zero());
        }
        lp.objective = (0..2 * nv).map(|j| (j, -Rational::one())).collect();
        let sol = lp.solve().optimal()?;
        let d: Vec<Rational> = (0..nv).map(|j| &sol.x[2 * j] - &sol.x[2 * j + 1]).collect();
        Some(self.response(x, &d))
    }

    /// Largest slack `t` by which signals in `support` can all be used and
    /// strictly obeyed.
    fn interior(&self, support: &[bool]) -> Option<Vec<Rational>> {
        let nv = self.num_vars();
        let t = nv;
        let mut lp = LinearProgram::new(nv + 1);
        let with_t = |mut c: Coeffs| {
            c.push((t, -Rational::one()));
            c
        };
        for bi in 0..self.blocks.len() {
            lp.add((0..self.na()).map(|ai| (self.var(bi, ai), Rational::one())).collect(), Relation::Eq, Rational::one());
            for ai in (0..self.na()).filter(|&ai| !support[ai]) {
                lp.add(vec![(self.var(bi, ai), Rational::one())], Relation::Eq, Rational::zero());
            }
        }
        for ai in (0..self.na()).filter(|&ai| support[ai]) {
            lp.add(with_t(self.usage(ai)), Relation::Ge, Rational::zero());
            for bj in (0..self.na()).filter(|&bj| bj != ai) {
                let surely = self.surely_beats(self.actions[ai], self.actions[bj]);
                match self.lead(ai, bj) {
                    Some(row) if surely => lp.add(row, Relation::Ge, Rational::zero()),
                    Some(row) => lp.add(with_t(row), Relation::Ge, Rational::zero()),
                    None if ai > bj => return None,
                    None => {}
                }
            }
        }
        lp.add(vec![(t, Rational::one())], Relation::Le, Rational::one());
        lp.objective = vec![(t, Rational::one())];
        let sol = lp.solve().optimal()?;
        sol.x[t].is_positive().then(|| sol.x[..nv].to_vec())
    }

    fn solve(&self) -> BestResponseSet {
        let na = self.na();
        let all = vec![true; na];
        let base = self.base(&all);
        let top = base.clone().with_objective(self.s2_obj.clone()).solve().optimal().expect("constant recommendation is feasible");
        let v = top.value;
        let (hi, lo) = self.s1_extremes(&base, &v);
        let realized = [&hi, &lo].map(|sol| {
            let refined = self.receiver_best(&base, &v, sol);
            let found = [refined.as_ref(), Some(sol)].into_iter().flatten().find_map(|sol| {
                let r = self.realize(&sol.x)?;
                let u = self.evaluate(&r);
                (u.s2 == v && u.s1 == sol.value).then_some((r, u))
            });
            found
        });
        if let [Some(a), Some(b)] = realized {
            let face = Face {
                blocks: self.blocks.clone(),
                actions: self.actions.clone(),
                supports: vec![self.actions.clone()],
                num_vars: self.num_vars(),
                pieces: vec![self.face_piece(&all, &v)],
            };
            return self.finish(v, [a, b], face);
        }
        self.solve_by_supports()
    }

    fn finish(&self, v: Rational, picked: [(Response, UtilityTriple); 2], face: Face) -> BestResponseSet {
        let [(r_hi, u_hi), (r_lo, u_lo)] = picked;
        BestResponseSet {
            s2_value: v,
            s1_value_min: u_lo.s1.clone(),
            s1_value_max: u_hi.s1.clone(),
            strategies: vec![r_hi, r_lo],
            values: vec![u_hi, u_lo],
            face,
        }
    }

    /// Union over maximal strictly obedient supports.
    fn solve_by_supports(&self) -> BestResponseSet {
        let na = self.na();
        let mut masks: Vec<u32> = (1..(1u32 << na)).collect();
        masks.sort_by_key(|&m| (std::cmp::Reverse(m.count_ones()), m));
        let mut pieces: Vec<(u32, Vec<Rational>)> = Vec::new();
        for mask in masks {
            if pieces.iter().any(|(p, _)| mask & p == mask) {
                continue;
            }
            let support: Vec<bool> = (0..na).map(|ai| mask >> ai & 1 == 1).collect();
            if let Some(x) = self.interior(&support) {
                pieces.push((mask, x));
            }
        }
        let bits = |mask: u32| -> Vec<bool> { (0..na).map(|ai| mask >> ai & 1 == 1).collect() };
        let mut scored = Vec::new();
        for (mask, inner) in &pieces {
            let base = self.base(&bits(*mask));
            let top = base.clone().with_objective(self.s2_obj.clone()).solve().optimal().expect("interior point is feasible");
            scored.push((*mask, inner, base, top.value));
        }
        let Some(v) = scored.iter().map(|p| p.3.clone()).max() else {
            return self.exact_constant();
        };
        let mut best: Option<(Response, UtilityTriple)> = None;
        let mut worst: Option<(Response, UtilityTriple)> = None;
        let mut supports = Vec::new();
        let mut face_pieces = Vec::new();
        for (mask, inner, base, value) in &scored {
            if *value != v {
                continue;
            }
            supports.push(bits(*mask).iter().enumerate().filter(|(_, b)| **b).map(|(ai, _)| self.actions[ai]).collect());
            face_pieces.push(self.face_piece(&bits(*mask), &v));
            let (hi, lo) = self.s1_extremes(base, &v);
            for (sol, slot, better) in [(&hi, &mut best, true), (&lo, &mut worst, false)] {
                let sol = &self.receiver_best(base, &v, sol).unwrap_or_else(|| sol.clone());
                let d: Vec<Rational> = inner.iter().zip(&sol.x).map(|(a, b)| a - b).collect();
                let r = self.response(&sol.x, &d);
                let u = self.evaluate(&r);
                debug_assert_eq!(u.s2, v);
                let replace = match slot {
                    None => true,
                    Some((_, cur)) => {
                        (better && u.s1 > cur.s1) || (!better && u.s1 < cur.s1) || (u.s1 == cur.s1 && u.receiver > cur.receiver)
                    }
                };
                if replace {
                    *slot = Some((r, u));
                }
            }
        }
        let face = Face {
            blocks: self.blocks.clone(),
            actions: self.actions.clone(),
            supports,
            num_vars: self.num_vars(),
            pieces: face_pieces,
        };
        self.finish(v, [best.expect("a piece attains v"), worst.expect("a piece attains v")], face)
    }

    /// Last resort: recommend nothing and let the receiver's exact tie-break decide.
    fn exact_constant(&self) -> BestResponseSet {
        let weights: Vec<EpsRational> = self.m.iter().cloned().map(EpsRational::exact).collect();
        let a = best_response_masses(self.s, &weights);
        let ai = self.actions.iter().position(|&t| t == a).expect("chosen action has mass");
        let mut x = vec![Rational::zero(); self.num_vars()];
        for bi in 0..self.blocks.len() {
            x[self.var(bi, ai)] = Rational::one();
        }
        let r = self.response(&x, &vec![Rational::zero(); self.num_vars()]);
        let u = self.evaluate(&r);
        let mut support = vec![false; self.na()];
        support[ai] = true;
        let face = Face {
            blocks: self.blocks.clone(),
            actions: self.actions.clone(),
            supports: vec![vec![a]],
            num_vars: self.num_vars(),
            pieces: vec![self.face_piece(&support, &u.s2)],
        };
        self.finish(u.s2.clone(), [(r.clone(), u.clone()), (r, u)], face)
    }
}

fn merge(mut v: Coeffs) -> Coeffs {
    v.sort_by_key(|(j, _)| *j);
    let mut out: Coeffs = Vec::with_capacity(v.len());
    for (j, c) in v {
        match out.last_mut() {
            Some((k, acc)) if *k == j => *acc += c,
            _ => out.push((j, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// Row used for S2 information sets the interim belief rules out: recommend
/// the set's first state.
fn default_row(s: &Scenario, block: usize) -> Vec<EpsRational> {
    let mut row = vec![EpsRational::zero(); s.num_states()];
    row[s.partition2().blocks[block].states[0]] = EpsRational::one();
    row
}

/// S2's best response to unnormalized interim masses over states.
pub fn s2_best_response_masses(s: &Scenario, masses: &[Rational]) -> BestResponseSet {
    Problem::new(s, masses.to_vec()).solve()
}

pub fn s2_best_response(s: &Scenario, interim: &Belief) -> BestResponseSet {
    let m: Vec<Rational> = interim.probabilities.iter().map(|p| p.limit().clone()).collect();
    s2_best_response_masses(s, &m)
}

/// Signal names of S2's recommendation alphabet.
pub fn s2_signal_names(s: &Scenario) -> Vec<String> {
    s.states().to_vec()
}

/// The response S2 uses after S1 signals of zero probability.
pub fn default_response(s: &Scenario) -> Response {
    Response { rows: (0..s.partition2().len()).map(|k| default_row(s, k)).collect() }
}

/// S2's best response to every S1 signal of `g1`.
pub fn s2_full_best_response(s: &Scenario, g1: &Commitment1, tiebreak: S1TieBreak) -> Commitment2 {
    let responses: Vec<Response> = (0..g1.num_signals())
        .map(|j| {
            let m: Vec<Rational> = column_weights(s, &g1.column(j)).iter().map(|w| w.limit().clone()).collect();
            if m.iter().all(|x| x.is_zero()) {
                return default_response(s);
            }
            s2_best_response_masses(s, &m).select(tiebreak).0.clone()
        })
        .collect();
    Commitment2::from_responses(&responses, s2_signal_names(s))
}
