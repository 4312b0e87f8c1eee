#![allow(dead_code)]

pub mod props;

use std::collections::BTreeMap;

use persuasion::game::UtilityTriple;
use persuasion::model::{Scenario, ScenarioFile};
use persuasion::numerics::{EpsRational, Rational};
use persuasion::strategy::{Commitment1, Commitment2};
use proptest::prelude::*;

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn ri(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// State names of a `rows x cols` grid; S1 sees the row, S2 the column.
pub fn grid_states(rows: usize, cols: usize) -> Vec<String> {
    let rn = ["T", "M", "B"];
    let cn = ["L", "C", "R"];
    let mut out = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            out.push(format!("{}{}", rn[i], cn[j]));
        }
    }
    out
}

/// Raw description of a grid scenario before validation.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub prior: Vec<i64>,
    /// `u[t][a]`; action-only specs repeat the same row for every state.
    pub u1: Vec<Vec<i64>>,
    pub u2: Vec<Vec<i64>>,
    pub action_only: bool,
}

impl GridSpec {
    pub fn file(&self) -> ScenarioFile {
        let states = grid_states(self.rows, self.cols);
        let n = states.len();
        let total: i64 = self.prior.iter().sum();
        let prior = states.iter().cloned().zip(self.prior.iter().map(|&p| r(p, total))).collect();
        let partition1 = (0..self.rows).map(|i| states[i * self.cols..(i + 1) * self.cols].to_vec()).collect();
        let partition2 = (0..self.cols).map(|j| (0..self.rows).map(|i| states[i * self.cols + j].clone()).collect()).collect();
        let util = |u: &Vec<Vec<i64>>| -> BTreeMap<String, Rational> {
            if self.action_only {
                (0..n).map(|a| (states[a].clone(), ri(u[0][a]))).collect()
            } else {
                let mut m = BTreeMap::new();
                for t in 0..n {
                    for a in 0..n {
                        m.insert(format!("{}|{}", states[t], states[a]), ri(u[t][a]));
                    }
                }
                m
            }
        };
        let (utility_s1, utility_s2) = (util(&self.u1), util(&self.u2));
        ScenarioFile {
            states,
            prior,
            partition1,
            partition2,
            utility_s1,
            utility_s2,
            ..Default::default()
        }
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::from_file(self.file()).expect("grid scenario is valid")
    }
}

fn utility_rows(n: usize, action_only: bool) -> BoxedStrategy<Vec<Vec<i64>>> {
    if action_only {
        prop::collection::vec(-2i64..=5, n).prop_map(move |row| vec![row; n]).boxed()
    } else {
        prop::collection::vec(prop::collection::vec(-2i64..=5, n), n).boxed()
    }
}

/// Grid scenarios with positive priors and random utilities.
pub fn arb_grid(rows: usize, cols: usize, aligned: bool) -> impl Strategy<Value = GridSpec> {
    let n = rows * cols;
    any::<bool>().prop_flat_map(move |action_only| {
        (prop::collection::vec(1i64..=9, n), utility_rows(n, action_only), utility_rows(n, action_only)).prop_map(
            move |(prior, u1, u2)| {
                let u2 = if aligned { u1.clone() } else { u2 };
                GridSpec { rows, cols, prior, u1, u2, action_only }
            },
        )
    })
}

pub fn arb_small_grid() -> impl Strategy<Value = GridSpec> {
    prop_oneof![arb_grid(2, 2, false), arb_grid(2, 3, false), arb_grid(3, 2, false)]
}

fn normalized(w: &[i64]) -> Vec<EpsRational> {
    let total: i64 = w.iter().sum();
    w.iter().map(|&x| EpsRational::exact(r(x, total))).collect()
}

fn arb_row(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..=4, len).prop_filter("row needs mass", |w| w.iter().any(|&x| x > 0))
}

/// A random exact commitment pair with `m1` and `m2` signals.
pub fn arb_pair(spec: &GridSpec, m1: usize, m2: usize) -> impl Strategy<Value = (Commitment1, Commitment2)> {
    let (rows, cols) = (spec.rows, spec.cols);
    (prop::collection::vec(arb_row(m1), rows), prop::collection::vec(prop::collection::vec(arb_row(m2), m1), cols)).prop_map(
        move |(k1, k2)| {
            let g1 = Commitment1::new((0..m1).map(|j| format!("w{j}")).collect(), k1.iter().map(|w| normalized(w)).collect());
            let g2 = Commitment2 {
                signals: (0..m2).map(|j| format!("v{j}")).collect(),
                kernel: k2.iter().map(|per| per.iter().map(|w| normalized(w)).collect()).collect(),
            };
            (g1, g2)
        },
    )
}

pub fn arb_scenario_with_pair() -> impl Strategy<Value = (GridSpec, Commitment1, Commitment2)> {
    (arb_small_grid(), 1usize..=3, 1usize..=3)
        .prop_flat_map(|(spec, m1, m2)| (Just(spec.clone()), arb_pair(&spec, m1, m2)))
        .prop_map(|(spec, (g1, g2))| (spec, g1, g2))
}

/// Joint mass of each state with `(w1, w2)`, straight from the definitions.
pub fn bayes_masses(s: &Scenario, g1: &Commitment1, g2: &Commitment2, w1: usize, w2: usize) -> Vec<EpsRational> {
    let (p1, p2) = (s.partition1(), s.partition2());
    let mut out = Vec::new();
    for t in 0..s.num_states() {
        let p = EpsRational::exact(s.prior()[t].clone());
        let mut m = p * g1.kernel[p1.block_of(t)][w1].clone();
        m = m * g2.kernel[p2.block_of(t)][w1][w2].clone();
        out.push(m);
    }
    out
}

/// Receiver's choice by exhaustive comparison of the key
/// (mass, S1 conditional utility, S2 conditional utility, earlier state).
pub fn oracle_action(s: &Scenario, masses: &[EpsRational]) -> usize {
    let n = s.num_states();
    let key = |a: usize| {
        let mut c1 = EpsRational::zero();
        let mut c2 = EpsRational::zero();
        for t in 0..n {
            c1 = c1 + masses[t].scale(s.u1(t, a));
            c2 = c2 + masses[t].scale(s.u2(t, a));
        }
        (masses[a].clone(), c1, c2, std::cmp::Reverse(a))
    };
    let mut best = 0;
    let mut best_key = key(0);
    for a in 1..n {
        let k = key(a);
        if k > best_key {
            best = a;
            best_key = k;
        }
    }
    best
}

/// Expected limit utilities by enumerating states and signal pairs.
pub fn oracle_utilities(s: &Scenario, g1: &Commitment1, g2: &Commitment2) -> UtilityTriple {
    let mut u = UtilityTriple::default();
    for w1 in 0..g1.num_signals() {
        for w2 in 0..g2.num_signals() {
            let m = bayes_masses(s, g1, g2, w1, w2);
            let total = m.iter().fold(EpsRational::zero(), |a, b| a + b.clone());
            if !total.is_positive() {
                continue;
            }
            let a = oracle_action(s, &m);
            for (t, mt) in m.iter().enumerate() {
                let p = mt.limit();
                u.s1 = &u.s1 + &(p * s.u1(t, a));
                u.s2 = &u.s2 + &(p * s.u2(t, a));
            }
            u.receiver = &u.receiver + m[a].limit();
        }
    }
    u
}
