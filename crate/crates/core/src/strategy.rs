//! Commitments of both senders, signal permutations and the permutation-free test.

use std::collections::BTreeMap;
use std::path::Path;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::signal_outcome;
use crate::grid::{Commitment1Search, GridConfig};
use crate::model::{Partition, Scenario};
use crate::numerics::{EpsRational, Rational};

/// S1's commitment: a signal distribution per S1 information set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Commitment1 {
    pub signals: Vec<String>,
    /// `kernel[block][signal]`
    pub kernel: Vec<Vec<EpsRational>>,
}

/// S2's commitment: a signal distribution per (S2 information set, S1 signal).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Commitment2 {
    pub signals: Vec<String>,
    /// `kernel[block][s1_signal][signal]`
    pub kernel: Vec<Vec<Vec<EpsRational>>>,
}

/// S2's signalling rule after one S1 signal: `rows[block][signal]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Response {
    pub rows: Vec<Vec<EpsRational>>,
}

impl Response {
    pub fn num_signals(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Every block sends signal 0.
    pub fn constant(blocks: usize, signals: usize) -> Response {
        let mut row = vec![EpsRational::zero(); signals];
        row[0] = EpsRational::one();
        Response { rows: vec![row; blocks] }
    }
}

fn check_row(row: &[EpsRational], what: &str) -> Result<()> {
    if row.iter().any(|p| p.is_negative()) {
        return Err(Error::InvalidCommitment(format!("{what} has a negative probability")));
    }
    let total: EpsRational = row.iter().sum();
    if total != EpsRational::one() {
        return Err(Error::InvalidCommitment(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

impl Commitment1 {
    pub fn new(signals: Vec<String>, kernel: Vec<Vec<EpsRational>>) -> Commitment1 {
        Commitment1 { signals, kernel }
    }

    /// One signal per information set, sent with certainty.
    pub fn truthful(s: &Scenario) -> Commitment1 {
        let p = s.partition1();
        let m = p.len();
        let kernel = (0..m)
            .map(|k| (0..m).map(|j| if j == k { EpsRational::one() } else { EpsRational::zero() }).collect())
            .collect();
        Commitment1 { signals: p.blocks.iter().map(|b| b.name.clone()).collect(), kernel }
    }

    /// A single signal sent regardless of information.
    pub fn silent(s: &Scenario) -> Commitment1 {
        Commitment1 { signals: vec!["silent".into()], kernel: vec![vec![EpsRational::one()]; s.partition1().len()] }
    }

    pub fn num_signals(&self) -> usize {
        self.signals.len()
    }

    pub fn signal_index(&self, name: &str) -> Option<usize> {
        self.signals.iter().position(|x| x == name)
    }

    /// Probabilities of signal `j` per information set.
    pub fn column(&self, j: usize) -> Vec<EpsRational> {
        self.kernel.iter().map(|row| row[j].clone()).collect()
    }

    pub fn check(&self, s: &Scenario) -> Result<()> {
        let p = s.partition1();
        if self.kernel.len() != p.len() {
            return Err(Error::InvalidCommitment(format!("S1 kernel has {} rows for {} information sets", self.kernel.len(), p.len())));
        }
        if self.signals.is_empty() || self.signals.len() > p.len() {
            return Err(Error::InvalidCommitment(format!("S1 uses {} signals; allowed 1 to {}", self.signals.len(), p.len())));
        }
        if !self.signals.iter().all_unique() {
            return Err(Error::InvalidCommitment("S1 signal names are not unique".into()));
        }
        for (k, row) in self.kernel.iter().enumerate() {
            if row.len() != self.signals.len() {
                return Err(Error::InvalidCommitment(format!("S1 row `{}` has the wrong length", p.name(k))));
            }
            check_row(row, &format!("S1 row `{}`", p.name(k)))?;
        }
        Ok(())
    }

    /// True when every signal has a zero-tilt probability.
    pub fn is_exact(&self) -> bool {
        self.kernel.iter().flatten().all(|p| p.is_exact())
    }

    /// Every information set of positive mass uses the same distribution.
    pub fn is_uninformative(&self, s: &Scenario) -> bool {
        let live: Vec<&Vec<EpsRational>> =
            (0..self.kernel.len()).filter(|&k| s.mass1(k).is_positive()).map(|k| &self.kernel[k]).collect();
        live.iter().all_equal()
    }

    /// Information sets of positive mass send distinct signals with certainty.
    pub fn is_truthful(&self, s: &Scenario) -> bool {
        reveals(&self.kernel, (0..self.kernel.len()).filter(|&k| s.mass1(k).is_positive()))
    }

    pub fn to_file(&self, s: &Scenario) -> Commitment1File {
        let p = s.partition1();
        let kernel = self
            .kernel
            .iter()
            .enumerate()
            .map(|(k, row)| {
                let entries = row
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(j, x)| (self.signals[j].clone(), x.clone()))
                    .collect();
                (p.name(k).to_string(), entries)
            })
            .collect();
        Commitment1File { signals: self.signals.clone(), kernel }
    }

    pub fn from_file(file: &Commitment1File, s: &Scenario) -> Result<Commitment1> {
        let p = s.partition1();
        let mut kernel = vec![vec![EpsRational::zero(); file.signals.len()]; p.len()];
        let mut seen = vec![false; p.len()];
        for (set, row) in &file.kernel {
            let k = lookup_block(p, s, set)?;
            seen[k] = true;
            for (sig, x) in row {
                let j = file
                    .signals
                    .iter()
                    .position(|w| w == sig)
                    .ok_or_else(|| Error::InvalidCommitment(format!("unknown S1 signal `{sig}`")))?;
                kernel[k][j] = x.clone();
            }
        }
        if let Some(k) = seen.iter().position(|x| !x) {
            return Err(Error::InvalidCommitment(format!("S1 kernel has no row for `{}`", p.name(k))));
        }
        let g = Commitment1 { signals: file.signals.clone(), kernel };
        g.check(s)?;
        Ok(g)
    }

    pub fn load(path: impl AsRef<Path>, s: &Scenario) -> Result<Commitment1> {
        let file: Commitment1File = read_json(path)?;
        Commitment1::from_file(&file, s)
    }
}

impl Commitment2 {
    /// The same response after every S1 signal.
    pub fn constant(response: &Response, signals: Vec<String>, s1_signals: usize) -> Commitment2 {
        let kernel = response.rows.iter().map(|row| vec![row.clone(); s1_signals]).collect();
        Commitment2 { signals, kernel }
    }

    /// Assembles per-S1-signal responses sharing one alphabet.
    pub fn from_responses(responses: &[Response], signals: Vec<String>) -> Commitment2 {
        let blocks = responses.first().map_or(0, |r| r.rows.len());
        let kernel = (0..blocks).map(|k| responses.iter().map(|r| r.rows[k].clone()).collect()).collect();
        Commitment2 { signals, kernel }
    }

    /// Each block sends its own name.
    pub fn truthful(s: &Scenario, s1_signals: usize) -> Commitment2 {
        let p = s.partition2();
        let m = p.len();
        let rows = (0..m)
            .map(|k| (0..m).map(|j| if j == k { EpsRational::one() } else { EpsRational::zero() }).collect())
            .collect();
        let signals = p.blocks.iter().map(|b| b.name.clone()).collect();
        Commitment2::constant(&Response { rows }, signals, s1_signals)
    }

    pub fn num_signals(&self) -> usize {
        self.signals.len()
    }

    pub fn num_s1_signals(&self) -> usize {
        self.kernel.first().map_or(0, |r| r.len())
    }

    pub fn signal_index(&self, name: &str) -> Option<usize> {
        self.signals.iter().position(|x| x == name)
    }

    /// S2's rule after S1 signal `w1`.
    pub fn response(&self, w1: usize) -> Response {
        Response { rows: self.kernel.iter().map(|r| r[w1].clone()).collect() }
    }

    pub fn responses(&self) -> Vec<Response> {
        (0..self.num_s1_signals()).map(|w| self.response(w)).collect()
    }

    /// Whether the rule ignores S1's signal.
    pub fn is_constant_in_s1_signal(&self) -> bool {
        self.kernel.iter().all(|r| r.iter().all_equal())
    }

    pub fn check(&self, s: &Scenario, g1: &Commitment1) -> Result<()> {
        let p = s.partition2();
        if self.kernel.len() != p.len() {
            return Err(Error::InvalidCommitment(format!("S2 kernel has {} rows for {} information sets", self.kernel.len(), p.len())));
        }
        if self.signals.is_empty() || self.signals.len() > s.num_states() {
            return Err(Error::InvalidCommitment(format!("S2 uses {} signals; allowed 1 to {}", self.signals.len(), s.num_states())));
        }
        if !self.signals.iter().all_unique() {
            return Err(Error::InvalidCommitment("S2 signal names are not unique".into()));
        }
        for (k, rows) in self.kernel.iter().enumerate() {
            if rows.len() != g1.num_signals() {
                return Err(Error::InvalidCommitment(format!(
                    "S2 block `{}` covers {} S1 signals, expected {}",
                    p.name(k),
                    rows.len(),
                    g1.num_signals()
                )));
            }
            for (w, row) in rows.iter().enumerate() {
                if row.len() != self.signals.len() {
                    return Err(Error::InvalidCommitment(format!("S2 row `{}`/`{}` has the wrong length", p.name(k), g1.signals[w])));
                }
                check_row(row, &format!("S2 row `{}`/`{}`", p.name(k), g1.signals[w]))?;
            }
        }
        Ok(())
    }

    /// After every S1 signal, S2's information sets of positive mass send
    /// distinct signals with certainty.
    pub fn is_truthful(&self, s: &Scenario) -> bool {
        let p2 = s.partition2();
        let live: Vec<usize> =
            (0..p2.len()).filter(|&k| p2.blocks[k].states.iter().any(|&t| s.prior()[t].is_positive())).collect();
        self.responses().iter().all(|r| reveals(&r.rows, live.iter().copied()))
    }

    pub fn to_file(&self, s: &Scenario, g1: &Commitment1) -> Commitment2File {
        let p = s.partition2();
        let kernel = self
            .kernel
            .iter()
            .enumerate()
            .map(|(k, rows)| {
                let by_w1 = rows
                    .iter()
                    .enumerate()
                    .map(|(w, row)| {
                        let entries = row
                            .iter()
                            .enumerate()
                            .filter(|(_, x)| !x.is_zero())
                            .map(|(j, x)| (self.signals[j].clone(), x.clone()))
                            .collect();
                        (g1.signals[w].clone(), entries)
                    })
                    .collect();
                (p.name(k).to_string(), by_w1)
            })
            .collect();
        Commitment2File { signals: self.signals.clone(), kernel }
    }

    pub fn from_file(file: &Commitment2File, s: &Scenario, g1: &Commitment1) -> Result<Commitment2> {
        let p = s.partition2();
        let n2 = file.signals.len();
        let mut kernel: Vec<Vec<Option<Vec<EpsRational>>>> = vec![vec![None; g1.num_signals()]; p.len()];
        for (set, by_w1) in &file.kernel {
            let k = lookup_block(p, s, set)?;
            for (w1, row) in by_w1 {
                let w = g1
                    .signal_index(w1)
                    .ok_or_else(|| Error::InvalidCommitment(format!("S2 kernel refers to unknown S1 signal `{w1}`")))?;
                let mut dense = vec![EpsRational::zero(); n2];
                for (sig, x) in row {
                    let j = file
                        .signals
                        .iter()
                        .position(|v| v == sig)
                        .ok_or_else(|| Error::InvalidCommitment(format!("unknown S2 signal `{sig}`")))?;
                    dense[j] = x.clone();
                }
                kernel[k][w] = Some(dense);
            }
        }
        let mut out = Vec::with_capacity(p.len());
        for (k, rows) in kernel.into_iter().enumerate() {
            let mut dense = Vec::with_capacity(rows.len());
            for (w, row) in rows.into_iter().enumerate() {
                dense.push(row.ok_or_else(|| {
                    Error::InvalidCommitment(format!("S2 kernel has no row for (`{}`, `{}`)", p.name(k), g1.signals[w]))
                })?);
            }
            out.push(dense);
        }
        let g = Commitment2 { signals: file.signals.clone(), kernel: out };
        g.check(s, g1)?;
        Ok(g)
    }

    pub fn load(path: impl AsRef<Path>, s: &Scenario, g1: &Commitment1) -> Result<Commitment2> {
        let file: Commitment2File = read_json(path)?;
        Commitment2::from_file(&file, s, g1)
    }
}

fn reveals(rows: &[Vec<EpsRational>], live: impl Iterator<Item = usize>) -> bool {
    let mut used = Vec::new();
    for k in live {
        let Some(j) = rows[k].iter().position(|x| x.is_one()) else { return false };
        if used.contains(&j) {
            return false;
        }
        used.push(j);
    }
    true
}

fn lookup_block(p: &Partition, s: &Scenario, key: &str) -> Result<usize> {
    if let Some(k) = p.index_of(key) {
        return Ok(k);
    }
    // also accept the joined state names
    let mut wanted: Vec<usize> = Vec::new();
    for name in key.split('+') {
        match s.state_index(name.trim()) {
            Some(i) => wanted.push(i),
            None => return Err(Error::InvalidCommitment(format!("unknown information set `{key}`"))),
        }
    }
    wanted.sort_unstable();
    p.blocks
        .iter()
        .position(|b| b.states == wanted)
        .ok_or_else(|| Error::InvalidCommitment(format!("unknown information set `{key}`")))
}

fn read_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Commitment1File {
    pub signals: Vec<String>,
    pub kernel: BTreeMap<String, BTreeMap<String, EpsRational>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Commitment2File {
    pub signals: Vec<String>,
    pub kernel: BTreeMap<String, BTreeMap<String, BTreeMap<String, EpsRational>>>,
}

/// Relabels S1's signals: probability mass on signal `i` moves to `perm[i]`.
pub fn permute_signals(g1: &Commitment1, perm: &[usize]) -> Result<Commitment1> {
    let m = g1.num_signals();
    if perm.len() != m || !perm.iter().all_unique() || perm.iter().any(|&j| j >= m) {
        return Err(Error::NotBijective(m));
    }
    let kernel = g1
        .kernel
        .iter()
        .map(|row| {
            let mut out = vec![EpsRational::zero(); m];
            for (i, x) in row.iter().enumerate() {
                out[perm[i]] = x.clone();
            }
            out
        })
        .collect();
    Ok(Commitment1 { signals: g1.signals.clone(), kernel })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationWitness {
    pub permutation: Vec<usize>,
    pub s1_commitment: Commitment1Summary,
    pub gain: Rational,
}

/// Compact view of a commitment used inside reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Commitment1Summary {
    pub signals: Vec<String>,
    pub kernel: Vec<Vec<EpsRational>>,
}

impl From<&Commitment1> for Commitment1Summary {
    fn from(g: &Commitment1) -> Self {
        Commitment1Summary { signals: g.signals.clone(), kernel: g.kernel.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationCheck {
    pub permutation_free: bool,
    pub witness: Option<PermutationWitness>,
    pub grid: Option<GridConfig>,
    pub candidates_checked: usize,
}

/// S2's limit utility for each S1 signal slot under each response.
fn s2_by_slot(s: &Scenario, g1: &Commitment1, g2: &Commitment2) -> Vec<Vec<Rational>> {
    let responses = g2.responses();
    (0..g1.num_signals())
        .map(|j| {
            let col = g1.column(j);
            responses.iter().map(|r| signal_outcome(s, &col, r).s2).collect()
        })
        .collect()
}

/// Searches for an S1 commitment and a relabeling of its signals that
/// strictly raises S2's expected utility under `g2`.
pub fn is_permutation_free(s: &Scenario, g2: &Commitment2, g1_set: &Commitment1Search) -> Result<PermutationCheck> {
    let m = g2.num_s1_signals();
    let mut checked = 0usize;
    let mut best: Option<PermutationWitness> = None;
    let mut consider = |g1: &Commitment1| {
        checked += 1;
        if m < 2 || g1.num_signals() != m {
            return;
        }
        let table = s2_by_slot(s, g1, g2);
        let base: Rational = (0..m).map(|j| &table[j][j]).sum();
        for perm in (0..m).permutations(m) {
            let v: Rational = (0..m).map(|j| &table[j][perm[j]]).sum();
            let gain = &v - &base;
            if gain.is_positive() && best.as_ref().is_none_or(|w| gain > w.gain) {
                best = Some(PermutationWitness { permutation: perm.clone(), s1_commitment: g1.into(), gain });
            }
        }
    };
    for g1 in &g1_set.extra {
        consider(g1);
    }
    if let Some(grid) = &g1_set.grid {
        let names: Vec<String> = (0..m).map(|j| format!("w{}", j + 1)).collect();
        for g1 in grid.commitments(s, m, &names)? {
            consider(&g1);
        }
    }
    Ok(PermutationCheck { permutation_free: best.is_none(), witness: best, grid: g1_set.grid.clone(), candidates_checked: checked })
}
