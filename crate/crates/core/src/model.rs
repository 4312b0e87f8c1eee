//! Scenarios: states, prior, the two information partitions and sender utilities.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Rational;

/// Scenario as written in a file. Nothing is checked on deserialization;
/// see [`validate_scenario`] and [`Scenario::from_file`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub states: Vec<String>,
    pub prior: BTreeMap<String, Rational>,
    pub partition1: Vec<Vec<String>>,
    pub partition2: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub info_set_names: Option<InfoSetNames>,
    pub utility_s1: BTreeMap<String, Rational>,
    pub utility_s2: BTreeMap<String, Rational>,
    #[serde(default)]
    pub belief_dependent_tiebreak: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reference: Vec<ReferenceOutcome>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InfoSetNames {
    #[serde(default)]
    pub partition1: Vec<String>,
    #[serde(default)]
    pub partition2: Vec<String>,
}

/// Externally reported utilities that computed results are compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceOutcome {
    pub label: String,
    pub order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s1: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s2: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionId {
    Malformed,
    Prior,
    Partition,
    Assumption1,
    Assumption2,
    Assumption3,
    Assumption4,
    Utility,
}

impl fmt::Display for AssumptionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AssumptionId::Malformed => "malformed input",
            AssumptionId::Prior => "prior",
            AssumptionId::Partition => "partition",
            AssumptionId::Assumption1 => "Assumption 1 (partial information)",
            AssumptionId::Assumption2 => "Assumption 2 (distinct partitions)",
            AssumptionId::Assumption3 => "Assumption 3 (no refinement)",
            AssumptionId::Assumption4 => "Assumption 4 (joint revelation)",
            AssumptionId::Utility => "utility",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub assumption: AssumptionId,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn has(&self, id: AssumptionId) -> bool {
        self.violations.iter().any(|v| v.assumption == id)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", v.assumption, v.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub name: String,
    pub states: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Block>,
    block_of: Vec<usize>,
}

impl Partition {
    fn new(blocks: Vec<Block>, n_states: usize) -> Self {
        let mut block_of = vec![0; n_states];
        for (k, b) in blocks.iter().enumerate() {
            for &s in &b.states {
                block_of[s] = k;
            }
        }
        Partition { blocks, block_of }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Index of the block containing `state`.
    pub fn block_of(&self, state: usize) -> usize {
        self.block_of[state]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.name == name)
    }

    pub fn name(&self, block: usize) -> &str {
        &self.blocks[block].name
    }
}

/// A validated scenario. Actions are indexed like states.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: Option<String>,
    states: Vec<String>,
    prior: Vec<Rational>,
    partition1: Partition,
    partition2: Partition,
    u1: Vec<Vec<Rational>>,
    u2: Vec<Vec<Rational>>,
    action_only: bool,
    belief_dependent_tiebreak: bool,
    reference: Vec<ReferenceOutcome>,
    file: ScenarioFile,
}

impl Scenario {
    pub fn from_file(file: ScenarioFile) -> Result<Scenario> {
        let report = validate_scenario(&file);
        if !report.valid {
            return Err(Error::InvalidScenario(report));
        }
        Ok(build(file))
    }

    pub fn from_json(text: &str) -> Result<Scenario> {
        Scenario::from_file(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scenario> {
        Scenario::from_file(ScenarioFile::load(path)?)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|x| x == name)
    }

    pub fn prior(&self) -> &[Rational] {
        &self.prior
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.states.len()).filter(|&s| self.prior[s].is_positive())
    }

    pub fn partition1(&self) -> &Partition {
        &self.partition1
    }

    pub fn partition2(&self) -> &Partition {
        &self.partition2
    }

    /// S1's utility when the state is `state` and the receiver plays the action of `action`.
    pub fn u1(&self, state: usize, action: usize) -> &Rational {
        &self.u1[state][action]
    }

    pub fn u2(&self, state: usize, action: usize) -> &Rational {
        &self.u2[state][action]
    }

    /// Receiver utility: one when the action matches the state.
    pub fn ur(&self, state: usize, action: usize) -> Rational {
        if state == action {
            Rational::one()
        } else {
            Rational::zero()
        }
    }

    /// Diagonal utility `U(θ, a_θ)`.
    pub fn u1_diag(&self, s: usize) -> &Rational {
        &self.u1[s][s]
    }

    pub fn u2_diag(&self, s: usize) -> &Rational {
        &self.u2[s][s]
    }

    /// Utilities depend on the action only (over supported states).
    pub fn action_only(&self) -> bool {
        self.action_only
    }

    pub fn belief_dependent_tiebreak(&self) -> bool {
        self.belief_dependent_tiebreak
    }

    pub fn reference(&self) -> &[ReferenceOutcome] {
        &self.reference
    }

    pub fn file(&self) -> &ScenarioFile {
        &self.file
    }

    /// Prior mass of an S1 information set.
    pub fn mass1(&self, block: usize) -> Rational {
        self.partition1.blocks[block].states.iter().map(|&s| &self.prior[s]).sum()
    }
}

impl ScenarioFile {
    pub fn load(path: impl AsRef<Path>) -> Result<ScenarioFile> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Action-only utilities given as vectors aligned with `states`.
    pub fn action_only(
        states: &[&str],
        prior: &[Rational],
        partition1: &[&[&str]],
        partition2: &[&[&str]],
        u1: &[Rational],
        u2: &[Rational],
    ) -> ScenarioFile {
        let names: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let zip = |v: &[Rational]| names.iter().cloned().zip(v.iter().cloned()).collect();
        let part = |p: &[&[&str]]| p.iter().map(|b| b.iter().map(|s| s.to_string()).collect()).collect();
        ScenarioFile {
            states: names.clone(),
            prior: zip(prior),
            partition1: part(partition1),
            partition2: part(partition2),
            utility_s1: zip(u1),
            utility_s2: zip(u2),
            ..Default::default()
        }
    }

    /// Applies a renaming to every state reference.
    pub fn renamed(&self, f: impl Fn(&str) -> String) -> ScenarioFile {
        let key = |k: &str| match k.split_once('|') {
            Some((s, a)) => format!("{}|{}", f(s), f(a)),
            None => f(k),
        };
        ScenarioFile {
            name: self.name.clone(),
            states: self.states.iter().map(|s| f(s)).collect(),
            prior: self.prior.iter().map(|(k, v)| (f(k), v.clone())).collect(),
            partition1: self.partition1.iter().map(|b| b.iter().map(|s| f(s)).collect()).collect(),
            partition2: self.partition2.iter().map(|b| b.iter().map(|s| f(s)).collect()).collect(),
            info_set_names: self.info_set_names.clone(),
            utility_s1: self.utility_s1.iter().map(|(k, v)| (key(k), v.clone())).collect(),
            utility_s2: self.utility_s2.iter().map(|(k, v)| (key(k), v.clone())).collect(),
            belief_dependent_tiebreak: self.belief_dependent_tiebreak,
            reference: self.reference.clone(),
        }
    }
}

/// Checks structure, prior, partitions, utilities and the four information
/// assumptions. Never panics on malformed input.
pub fn validate_scenario(file: &ScenarioFile) -> ValidationReport {
    let mut v = Vec::new();
    let mut push = |assumption, detail: String| v.push(Violation { assumption, detail });
    let n = file.states.len();
    if n == 0 {
        push(AssumptionId::Malformed, "state list is empty".into());
    }
    let index: HashMap<&str, usize> = file.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    if index.len() != n {
        push(AssumptionId::Malformed, "state names are not unique".into());
    }
    for s in &file.states {
        if s.contains('|') {
            push(AssumptionId::Malformed, format!("state name `{s}` contains `|`"));
        }
    }

    // prior
    let mut prior = vec![Rational::zero(); n];
    for (k, p) in &file.prior {
        match index.get(k.as_str()) {
            Some(&i) => prior[i] = p.clone(),
            None => push(AssumptionId::Malformed, format!("prior names unknown state `{k}`")),
        }
        if p.is_negative() {
            push(AssumptionId::Prior, format!("prior of `{k}` is negative"));
        }
    }
    for s in &file.states {
        if !file.prior.contains_key(s) {
            push(AssumptionId::Malformed, format!("prior has no entry for `{s}`"));
        }
    }
    let total: Rational = file.prior.values().sum();
    if !total.is_one() {
        push(AssumptionId::Prior, format!("prior sums to {total}, not 1"));
    }
    let support: BTreeSet<usize> = (0..n).filter(|&i| prior[i].is_positive()).collect();

    // partitions
    let mut parts: Vec<Option<Vec<BTreeSet<usize>>>> = Vec::new();
    for (label, blocks) in [("partition1", &file.partition1), ("partition2", &file.partition2)] {
        let mut seen = vec![0usize; n];
        let mut ok = true;
        let mut sets = Vec::new();
        for b in blocks {
            if b.is_empty() {
                push(AssumptionId::Partition, format!("{label} has an empty block"));
                ok = false;
            }
            let mut set = BTreeSet::new();
            for s in b {
                match index.get(s.as_str()) {
                    Some(&i) => {
                        seen[i] += 1;
                        set.insert(i);
                    }
                    None => {
                        push(AssumptionId::Partition, format!("{label} names unknown state `{s}`"));
                        ok = false;
                    }
                }
            }
            sets.push(set);
        }
        for (i, c) in seen.iter().enumerate() {
            if *c == 0 {
                push(AssumptionId::Partition, format!("{label} does not cover `{}`", file.states[i]));
                ok = false;
            } else if *c > 1 {
                push(AssumptionId::Partition, format!("{label} lists `{}` more than once", file.states[i]));
                ok = false;
            }
        }
        parts.push(ok.then_some(sets));
    }
    if let Some(names) = &file.info_set_names {
        for (label, names, blocks) in [
            ("partition1", &names.partition1, &file.partition1),
            ("partition2", &names.partition2, &file.partition2),
        ] {
            if !names.is_empty() && names.len() != blocks.len() {
                push(AssumptionId::Malformed, format!("{label} has {} blocks but {} names", blocks.len(), names.len()));
            }
            let unique: BTreeSet<&String> = names.iter().collect();
            if unique.len() != names.len() {
                push(AssumptionId::Malformed, format!("{label} block names are not unique"));
            }
        }
    }

    if let (Some(Some(p1)), Some(Some(p2))) = (parts.first(), parts.get(1)) {
        if n > 0 {
            if p1.len() >= n {
                push(AssumptionId::Assumption1, format!("partition1 has {} blocks for {n} states", p1.len()));
            }
            if p2.len() >= n {
                push(AssumptionId::Assumption1, format!("partition2 has {} blocks for {n} states", p2.len()));
            }
        }
        let a: BTreeSet<&BTreeSet<usize>> = p1.iter().collect();
        let b: BTreeSet<&BTreeSet<usize>> = p2.iter().collect();
        if a == b {
            push(AssumptionId::Assumption2, "partition1 equals partition2".into());
        } else {
            let refines = |x: &[BTreeSet<usize>], y: &[BTreeSet<usize>]| x.iter().all(|bx| y.iter().any(|by| bx.is_subset(by)));
            if refines(p1, p2) {
                push(AssumptionId::Assumption3, "partition1 refines partition2".into());
            }
            if refines(p2, p1) {
                push(AssumptionId::Assumption3, "partition2 refines partition1".into());
            }
        }
        let find = |p: &[BTreeSet<usize>], s: usize| p.iter().find(|b| b.contains(&s)).cloned().unwrap_or_default();
        for &s in &support {
            let f1 = find(p1, s);
            let f2 = find(p2, s);
            let meet: Vec<usize> = f1.intersection(&f2).filter(|x| support.contains(x)).copied().collect();
            if meet != [s] {
                let names: Vec<&str> = meet.iter().map(|&i| file.states[i].as_str()).collect();
                push(
                    AssumptionId::Assumption4,
                    format!("the information sets of `{}` meet in {{{}}} on the support", file.states[s], names.join(", ")),
                );
            }
        }
    }

    for (label, map) in [("utility_s1", &file.utility_s1), ("utility_s2", &file.utility_s2)] {
        match parse_utility(map, &index, n) {
            Ok((table, given)) => {
                let _ = table;
                for &s in &support {
                    for &a in &support {
                        if !given[s][a] {
                            push(
                                AssumptionId::Utility,
                                format!("{label} has no value for state `{}`, action `{}`", file.states[s], file.states[a]),
                            );
                        }
                    }
                }
            }
            Err(msg) => push(AssumptionId::Malformed, format!("{label}: {msg}")),
        }
    }

    ValidationReport { valid: v.is_empty(), violations: v }
}

type UtilityParse = (Vec<Vec<Rational>>, Vec<Vec<bool>>);

fn parse_utility(map: &BTreeMap<String, Rational>, index: &HashMap<&str, usize>, n: usize) -> Result<UtilityParse, String> {
    let mut table = vec![vec![Rational::zero(); n]; n];
    let mut given = vec![vec![false; n]; n];
    let state_dependent = map.keys().any(|k| k.contains('|'));
    for (k, v) in map {
        if state_dependent {
            let (s, a) = k.split_once('|').ok_or_else(|| format!("key `{k}` mixes action-only and state|action forms"))?;
            let s = *index.get(s).ok_or_else(|| format!("unknown state `{s}`"))?;
            let a = *index.get(a).ok_or_else(|| format!("unknown action `{a}`"))?;
            table[s][a] = v.clone();
            given[s][a] = true;
        } else {
            let a = *index.get(k.as_str()).ok_or_else(|| format!("unknown action `{k}`"))?;
            for s in 0..n {
                table[s][a] = v.clone();
                given[s][a] = true;
            }
        }
    }
    Ok((table, given))
}

fn build(file: ScenarioFile) -> Scenario {
    let n = file.states.len();
    let index: HashMap<&str, usize> = file.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let prior: Vec<Rational> = file.states.iter().map(|s| file.prior[s].clone()).collect();
    let names = file.info_set_names.clone().unwrap_or_default();
    let part = |blocks: &Vec<Vec<String>>, names: &Vec<String>| {
        let bs = blocks
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let mut states: Vec<usize> = b.iter().map(|s| index[s.as_str()]).collect();
                states.sort_unstable();
                let name = names.get(k).cloned().unwrap_or_else(|| b.join("+"));
                Block { name, states }
            })
            .collect();
        Partition::new(bs, n)
    };
    let partition1 = part(&file.partition1, &names.partition1);
    let partition2 = part(&file.partition2, &names.partition2);
    let (u1, _) = parse_utility(&file.utility_s1, &index, n).expect("validated");
    let (u2, _) = parse_utility(&file.utility_s2, &index, n).expect("validated");
    let support: Vec<usize> = (0..n).filter(|&s| prior[s].is_positive()).collect();
    let const_in_state = |u: &Vec<Vec<Rational>>| (0..n).all(|a| support.windows(2).all(|w| u[w[0]][a] == u[w[1]][a]));
    let action_only = const_in_state(&u1) && const_in_state(&u2);
    Scenario {
        name: file.name.clone(),
        states: file.states.clone(),
        prior,
        partition1,
        partition2,
        u1,
        u2,
        action_only,
        belief_dependent_tiebreak: file.belief_dependent_tiebreak,
        reference: file.reference.clone(),
        file,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn ex31() -> ScenarioFile {
        ScenarioFile::action_only(
            &["TL", "TR", "BL", "BR"],
            &[ratio(1, 10), ratio(2, 10), ratio(4, 10), ratio(3, 10)],
            &[&["TL", "TR"], &["BL", "BR"]],
            &[&["TL", "BL"], &["TR", "BR"]],
            &[r(1), r(2), r(0), r(0)],
            &[r(0), r(2), r(0), r(3)],
        )
    }

    #[test]
    fn worked_example_is_valid() {
        let rep = validate_scenario(&ex31());
        assert!(rep.valid, "{rep}");
        let s = Scenario::from_file(ex31()).unwrap();
        assert_eq!(s.partition1().name(0), "TL+TR");
        assert!(s.action_only());
    }

    #[test]
    fn singleton_partition_breaks_assumption_one() {
        let mut f = ex31();
        f.partition1 = f.states.iter().map(|s| vec![s.clone()]).collect();
        let rep = validate_scenario(&f);
        assert!(rep.has(AssumptionId::Assumption1));
    }

    #[test]
    fn refinement_breaks_assumption_three() {
        // partition1 splits one block of partition2 and keeps the other
        let f = ScenarioFile::action_only(
            &["a", "b", "c", "d"],
            &[ratio(1, 4), ratio(1, 4), ratio(1, 4), ratio(1, 4)],
            &[&["a"], &["b"], &["c", "d"]],
            &[&["a", "b"], &["c", "d"]],
            &[r(0), r(0), r(0), r(0)],
            &[r(0), r(0), r(0), r(0)],
        );
        let rep = validate_scenario(&f);
        assert!(rep.has(AssumptionId::Assumption3), "{rep}");
    }

    #[test]
    fn malformed_inputs_are_reported() {
        let mut f = ex31();
        f.states.clear();
        assert!(validate_scenario(&f).has(AssumptionId::Malformed));
        let mut f = ex31();
        f.prior.insert("XX".into(), r(0));
        assert!(validate_scenario(&f).has(AssumptionId::Malformed));
        let mut f = ex31();
        f.prior.insert("TL".into(), ratio(2, 10));
        assert!(validate_scenario(&f).has(AssumptionId::Prior));
        let mut f = ex31();
        f.utility_s1.remove("BR");
        assert!(validate_scenario(&f).has(AssumptionId::Utility));
    }

    #[test]
    fn equal_partitions_break_assumption_two() {
        let mut f = ex31();
        f.partition2 = f.partition1.clone();
        assert!(validate_scenario(&f).has(AssumptionId::Assumption2));
    }

    #[test]
    fn joint_revelation_ignores_zero_prior_states() {
        let mut f = ScenarioFile::action_only(
            &["a", "b", "c", "d", "z"],
            &[ratio(1, 4), ratio(1, 4), ratio(1, 4), ratio(1, 4), r(0)],
            &[&["a", "b", "z"], &["c", "d"]],
            &[&["a", "c", "z"], &["b", "d"]],
            &[r(0), r(0), r(0), r(0), r(0)],
            &[r(0), r(0), r(0), r(0), r(0)],
        );
        assert!(validate_scenario(&f).valid);
        f.prior.insert("z".into(), ratio(1, 8));
        f.prior.insert("a".into(), ratio(1, 8));
        assert!(validate_scenario(&f).has(AssumptionId::Assumption4));
    }

    #[test]
    fn state_dependent_utilities() {
        let mut f = ex31();
        f.utility_s1 = BTreeMap::new();
        for s in &f.states {
            for a in &f.states {
                f.utility_s1.insert(format!("{s}|{a}"), if s == a { r(1) } else { r(0) });
            }
        }
        let s = Scenario::from_file(f).unwrap();
        assert!(!s.action_only());
        assert_eq!(*s.u1(1, 1), r(1));
        assert_eq!(*s.u1(1, 2), r(0));
    }
}
