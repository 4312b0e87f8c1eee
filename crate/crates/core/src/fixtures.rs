//! Bundled scenarios and commitment pairs, compiled in from `fixtures/`.

use crate::model::{Scenario, ScenarioFile};
use crate::strategy::{Commitment1, Commitment1File, Commitment2, Commitment2File};

macro_rules! fixture {
    ($path:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/", $path))
    };
}

/// `(name, scenario json)` for every bundled scenario, including invalid ones.
pub const SCENARIOS: &[(&str, &str)] = &[
    ("example_3_1", fixture!("example_3_1.json")),
    ("example_4_1", fixture!("example_4_1.json")),
    ("appendix_a", fixture!("appendix_a.json")),
    ("silence", fixture!("silence.json")),
    ("aligned_senders", fixture!("aligned_senders.json")),
    ("bad_partition", fixture!("bad_partition.json")),
];

/// `(scenario, label, g1 json, g2 json)` for every bundled commitment pair.
pub const PAIRS: &[(&str, &str, &str, &str)] = &[
    (
        "example_3_1",
        "s1_first",
        fixture!("commitments/example_3_1/s1_first.g1.json"),
        fixture!("commitments/example_3_1/s1_first.g2.json"),
    ),
    (
        "example_3_1",
        "s2_first",
        fixture!("commitments/example_3_1/s2_first.g1.json"),
        fixture!("commitments/example_3_1/s2_first.g2.json"),
    ),
    (
        "example_3_1",
        "simultaneous",
        fixture!("commitments/example_3_1/simultaneous.g1.json"),
        fixture!("commitments/example_3_1/simultaneous.g2.json"),
    ),
    (
        "example_4_1",
        "s1_first",
        fixture!("commitments/example_4_1/s1_first.g1.json"),
        fixture!("commitments/example_4_1/s1_first.g2.json"),
    ),
    (
        "example_4_1",
        "s2_first",
        fixture!("commitments/example_4_1/s2_first.g1.json"),
        fixture!("commitments/example_4_1/s2_first.g2.json"),
    ),
    (
        "appendix_a",
        "s2_first",
        fixture!("commitments/appendix_a/s2_first.g1.json"),
        fixture!("commitments/appendix_a/s2_first.g2.json"),
    ),
    (
        "appendix_a",
        "constant",
        fixture!("commitments/appendix_a/constant.g1.json"),
        fixture!("commitments/appendix_a/constant.g2.json"),
    ),
    (
        "silence",
        "s1_first",
        fixture!("commitments/silence/s1_first.g1.json"),
        fixture!("commitments/silence/s1_first.g2.json"),
    ),
    (
        "silence",
        "s2_first",
        fixture!("commitments/silence/s2_first.g1.json"),
        fixture!("commitments/silence/s2_first.g2.json"),
    ),
];

pub fn scenario_file(name: &str) -> Option<ScenarioFile> {
    let (_, text) = SCENARIOS.iter().find(|(n, _)| *n == name)?;
    Some(serde_json::from_str(text).expect("bundled scenario parses"))
}

/// A bundled valid scenario. Panics on an unknown or invalid name.
pub fn scenario(name: &str) -> Scenario {
    Scenario::from_file(scenario_file(name).unwrap_or_else(|| panic!("no fixture `{name}`"))).expect("bundled scenario is valid")
}

/// A bundled commitment pair. Panics when missing.
pub fn pair(name: &str, label: &str) -> (Commitment1, Commitment2) {
    let s = scenario(name);
    let (_, _, a, b) = PAIRS
        .iter()
        .find(|(n, l, _, _)| *n == name && *l == label)
        .unwrap_or_else(|| panic!("no pair `{name}/{label}`"));
    let f1: Commitment1File = serde_json::from_str(a).expect("bundled commitment parses");
    let g1 = Commitment1::from_file(&f1, &s).expect("bundled commitment is valid");
    let f2: Commitment2File = serde_json::from_str(b).expect("bundled commitment parses");
    let g2 = Commitment2::from_file(&f2, &s, &g1).expect("bundled commitment is valid");
    (g1, g2)
}

pub fn example_3_1() -> Scenario {
    scenario("example_3_1")
}

pub fn example_4_1() -> Scenario {
    scenario("example_4_1")
}

pub fn appendix_a() -> Scenario {
    scenario("appendix_a")
}

pub fn silence() -> Scenario {
    scenario("silence")
}

pub fn aligned_senders() -> Scenario {
    scenario("aligned_senders")
}

pub fn example_3_1_s1_first() -> (Commitment1, Commitment2) {
    pair("example_3_1", "s1_first")
}

pub fn example_3_1_s2_first() -> (Commitment1, Commitment2) {
    pair("example_3_1", "s2_first")
}
