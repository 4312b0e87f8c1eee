//! Exact solver and condition auditor for two-sender sequential persuasion
//! games in which each sender sees only part of the state.

pub mod conditions;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod grid;
pub mod lp;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod persuasion;
pub mod receiver;
pub mod strategy;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/receiver.md")]
    mod receiver {}
    #[doc = include_str!("../../../book/src/late_sender.md")]
    mod late_sender {}
    #[doc = include_str!("../../../book/src/equilibria.md")]
    mod equilibria {}
    #[doc = include_str!("../../../book/src/conditions.md")]
    mod conditions {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
