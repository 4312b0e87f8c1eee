//! Exact rationals and first-order infinitesimals.

mod eps;
mod rational;

pub use eps::{eps_compare, eps_limit, EpsRational};
pub use rational::{ParseRationalError, Rational};

/// Shorthand for `Rational::new(n, d)`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}
