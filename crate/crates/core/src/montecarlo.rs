//! Sampling estimate of expected utilities.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::model::Scenario;
use crate::numerics::Rational;
use crate::receiver::{best_response_masses, joint_masses};
use crate::strategy::{Commitment1, Commitment2};

/// Episodes per random stream.
const BATCH: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimTriple {
    pub s1: f64,
    pub s2: f64,
    pub receiver: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimEstimate {
    pub mean: SimTriple,
    pub std_error: SimTriple,
    pub samples: u64,
    pub seed: u64,
}

fn sampler(weights: impl Iterator<Item = f64>) -> Option<WeightedIndex<f64>> {
    WeightedIndex::new(weights).ok()
}

/// Samples `n` plays of the game with both commitments fixed. The receiver's
/// action after each signal pair is the exact one; ε-tilts only affect ties.
pub fn simulate(s: &Scenario, g1: &Commitment1, g2: &Commitment2, n: u64, seed: u64) -> SimEstimate {
    let ns = s.num_states();
    let (m1, m2) = (g1.num_signals(), g2.num_signals());
    let (p1, p2) = (s.partition1(), s.partition2());
    let prior = sampler(s.prior().iter().map(Rational::to_f64)).expect("prior has positive mass");
    let rows1: Vec<Option<WeightedIndex<f64>>> =
        g1.kernel.iter().map(|row| sampler(row.iter().map(|x| x.limit().to_f64()))).collect();
    let rows2: Vec<Vec<Option<WeightedIndex<f64>>>> = g2
        .kernel
        .iter()
        .map(|per| per.iter().map(|row| sampler(row.iter().map(|x| x.limit().to_f64()))).collect())
        .collect();
    let actions: Vec<Vec<usize>> = (0..m1)
        .map(|w1| (0..m2).map(|w2| best_response_masses(s, &joint_masses(s, g1, g2, w1, w2))).collect())
        .collect();

    let batches = n.div_ceil(BATCH);
    let counts = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let mut counts = vec![0u64; ns * ns];
            let len = BATCH.min(n - b * BATCH);
            for _ in 0..len {
                let t = prior.sample(&mut rng);
                let w1 = rows1[p1.block_of(t)].as_ref().expect("S1 row is a distribution").sample(&mut rng);
                let w2 = rows2[p2.block_of(t)][w1].as_ref().expect("S2 row is a distribution").sample(&mut rng);
                counts[t * ns + actions[w1][w2]] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; ns * ns],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let stats = |u: &dyn Fn(usize, usize) -> f64| {
        let (mut sum, mut sq) = (0.0, 0.0);
        for t in 0..ns {
            for a in 0..ns {
                let c = counts[t * ns + a] as f64;
                if c > 0.0 {
                    let v = u(t, a);
                    sum += c * v;
                    sq += c * v * v;
                }
            }
        }
        let k = n as f64;
        let mean = sum / k;
        let var = if n > 1 { ((sq - k * mean * mean) / (k - 1.0)).max(0.0) } else { 0.0 };
        (mean, (var / k).sqrt())
    };
    let (m_1, e_1) = stats(&|t, a| s.u1(t, a).to_f64());
    let (m_2, e_2) = stats(&|t, a| s.u2(t, a).to_f64());
    let (m_r, e_r) = stats(&|t, a| s.ur(t, a).to_f64());
    SimEstimate {
        mean: SimTriple { s1: m_1, s2: m_2, receiver: m_r },
        std_error: SimTriple { s1: e_1, s2: e_2, receiver: e_r },
        samples: n,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::expected_utilities;

    #[test]
    fn same_seed_same_estimate() {
        let s = fixtures::example_3_1();
        let (g1, g2) = (Commitment1::truthful(&s), Commitment2::truthful(&s, s.partition1().len()));
        assert_eq!(simulate(&s, &g1, &g2, 50_000, 7), simulate(&s, &g1, &g2, 50_000, 7));
    }

    #[test]
    fn thread_count_does_not_change_estimate() {
        let s = fixtures::example_3_1();
        let (g1, g2) = (Commitment1::truthful(&s), Commitment2::truthful(&s, s.partition1().len()));
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| simulate(&s, &g1, &g2, 100_000, 3));
        assert_eq!(a, simulate(&s, &g1, &g2, 100_000, 3));
    }

    #[test]
    fn close_to_exact() {
        let s = fixtures::example_3_1();
        let (g1, g2) = (Commitment1::truthful(&s), Commitment2::truthful(&s, s.partition1().len()));
        let exact = expected_utilities(&s, &g1, &g2);
        let e = simulate(&s, &g1, &g2, 200_000, 11);
        assert!((e.mean.s1 - exact.s1.to_f64()).abs() <= 4.0 * e.std_error.s1 + 1e-12);
        assert!((e.mean.s2 - exact.s2.to_f64()).abs() <= 4.0 * e.std_error.s2 + 1e-12);
    }
}
