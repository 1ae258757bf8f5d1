//! Seeded, schedule-independent random streams.
//!
//! A stream is identified by a master seed plus a `(purpose, trial)` pair. Two
//! streams with the same identity produce the same draws on every platform,
//! no matter which thread creates them or in which order.

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Identity of a stream: what it is used for, and which trial it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub purpose: &'static str,
    pub trial: u64,
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    id: StreamId,
    inner: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, purpose: &'static str, trial: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&trial.to_le_bytes());
        key[16..24].copy_from_slice(&fnv1a(purpose.as_bytes()).to_le_bytes());
        Self {
            seed,
            id: StreamId { purpose, trial },
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    /// Stream for ad-hoc use, e.g. tests and single CLI runs.
    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, "default", 0)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn id(&self) -> StreamId {
        self.id
    }

    /// Sibling stream under the same master seed.
    pub fn derive(&self, purpose: &'static str, trial: u64) -> Self {
        Self::new(self.seed, purpose, trial)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Uniform random permutation. Costs no comparisons.
pub fn shuffle<T>(items: &mut [T], rng: &mut RandomStream) {
    items.shuffle(rng);
}

/// Uniformly random `k`-subset of `0..m`, in sampling order.
pub fn sample_without_replacement(m: usize, k: usize, rng: &mut RandomStream) -> Result<Vec<usize>> {
    if k > m {
        return Err(Error::SampleTooLarge { k, m });
    }
    Ok(rand::seq::index::sample(rng, m, k).into_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::collections::HashMap;

    #[test]
    fn same_identity_same_draws() {
        let mut a = RandomStream::new(7, "bench", 3);
        let mut b = RandomStream::new(7, "bench", 3);
        let xs: Vec<u64> = (0..16).map(|_| a.gen()).collect();
        let ys: Vec<u64> = (0..16).map(|_| b.gen()).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn distinct_identities_diverge() {
        let base: u64 = RandomStream::new(7, "bench", 3).gen();
        assert_ne!(base, RandomStream::new(7, "bench", 4).gen::<u64>());
        assert_ne!(base, RandomStream::new(7, "audit", 3).gen::<u64>());
        assert_ne!(base, RandomStream::new(8, "bench", 3).gen::<u64>());
    }

    #[test]
    fn shuffle_single_item() {
        let mut rng = RandomStream::from_seed(1);
        let mut v = vec![42];
        shuffle(&mut v, &mut rng);
        assert_eq!(v, vec![42]);
    }

    #[test]
    fn shuffle_is_deterministic_per_seed() {
        let run = || {
            let mut rng = RandomStream::from_seed(99);
            let mut v: Vec<u32> = (1..=5).collect();
            shuffle(&mut v, &mut rng);
            v
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn shuffle_of_three_is_uniform() {
        let mut rng = RandomStream::from_seed(2024);
        let trials = 100_000;
        let mut freq: HashMap<Vec<u8>, usize> = HashMap::new();
        for _ in 0..trials {
            let mut v = vec![1u8, 2, 3];
            shuffle(&mut v, &mut rng);
            *freq.entry(v).or_default() += 1;
        }
        assert_eq!(freq.len(), 6);
        let mut chi2 = 0.0;
        let expected = trials as f64 / 6.0;
        for &count in freq.values() {
            let f = count as f64 / trials as f64;
            assert!((f - 1.0 / 6.0).abs() < 0.01, "frequency {f}");
            chi2 += (count as f64 - expected).powi(2) / expected;
        }
        // 5 degrees of freedom, 0.999 quantile
        assert!(chi2 < 20.52, "chi2 = {chi2}");
    }

    #[test]
    fn sample_edge_sizes() {
        let mut rng = RandomStream::from_seed(5);
        let mut full = sample_without_replacement(10, 10, &mut rng).unwrap();
        full.sort_unstable();
        assert_eq!(full, (0..10).collect::<Vec<_>>());
        assert!(sample_without_replacement(10, 0, &mut rng).unwrap().is_empty());
        assert_eq!(
            sample_without_replacement(3, 4, &mut rng),
            Err(Error::SampleTooLarge { k: 4, m: 3 })
        );
    }

    #[test]
    fn sample_hits_follow_hypergeometric_mean() {
        // m = 100, k = 30, |X| = 50: E[hits] = k |X| / m = 15
        let mut rng = RandomStream::from_seed(11);
        let trials = 10_000;
        let total: usize = (0..trials)
            .map(|_| {
                sample_without_replacement(100, 30, &mut rng)
                    .unwrap()
                    .into_iter()
                    .filter(|&i| i < 50)
                    .count()
            })
            .sum();
        let mean = total as f64 / trials as f64;
        assert!((mean - 15.0).abs() <= 0.5, "mean hits {mean}");
    }
}
