//! Monte Carlo checks of the sampling and pairing concentration bounds.
//! Each check reports the fraction of trials whose deviation stays within
//! `c` times the stated bound; logarithms are natural.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{sample_without_replacement, RandomStream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub trials: usize,
    pub within: usize,
    /// Largest observed `deviation / bound`.
    pub worst_ratio: f64,
    pub bound: f64,
}

impl ConcentrationReport {
    pub fn fraction(&self) -> f64 {
        self.within as f64 / self.trials as f64
    }

    fn from_deviations(deviations: &[f64], bound: f64) -> Self {
        Self {
            trials: deviations.len(),
            within: deviations.iter().filter(|&&d| d <= bound).count(),
            worst_ratio: deviations.iter().fold(0.0_f64, |w, &d| w.max(d / bound)),
            bound,
        }
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    Ok(())
}

fn per_trial<F>(trials: usize, seed: u64, purpose: &'static str, f: F) -> Vec<f64>
where
    F: Fn(&mut RandomStream) -> f64 + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| f(&mut RandomStream::new(seed, purpose, t as u64)))
        .collect()
}

fn shuffled(n: usize, rng: &mut RandomStream) -> Vec<u32> {
    let mut v: Vec<u32> = (0..n as u32).collect();
    v.shuffle(rng);
    v
}

/// Hits on a fixed `m`-subset when sampling `k` of `n` without replacement:
/// `|hits/k - m/n| <= c k^{-1/2} ln n`.
pub fn sampling_deviation(n: usize, m: usize, k: usize, trials: usize, seed: u64, c: f64) -> Result<ConcentrationReport> {
    check_trials(trials)?;
    if m > n || k > n || k == 0 {
        return Err(Error::InvalidParams(format!("need m, k <= n and k >= 1 (n={n}, m={m}, k={k})")));
    }
    let devs = per_trial(trials, seed, "sampling", |rng| {
        let hits = sample_without_replacement(n, k, rng).unwrap().into_iter().filter(|&i| i < m).count();
        (hits as f64 / k as f64 - m as f64 / n as f64).abs()
    });
    Ok(ConcentrationReport::from_deviations(&devs, c * (k as f64).powf(-0.5) * (n as f64).ln()))
}

/// Pairs with both ends in a fixed `x`-subset under a random perfect matching.
fn pairs_inside(order: &[u32], x: u32) -> usize {
    order.chunks_exact(2).filter(|p| p[0] < x && p[1] < x).count()
}

/// `|u_XX - |X|^2 / 2n| <= c sqrt(|X|) ln n`.
pub fn pair_concentration(n: usize, x: usize, trials: usize, seed: u64, c: f64) -> Result<ConcentrationReport> {
    check_trials(trials)?;
    if x > n {
        return Err(Error::InvalidParams(format!("subset of {x} exceeds {n}")));
    }
    let expected = (x * x) as f64 / (2 * n) as f64;
    let devs = per_trial(trials, seed, "pairs", |rng| {
        (pairs_inside(&shuffled(n, rng), x as u32) as f64 - expected).abs()
    });
    Ok(ConcentrationReport::from_deviations(&devs, c * (x as f64).sqrt() * (n as f64).ln()))
}

/// Empirical mean of `u_XX` with its standard error, next to the exact
/// expectation `|X|(|X|-1) / (2(n-1))`.
pub fn pair_count_mean(n: usize, x: usize, trials: usize, seed: u64) -> Result<(f64, f64, f64)> {
    check_trials(trials)?;
    if x > n || n < 2 {
        return Err(Error::InvalidParams(format!("need 2 <= n and x <= n (n={n}, x={x})")));
    }
    let counts = per_trial(trials, seed, "pair-mean", |rng| pairs_inside(&shuffled(n, rng), x as u32) as f64);
    let t = trials as f64;
    let mean = counts.iter().sum::<f64>() / t;
    let var = counts.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (t - 1.0).max(1.0);
    let expected = (x * (x.saturating_sub(1))) as f64 / (2 * (n - 1)) as f64;
    Ok((mean, expected, (var / t).sqrt()))
}

/// Monochromatic pairs summed over a partition with the given class sizes:
/// `|Σ u_XX - Σ |X|^2 / 2n| <= c n^{2/3} ln n`.
pub fn partition_pairs(sizes: &[usize], trials: usize, seed: u64, c: f64) -> Result<ConcentrationReport> {
    check_trials(trials)?;
    let n: usize = sizes.iter().sum();
    if n < 2 {
        return Err(Error::InvalidParams("partition needs at least two elements".into()));
    }
    let labels: Vec<u32> = sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat(i as u32).take(s)).collect();
    let expected: f64 = sizes.iter().map(|&s| (s * s) as f64).sum::<f64>() / (2 * n) as f64;
    let devs = per_trial(trials, seed, "partition", |rng| {
        let mut l = labels.clone();
        l.shuffle(rng);
        let same = l.chunks_exact(2).filter(|p| p[0] == p[1]).count();
        (same as f64 - expected).abs()
    });
    Ok(ConcentrationReport::from_deviations(&devs, c * (n as f64).powf(2.0 / 3.0) * (n as f64).ln()))
}

/// Draws without replacement until `m_prime` hits on an `m`-subset:
/// `draws <= (n/m) m' + c (n / sqrt(m)) ln n`. The reported deviation is the
/// excess over `(n/m) m'` (zero when below).
pub fn drawing_until(n: usize, m: usize, m_prime: usize, trials: usize, seed: u64, c: f64) -> Result<ConcentrationReport> {
    check_trials(trials)?;
    if m == 0 || m > n || m_prime > m {
        return Err(Error::InvalidParams(format!("need 0 < m <= n and m' <= m (n={n}, m={m}, m'={m_prime})")));
    }
    let target = n as f64 / m as f64 * m_prime as f64;
    let devs = per_trial(trials, seed, "drawing", |rng| {
        let order = shuffled(n, rng);
        let mut hits = 0;
        let mut draws = 0;
        for &b in &order {
            if hits == m_prime {
                break;
            }
            draws += 1;
            hits += usize::from((b as usize) < m);
        }
        (draws as f64 - target).max(0.0)
    });
    Ok(ConcentrationReport::from_deviations(&devs, c * n as f64 / (m as f64).sqrt() * (n as f64).ln()))
}

/// Sum of squared color frequencies estimated from a `ceil(n^alpha)` sample:
/// `|Σ p_i^2 - Σ q_i^2| <= c n^{-alpha/3} ln n`.
pub fn sum_of_squares(counts: &[usize], alpha: f64, trials: usize, seed: u64, c: f64) -> Result<ConcentrationReport> {
    check_trials(trials)?;
    let n: usize = counts.iter().sum();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let k = ((n as f64).powf(alpha).ceil() as usize).clamp(1, n);
    let truth: f64 = counts.iter().map(|&s| (s as f64 / n as f64).powi(2)).sum();
    let mut boundaries = Vec::with_capacity(counts.len());
    let mut acc = 0;
    for &s in counts {
        acc += s;
        boundaries.push(acc);
    }
    let devs = per_trial(trials, seed, "sum-of-squares", |rng| {
        let mut hits = vec![0usize; counts.len()];
        for i in sample_without_replacement(n, k, rng).unwrap() {
            hits[boundaries.partition_point(|&b| b <= i)] += 1;
        }
        let est: f64 = hits.iter().map(|&h| (h as f64 / k as f64).powi(2)).sum();
        (truth - est).abs()
    });
    Ok(ConcentrationReport::from_deviations(&devs, c * (n as f64).powf(-alpha / 3.0) * (n as f64).ln()))
}
