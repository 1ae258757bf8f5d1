//! Seeded experiment grids and their summary statistics.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::answer::Answer;
use crate::certify::{audit, brute_force_majority, same_verdict, Certificate};
use crate::classic::boyer_moore_certified;
use crate::error::{Error, Result};
use crate::instance::{generate, DistributionSpec, Instance};
use crate::oracle::CountingOracle;
use crate::randomized::{self, LevelStats, Params};
use crate::rng::RandomStream;

/// Ground-truth and certificate checks are always run up to this size.
pub const FULL_CHECK_LIMIT: usize = 1 << 20;

/// Above [`FULL_CHECK_LIMIT`] one trial in this many is checked.
pub const SAMPLED_CHECK_EVERY: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    BoyerMoore,
    RandMajority,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::BoyerMoore => "boyer-moore",
            Algorithm::RandMajority => "rand-majority",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boyer-moore" | "bm" => Ok(Algorithm::BoyerMoore),
            "rand-majority" | "rand" => Ok(Algorithm::RandMajority),
            other => Err(Error::InvalidParams(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckPolicy {
    /// Every trial up to [`FULL_CHECK_LIMIT`], sampled above.
    #[default]
    Default,
    Paranoid,
    Off,
}

impl CheckPolicy {
    pub fn applies(&self, n: usize, trial: usize) -> bool {
        match self {
            CheckPolicy::Paranoid => true,
            CheckPolicy::Off => false,
            CheckPolicy::Default => n <= FULL_CHECK_LIMIT || trial % SAMPLED_CHECK_EVERY == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub ns: Vec<usize>,
    pub distribution: DistributionSpec,
    pub trials: usize,
    pub seed: u64,
    pub params: Params,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub checks: CheckPolicy,
    /// Record wall time per trial. Off by default so output is reproducible.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, ns: Vec<usize>, distribution: DistributionSpec, trials: usize, seed: u64) -> Self {
        Self {
            algorithm,
            ns,
            distribution,
            trials,
            seed,
            params: Params::default(),
            jobs: None,
            checks: CheckPolicy::Default,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        if self.ns.is_empty() || self.ns.contains(&0) {
            return Err(Error::InvalidParams("every n must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidParams("jobs must be at least 1".into()));
        }
        self.params.validate()?;
        for &n in &self.ns {
            self.distribution.profile_counts(n)?;
        }
        Ok(())
    }
}

/// One trial of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub n: usize,
    pub trial: usize,
    /// Seed that reproduces this trial on its own.
    pub seed: u64,
    pub algorithm: Algorithm,
    pub distribution: String,
    pub root_branch: String,
    pub comparisons: u64,
    pub answer: String,
    pub multiplicity: Option<usize>,
    pub correct: Option<bool>,
    pub certificate_accepted: Option<bool>,
    /// Pairing comparisons at the outermost call (pairing branches only).
    pub root_pairing: Option<u64>,
    /// Balls in unequal pairs at the outermost call.
    pub root_y_len: Option<usize>,
    /// Scan comparisons at the outermost call.
    pub root_scan: Option<u64>,
    pub wall_micros: Option<u64>,
}

/// Result of one algorithm run on a prepared instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub answer: Answer,
    pub certificate: Certificate,
    pub comparisons: u64,
    pub root: Option<LevelStats>,
    pub correct: Option<bool>,
    pub certificate_accepted: Option<bool>,
}

/// Runs `algorithm` on all balls of `instance`, optionally checking the answer
/// against brute force and auditing the certificate.
pub fn run_trial(
    algorithm: Algorithm,
    instance: &Instance,
    params: &Params,
    rng: &mut RandomStream,
    check: bool,
) -> Result<TrialOutcome> {
    let balls: Vec<usize> = (0..instance.len()).collect();
    let mut oracle = if check { CountingOracle::recording(instance) } else { CountingOracle::new(instance) };
    let (answer, certificate, root) = match algorithm {
        Algorithm::BoyerMoore => {
            let (a, c) = boyer_moore_certified(&mut oracle, &balls)?;
            (a, c, None)
        }
        Algorithm::RandMajority => {
            let out = randomized::majority(&mut oracle, &balls, params, rng)?;
            (out.answer, out.certificate, out.stats.levels.into_iter().next())
        }
    };
    let comparisons = oracle.comparisons();
    let (correct, certificate_accepted) = if check {
        let truth = brute_force_majority(instance);
        let transcript = oracle.transcript().unwrap_or(&[]);
        let accepted = audit(&answer, &certificate, transcript, instance.len(), &balls).is_ok();
        (Some(same_verdict(instance, &answer, &truth)), Some(accepted))
    } else {
        (None, None)
    };
    Ok(TrialOutcome { answer, certificate, comparisons, root, correct, certificate_accepted })
}

/// Per-trial seed derived from the master seed, `n` and the trial index.
pub fn trial_seed(master: u64, n: usize, trial: usize) -> u64 {
    RandomStream::new(master, "trial-seed", ((n as u64) << 32) ^ trial as u64).next_u64()
}

/// Runs one trial of the grid from its derived seed.
pub fn grid_trial(config: &ExperimentConfig, n: usize, trial: usize) -> Result<TrialRow> {
    let seed = trial_seed(config.seed, n, trial);
    let mut instance_rng = RandomStream::new(seed, "instance", 0);
    let mut algo_rng = RandomStream::new(seed, "algorithm", 0);
    let instance = generate(&config.distribution, n, &mut instance_rng)?;
    let start = Instant::now();
    let out = run_trial(config.algorithm, &instance, &config.params, &mut algo_rng, config.checks.applies(n, trial))?;
    let wall = start.elapsed();
    let root = out.root.as_ref();
    let pairs = root.filter(|l| l.pairing > 0 || l.y_len > 0);
    Ok(TrialRow {
        n,
        trial,
        seed,
        algorithm: config.algorithm,
        distribution: config.distribution.to_string(),
        root_branch: root
            .and_then(|l| l.branch)
            .map_or_else(|| "boyer-moore".to_string(), |b| b.to_string()),
        comparisons: out.comparisons,
        answer: out.answer.kind().to_string(),
        multiplicity: out.answer.multiplicity(),
        correct: out.correct,
        certificate_accepted: out.certificate_accepted,
        root_pairing: pairs.map(|l| l.pairing),
        root_y_len: pairs.map(|l| l.y_len),
        root_scan: root.map(|l| l.scan),
        wall_micros: config.timing.then(|| wall.as_micros() as u64),
    })
}

/// All trials of the grid, sorted by `(n, trial)`. The rows depend only on
/// the configuration, not on the number of workers.
pub fn run_grid(config: &ExperimentConfig) -> Result<Vec<TrialRow>> {
    config.validate()?;
    let mut ns = config.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let tasks: Vec<(usize, usize)> = ns.iter().flat_map(|&n| (0..config.trials).map(move |t| (n, t))).collect();
    let work = || tasks.par_iter().map(|&(n, t)| grid_trial(config, n, t)).collect::<Result<Vec<_>>>();
    match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidParams(e.to_string()))?
            .install(work),
        None => work(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub algorithm: Algorithm,
    pub n: usize,
    pub distribution: String,
    pub trials: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: u64,
    pub max: u64,
    pub p95: u64,
    /// Mean comparisons divided by `n`.
    pub ratio: f64,
    /// Over checked trials only; `None` when nothing was checked.
    pub correctness_rate: Option<f64>,
    pub certificate_rate: Option<f64>,
    pub checked: usize,
}

impl Summary {
    /// True when a checked trial was wrong or its certificate was rejected.
    pub fn has_violation(&self) -> bool {
        self.correctness_rate.is_some_and(|r| r < 1.0) || self.certificate_rate.is_some_and(|r| r < 1.0)
    }
}

/// One summary per `(algorithm, n, distribution)`, in first-seen order.
pub fn summarize(rows: &[TrialRow]) -> Result<Vec<Summary>> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut keys: Vec<(Algorithm, usize, &str)> = Vec::new();
    for r in rows {
        let key = (r.algorithm, r.n, r.distribution.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    Ok(keys
        .into_iter()
        .map(|(algorithm, n, distribution)| {
            let group: Vec<&TrialRow> = rows
                .iter()
                .filter(|r| r.algorithm == algorithm && r.n == n && r.distribution == distribution)
                .collect();
            let mut counts: Vec<u64> = group.iter().map(|r| r.comparisons).collect();
            counts.sort_unstable();
            let t = counts.len() as f64;
            let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / t;
            let sd = if counts.len() > 1 {
                (counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (t - 1.0)).sqrt()
            } else {
                0.0
            };
            let rank = ((0.95 * t).ceil() as usize).clamp(1, counts.len());
            let rate = |f: fn(&TrialRow) -> Option<bool>| {
                let checked: Vec<bool> = group.iter().filter_map(|r| f(r)).collect();
                (!checked.is_empty())
                    .then(|| checked.iter().filter(|&&ok| ok).count() as f64 / checked.len() as f64)
            };
            Summary {
                algorithm,
                n,
                distribution: distribution.to_string(),
                trials: group.len(),
                mean,
                sd,
                min: counts[0],
                max: counts[counts.len() - 1],
                p95: counts[rank - 1],
                ratio: mean / n as f64,
                correctness_rate: rate(|r| r.correct),
                certificate_rate: rate(|r| r.certificate_accepted),
                checked: group.iter().filter(|r| r.correct.is_some()).count(),
            }
        })
        .collect())
}
