//! Las Vegas majority search that samples color frequencies and then either
//! pairs and recurses (`balanced`, `light`) or counts one dominant candidate
//! (`heavy`).
//!
//! Every answer is exact. Only the number of comparisons depends on the random
//! choices.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::answer::Answer;
use crate::certify::Certificate;
use crate::classic::boyer_moore_certified;
use crate::error::{Error, Result};
use crate::lab::beta::beta_interval;
use crate::oracle::CountingOracle;
use crate::rng::{sample_without_replacement, shuffle, RandomStream};

/// Tuning knobs. The sampling tolerance is evaluated at the size of the
/// current subproblem: `epsilon(m) = epsilon_scale * m^(-epsilon_exponent)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Sample size exponent: each call samples `ceil(m^alpha)` balls.
    pub alpha: f64,
    pub epsilon_scale: f64,
    pub epsilon_exponent: f64,
    /// Minimum sampled frequency for the heavy branch.
    pub beta: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Subproblems of at most this many balls go straight to Boyer–Moore.
    pub cutoff: usize,
}

impl Default for Params {
    fn default() -> Self {
        let (beta1, beta2) = beta_interval();
        Self {
            alpha: 1.0 / 3.0,
            epsilon_scale: 1.0,
            epsilon_exponent: 0.1,
            beta: 0.45,
            beta1,
            beta2,
            cutoff: 1024,
        }
    }
}

impl Params {
    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_epsilon_scale(mut self, scale: f64) -> Self {
        self.epsilon_scale = scale;
        self
    }

    pub fn epsilon(&self, m: usize) -> f64 {
        self.epsilon_scale * (m as f64).powf(-self.epsilon_exponent)
    }

    pub fn sample_size(&self, m: usize) -> usize {
        ((m as f64).powf(self.alpha).ceil() as usize).clamp(1, m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta1 < self.beta && self.beta < self.beta2) {
            return Err(Error::InvalidParams(format!(
                "beta = {} must lie strictly between {} and {}",
                self.beta, self.beta1, self.beta2
            )));
        }
        if self.cutoff < 2 {
            return Err(Error::InvalidParams(format!("cutoff {} is below 2", self.cutoff)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParams(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        if !(self.epsilon_scale >= 0.0) {
            return Err(Error::InvalidParams("epsilon scale must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Small input handed to Boyer–Moore.
    Base,
    Balanced,
    Heavy,
    Light,
    /// Heavy branch that ran out of pairs and fell back to Boyer–Moore.
    Fallback,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Base => "base",
            Branch::Balanced => "balanced",
            Branch::Heavy => "heavy",
            Branch::Light => "light",
            Branch::Fallback => "fallback",
        })
    }
}

/// Colors found in a sample: one representative ball per color, with counts
/// sorted non-increasing (ties keep first-seen order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleEstimate {
    pub representatives: Vec<usize>,
    pub counts: Vec<usize>,
    pub sample_size: usize,
}

impl SampleEstimate {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.sample_size as f64).collect()
    }
}

/// Classifies each sampled ball against the representatives found so far.
pub fn estimate_frequencies(oracle: &mut CountingOracle<'_>, sample: &[usize]) -> Result<SampleEstimate> {
    oracle.validate(sample)?;
    let mut reps: Vec<usize> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for &x in sample {
        match reps.iter().position(|&r| oracle.cmp(r, x)) {
            Some(i) => counts[i] += 1,
            None => {
                reps.push(x);
                counts.push(1);
            }
        }
    }
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]));
    Ok(SampleEstimate {
        representatives: order.iter().map(|&i| reps[i]).collect(),
        counts: order.iter().map(|&i| counts[i]).collect(),
        sample_size: sample.len(),
    })
}

/// Dispatch rule over sorted sampled frequencies `q`.
pub fn choose_branch(q: &[f64], epsilon: f64, beta: f64) -> Branch {
    let q1 = q.first().copied().unwrap_or(0.0);
    let q2 = q.get(1).copied().unwrap_or(0.0);
    let near_half = |x: f64| (x - 0.5).abs() <= 4.0 * epsilon;
    let rest: f64 = q.iter().skip(1).map(|x| x * x).sum();
    if near_half(q1) && near_half(q2) {
        Branch::Balanced
    } else if q1 >= beta && q1 * q1 >= rest + 2.0 * epsilon {
        Branch::Heavy
    } else {
        Branch::Light
    }
}

/// Comparison accounting for one call (recursive calls have their own entry).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStats {
    pub size: usize,
    pub branch: Option<Branch>,
    pub sample_size: usize,
    pub sample_colors: usize,
    pub sampling: u64,
    /// Pairing loop of balanced/light.
    pub pairing: u64,
    /// Candidate count (heavy) or the scan over unequal pairs (balanced/light),
    /// including the single comparison that resolves an odd leftover ball.
    pub scan: u64,
    /// Pair scan of heavy.
    pub pair_scan: u64,
    pub fallback: u64,
    /// `|X|` and `|Y|` (balls, not pairs) after pairing.
    pub x_len: usize,
    pub y_len: usize,
    /// All comparisons made by this call itself, excluding recursion.
    pub comparisons: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub comparisons: u64,
    /// One entry per call, outermost first.
    pub levels: Vec<LevelStats>,
}

impl RunStats {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn branch_trace(&self) -> Vec<Branch> {
        self.levels.iter().filter_map(|l| l.branch).collect()
    }

    pub fn root_branch(&self) -> Option<Branch> {
        self.levels.first().and_then(|l| l.branch)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub answer: Answer,
    pub certificate: Certificate,
    pub stats: RunStats,
}

/// Exact majority of `balls` using the sampled dispatch.
pub fn majority(
    oracle: &mut CountingOracle<'_>,
    balls: &[usize],
    params: &Params,
    rng: &mut RandomStream,
) -> Result<Outcome> {
    Solver::run(oracle, balls, params, rng, |s, b| s.solve(b))
}

/// Runs the balanced subprocedure on `balls` directly.
pub fn balanced(
    oracle: &mut CountingOracle<'_>,
    balls: &[usize],
    params: &Params,
    rng: &mut RandomStream,
) -> Result<Outcome> {
    Solver::run(oracle, balls, params, rng, |s, b| s.enter(b, |s, b, l| s.balanced(b, l)))
}

/// Runs the heavy subprocedure on `balls` with candidate `candidate`.
pub fn heavy(
    oracle: &mut CountingOracle<'_>,
    balls: &[usize],
    candidate: usize,
    params: &Params,
    rng: &mut RandomStream,
) -> Result<Outcome> {
    if !balls.contains(&candidate) {
        return Err(Error::InvalidParams(format!("candidate {candidate} is not among the balls")));
    }
    Solver::run(oracle, balls, params, rng, |s, b| {
        s.enter(b, |s, b, l| s.heavy(b, candidate, l))
    })
}

/// Runs the light subprocedure on `balls` directly.
pub fn light(
    oracle: &mut CountingOracle<'_>,
    balls: &[usize],
    params: &Params,
    rng: &mut RandomStream,
) -> Result<Outcome> {
    Solver::run(oracle, balls, params, rng, |s, b| s.enter(b, |s, b, l| s.light(b, l)))
}

type Solved = (Answer, Certificate);

struct Solver<'s, 'i> {
    oracle: &'s mut CountingOracle<'i>,
    params: &'s Params,
    rng: &'s mut RandomStream,
    levels: Vec<LevelStats>,
}

/// Result of the random pairing step.
struct Pairing {
    /// Second ball of each equal pair.
    reps: Vec<usize>,
    /// First ball of each equal pair, aligned with `reps`.
    partners: Vec<usize>,
    unequal: Vec<(usize, usize)>,
    /// Unpaired last ball when the input is odd.
    leftover: Option<usize>,
}

impl Pairing {
    /// The odd leftover joins the recursion exactly when the number of equal
    /// pairs is even; this keeps "majority in the input" equivalent to
    /// "majority in the recursive input, or the recursion's candidate wins the count".
    fn leftover_recurses(&self) -> bool {
        self.leftover.is_some() && self.reps.len() % 2 == 0
    }

    fn reduced(&self) -> Vec<usize> {
        let mut x = self.reps.clone();
        if self.leftover_recurses() {
            x.extend(self.leftover);
        }
        x
    }

    fn partner_map(&self) -> HashMap<usize, usize> {
        self.reps.iter().copied().zip(self.partners.iter().copied()).collect()
    }
}

impl<'s, 'i> Solver<'s, 'i> {
    fn run<F>(
        oracle: &'s mut CountingOracle<'i>,
        balls: &[usize],
        params: &'s Params,
        rng: &'s mut RandomStream,
        body: F,
    ) -> Result<Outcome>
    where
        F: FnOnce(&mut Self, &[usize]) -> Solved,
    {
        params.validate()?;
        oracle.validate(balls)?;
        let start = oracle.comparisons();
        let mut solver = Solver { oracle, params, rng, levels: Vec::new() };
        let (answer, certificate) = body(&mut solver, balls);
        let stats = RunStats { comparisons: solver.oracle.comparisons() - start, levels: solver.levels };
        Ok(Outcome { answer, certificate, stats })
    }

    fn cmp(&mut self, x: usize, y: usize) -> bool {
        self.oracle.cmp(x, y)
    }

    fn count(&self) -> u64 {
        self.oracle.comparisons()
    }

    /// Opens a level record, runs `body`, and closes the record.
    fn enter<F>(&mut self, balls: &[usize], body: F) -> Solved
    where
        F: FnOnce(&mut Self, &[usize], usize) -> Solved,
    {
        let level = self.levels.len();
        self.levels.push(LevelStats { size: balls.len(), ..LevelStats::default() });
        let before = self.count();
        let nested_before = self.nested_comparisons(level);
        let out = body(self, balls, level);
        let nested = self.nested_comparisons(level) - nested_before;
        self.levels[level].comparisons = self.count() - before - nested;
        out
    }

    fn nested_comparisons(&self, level: usize) -> u64 {
        self.levels[level + 1..].iter().map(|l| l.comparisons).sum()
    }

    fn solve(&mut self, balls: &[usize]) -> Solved {
        self.enter(balls, |s, balls, level| s.dispatch(balls, level))
    }

    fn dispatch(&mut self, balls: &[usize], level: usize) -> Solved {
        let m = balls.len();
        if m <= self.params.cutoff {
            self.levels[level].branch = Some(Branch::Base);
            return boyer_moore_certified(self.oracle, balls).expect("validated balls");
        }
        let k = self.params.sample_size(m);
        let picks = sample_without_replacement(m, k, self.rng).expect("k <= m");
        let sample: Vec<usize> = picks.into_iter().map(|i| balls[i]).collect();
        let before = self.count();
        let est = estimate_frequencies(self.oracle, &sample).expect("validated balls");
        let stats = &mut self.levels[level];
        stats.sampling = self.oracle.comparisons() - before;
        stats.sample_size = k;
        stats.sample_colors = est.representatives.len();

        match choose_branch(&est.frequencies(), self.params.epsilon(m), self.params.beta) {
            Branch::Balanced => self.balanced(balls, level),
            Branch::Heavy => self.heavy(balls, est.representatives[0], level),
            _ => self.light(balls, level),
        }
    }

    fn pair_up(&mut self, balls: &[usize], level: usize) -> Pairing {
        let mut order = balls.to_vec();
        shuffle(&mut order, self.rng);
        let before = self.count();
        let mut pairing = Pairing {
            reps: Vec::with_capacity(order.len() / 4),
            partners: Vec::with_capacity(order.len() / 4),
            unequal: Vec::with_capacity(order.len() / 4),
            leftover: None,
        };
        let mut chunks = order.chunks_exact(2);
        for pair in &mut chunks {
            let (a, b) = (pair[0], pair[1]);
            if self.cmp(a, b) {
                pairing.reps.push(b);
                pairing.partners.push(a);
            } else {
                pairing.unequal.push((a, b));
            }
        }
        pairing.leftover = chunks.remainder().first().copied();
        let stats = &mut self.levels[level];
        stats.pairing = self.oracle.comparisons() - before;
        stats.x_len = pairing.reps.len() + usize::from(pairing.leftover_recurses());
        stats.y_len = 2 * pairing.unequal.len() + usize::from(pairing.leftover.is_some() && !pairing.leftover_recurses());
        pairing
    }

    /// Common start of balanced and light: pair, recurse, and either lift the
    /// recursion's no-majority certificate or return its candidate.
    fn pair_and_recurse(&mut self, balls: &[usize], level: usize) -> std::result::Result<Candidate, (Pairing, Solved)> {
        let pairing = self.pair_up(balls, level);
        let reduced = pairing.reduced();
        if reduced.is_empty() {
            let cert = Certificate::matching(pairing.unequal.clone());
            return Err((pairing, (Answer::NoMajority, cert)));
        }
        match self.solve(&reduced) {
            (Answer::NoMajority, cert) => {
                let partners = pairing.partner_map();
                let lifted = cert.lift(|x| partners.get(&x).copied(), pairing.unequal.iter().copied());
                Err((pairing, (Answer::NoMajority, lifted)))
            }
            (Answer::Majority { witness, multiplicity }, _) => {
                let before = self.count();
                let leftover_matches =
                    pairing.leftover.map(|s| s == witness || self.cmp(witness, s));
                self.levels[level].scan += self.count() - before;
                Ok(Candidate { pairing, witness, multiplicity, leftover_matches, reduced_len: reduced.len() })
            }
        }
    }

    fn balanced(&mut self, balls: &[usize], level: usize) -> Solved {
        self.levels[level].branch = Some(Branch::Balanced);
        let c = match self.pair_and_recurse(balls, level) {
            Ok(c) => c,
            Err((_, solved)) => return solved,
        };
        let v = c.witness;
        let before = self.count();
        let mut cnt = 2 * c.rep_matches() + usize::from(c.leftover_matches == Some(true));
        for &(a, b) in &c.pairing.unequal {
            if self.cmp(v, a) || self.cmp(v, b) {
                cnt += 1;
            }
        }
        self.levels[level].scan += self.count() - before;
        if cnt <= balls.len() / 2 {
            (Answer::NoMajority, Certificate::with_candidate(v, c.pairing.unequal))
        } else {
            (Answer::Majority { witness: v, multiplicity: cnt }, Certificate::majority(v))
        }
    }

    fn light(&mut self, balls: &[usize], level: usize) -> Solved {
        self.levels[level].branch = Some(Branch::Light);
        let c = match self.pair_and_recurse(balls, level) {
            Ok(c) => c,
            Err((_, solved)) => return solved,
        };
        let v = c.witness;
        // surplus of v over all other colors among the equal pairs and the leftover
        let reps_v = c.rep_matches() as i64;
        let reps_other = c.pairing.reps.len() as i64 - reps_v;
        let mut cnt = reps_v - reps_other
            + match c.leftover_matches {
                Some(true) => 1,
                _ => 0,
            };
        debug_assert!(cnt >= 1);
        let before = self.count();
        let mut exhausted = true;
        for &(a, b) in &c.pairing.unequal {
            if !self.cmp(v, a) && !self.cmp(v, b) {
                cnt -= 1;
            }
            if cnt == 0 {
                exhausted = false;
                break;
            }
        }
        self.levels[level].scan += self.count() - before;
        if !exhausted {
            return (Answer::NoMajority, Certificate::with_candidate(v, c.pairing.unequal));
        }
        let multiplicity = balls.len() / 2 + cnt as usize;
        (Answer::Majority { witness: v, multiplicity }, Certificate::majority(v))
    }

    fn heavy(&mut self, balls: &[usize], v: usize, level: usize) -> Solved {
        self.levels[level].branch = Some(Branch::Heavy);
        let m = balls.len();
        let before = self.count();
        let mut same = vec![v];
        let mut others = Vec::with_capacity(m);
        for &b in balls {
            if b == v {
                continue;
            }
            if self.cmp(v, b) {
                same.push(b);
            } else {
                others.push(b);
            }
        }
        self.levels[level].scan = self.count() - before;
        let cnt = same.len();
        if cnt > m / 2 {
            return (Answer::Majority { witness: v, multiplicity: cnt }, Certificate::majority(v));
        }

        // unequal pairs among the others needed to cap every other color at m/2
        let mut need = m - m / 2 - cnt;
        shuffle(&mut others, self.rng);
        let before = self.count();
        let mut found = Vec::with_capacity(need);
        let mut used = 0;
        while need > 0 && used + 1 < others.len() {
            let (a, b) = (others[used], others[used + 1]);
            used += 2;
            if !self.cmp(a, b) {
                found.push((a, b));
                need -= 1;
            }
        }
        self.levels[level].pair_scan = self.count() - before;
        if need == 0 {
            let in_found: std::collections::HashSet<usize> =
                found.iter().flat_map(|&(a, b)| [a, b]).collect();
            let rest = others.iter().copied().filter(|x| !in_found.contains(x));
            let mut pairs = found;
            pairs.extend(rest.zip(same.iter().copied()));
            return (Answer::NoMajority, Certificate::with_candidate(v, pairs));
        }

        self.levels[level].branch = Some(Branch::Fallback);
        let before = self.count();
        let out = boyer_moore_certified(self.oracle, balls).expect("validated balls");
        self.levels[level].fallback = self.count() - before;
        out
    }
}

/// Candidate returned by the recursion in balanced/light.
struct Candidate {
    pairing: Pairing,
    witness: usize,
    /// Multiplicity of the witness color in the recursive input.
    multiplicity: usize,
    /// Whether the odd leftover shares the witness color.
    leftover_matches: Option<bool>,
    reduced_len: usize,
}

impl Candidate {
    /// Equal pairs of the witness color.
    fn rep_matches(&self) -> usize {
        let leftover_counted = self.pairing.leftover_recurses() && self.leftover_matches == Some(true);
        debug_assert_eq!(self.reduced_len, self.pairing.reps.len() + usize::from(self.pairing.leftover_recurses()));
        self.multiplicity - usize::from(leftover_counted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{audit, brute_force_subset, same_verdict};
    use crate::instance::Instance;

    fn check(inst: &Instance, balls: &[usize], out: &Outcome, transcript: &[crate::oracle::ComparisonRecord]) {
        let truth = brute_force_subset(inst, balls);
        assert!(same_verdict(inst, &out.answer, &truth), "{:?} vs {:?}", out.answer, truth);
        audit(&out.answer, &out.certificate, transcript, inst.len(), balls).unwrap();
    }

    fn small_params() -> Params {
        Params::default().with_cutoff(2).with_epsilon_scale(0.0)
    }

    #[test]
    fn single_ball_is_its_own_majority() {
        let inst = Instance::new(vec![5]).unwrap();
        let mut o = CountingOracle::new(&inst);
        let mut rng = RandomStream::from_seed(0);
        let out = majority(&mut o, &[0], &Params::default(), &mut rng).unwrap();
        assert_eq!(out.answer, Answer::Majority { witness: 0, multiplicity: 1 });
        assert_eq!(out.stats.comparisons, 0);
    }

    #[test]
    fn dispatch_examples() {
        assert_eq!(choose_branch(&[0.5, 0.5], 0.004, 0.45), Branch::Balanced);
        assert_eq!(choose_branch(&[0.6, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05], 0.01, 0.45), Branch::Heavy);
        assert_eq!(choose_branch(&[0.3, 0.3, 0.3, 0.1], 0.01, 0.45), Branch::Light);
        // one sampled color: q2 counts as zero
        assert_eq!(choose_branch(&[1.0], 0.01, 0.45), Branch::Heavy);
        // heavy needs the squared gap too
        assert_eq!(choose_branch(&[0.46, 0.45, 0.09], 0.001, 0.45), Branch::Light);
    }

    #[test]
    fn estimate_examples() {
        let inst = Instance::new(vec![1, 1, 1, 1, 1]).unwrap();
        let mut o = CountingOracle::new(&inst);
        let est = estimate_frequencies(&mut o, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(est.counts, vec![5]);
        assert_eq!(o.comparisons(), 4);

        let inst = Instance::new(vec![1, 2, 1, 2]).unwrap();
        let mut o = CountingOracle::new(&inst);
        let est = estimate_frequencies(&mut o, &[0, 1, 2, 3]).unwrap();
        assert_eq!(est.frequencies(), vec![0.5, 0.5]);
        assert_eq!(est.representatives, vec![0, 1]);

        // ties keep first-seen order; larger classes move first
        let inst = Instance::new(vec![1, 2, 3, 3]).unwrap();
        let mut o = CountingOracle::new(&inst);
        let est = estimate_frequencies(&mut o, &[0, 1, 2, 3]).unwrap();
        assert_eq!(est.representatives, vec![2, 0, 1]);
        assert_eq!(est.counts, vec![2, 1, 1]);
    }

    #[test]
    fn balanced_all_same_color() {
        let inst = Instance::new(vec![4; 8]).unwrap();
        let balls: Vec<usize> = (0..8).collect();
        for seed in 0..10 {
            let mut o = CountingOracle::recording(&inst);
            let mut rng = RandomStream::from_seed(seed);
            let out = balanced(&mut o, &balls, &small_params(), &mut rng).unwrap();
            assert_eq!(out.answer.multiplicity(), Some(8));
            assert_eq!(out.stats.levels[0].x_len, 4);
            assert_eq!(out.stats.levels[0].pairing, 4);
            check(&inst, &balls, &out, o.transcript().unwrap());
        }
    }

    #[test]
    fn balanced_two_distinct() {
        let inst = Instance::new(vec![1, 2]).unwrap();
        let mut o = CountingOracle::recording(&inst);
        let mut rng = RandomStream::from_seed(1);
        let out = balanced(&mut o, &[0, 1], &small_params(), &mut rng).unwrap();
        assert_eq!(out.answer, Answer::NoMajority);
        assert_eq!(out.stats.comparisons, 1);
        check(&inst, &[0, 1], &out, o.transcript().unwrap());
    }

    #[test]
    fn heavy_examples() {
        // v-color holds 5 of 8
        let inst = Instance::new(vec![1, 1, 2, 1, 3, 1, 4, 1]).unwrap();
        let balls: Vec<usize> = (0..8).collect();
        let mut o = CountingOracle::recording(&inst);
        let mut rng = RandomStream::from_seed(3);
        let out = heavy(&mut o, &balls, 0, &small_params(), &mut rng).unwrap();
        assert_eq!(out.answer, Answer::Majority { witness: 0, multiplicity: 5 });
        assert_eq!(out.stats.comparisons, 7);
        check(&inst, &balls, &out, o.transcript().unwrap());

        // v-color holds 4 of 8: no pair scan needed
        let inst = Instance::new(vec![1, 2, 1, 3, 1, 4, 1, 5]).unwrap();
        let mut o = CountingOracle::recording(&inst);
        let out = heavy(&mut o, &balls, 0, &small_params(), &mut rng).unwrap();
        assert_eq!(out.answer, Answer::NoMajority);
        assert_eq!(out.stats.comparisons, 7);
        assert_eq!(out.certificate.units(), 4);
        check(&inst, &balls, &out, o.transcript().unwrap());
    }

    #[test]
    fn heavy_odd_needs_one_unequal_pair() {
        // 2 of 5 share v's color; the other three must not all agree
        let inst = Instance::new(vec![1, 2, 1, 3, 2]).unwrap();
        let balls: Vec<usize> = (0..5).collect();
        for seed in 0..20 {
            let mut o = CountingOracle::recording(&inst);
            let mut rng = RandomStream::from_seed(seed);
            let out = heavy(&mut o, &balls, 0, &small_params(), &mut rng).unwrap();
            check(&inst, &balls, &out, o.transcript().unwrap());
        }
        // [A, B, B]: v = A has 1 of 3 and B is the majority
        let inst = Instance::new(vec![1, 2, 2]).unwrap();
        let mut o = CountingOracle::recording(&inst);
        let mut rng = RandomStream::from_seed(0);
        let out = heavy(&mut o, &[0, 1, 2], 0, &small_params(), &mut rng).unwrap();
        assert_eq!(out.answer.multiplicity(), Some(2));
        assert_eq!(out.stats.root_branch(), Some(Branch::Fallback));
        check(&inst, &[0, 1, 2], &out, o.transcript().unwrap());
    }

    #[test]
    fn light_all_distinct() {
        let inst = Instance::new(vec![1, 2, 3, 4]).unwrap();
        let balls: Vec<usize> = (0..4).collect();
        let mut o = CountingOracle::recording(&inst);
        let mut rng = RandomStream::from_seed(8);
        let out = light(&mut o, &balls, &small_params(), &mut rng).unwrap();
        assert_eq!(out.answer, Answer::NoMajority);
        assert_eq!(out.stats.comparisons, 2);
        assert_eq!(out.certificate.candidate, None);
        assert_eq!(out.certificate.units(), 2);
        check(&inst, &balls, &out, o.transcript().unwrap());
    }

    #[test]
    fn odd_leftover_cases() {
        // [A, A, B] paired as (A, A) + leftover B, or (A, B) + leftover A
        let inst = Instance::new(vec![1, 1, 2]).unwrap();
        for seed in 0..30 {
            for f in [balanced, light] {
                let mut o = CountingOracle::recording(&inst);
                let mut rng = RandomStream::from_seed(seed);
                let out = f(&mut o, &[0, 1, 2], &small_params(), &mut rng).unwrap();
                assert_eq!(out.answer.multiplicity(), Some(2));
                check(&inst, &[0, 1, 2], &out, o.transcript().unwrap());
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(Params::default().validate().is_ok());
        assert!(Params::default().with_cutoff(1).validate().is_err());
        let mut p = Params::default();
        p.beta = 0.48;
        assert!(p.validate().is_err());
        p.beta = 0.43;
        assert!(p.validate().is_ok());
    }

    #[test]
    fn epsilon_uses_subproblem_size() {
        let p = Params::default();
        assert!((p.epsilon(1 << 20) - 0.25).abs() < 1e-12);
        assert_eq!(p.sample_size(1000), 10);
        assert_eq!(p.sample_size(1 << 21), 128);
    }
}
