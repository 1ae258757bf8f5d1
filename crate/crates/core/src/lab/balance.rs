//! Knowledge-graph simulator for binary inputs. Every component of compared
//! balls splits into two sides of opposite colors; its balance is the squared
//! side difference.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

use super::bound::predict_bound;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentState {
    pub a: u64,
    pub b: u64,
}

impl ComponentState {
    pub fn singleton() -> Self {
        Self { a: 1, b: 0 }
    }

    pub fn size(&self) -> u64 {
        self.a + self.b
    }

    pub fn delta(&self) -> u64 {
        self.a.abs_diff(self.b)
    }

    pub fn balance(&self) -> u64 {
        self.delta() * self.delta()
    }

    pub fn is_monochromatic(&self) -> bool {
        self.a == 0 || self.b == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.gen_bool(0.5) {
            Side::A
        } else {
            Side::B
        }
    }
}

/// Kind of merge, by whether each component had both sides populated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MergeCase {
    MonoMono,
    DiMono,
    DiDi,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeTally {
    pub mono_mono: u64,
    pub di_mono: u64,
    pub di_di: u64,
    /// Mono-mono merges that produced a two-sided component.
    pub became_dichromatic: u64,
    /// Positive edges joining two sides that were not the compared pair.
    pub nonverified_edges: u64,
    pub nonverified_majority_edges: u64,
}

#[derive(Debug, Clone, Copy)]
struct Component {
    state: ComponentState,
    /// Hidden color of side A.
    color_a: bool,
}

impl Component {
    fn side_color(&self, side: Side) -> bool {
        match side {
            Side::A => self.color_a,
            Side::B => !self.color_a,
        }
    }

    fn side_len(&self, side: Side) -> u64 {
        match side {
            Side::A => self.state.a,
            Side::B => self.state.b,
        }
    }
}

/// State of the merge process. Colors are fixed up front, independently and
/// uniformly, which makes every comparison between two components a fair coin.
#[derive(Debug, Clone)]
pub struct AdversaryWorld {
    components: Vec<Component>,
    live: Vec<usize>,
    position: Vec<usize>,
    majority_color: bool,
    steps: u64,
    nonzero: usize,
    total_balance: u64,
    balances: Option<BTreeMap<u64, usize>>,
    tally: MergeTally,
}

impl AdversaryWorld {
    /// `n` singleton components. `track_max` keeps the balance multiset needed
    /// by [`AdversaryWorld::max_balance`].
    pub fn new<R: Rng + ?Sized>(n: usize, rng: &mut R, track_max: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let components: Vec<Component> = (0..n)
            .map(|_| Component { state: ComponentState::singleton(), color_a: rng.gen_bool(0.5) })
            .collect();
        let ones = components.iter().filter(|c| c.color_a).count();
        let balances = track_max.then(|| BTreeMap::from([(1, n)]));
        Ok(Self {
            majority_color: 2 * ones > n,
            components,
            live: (0..n).collect(),
            position: (0..n).collect(),
            steps: 0,
            nonzero: n,
            total_balance: n as u64,
            balances,
            tally: MergeTally::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn component_count(&self) -> usize {
        self.live.len()
    }

    /// Ids of the components still present.
    pub fn live(&self) -> &[usize] {
        &self.live
    }

    pub fn is_live(&self, id: usize) -> bool {
        self.position.get(id).is_some_and(|&p| p != usize::MAX)
    }

    pub fn state(&self, id: usize) -> Option<ComponentState> {
        self.is_live(id).then(|| self.components[id].state)
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Components with nonzero balance.
    pub fn nonzero_count(&self) -> usize {
        self.nonzero
    }

    pub fn total_balance(&self) -> u64 {
        self.total_balance
    }

    pub fn max_balance(&self) -> Option<u64> {
        self.balances.as_ref().map(|b| b.keys().next_back().copied().unwrap_or(0))
    }

    pub fn tally(&self) -> &MergeTally {
        &self.tally
    }

    /// Fraction of nonzero-balance components whose larger side has the
    /// majority color.
    pub fn larger_side_majority_fraction(&self) -> f64 {
        let mut hits = 0usize;
        for &id in &self.live {
            let c = &self.components[id];
            if c.state.a == c.state.b {
                continue;
            }
            let larger = if c.state.a > c.state.b { c.color_a } else { !c.color_a };
            hits += usize::from(larger == self.majority_color);
        }
        if self.nonzero == 0 {
            0.0
        } else {
            hits as f64 / self.nonzero as f64
        }
    }

    fn adjust_balance(&mut self, balance: u64, add: bool) {
        if let Some(map) = self.balances.as_mut() {
            if add {
                *map.entry(balance).or_default() += 1;
            } else if let Some(c) = map.get_mut(&balance) {
                *c -= 1;
                if *c == 0 {
                    map.remove(&balance);
                }
            }
        }
    }

    fn remove_live(&mut self, id: usize) {
        let p = self.position[id];
        self.live.swap_remove(p);
        if let Some(&moved) = self.live.get(p) {
            self.position[moved] = p;
        }
        self.position[id] = usize::MAX;
    }
}

/// Compares a ball on `side_i` of component `i` with one on `side_j` of
/// component `j`, merging `j` into `i`. Returns `None` when `i == j` (the
/// outcome is already known) or either id is not live.
pub fn merge_step(world: &mut AdversaryWorld, i: usize, j: usize, side_i: Side, side_j: Side) -> Option<MergeCase> {
    if i == j || !world.is_live(i) || !world.is_live(j) {
        return None;
    }
    let ci = world.components[i];
    let cj = world.components[j];
    let case = match (ci.state.is_monochromatic(), cj.state.is_monochromatic()) {
        (true, true) => MergeCase::MonoMono,
        (false, false) => MergeCase::DiDi,
        _ => MergeCase::DiMono,
    };

    // side of j that carries the color of i's side A
    let j_with_a = if cj.color_a == ci.color_a { Side::A } else { Side::B };
    let j_with_b = if j_with_a == Side::A { Side::B } else { Side::A };
    let compared_equal = ci.side_color(side_i) == cj.side_color(side_j);
    let majority = world.majority_color;
    for (own, other) in [(Side::A, j_with_a), (Side::B, j_with_b)] {
        if ci.side_len(own) == 0 || cj.side_len(other) == 0 {
            continue;
        }
        let verified = compared_equal && side_i == own && side_j == other;
        if !verified {
            world.tally.nonverified_edges += 1;
            if ci.side_color(own) == majority {
                world.tally.nonverified_majority_edges += 1;
            }
        }
    }

    let merged = ComponentState { a: ci.state.a + cj.side_len(j_with_a), b: ci.state.b + cj.side_len(j_with_b) };
    match case {
        MergeCase::MonoMono => {
            world.tally.mono_mono += 1;
            if !merged.is_monochromatic() {
                world.tally.became_dichromatic += 1;
            }
        }
        MergeCase::DiMono => world.tally.di_mono += 1,
        MergeCase::DiDi => world.tally.di_di += 1,
    }

    for b in [ci.state.balance(), cj.state.balance()] {
        world.total_balance -= b;
        world.adjust_balance(b, false);
        if b != 0 {
            world.nonzero -= 1;
        }
    }
    let nb = merged.balance();
    world.total_balance += nb;
    world.adjust_balance(nb, true);
    if nb != 0 {
        world.nonzero += 1;
    }
    world.components[i].state = merged;
    world.remove_live(j);
    world.steps += 1;
    Some(case)
}

/// Holds iff `((x+y)^2 + (x-y)^2) / 2 = x^2 + y^2`, checked in exact arithmetic.
pub fn martingale_step_holds(x: u64, y: u64) -> bool {
    let (x, y) = (x as u128, y as u128);
    let plus = (x + y) * (x + y);
    let minus = x.abs_diff(y) * x.abs_diff(y);
    plus + minus == 2 * (x * x + y * y)
}

/// Order in which components are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// A uniformly random pair of components.
    UniformRandom,
    /// The two smallest components.
    SmallestFirst,
    /// The two largest components, which grows a single component ball by ball.
    LargestFirst,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::UniformRandom, Strategy::SmallestFirst, Strategy::LargestFirst];

    fn stream_purpose(&self) -> &'static str {
        match self {
            Strategy::UniformRandom => "balance-uniform",
            Strategy::SmallestFirst => "balance-smallest",
            Strategy::LargestFirst => "balance-largest",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::UniformRandom => "uniform",
            Strategy::SmallestFirst => "smallest-first",
            Strategy::LargestFirst => "largest-first",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "uniform-random" | "random" => Ok(Strategy::UniformRandom),
            "smallest-first" | "smallest" => Ok(Strategy::SmallestFirst),
            "largest-first" | "largest" => Ok(Strategy::LargestFirst),
            other => Err(Error::InvalidParams(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Averages over trials at step `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub k: u64,
    pub mean_nonzero: f64,
    pub mean_max_balance: f64,
    pub mean_total_balance: f64,
    pub mean_larger_side_majority: f64,
    pub predict_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceStats {
    pub n: usize,
    pub strategy: Strategy,
    pub trials: usize,
    pub mean_terminal_balance: f64,
    pub variance_terminal_balance: f64,
    pub mean_nonverified_majority_edges: f64,
    pub mean_tally: [f64; 4],
    pub checkpoints: Vec<Checkpoint>,
}

struct TrialResult {
    terminal: u64,
    tally: MergeTally,
    /// (nonzero, max balance, total balance, larger-side fraction) per checkpoint
    snapshots: Vec<(usize, u64, u64, f64)>,
}

fn run_trial(n: usize, strategy: Strategy, rng: &mut RandomStream, checkpoints: &[u64]) -> TrialResult {
    let mut world = AdversaryWorld::new(n, rng, !checkpoints.is_empty()).expect("n >= 1");
    let mut snapshots = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    let snap = |world: &AdversaryWorld, snapshots: &mut Vec<_>, next: &mut usize| {
        while *next < checkpoints.len() && checkpoints[*next] == world.steps() {
            snapshots.push((
                world.nonzero_count(),
                world.max_balance().unwrap_or(0),
                world.total_balance(),
                world.larger_side_majority_fraction(),
            ));
            *next += 1;
        }
    };
    snap(&world, &mut snapshots, &mut next);
    match strategy {
        Strategy::UniformRandom => {
            while world.component_count() > 1 {
                let len = world.component_count();
                let x = rng.gen_range(0..len);
                let mut y = rng.gen_range(0..len - 1);
                if y >= x {
                    y += 1;
                }
                let (i, j) = (world.live()[x], world.live()[y]);
                let (si, sj) = (Side::random(rng), Side::random(rng));
                merge_step(&mut world, i, j, si, sj);
                snap(&world, &mut snapshots, &mut next);
            }
        }
        Strategy::SmallestFirst => {
            let mut queue: VecDeque<usize> = (0..n).collect();
            while queue.len() > 1 {
                let i = queue.pop_front().unwrap();
                let j = queue.pop_front().unwrap();
                let (si, sj) = (Side::random(rng), Side::random(rng));
                merge_step(&mut world, i, j, si, sj);
                queue.push_back(i);
                snap(&world, &mut snapshots, &mut next);
            }
        }
        Strategy::LargestFirst => {
            for j in 1..n {
                let (si, sj) = (Side::random(rng), Side::random(rng));
                merge_step(&mut world, 0, j, si, sj);
                snap(&world, &mut snapshots, &mut next);
            }
        }
    }
    TrialResult { terminal: world.total_balance(), tally: world.tally().clone(), snapshots }
}

/// Runs the merge process to a single component `trials` times. Checkpoints
/// are step counts in `0..n` at which trajectory averages are recorded.
pub fn simulate_balance(
    n: usize,
    strategy: Strategy,
    trials: usize,
    seed: u64,
    checkpoints: &[u64],
) -> Result<BalanceStats> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let mut checkpoints: Vec<u64> = checkpoints.iter().copied().filter(|&k| k < n as u64).collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();

    let results: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = RandomStream::new(seed, strategy.stream_purpose(), t as u64);
            run_trial(n, strategy, &mut rng, &checkpoints)
        })
        .collect();

    let tf = trials as f64;
    let mean = results.iter().map(|r| r.terminal as f64).sum::<f64>() / tf;
    let var = if trials > 1 {
        results.iter().map(|r| (r.terminal as f64 - mean).powi(2)).sum::<f64>() / (tf - 1.0)
    } else {
        0.0
    };
    let avg = |f: &dyn Fn(&TrialResult) -> f64| results.iter().map(f).sum::<f64>() / tf;
    let checkpoints = checkpoints
        .iter()
        .enumerate()
        .map(|(c, &k)| Checkpoint {
            k,
            mean_nonzero: avg(&|r| r.snapshots[c].0 as f64),
            mean_max_balance: avg(&|r| r.snapshots[c].1 as f64),
            mean_total_balance: avg(&|r| r.snapshots[c].2 as f64),
            mean_larger_side_majority: avg(&|r| r.snapshots[c].3),
            predict_bound: predict_bound(k, n as u64),
        })
        .collect();
    Ok(BalanceStats {
        n,
        strategy,
        trials,
        mean_terminal_balance: mean,
        variance_terminal_balance: var,
        mean_nonverified_majority_edges: avg(&|r| r.tally.nonverified_majority_edges as f64),
        mean_tally: [
            avg(&|r| r.tally.mono_mono as f64),
            avg(&|r| r.tally.di_mono as f64),
            avg(&|r| r.tally.di_di as f64),
            avg(&|r| r.tally.nonverified_edges as f64),
        ],
        checkpoints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_state() {
        let c = ComponentState { a: 5, b: 2 };
        assert_eq!(c.balance(), 9);
        assert_eq!(c.size(), 7);
        assert!(!c.is_monochromatic());
        assert!(ComponentState::singleton().is_monochromatic());
    }

    #[test]
    fn two_singletons() {
        let mut counts = [0usize; 2];
        for t in 0..2000 {
            let mut rng = RandomStream::new(1, "two", t);
            let mut w = AdversaryWorld::new(2, &mut rng, true).unwrap();
            assert_eq!(w.total_balance(), 2);
            assert_eq!(merge_step(&mut w, 0, 1, Side::A, Side::A), Some(MergeCase::MonoMono));
            let b = w.total_balance();
            assert!(b == 0 || b == 4);
            assert_eq!(w.max_balance(), Some(b));
            counts[usize::from(b == 4)] += 1;
        }
        assert!((counts[1] as f64 / 2000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn self_merge_is_noop() {
        let mut rng = RandomStream::from_seed(0);
        let mut w = AdversaryWorld::new(3, &mut rng, false).unwrap();
        assert_eq!(merge_step(&mut w, 1, 1, Side::A, Side::B), None);
        assert_eq!(w.component_count(), 3);
        merge_step(&mut w, 0, 1, Side::A, Side::A).unwrap();
        assert_eq!(merge_step(&mut w, 0, 1, Side::A, Side::A), None);
    }

    #[test]
    fn mass_conserved_and_zero_balance_absorbs() {
        let mut rng = RandomStream::from_seed(5);
        let n = 200;
        let mut w = AdversaryWorld::new(n, &mut rng, true).unwrap();
        let mut steps = 0;
        while w.component_count() > 1 {
            let (i, j) = (w.live()[0], w.live()[w.component_count() - 1]);
            let before_j = w.state(j).unwrap();
            let before_i = w.state(i).unwrap();
            merge_step(&mut w, i, j, Side::B, Side::A).unwrap();
            steps += 1;
            let after = w.state(i).unwrap();
            if before_i.delta() == 0 {
                assert_eq!(after.delta(), before_j.delta());
            }
            let mass: u64 = w.live().iter().map(|&id| w.state(id).unwrap().size()).sum();
            assert_eq!(mass, n as u64);
            assert_eq!(w.component_count(), n - steps);
            let total: u64 = w.live().iter().map(|&id| w.state(id).unwrap().balance()).sum();
            assert_eq!(total, w.total_balance());
        }
    }

    #[test]
    fn step_identity() {
        for (x, y) in [(0, 0), (3, 5), (u32::MAX as u64, 7)] {
            assert!(martingale_step_holds(x, y));
        }
    }

    #[test]
    fn small_simulation() {
        let stats = simulate_balance(2, Strategy::UniformRandom, 4000, 9, &[0, 1]).unwrap();
        assert!((stats.mean_terminal_balance - 2.0).abs() < 0.2);
        assert_eq!(stats.checkpoints.len(), 2);
        assert_eq!(stats.checkpoints[0].mean_total_balance, 2.0);
        assert_eq!(stats.checkpoints[1].k, 1);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = simulate_balance(50, Strategy::SmallestFirst, 20, 3, &[10]).unwrap();
        let b = simulate_balance(50, Strategy::SmallestFirst, 20, 3, &[10]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn strategies_parse() {
        for s in Strategy::ALL {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
        assert!("bogus".parse::<Strategy>().is_err());
    }
}
