//! Ground truth and transcript-based certificate checking.
//!
//! The checker only reads the transcript. Provable inequality means: the two
//! balls lie in equality classes joined by at least one unequal comparison.
//! Longer chains of unequal edges prove nothing once three or more colors are
//! possible, so they are never used here.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::answer::Answer;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracle::ComparisonRecord;

/// Transcript-backed witness for an [`Answer`].
///
/// For a majority answer it is just the claim itself (`candidate` = witness).
/// For a no-majority answer it lists disjoint provably-unequal pairs, at most
/// one mutually-unequal triangle, and optionally a candidate ball `v` whose
/// equality class bounds the remaining uncovered balls.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub candidate: Option<usize>,
    pub pairs: Vec<(usize, usize)>,
    pub triangle: Option<[usize; 3]>,
}

impl Certificate {
    pub fn majority(witness: usize) -> Self {
        Self { candidate: Some(witness), ..Self::default() }
    }

    /// Candidate-free certificate made of unequal pairs.
    pub fn matching(pairs: Vec<(usize, usize)>) -> Self {
        Self { candidate: None, pairs, triangle: None }
    }

    pub fn with_candidate(candidate: usize, pairs: Vec<(usize, usize)>) -> Self {
        Self { candidate: Some(candidate), pairs, triangle: None }
    }

    /// Number of cover units (pairs plus the triangle).
    pub fn units(&self) -> usize {
        self.pairs.len() + usize::from(self.triangle.is_some())
    }

    /// Lifts a certificate over the representatives of equal pairs to the whole
    /// set those pairs came from, then appends `extra` pairs.
    ///
    /// Every unit over representatives is duplicated onto their partners; a
    /// ball without a partner (the odd leftover) stays in its original unit only.
    pub fn lift<F>(&self, partner: F, extra: impl IntoIterator<Item = (usize, usize)>) -> Self
    where
        F: Fn(usize) -> Option<usize>,
    {
        let mut pairs = Vec::with_capacity(2 * self.pairs.len());
        for &(x, y) in &self.pairs {
            pairs.push((x, y));
            if let (Some(px), Some(py)) = (partner(x), partner(y)) {
                pairs.push((px, py));
            }
        }
        if let Some([a, b, c]) = self.triangle {
            let partners: Vec<usize> = [a, b, c].iter().filter_map(|&x| partner(x)).collect();
            if partners.len() >= 2 {
                pairs.push((partners[0], partners[1]));
            }
        }
        pairs.extend(extra);
        Self { candidate: self.candidate, pairs, triangle: self.triangle }
    }
}

/// Equality classes (union of equal comparisons) and class-level conflict edges.
#[derive(Debug, Clone)]
pub struct EqStructure {
    root: Vec<usize>,
    size: Vec<usize>,
    conflicts: HashSet<(usize, usize)>,
}

impl EqStructure {
    pub fn len(&self) -> usize {
        self.root.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_empty()
    }

    /// Representative of the equality class containing `ball`.
    pub fn class(&self, ball: usize) -> usize {
        self.root[ball]
    }

    /// Size of `ball`'s class over all balls the structure knows about.
    pub fn class_size(&self, ball: usize) -> usize {
        self.size[self.root[ball]]
    }

    pub fn same_class(&self, x: usize, y: usize) -> bool {
        self.root[x] == self.root[y]
    }

    pub fn provably_unequal(&self, x: usize, y: usize) -> bool {
        self.conflicts.contains(&ordered(self.root[x], self.root[y]))
    }

    pub fn conflict_edges(&self) -> usize {
        self.conflicts.len()
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    while parent[x] != r {
        let next = parent[x];
        parent[x] = r;
        x = next;
    }
    r
}

/// Builds the equality classes and conflict edges for balls `0..n`.
pub fn build_eq_structure(transcript: &[ComparisonRecord], n: usize) -> Result<EqStructure> {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    for r in transcript.iter().filter(|r| r.equal) {
        let (a, b) = (find(&mut parent, r.left), find(&mut parent, r.right));
        if a != b {
            let (big, small) = if size[a] >= size[b] { (a, b) } else { (b, a) };
            parent[small] = big;
            size[big] += size[small];
        }
    }
    let root: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    let mut conflicts = HashSet::new();
    for r in transcript.iter().filter(|r| !r.equal) {
        let (a, b) = (root[r.left], root[r.right]);
        if a == b {
            return Err(Error::InconsistentTranscript { left: r.left, right: r.right });
        }
        conflicts.insert(ordered(a, b));
    }
    Ok(EqStructure { root, size, conflicts })
}

/// Why a claim was not accepted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    OutsideUniverse(usize),
    DuplicateBall(usize),
    Overlap(usize),
    Uncertified(usize, usize),
    MultiplicityMismatch { claimed: usize, proven: usize },
    NotAMajority { multiplicity: usize, half: usize },
    Unresolved { witness: usize, ball: usize },
    /// A color other than the candidate's could still exceed half.
    OtherColorBound { bound: usize, half: usize },
    /// The candidate's color could still exceed half.
    CandidateBound { bound: usize, half: usize },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OutsideUniverse(b) => write!(f, "ball {b} is not part of the input"),
            Self::DuplicateBall(b) => write!(f, "ball {b} appears twice in the input"),
            Self::Overlap(b) => write!(f, "ball {b} is used by two cover units"),
            Self::Uncertified(x, y) => write!(f, "balls {x} and {y} are not provably unequal"),
            Self::MultiplicityMismatch { claimed, proven } => {
                write!(f, "claimed multiplicity {claimed} but the witness class has {proven} balls")
            }
            Self::NotAMajority { multiplicity, half } => {
                write!(f, "multiplicity {multiplicity} does not exceed {half}")
            }
            Self::Unresolved { witness, ball } => {
                write!(f, "ball {ball} is neither equal nor provably unequal to witness {witness}")
            }
            Self::OtherColorBound { bound, half } => {
                write!(f, "some color may have {bound} balls, more than {half}")
            }
            Self::CandidateBound { bound, half } => {
                write!(f, "candidate color may have {bound} balls, more than {half}")
            }
        }
    }
}

fn membership(eq: &EqStructure, universe: &[usize]) -> std::result::Result<Vec<bool>, Rejection> {
    let mut inside = vec![false; eq.len()];
    for &b in universe {
        if b >= eq.len() {
            return Err(Rejection::OutsideUniverse(b));
        }
        if std::mem::replace(&mut inside[b], true) {
            return Err(Rejection::DuplicateBall(b));
        }
    }
    Ok(inside)
}

/// Accepts iff the witness class has exactly `multiplicity` balls of the
/// universe, that is more than half, and every other ball is provably unequal
/// to the witness.
pub fn check_majority_claim(
    eq: &EqStructure,
    witness: usize,
    multiplicity: usize,
    universe: &[usize],
) -> std::result::Result<(), Rejection> {
    let inside = membership(eq, universe)?;
    if !inside.get(witness).copied().unwrap_or(false) {
        return Err(Rejection::OutsideUniverse(witness));
    }
    let half = universe.len() / 2;
    let mut proven = 0;
    for &b in universe {
        if eq.same_class(b, witness) {
            proven += 1;
        } else if !eq.provably_unequal(b, witness) {
            return Err(Rejection::Unresolved { witness, ball: b });
        }
    }
    if proven != multiplicity {
        return Err(Rejection::MultiplicityMismatch { claimed: multiplicity, proven });
    }
    if multiplicity <= half {
        return Err(Rejection::NotAMajority { multiplicity, half });
    }
    Ok(())
}

/// Accepts iff the certificate bounds every color by `⌊n/2⌋`.
///
/// Each cover unit holds at most one ball of any color. Uncovered balls count
/// fully, except that with a candidate `v` the bound for colors other than
/// `color(v)` skips `v`'s class, and the bound for `color(v)` itself counts the
/// class exactly and skips everything provably unequal to `v`.
pub fn check_no_majority_claim(
    eq: &EqStructure,
    cert: &Certificate,
    universe: &[usize],
) -> std::result::Result<(), Rejection> {
    let inside = membership(eq, universe)?;
    let half = universe.len() / 2;
    let mut covered = vec![false; eq.len()];
    let pair_arrays: Vec<[usize; 2]> = cert.pairs.iter().map(|&(a, b)| [a, b]).collect();
    let mut units: Vec<&[usize]> = pair_arrays.iter().map(|p| &p[..]).collect();
    if let Some(t) = &cert.triangle {
        units.push(t);
    }
    for unit in &units {
        for (i, &x) in unit.iter().enumerate() {
            if !inside.get(x).copied().unwrap_or(false) {
                return Err(Rejection::OutsideUniverse(x));
            }
            if std::mem::replace(&mut covered[x], true) {
                return Err(Rejection::Overlap(x));
            }
            for &y in &unit[i + 1..] {
                if y < eq.len() && !eq.provably_unequal(x, y) {
                    return Err(Rejection::Uncertified(x, y));
                }
            }
        }
    }
    let uncovered = universe.iter().copied().filter(|&b| !covered[b]);

    let Some(v) = cert.candidate else {
        let bound = units.len() + uncovered.count();
        return if bound <= half { Ok(()) } else { Err(Rejection::OtherColorBound { bound, half }) };
    };
    if !inside.get(v).copied().unwrap_or(false) {
        return Err(Rejection::OutsideUniverse(v));
    }
    let is_in = |x: usize| eq.same_class(x, v);
    let is_out = |x: usize| eq.provably_unequal(x, v);

    let mut other_bound = units.len();
    let mut candidate_bound = universe.iter().filter(|&&b| is_in(b)).count();
    for b in uncovered {
        if !is_in(b) {
            other_bound += 1;
            if !is_out(b) {
                candidate_bound += 1;
            }
        }
    }
    candidate_bound += units
        .iter()
        .filter(|u| !u.iter().any(|&x| is_in(x)) && u.iter().any(|&x| !is_out(x)))
        .count();

    if other_bound > half {
        return Err(Rejection::OtherColorBound { bound: other_bound, half });
    }
    if candidate_bound > half {
        return Err(Rejection::CandidateBound { bound: candidate_bound, half });
    }
    Ok(())
}

/// Result of auditing one run.
#[derive(Debug, Clone, PartialEq)]
pub enum AuditError {
    Inconsistent(Error),
    Rejected(Rejection),
}

impl fmt::Display for AuditError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Inconsistent(e) => write!(f, "{e}"),
            Self::Rejected(r) => write!(f, "certificate rejected: {r}"),
        }
    }
}

impl std::error::Error for AuditError {}

/// Checks `answer` against `cert` using only `transcript`.
pub fn audit(
    answer: &Answer,
    cert: &Certificate,
    transcript: &[ComparisonRecord],
    n: usize,
    universe: &[usize],
) -> std::result::Result<(), AuditError> {
    let eq = build_eq_structure(transcript, n).map_err(AuditError::Inconsistent)?;
    let verdict = match answer {
        Answer::Majority { witness, multiplicity } => {
            check_majority_claim(&eq, *witness, *multiplicity, universe)
        }
        Answer::NoMajority => check_no_majority_claim(&eq, cert, universe),
    };
    verdict.map_err(AuditError::Rejected)
}

/// Exact answer by direct counting of ground-truth colors.
pub fn brute_force_majority(instance: &Instance) -> Answer {
    let all: Vec<usize> = (0..instance.len()).collect();
    brute_force_subset(instance, &all)
}

/// Exact answer for the sub-multiset `balls`.
pub fn brute_force_subset(instance: &Instance, balls: &[usize]) -> Answer {
    let mut counts: HashMap<u64, (usize, usize)> = HashMap::new();
    for &b in balls {
        counts.entry(instance.color(b)).or_insert((b, 0)).1 += 1;
    }
    counts
        .into_values()
        .find(|&(_, c)| c > balls.len() / 2)
        .map_or(Answer::NoMajority, |(witness, multiplicity)| Answer::Majority {
            witness,
            multiplicity,
        })
}

/// True when both answers make the same claim: same kind, same multiplicity,
/// and witnesses of the same color.
pub fn same_verdict(instance: &Instance, a: &Answer, b: &Answer) -> bool {
    match (a, b) {
        (Answer::NoMajority, Answer::NoMajority) => true,
        (
            Answer::Majority { witness: w1, multiplicity: m1 },
            Answer::Majority { witness: w2, multiplicity: m2 },
        ) => m1 == m2 && instance.color(*w1) == instance.color(*w2),
        _ => false,
    }
}
