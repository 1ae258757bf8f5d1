use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome of a majority query over a multiset of balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Answer {
    /// `witness` has the majority color, held by exactly `multiplicity` balls.
    Majority { witness: usize, multiplicity: usize },
    NoMajority,
}

impl Answer {
    pub fn is_majority(&self) -> bool {
        matches!(self, Answer::Majority { .. })
    }

    pub fn multiplicity(&self) -> Option<usize> {
        match self {
            Answer::Majority { multiplicity, .. } => Some(*multiplicity),
            Answer::NoMajority => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Answer::Majority { .. } => "majority",
            Answer::NoMajority => "no-majority",
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Majority { witness, multiplicity } => {
                write!(f, "majority: ball {witness} with multiplicity {multiplicity}")
            }
            Answer::NoMajority => write!(f, "no majority"),
        }
    }
}
