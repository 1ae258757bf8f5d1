//! The counting comparison oracle: the only way an algorithm learns anything about colors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

/// One oracle call and its outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub left: usize,
    pub right: usize,
    pub equal: bool,
}

/// Counts every comparison, including repeats and self-comparisons.
#[derive(Debug)]
pub struct CountingOracle<'a> {
    instance: &'a Instance,
    comparisons: u64,
    transcript: Option<Vec<ComparisonRecord>>,
}

impl<'a> CountingOracle<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        Self { instance, comparisons: 0, transcript: None }
    }

    /// Oracle that also keeps the full transcript.
    pub fn recording(instance: &'a Instance) -> Self {
        Self { instance, comparisons: 0, transcript: Some(Vec::new()) }
    }

    /// Number of balls in the underlying instance.
    pub fn len(&self) -> usize {
        self.instance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instance.is_empty()
    }

    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    pub fn is_recording(&self) -> bool {
        self.transcript.is_some()
    }

    pub fn transcript(&self) -> Option<&[ComparisonRecord]> {
        self.transcript.as_deref()
    }

    pub fn into_transcript(self) -> Option<Vec<ComparisonRecord>> {
        self.transcript
    }

    pub fn try_cmp(&mut self, x: usize, y: usize) -> Result<bool> {
        let n = self.instance.len();
        for ball in [x, y] {
            if ball >= n {
                return Err(Error::BallOutOfRange { ball, n });
            }
        }
        let equal = self.instance.color(x) == self.instance.color(y);
        self.comparisons += 1;
        if let Some(t) = self.transcript.as_mut() {
            t.push(ComparisonRecord { left: x, right: y, equal });
        }
        Ok(equal)
    }

    /// Like [`try_cmp`](Self::try_cmp), for callers that validated their balls up front.
    ///
    /// Panics on an out-of-range ball.
    pub fn cmp(&mut self, x: usize, y: usize) -> bool {
        match self.try_cmp(x, y) {
            Ok(eq) => eq,
            Err(e) => panic!("oracle contract violated: {e}"),
        }
    }

    /// Checks that every ball is in range and the input is non-empty.
    pub fn validate(&self, balls: &[usize]) -> Result<()> {
        if balls.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = self.instance.len();
        match balls.iter().find(|&&b| b >= n) {
            Some(&ball) => Err(Error::BallOutOfRange { ball, n }),
            None => Ok(()),
        }
    }
}
