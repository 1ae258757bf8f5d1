//! Candidate-and-verify majority vote.

use crate::answer::Answer;
use crate::certify::Certificate;
use crate::error::Result;
use crate::oracle::CountingOracle;

/// Exact majority of `balls` with at most `2(|balls| - 1)` comparisons.
pub fn boyer_moore(oracle: &mut CountingOracle<'_>, balls: &[usize]) -> Result<Answer> {
    boyer_moore_certified(oracle, balls).map(|(answer, _)| answer)
}

/// [`boyer_moore`] plus a certificate checkable against the transcript.
///
/// The first pass cancels each ball that differs from the current candidate
/// against one stacked copy of the candidate; those cancellations are the
/// certificate's unequal pairs. If the stack ends empty the pairs already
/// cover every ball. Otherwise the second pass resolves every ball against the
/// candidate, which bounds the candidate's color exactly.
pub fn boyer_moore_certified(
    oracle: &mut CountingOracle<'_>,
    balls: &[usize],
) -> Result<(Answer, Certificate)> {
    oracle.validate(balls)?;
    let mut candidate = balls[0];
    let mut stack: Vec<usize> = Vec::new();
    let mut pairs = Vec::with_capacity(balls.len() / 2);
    for &x in balls {
        if stack.is_empty() {
            candidate = x;
            stack.push(x);
        } else if oracle.cmp(candidate, x) {
            stack.push(x);
        } else {
            let y = stack.pop().expect("non-empty stack");
            pairs.push((y, x));
        }
    }
    if stack.is_empty() {
        return Ok((Answer::NoMajority, Certificate::matching(pairs)));
    }

    let mut count = 1;
    for &x in balls {
        if x != candidate && oracle.cmp(candidate, x) {
            count += 1;
        }
    }
    if count > balls.len() / 2 {
        Ok((
            Answer::Majority { witness: candidate, multiplicity: count },
            Certificate::majority(candidate),
        ))
    } else {
        Ok((Answer::NoMajority, Certificate::with_candidate(candidate, pairs)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{audit, brute_force_majority, same_verdict};
    use crate::instance::Instance;

    fn run(colors: &[u64]) -> (Answer, u64) {
        let inst = Instance::new(colors.to_vec()).unwrap();
        let mut o = CountingOracle::recording(&inst);
        let balls: Vec<usize> = (0..inst.len()).collect();
        let (answer, cert) = boyer_moore_certified(&mut o, &balls).unwrap();
        let comps = o.comparisons();
        audit(&answer, &cert, o.transcript().unwrap(), inst.len(), &balls).unwrap();
        (answer, comps)
    }

    #[test]
    fn small_examples() {
        assert_eq!(run(&[1, 1, 2]).0, Answer::Majority { witness: 0, multiplicity: 2 });
        assert_eq!(run(&[1, 2, 1, 2]).0, Answer::NoMajority);
        assert_eq!(run(&[7, 7, 7, 7]), (Answer::Majority { witness: 0, multiplicity: 4 }, 6));
        assert_eq!(run(&[3]), (Answer::Majority { witness: 0, multiplicity: 1 }, 0));
    }

    #[test]
    fn empty_input_rejected() {
        let inst = Instance::new(vec![1]).unwrap();
        let mut o = CountingOracle::new(&inst);
        assert!(boyer_moore(&mut o, &[]).is_err());
        assert!(boyer_moore(&mut o, &[1]).is_err());
    }

    #[test]
    fn exhaustive_against_brute_force() {
        for n in 1..=8u32 {
            for code in 0..3u64.pow(n) {
                let colors: Vec<u64> = (0..n).map(|i| code / 3u64.pow(i) % 3).collect();
                let inst = Instance::new(colors.clone()).unwrap();
                let (answer, comps) = run(&colors);
                assert!(same_verdict(&inst, &answer, &brute_force_majority(&inst)), "{colors:?}");
                assert!(comps <= 2 * (u64::from(n) - 1), "{colors:?}: {comps}");
            }
        }
    }

    #[test]
    fn works_on_a_subset() {
        let inst = Instance::new(vec![1, 2, 2, 1, 2, 1]).unwrap();
        let mut o = CountingOracle::recording(&inst);
        let balls = [1, 2, 3];
        let (answer, cert) = boyer_moore_certified(&mut o, &balls).unwrap();
        assert_eq!(answer.multiplicity(), Some(2));
        audit(&answer, &cert, o.transcript().unwrap(), inst.len(), &balls).unwrap();
    }
}
