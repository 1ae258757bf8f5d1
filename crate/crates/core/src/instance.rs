//! Hidden ball colorings and the generators that produce them.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{shuffle, RandomStream};

/// An assignment of opaque color ids to balls `0..n`.
///
/// Only the oracle and the ground-truth auditor look at colors; algorithms see
/// ball indices alone. Color ids are compared for equality and nothing else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    colors: Vec<u64>,
}

impl Instance {
    pub fn new(colors: Vec<u64>) -> Result<Self> {
        if colors.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Self { colors })
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Ground-truth color of `ball`. Not available to algorithms.
    pub fn color(&self, ball: usize) -> u64 {
        self.colors[ball]
    }

    pub fn colors(&self) -> &[u64] {
        &self.colors
    }

    /// Class sizes, largest first.
    pub fn color_counts(&self) -> Vec<usize> {
        let mut counts: HashMap<u64, usize> = HashMap::new();
        for &c in &self.colors {
            *counts.entry(c).or_default() += 1;
        }
        let mut v: Vec<usize> = counts.into_values().collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    /// Same partition into colors, with every color id replaced by a fresh random one.
    pub fn relabeled(&self, rng: &mut RandomStream) -> Self {
        let mut fresh: HashMap<u64, u64> = HashMap::new();
        let mut used = std::collections::HashSet::new();
        let colors = self
            .colors
            .iter()
            .map(|c| {
                *fresh.entry(*c).or_insert_with(|| loop {
                    let id: u64 = rng.gen();
                    if used.insert(id) {
                        break id;
                    }
                })
            })
            .collect();
        Self { colors }
    }

    /// Text format: `n` on the first line, then one color id per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.colors.len());
        for c in &self.colors {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InstanceFormat("missing ball count".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::InstanceFormat(format!("bad ball count `{header}`")))?;
        let colors = lines
            .map(|l| {
                l.parse::<u64>()
                    .map_err(|_| Error::InstanceFormat(format!("bad color id `{l}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if colors.len() != n {
            return Err(Error::InstanceFormat(format!(
                "header says {n} balls but {} color lines follow",
                colors.len()
            )));
        }
        Self::new(colors)
    }
}

/// Input families used by the generators and the benchmark grid.
///
/// Grammar: `binary:p=0.5`, `profile:5,3` (exact counts),
/// `profile:0.48,rest=100` (fractions, remainder split over 100 colors),
/// `distinct`, `uniform:k=16` or `uniform:k=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DistributionSpec {
    /// Each ball independently gets color 1 with probability `p`, else color 0.
    Binary { p: f64 },
    /// Exact class sizes; they must sum to `n`.
    Counts(Vec<usize>),
    /// Leading fractions, optionally followed by `rest` equal colors sharing the remainder.
    Fractions { leading: Vec<f64>, rest: Option<usize> },
    AllDistinct,
    /// Each ball independently uniform over `k` colors (`None` means `k = n`).
    Uniform { k: Option<usize> },
}

impl TryFrom<String> for DistributionSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DistributionSpec> for String {
    fn from(spec: DistributionSpec) -> String {
        spec.to_string()
    }
}

impl DistributionSpec {
    /// Exact class sizes for a profile of `n` balls, or `None` for random families.
    pub fn profile_counts(&self, n: usize) -> Result<Option<Vec<usize>>> {
        match self {
            Self::Counts(counts) => {
                let total: usize = counts.iter().sum();
                if total != n {
                    return Err(Error::InvalidDistribution(format!(
                        "profile counts sum to {total}, expected {n}"
                    )));
                }
                Ok(Some(counts.clone()))
            }
            Self::Fractions { leading, rest } => {
                let lead: f64 = leading.iter().sum();
                let mut fractions = leading.clone();
                match rest {
                    Some(k) if *k > 0 => {
                        if lead > 1.0 + 1e-9 {
                            return Err(Error::InvalidDistribution(format!(
                                "leading fractions sum to {lead} > 1"
                            )));
                        }
                        let share = (1.0 - lead).max(0.0) / *k as f64;
                        fractions.extend(std::iter::repeat(share).take(*k));
                    }
                    _ => {
                        if (lead - 1.0).abs() > 1e-6 {
                            return Err(Error::InvalidDistribution(format!(
                                "profile fractions sum to {lead}, expected 1"
                            )));
                        }
                    }
                }
                Ok(Some(apportion(&fractions, n)))
            }
            Self::AllDistinct => Ok(Some(vec![1; n])),
            Self::Binary { .. } | Self::Uniform { .. } => Ok(None),
        }
    }
}

/// Largest-remainder rounding of `fractions * n` to integer counts summing to `n`.
fn apportion(fractions: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = fractions.iter().sum();
    let raw: Vec<f64> = fractions.iter().map(|f| f / total * n as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut left = n - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (raw[a] - raw[a].floor(), raw[b] - raw[b].floor());
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDistribution(s.to_string());
        let (kind, args) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), a.trim()),
            None => (s.trim(), ""),
        };
        match kind {
            "distinct" => Ok(Self::AllDistinct),
            "binary" => {
                let p = match args.strip_prefix("p=") {
                    Some(v) => v.parse::<f64>().map_err(|_| bad())?,
                    None if args.is_empty() => 0.5,
                    None => return Err(bad()),
                };
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad());
                }
                Ok(Self::Binary { p })
            }
            "uniform" => match args.strip_prefix("k=") {
                Some("n") => Ok(Self::Uniform { k: None }),
                Some(v) => {
                    let k = v.parse::<usize>().map_err(|_| bad())?;
                    if k == 0 {
                        return Err(bad());
                    }
                    Ok(Self::Uniform { k: Some(k) })
                }
                None => Err(bad()),
            },
            "profile" => {
                let mut leading = Vec::new();
                let mut rest = None;
                let mut fractional = false;
                for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    if let Some(r) = part.strip_prefix("rest=") {
                        rest = Some(r.parse::<usize>().map_err(|_| bad())?);
                        fractional = true;
                    } else {
                        fractional |= part.contains('.');
                        let v = part.parse::<f64>().map_err(|_| bad())?;
                        if v < 0.0 {
                            return Err(bad());
                        }
                        leading.push(v);
                    }
                }
                if leading.is_empty() && rest.is_none() {
                    return Err(bad());
                }
                if fractional {
                    Ok(Self::Fractions { leading, rest })
                } else {
                    Ok(Self::Counts(leading.into_iter().map(|v| v as usize).collect()))
                }
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Binary { p } => write!(f, "binary:p={p}"),
            Self::Counts(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "profile:{}", parts.join(","))
            }
            Self::Fractions { leading, rest } => {
                let mut parts: Vec<String> = leading.iter().map(|x| format!("{x:?}")).collect();
                if let Some(r) = rest {
                    parts.push(format!("rest={r}"));
                }
                write!(f, "profile:{}", parts.join(","))
            }
            Self::AllDistinct => write!(f, "distinct"),
            Self::Uniform { k: None } => write!(f, "uniform:k=n"),
            Self::Uniform { k: Some(k) } => write!(f, "uniform:k={k}"),
        }
    }
}

/// Draws an instance of `n` balls from `spec`. Profiles are laid out in random order.
pub fn generate(spec: &DistributionSpec, n: usize, rng: &mut RandomStream) -> Result<Instance> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let colors = match spec {
        DistributionSpec::Binary { p } => (0..n).map(|_| u64::from(rng.gen_bool(*p))).collect(),
        DistributionSpec::Uniform { k } => {
            let k = k.unwrap_or(n) as u64;
            (0..n).map(|_| rng.gen_range(0..k)).collect()
        }
        _ => {
            let counts = spec.profile_counts(n)?.expect("profile family");
            let mut colors: Vec<u64> = counts
                .iter()
                .enumerate()
                .flat_map(|(c, &k)| std::iter::repeat(c as u64).take(k))
                .collect();
            shuffle(&mut colors, rng);
            colors
        }
    };
    Instance::new(colors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_has_n_colors() {
        let mut rng = RandomStream::from_seed(1);
        let inst = generate(&DistributionSpec::AllDistinct, 4, &mut rng).unwrap();
        assert_eq!(inst.color_counts(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn profile_counts_are_exact() {
        let mut rng = RandomStream::from_seed(1);
        let spec: DistributionSpec = "profile:5,3".parse().unwrap();
        let inst = generate(&spec, 8, &mut rng).unwrap();
        assert_eq!(inst.color_counts(), vec![5, 3]);
        assert!(generate(&spec, 9, &mut rng).is_err());
    }

    #[test]
    fn fractions_must_sum_to_one() {
        let spec: DistributionSpec = "profile:0.5,0.3".parse().unwrap();
        assert!(matches!(spec.profile_counts(10), Err(Error::InvalidDistribution(_))));
        let spec: DistributionSpec = "profile:0.5,0.5".parse().unwrap();
        assert_eq!(spec.profile_counts(11).unwrap().unwrap().iter().sum::<usize>(), 11);
    }

    #[test]
    fn heavy_profile_with_rest() {
        let spec: DistributionSpec = "profile:0.48,rest=100".parse().unwrap();
        let counts = spec.profile_counts(10_000).unwrap().unwrap();
        assert_eq!(counts.len(), 101);
        assert_eq!(counts[0], 4800);
        assert_eq!(counts.iter().sum::<usize>(), 10_000);
        assert!(counts[1..].iter().all(|&c| c == 52));
    }

    #[test]
    fn binary_frequency() {
        let mut rng = RandomStream::from_seed(3);
        let inst = generate(&DistributionSpec::Binary { p: 0.5 }, 10_000, &mut rng).unwrap();
        let ones = inst.colors().iter().filter(|&&c| c == 1).count();
        assert!((ones as f64 / 10_000.0 - 0.5).abs() <= 0.02);
    }

    #[test]
    fn spec_grammar_round_trips() {
        for s in ["binary:p=0.5", "profile:5,3", "profile:0.48,rest=100", "distinct", "uniform:k=n", "uniform:k=7"] {
            let spec: DistributionSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<DistributionSpec>().unwrap(), spec, "{s}");
        }
        for s in ["", "binary:p=2", "uniform", "uniform:k=0", "profile:", "gauss"] {
            assert!(s.parse::<DistributionSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn text_format() {
        let inst = Instance::parse_text("3\n7\n7\n2\n").unwrap();
        assert_eq!(inst.colors(), &[7, 7, 2]);
        assert_eq!(Instance::parse_text(&inst.to_text()).unwrap(), inst);
        assert!(Instance::parse_text("3\n1\n2\n").is_err());
        assert!(Instance::parse_text("2\n1\nx\n").is_err());
        assert!(Instance::parse_text("0\n").is_err());
    }

    #[test]
    fn relabel_preserves_partition() {
        let mut rng = RandomStream::from_seed(9);
        let inst = Instance::new(vec![1, 1, 2, 3, 2, 1]).unwrap();
        let re = inst.relabeled(&mut rng);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(inst.color(i) == inst.color(j), re.color(i) == re.color(j));
            }
        }
    }
}
