use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::reduced::EntropyCache;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Exhaustive averaging is used up to this many fragments per size in `auto` mode.
pub const AUTO_EXHAUSTIVE_LIMIT: u128 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FragmentSampler {
    Exhaustive,
    Random {
        k: usize,
    },
    /// Exhaustive when there are at most 256 fragments of a size, otherwise 256 samples.
    #[default]
    Auto,
}

impl FragmentSampler {
    /// Concrete choice for `size`-subsets of an `n`-element universe. A `Random`
    /// request that would cover every fragment is served exhaustively.
    pub fn resolve(&self, n: usize, size: usize) -> FragmentSampler {
        let available = binomial(n, size);
        match *self {
            FragmentSampler::Exhaustive => FragmentSampler::Exhaustive,
            FragmentSampler::Random { k } if (k as u128) < available => FragmentSampler::Random { k },
            FragmentSampler::Random { .. } => FragmentSampler::Exhaustive,
            FragmentSampler::Auto if available <= AUTO_EXHAUSTIVE_LIMIT => FragmentSampler::Exhaustive,
            FragmentSampler::Auto => FragmentSampler::Random { k: AUTO_EXHAUSTIVE_LIMIT as usize },
        }
    }
}

impl fmt::Display for FragmentSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentSampler::Exhaustive => write!(f, "exhaustive"),
            FragmentSampler::Random { k } => write!(f, "random:{k}"),
            FragmentSampler::Auto => write!(f, "auto"),
        }
    }
}

impl FromStr for FragmentSampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(FragmentSampler::Exhaustive),
            "auto" => Ok(FragmentSampler::Auto),
            _ => {
                let k = s
                    .strip_prefix("random:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|&k| k > 0)
                    .ok_or_else(|| Error::Parse(format!("fragment sampler {s:?}: expected exhaustive, auto or random:<k>")))?;
                Ok(FragmentSampler::Random { k })
            }
        }
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
pub fn unrank_combination(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for remaining in (1..=k).rev() {
        loop {
            let with_next = binomial(n - next - 1, remaining - 1);
            if rank < with_next {
                break;
            }
            rank -= with_next;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let total = binomial(n, k);
    (0..total).map(|r| unrank_combination(n, k, r)).collect()
}

/// Fragments of `size` drawn from `universe`. Random samples are distinct and
/// determined by `(seed, path)` through the fragment stream.
pub fn select_fragments(
    universe: &[usize],
    size: usize,
    sampler: FragmentSampler,
    seed: u64,
    path: &[u64],
) -> Result<Vec<Vec<usize>>> {
    let n = universe.len();
    if size > n {
        return Err(Error::InvalidParameter(format!("fragment size {size} exceeds the {n} available sites")));
    }
    let available = binomial(n, size);
    let ranks: Vec<u128> = match sampler {
        FragmentSampler::Exhaustive => (0..available).collect(),
        FragmentSampler::Auto => return select_fragments(universe, size, sampler.resolve(n, size), seed, path),
        FragmentSampler::Random { k } => {
            if k as u128 > available {
                return Err(Error::TooManySamples { requested: k as u128, available });
            }
            let available = usize::try_from(available)
                .map_err(|_| Error::InvalidParameter("too many fragments to sample from".into()))?;
            let mut rng = stream_rng(seed, Stream::Fragments, path);
            let mut picked: Vec<u128> = index::sample(&mut rng, available, k).into_iter().map(|r| r as u128).collect();
            picked.sort_unstable();
            picked
        }
    };
    Ok(ranks
        .into_iter()
        .map(|r| unrank_combination(n, size, r).into_iter().map(|i| universe[i]).collect())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FragmentStats {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

impl FragmentStats {
    pub fn from_values(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return Self { mean: 0.0, stderr: 0.0, count };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let stderr = if count < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        };
        Self { mean, stderr, count }
    }
}

/// Mean mutual information over fragments of `size` drawn from `universe`.
/// Size 0 gives `(0, 0)`.
pub fn mi_by_size(
    cache: &mut EntropyCache<'_>,
    universe: &[usize],
    size: usize,
    sampler: FragmentSampler,
    seed: u64,
    path: &[u64],
) -> Result<FragmentStats> {
    let fragments = select_fragments(universe, size, sampler, seed, path)?;
    let values = fragments.iter().map(|f| cache.mutual_information(f)).collect::<Result<Vec<f64>>>()?;
    Ok(FragmentStats::from_values(&values))
}
