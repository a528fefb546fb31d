use serde::{Deserialize, Serialize};

use super::fragments::{mi_by_size, FragmentSampler, FragmentStats};
use super::reduced::EntropyCache;
use crate::error::Result;
use crate::evolution::StateVector;

/// Below this system entropy (bits) the normalized mutual information is reported as 0.
pub const MIN_SYSTEM_ENTROPY: f64 = 1e-10;

/// Plateau tolerance used when none is given.
pub const DEFAULT_PLATEAU_EPSILON: f64 = 0.15;

pub fn normalize(mi: f64, system_entropy: f64) -> f64 {
    if system_entropy < MIN_SYSTEM_ENTROPY {
        0.0
    } else {
        mi / system_entropy
    }
}

/// Mutual information of one state against fragments of every size in `0..=universe.len()`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateProfile {
    pub system_entropy: f64,
    /// Indexed by fragment size.
    pub by_size: Vec<FragmentStats>,
}

impl StateProfile {
    pub fn normalized(&self, size: usize) -> f64 {
        normalize(self.by_size[size].mean, self.system_entropy)
    }
}

/// `path` is prefixed to `[universe size, fragment size]` to key the fragment
/// draws, so the same fragments are used whenever the same path recurs.
pub fn state_profile(
    psi: &StateVector,
    universe: &[usize],
    sizes: Option<&[usize]>,
    sampler: FragmentSampler,
    seed: u64,
    path: &[u64],
) -> Result<StateProfile> {
    let mut cache = EntropyCache::new(psi);
    let system_entropy = cache.system_entropy()?;
    let n = universe.len();
    let mut by_size = vec![FragmentStats { mean: f64::NAN, stderr: f64::NAN, count: 0 }; n + 1];
    let all: Vec<usize> = (0..=n).collect();
    for &size in sizes.unwrap_or(&all).iter().filter(|&&s| s <= n) {
        let mut key = path.to_vec();
        key.extend([n as u64, size as u64]);
        by_size[size] = mi_by_size(&mut cache, universe, size, sampler.resolve(n, size), seed, &key)?;
    }
    Ok(StateProfile { system_entropy, by_size })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    BySystemEntropy,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCell {
    pub size: usize,
    pub mean_mi: f64,
    pub mean_mi_normalized: f64,
    /// Standard error across trials of the normalized value; with a single
    /// trial, the standard error across sampled fragments instead.
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSlice {
    pub time: f64,
    /// Environment sites fragments were drawn from at this time.
    pub universe: usize,
    pub mean_system_entropy: f64,
    pub cells: Vec<ProfileCell>,
}

impl ProfileSlice {
    pub fn cell(&self, size: usize) -> Option<&ProfileCell> {
        self.cells.iter().find(|c| c.size == size)
    }

    pub fn value(&self, size: usize, normalization: Normalization) -> Option<f64> {
        self.cell(size).map(|c| match normalization {
            Normalization::BySystemEntropy => c.mean_mi_normalized,
            Normalization::Raw => c.mean_mi,
        })
    }
}

/// Trial-averaged mutual information on a time x fragment-size grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MIProfile {
    pub slices: Vec<ProfileSlice>,
    pub trials: usize,
    pub normalization: Normalization,
}

impl MIProfile {
    /// The slice whose time is closest to `t`.
    pub fn slice_near(&self, t: f64) -> Option<&ProfileSlice> {
        self.slices.iter().min_by(|a, b| (a.time - t).abs().total_cmp(&(b.time - t).abs()))
    }

    pub fn last(&self) -> Option<&ProfileSlice> {
        self.slices.last()
    }

    pub fn plateau_score(&self, t: f64, epsilon: f64) -> Option<f64> {
        self.slice_near(t).map(|s| plateau_score(s, epsilon))
    }
}

/// Fraction of fragment sizes `1..N-1` whose mean normalized mutual information
/// lies within `epsilon` of 1. Sizes missing from the slice count as misses; a
/// universe with fewer than two sites scores 0.
pub fn plateau_score(slice: &ProfileSlice, epsilon: f64) -> f64 {
    let n = slice.universe;
    if n < 2 {
        return 0.0;
    }
    let hits = (1..n)
        .filter(|&f| slice.cell(f).is_some_and(|c| (c.mean_mi_normalized - 1.0).abs() <= epsilon))
        .count();
    hits as f64 / (n - 1) as f64
}
