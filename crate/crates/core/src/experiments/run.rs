use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::initial::{initial_state_for, InitialStateKind};
use crate::classifier::{classify, VerdictReport};
use crate::error::{Error, Result};
use crate::evolution::{evolve_with, linear_grid};
use crate::information::{normalize, state_profile, FragmentSampler, MIProfile, Normalization, ProfileCell, ProfileSlice, StateProfile};
use crate::layout::DEFAULT_DIM_CAP;
use crate::linalg::KrylovConfig;
use crate::model::presets::preset_with_cap;
use crate::model::{HamiltonianModel, ModelFile, ModelInstance, Preset, PresetParams};

pub const DEFAULT_MAX_TRIALS: usize = 10_000;

pub const AVERAGING_CAVEAT: &str = "Averaging over randomized coefficients is a computational technique employed \
because of the small environment sizes directly accessible to simulation, and is not related to quantum Darwinism.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSource {
    Preset {
        name: Preset,
        n_env: usize,
        #[serde(default)]
        params: PresetParams,
    },
    File {
        path: PathBuf,
    },
    Inline {
        model: ModelFile,
    },
}

impl ModelSource {
    pub fn preset(name: Preset, n_env: usize) -> Self {
        ModelSource::Preset { name, n_env, params: PresetParams::default() }
    }

    pub fn build(&self, dim_cap: usize) -> Result<HamiltonianModel> {
        match self {
            ModelSource::Preset { name, n_env, params } => preset_with_cap(*name, *n_env, params, dim_cap),
            ModelSource::File { path } => ModelFile::load(path)?.build_with_cap(dim_cap),
            ModelSource::Inline { model } => model.build_with_cap(dim_cap),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeGrid {
    /// `points` equally spaced times from 0 to `t_max`.
    Linear { t_max: f64, points: usize },
    Explicit { times: Vec<f64> },
}

impl TimeGrid {
    pub fn times(&self) -> Result<Vec<f64>> {
        let times = match self {
            TimeGrid::Linear { t_max, points } => {
                if !(t_max.is_finite() && *t_max >= 0.0) || *points == 0 {
                    return Err(Error::InvalidParameter("time grid needs t_max >= 0 and at least one point".into()));
                }
                linear_grid(*t_max, *points)
            }
            TimeGrid::Explicit { times } => times.clone(),
        };
        if times.is_empty() || times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("times must be non-empty, non-negative and ascending".into()));
        }
        Ok(times)
    }
}

/// Which environment sites fragments are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniverseMode {
    /// For collision models, only units whose window opened before `t`;
    /// every site otherwise.
    #[default]
    Opened,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub model: ModelSource,
    pub initial_state: InitialStateKind,
    pub trials: usize,
    pub times: TimeGrid,
    #[serde(default)]
    pub sampler: FragmentSampler,
    #[serde(default)]
    pub seed: u64,
    /// Seed of random initial states; they are drawn once and shared by all
    /// trials. Defaults to `seed`.
    #[serde(default)]
    pub state_seed: Option<u64>,
    /// Fragment sizes to evaluate; all sizes when absent.
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub universe: UniverseMode,
    #[serde(default = "default_tol")]
    pub krylov_tol: f64,
    #[serde(default = "default_dim_cap")]
    pub dim_cap: usize,
    #[serde(default = "default_max_trials")]
    pub max_trials: usize,
}

fn default_tol() -> f64 {
    KrylovConfig::default().tol
}

fn default_dim_cap() -> usize {
    DEFAULT_DIM_CAP
}

fn default_max_trials() -> usize {
    DEFAULT_MAX_TRIALS
}

impl ExperimentSpec {
    pub fn new(model: ModelSource, initial_state: InitialStateKind) -> Self {
        Self {
            model,
            initial_state,
            trials: 1,
            times: TimeGrid::Linear { t_max: 1.0, points: 100 },
            sampler: FragmentSampler::Auto,
            seed: 0,
            state_seed: None,
            sizes: None,
            universe: UniverseMode::Opened,
            krylov_tol: default_tol(),
            dim_cap: DEFAULT_DIM_CAP,
            max_trials: DEFAULT_MAX_TRIALS,
        }
    }

    pub fn trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn times(mut self, times: TimeGrid) -> Self {
        self.times = times;
        self
    }

    pub fn linear_times(self, t_max: f64, points: usize) -> Self {
        self.times(TimeGrid::Linear { t_max, points })
    }

    pub fn explicit_times(self, times: Vec<f64>) -> Self {
        self.times(TimeGrid::Explicit { times })
    }

    pub fn sampler(mut self, sampler: FragmentSampler) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn sizes(mut self, sizes: Vec<usize>) -> Self {
        self.sizes = Some(sizes);
        self
    }

    pub fn universe(mut self, universe: UniverseMode) -> Self {
        self.universe = universe;
        self
    }

    /// Seed of trial `k`.
    pub fn trial_seed(&self, k: usize) -> u64 {
        self.seed.wrapping_add(k as u64)
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.trials > self.max_trials {
            return Err(Error::ResourceCap(format!("{} trials exceed the cap of {}", self.trials, self.max_trials)));
        }
        if !(self.krylov_tol > 0.0) {
            return Err(Error::InvalidParameter("krylov_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Execution knobs that do not affect results.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; the global pool when absent.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMeta {
    pub index: usize,
    pub seed: u64,
    /// FNV-1a digest of the drawn coefficients' bit patterns.
    pub coefficient_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallStats {
    pub total_seconds: f64,
    pub mean_trial_seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub model_name: String,
    pub profile: MIProfile,
    pub verdict: Option<VerdictReport>,
    pub trials: Vec<TrialMeta>,
    pub wall: WallStats,
    pub caveat: String,
}

pub fn coefficient_digest(coefficients: &[f64]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for c in coefficients {
        for byte in c.to_bits().to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

/// Environment sites fragments are drawn from at time `t`.
pub fn fragment_universe(model: &HamiltonianModel, t: f64, mode: UniverseMode) -> Vec<usize> {
    let all: Vec<usize> = (1..=model.n_env()).collect();
    if mode == UniverseMode::All || !model.has_windows() {
        return all;
    }
    model
        .site_opening_times()
        .iter()
        .enumerate()
        .filter(|(_, o)| o.is_some_and(|o| o < t || o == 0.0))
        .map(|(k, _)| k + 1)
        .collect()
}

struct TrialOutput {
    profiles: Vec<StateProfile>,
    meta: TrialMeta,
    seconds: f64,
}

fn run_trial(
    base: &ModelInstance,
    spec: &ExperimentSpec,
    psi0: &crate::evolution::StateVector,
    times: &[f64],
    universes: &[Vec<usize>],
    k: usize,
) -> Result<TrialOutput> {
    let start = Instant::now();
    let seed = spec.trial_seed(k);
    let instance = base.reseed(seed);
    let cfg = KrylovConfig::with_tol(spec.krylov_tol);
    let mut profiles = Vec::with_capacity(times.len());
    evolve_with(&instance, psi0, times, &cfg, |i, _, psi| {
        profiles.push(state_profile(psi, &universes[i], spec.sizes.as_deref(), spec.sampler, spec.seed, &[k as u64])?);
        Ok(())
    })?;
    let meta = TrialMeta { index: k, seed, coefficient_digest: coefficient_digest(instance.coefficients()) };
    Ok(TrialOutput { profiles, meta, seconds: start.elapsed().as_secs_f64() })
}

fn map_trials<F>(trials: usize, opts: RunOptions, f: F) -> Result<Vec<TrialOutput>>
where
    F: Fn(usize) -> Result<TrialOutput> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let work = || (0..trials).into_par_iter().map(&f).collect::<Result<Vec<_>>>();
        match opts.workers {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::ResourceCap(format!("worker pool: {e}")))?
                .install(work),
            None => work(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = opts;
        (0..trials).map(f).collect()
    }
}

fn aggregate(times: &[f64], universes: &[Vec<usize>], outputs: &[TrialOutput]) -> MIProfile {
    let trials = outputs.len();
    let mut slices = Vec::with_capacity(times.len());
    for (i, &time) in times.iter().enumerate() {
        let n = universes[i].len();
        let entropies: Vec<f64> = outputs.iter().map(|o| o.profiles[i].system_entropy).collect();
        let mut cells = Vec::new();
        for size in 0..=n {
            let per_trial: Vec<&StateProfile> = outputs.iter().map(|o| &o.profiles[i]).collect();
            if per_trial[0].by_size[size].count == 0 {
                continue;
            }
            let raw: Vec<f64> = per_trial.iter().map(|p| p.by_size[size].mean).collect();
            let norm: Vec<f64> = per_trial.iter().map(|p| normalize(p.by_size[size].mean, p.system_entropy)).collect();
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let mean_norm = mean(&norm);
            let stderr = if trials > 1 {
                let var = norm.iter().map(|x| (x - mean_norm).powi(2)).sum::<f64>() / (trials - 1) as f64;
                (var / trials as f64).sqrt()
            } else {
                normalize(per_trial[0].by_size[size].stderr, per_trial[0].system_entropy)
            };
            cells.push(ProfileCell { size, mean_mi: mean(&raw), mean_mi_normalized: mean_norm, stderr });
        }
        slices.push(ProfileSlice {
            time,
            universe: n,
            mean_system_entropy: entropies.iter().sum::<f64>() / trials as f64,
            cells,
        });
    }
    MIProfile { slices, trials, normalization: Normalization::BySystemEntropy }
}

pub fn run(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    run_with(spec, RunOptions::default())
}

pub fn run_with(spec: &ExperimentSpec, opts: RunOptions) -> Result<ExperimentResult> {
    spec.validate()?;
    let model = spec.model.build(spec.dim_cap)?;
    run_model(Arc::new(model), spec, opts)
}

/// Run `spec` against an already built model (`spec.model` is only echoed).
pub fn run_model(model: Arc<HamiltonianModel>, spec: &ExperimentSpec, opts: RunOptions) -> Result<ExperimentResult> {
    let start = Instant::now();
    spec.validate()?;
    let times = spec.times.times()?;
    let verdict = classify(&model).ok().map(|v| VerdictReport::new(&model.info.name, &v));
    let psi0 = initial_state_for(&spec.initial_state, &model, spec.state_seed.unwrap_or(spec.seed))?;
    let universes: Vec<Vec<usize>> = times.iter().map(|&t| fragment_universe(&model, t, spec.universe)).collect();
    let base = ModelInstance::new(Arc::clone(&model), spec.seed)?;
    let outputs = map_trials(spec.trials, opts, |k| run_trial(&base, spec, &psi0, &times, &universes, k))?;
    let profile = aggregate(&times, &universes, &outputs);
    let mean_trial_seconds = outputs.iter().map(|o| o.seconds).sum::<f64>() / outputs.len() as f64;
    Ok(ExperimentResult {
        spec: spec.clone(),
        model_name: model.info.name.clone(),
        profile,
        verdict,
        trials: outputs.into_iter().map(|o| o.meta).collect(),
        wall: WallStats { total_seconds: start.elapsed().as_secs_f64(), mean_trial_seconds },
        caveat: AVERAGING_CAVEAT.to_string(),
    })
}

/// Coefficient of determination of a least-squares line through
/// `(size, mean mutual information)` for every size in the slice. `None` when
/// fewer than three sizes are present or the values are all equal.
pub fn linearity_r2(slice: &ProfileSlice) -> Option<f64> {
    let pts: Vec<(f64, f64)> = slice.cells.iter().map(|c| (c.size as f64, c.mean_mi)).collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if syy == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    Some(1.0 - ss_res / syy)
}

#[derive(Debug, Clone, Serialize)]
pub struct DemonResult {
    pub result: ExperimentResult,
    /// Linearity of mutual information in fragment size, per output time.
    pub r2: Vec<Option<f64>>,
}

/// [`run`] for the demon preset, adding the per-time linearity diagnostic.
pub fn run_demon(spec: &ExperimentSpec) -> Result<DemonResult> {
    match &spec.model {
        ModelSource::Preset { name: Preset::Demon, .. } => {}
        _ => return Err(Error::InvalidParameter("run_demon needs the demon preset".into())),
    }
    let result = run(spec)?;
    let r2 = result.profile.slices.iter().map(linearity_r2).collect();
    Ok(DemonResult { result, r2 })
}
