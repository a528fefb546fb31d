use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use darwinism::experiments::{default_t_max, default_trials, ExperimentSpec, InitialStateKind, ModelSource, TimeGrid, UniverseMode};
use darwinism::information::{FragmentSampler, DEFAULT_PLATEAU_EPSILON};
use darwinism::layout::DEFAULT_DIM_CAP;
use darwinism::model::{CoefficientDistribution, HamiltonianModel, ModelFile, Preset, PresetParams};
use darwinism::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_T_POINTS: usize = 100;
pub const DEFAULT_MAX_TRIALS: usize = darwinism::experiments::DEFAULT_MAX_TRIALS;

/// Selects the model; shared by every command.
#[derive(Args, Debug, Clone, Default)]
pub struct ModelArgs {
    /// Built-in model (A-L, demon, qubit, micromaser).
    #[arg(long)]
    pub preset: Option<String>,
    /// JSON model file.
    #[arg(long, value_name = "PATH")]
    pub model_file: Option<PathBuf>,
    /// Number of environment sites (presets only).
    #[arg(long)]
    pub n_env: Option<usize>,
    /// Preset parameter override, e.g. `--param tau=2`; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Distribution of the preset's random couplings, e.g. `normal:0:1` or `rademacher:1`.
    #[arg(long)]
    pub coupling: Option<String>,
    /// Joint Hilbert-space dimension limit.
    #[arg(long)]
    pub dim_cap: Option<usize>,
    /// JSON file supplying any of these options; flags take precedence.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

/// Simulation options shared by `simulate` and `sweep`.
#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed; trial k uses seed + k.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seed of random initial states (defaults to the master seed).
    #[arg(long)]
    pub state_seed: Option<u64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of equally spaced output times from 0 to t-max.
    #[arg(long)]
    pub t_points: Option<usize>,
    /// `auto`, `exhaustive` or `random:K`.
    #[arg(long)]
    pub fragment_sampler: Option<String>,
    /// Tolerance of the plateau score.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// qutrit_product, y_product, x_product, ent, sep, prod, sbf, demon or preset.
    #[arg(long)]
    pub initial_state: Option<String>,
    /// `opened` (collision units that have interacted) or `all`.
    #[arg(long)]
    pub universe: Option<String>,
    /// Comma-separated fragment sizes to evaluate.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub max_trials: Option<usize>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also write plateau scores per time.
    #[arg(long)]
    pub plateau_summary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Named<T> {
    Name(String),
    Full(T),
}

impl<T: Clone> Named<T> {
    fn resolve(&self, parse: impl Fn(&str) -> Result<T>) -> Result<T> {
        match self {
            Named::Name(s) => parse(s),
            Named::Full(v) => Ok(v.clone()),
        }
    }
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub preset: Option<String>,
    pub model_file: Option<PathBuf>,
    pub n_env: Option<usize>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub coupling: Option<Named<CoefficientDistribution>>,
    pub dim_cap: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub state_seed: Option<u64>,
    pub t_max: Option<f64>,
    pub t_points: Option<usize>,
    /// Explicit output times; used unless `t_max`/`t_points` are given as flags.
    pub times: Option<Vec<f64>>,
    pub fragment_sampler: Option<Named<FragmentSampler>>,
    pub epsilon: Option<f64>,
    pub initial_state: Option<Named<InitialStateKind>>,
    pub universe: Option<UniverseMode>,
    pub sizes: Option<Vec<usize>>,
    pub max_trials: Option<usize>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub plateau_summary: Option<bool>,
    pub axis: Option<String>,
    pub values: Option<Vec<String>>,
    pub measure: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn load_opt(path: Option<&Path>) -> Result<Self> {
        path.map(Self::load).transpose().map(Option::unwrap_or_default)
    }
}

/// Where the model came from, as echoed into metadata.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelChoice {
    Preset { name: Preset, n_env: usize, params: PresetParams },
    File { path: PathBuf },
}

/// Fully resolved model selection.
#[derive(Debug, Clone, Serialize)]
pub struct ModelConfig {
    pub model: ModelChoice,
    pub dim_cap: usize,
    #[serde(skip)]
    pub source: ModelSource,
}

fn parse_param(s: &str) -> Result<(String, f64)> {
    let (k, v) = s.split_once('=').ok_or_else(|| Error::Parse(format!("expected KEY=VALUE, got {s:?}")))?;
    let v = v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number in {s:?}")))?;
    Ok((k.trim().to_string(), v))
}

impl ModelConfig {
    pub fn resolve(flags: &ModelArgs, file: &FileConfig) -> Result<Self> {
        let dim_cap = flags.dim_cap.or(file.dim_cap).unwrap_or(DEFAULT_DIM_CAP);
        // a flag for either source replaces the file's choice entirely
        let (preset, model_file) = if flags.preset.is_some() || flags.model_file.is_some() {
            (flags.preset.clone(), flags.model_file.clone())
        } else {
            (file.preset.clone(), file.model_file.clone())
        };
        let (model, source) = match (preset, model_file) {
            (Some(_), Some(_)) => return Err(Error::Parse("give either a preset or a model file, not both".into())),
            (None, None) => return Err(Error::Parse("no model given: use --preset or --model-file".into())),
            (Some(name), None) => {
                let name = Preset::from_str(&name)?;
                let n_env = flags.n_env.or(file.n_env).unwrap_or(name.default_n_env());
                let mut params = PresetParams { values: file.params.clone(), coupling: None };
                for p in &flags.params {
                    let (k, v) = parse_param(p)?;
                    params.values.insert(k, v);
                }
                params.coupling = match (&flags.coupling, &file.coupling) {
                    (Some(c), _) => Some(c.parse()?),
                    (None, Some(c)) => Some(c.resolve(|s| s.parse())?),
                    (None, None) => None,
                };
                let source = ModelSource::Preset { name, n_env, params: params.clone() };
                (ModelChoice::Preset { name, n_env, params }, source)
            }
            (None, Some(path)) => {
                if flags.n_env.is_some() || !flags.params.is_empty() || flags.coupling.is_some() {
                    return Err(Error::Parse("--n-env, --param and --coupling apply to presets only".into()));
                }
                let model = ModelFile::load(&path)?;
                (ModelChoice::File { path }, ModelSource::Inline { model })
            }
        };
        Ok(Self { model, dim_cap, source })
    }

    pub fn build(&self) -> Result<HamiltonianModel> {
        self.source.build(self.dim_cap)
    }

    pub fn preset(&self) -> Option<(Preset, usize, &PresetParams)> {
        match &self.model {
            ModelChoice::Preset { name, n_env, params } => Some((*name, *n_env, params)),
            ModelChoice::File { .. } => None,
        }
    }
}

/// Every simulation option after merging flags, config file and defaults.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    pub initial_state: InitialStateKind,
    pub trials: usize,
    pub seed: u64,
    pub state_seed: Option<u64>,
    pub times: TimeGrid,
    pub fragment_sampler: FragmentSampler,
    pub sizes: Option<Vec<usize>>,
    pub universe: UniverseMode,
    pub epsilon: f64,
    pub max_trials: usize,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub plateau_summary: bool,
}

impl RunConfig {
    pub fn resolve(model_flags: &ModelArgs, flags: &RunArgs, out: Option<PathBuf>, file: &FileConfig) -> Result<Self> {
        let model = ModelConfig::resolve(model_flags, file)?;
        let built = model.build()?;
        let random = built.distributions().any(|d| !matches!(d, CoefficientDistribution::Constant { .. }));
        let preset = model.preset();

        let default_trials = match preset {
            Some((p, ..)) => default_trials(p),
            None if random => 100,
            None => 1,
        };
        let trials = flags.trials.or(file.trials).unwrap_or(default_trials);

        let default_t_max = match preset {
            Some((p, n_env, params)) => default_t_max(p, n_env, params),
            None => 10.0,
        };
        let times = match (flags.t_max, flags.t_points, &file.times) {
            (None, None, Some(times)) => TimeGrid::Explicit { times: times.clone() },
            _ => TimeGrid::Linear {
                t_max: flags.t_max.or(file.t_max).unwrap_or(default_t_max),
                points: flags.t_points.or(file.t_points).unwrap_or(DEFAULT_T_POINTS),
            },
        };

        let fragment_sampler = match (&flags.fragment_sampler, &file.fragment_sampler) {
            (Some(s), _) => s.parse()?,
            (None, Some(s)) => s.resolve(|x| x.parse())?,
            (None, None) => FragmentSampler::Auto,
        };
        let initial_state = match (&flags.initial_state, &file.initial_state) {
            (Some(s), _) => InitialStateKind::parse(s)?,
            (None, Some(s)) => s.resolve(InitialStateKind::parse)?,
            (None, None) => InitialStateKind::Preset,
        };
        let universe = match &flags.universe {
            Some(u) => parse_universe(u)?,
            None => file.universe.unwrap_or_default(),
        };
        let epsilon = flags.epsilon.or(file.epsilon).unwrap_or(DEFAULT_PLATEAU_EPSILON);
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Parse(format!("epsilon must be non-negative, got {epsilon}")));
        }
        Ok(Self {
            model,
            initial_state,
            trials,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            state_seed: flags.state_seed.or(file.state_seed),
            times,
            fragment_sampler,
            sizes: flags.sizes.clone().or_else(|| file.sizes.clone()),
            universe,
            epsilon,
            max_trials: flags.max_trials.or(file.max_trials).unwrap_or(DEFAULT_MAX_TRIALS),
            workers: flags.workers.or(file.workers),
            out: out.or_else(|| file.out.clone()),
            plateau_summary: flags.plateau_summary || file.plateau_summary.unwrap_or(false),
        })
    }

    pub fn spec(&self) -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(self.model.source.clone(), self.initial_state.clone())
            .trials(self.trials)
            .times(self.times.clone())
            .sampler(self.fragment_sampler)
            .seed(self.seed)
            .universe(self.universe);
        spec.state_seed = self.state_seed;
        spec.sizes = self.sizes.clone();
        spec.dim_cap = self.model.dim_cap;
        spec.max_trials = self.max_trials;
        spec
    }
}

fn parse_universe(s: &str) -> Result<UniverseMode> {
    match s {
        "opened" => Ok(UniverseMode::Opened),
        "all" => Ok(UniverseMode::All),
        _ => Err(Error::Parse(format!("universe must be `opened` or `all`, got {s:?}"))),
    }
}
