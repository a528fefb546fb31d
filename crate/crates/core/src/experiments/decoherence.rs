use std::sync::Arc;

use serde::Serialize;

use super::initial::initial_state_for;
use super::run::{ExperimentSpec, RunOptions};
use crate::classifier::classify;
use crate::error::{Error, Result};
use crate::evolution::{decoherence_factor, evolve_with, BRANCH_PURITY_TOL};
use crate::linalg::KrylovConfig;
use crate::model::ModelInstance;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceResult {
    pub model_name: String,
    pub pair: (usize, usize),
    pub times: Vec<f64>,
    /// Trial mean of `|Γ(t)|²`.
    pub mean_gamma_sq: Vec<f64>,
    pub stderr: Vec<f64>,
    pub trials: usize,
}

/// Trial-averaged `|Γ(t)|²` between pointer states `pair` of the model's
/// pointer observable.
pub fn run_decoherence(spec: &ExperimentSpec, pair: (usize, usize), opts: RunOptions) -> Result<DecoherenceResult> {
    let model = Arc::new(spec.model.build(spec.dim_cap)?);
    let verdict = classify(&model)?;
    let pointer = verdict
        .pointer
        .ok_or_else(|| Error::IncompatibleState("model has no time-independent pointer observable".into()))?;
    let times = spec.times.times()?;
    if spec.trials == 0 || spec.trials > spec.max_trials {
        return Err(Error::ResourceCap(format!("trial count {} outside 1..={}", spec.trials, spec.max_trials)));
    }
    let psi0 = initial_state_for(&spec.initial_state, &model, spec.state_seed.unwrap_or(spec.seed))?;
    let base = ModelInstance::new(Arc::clone(&model), spec.seed)?;
    let cfg = KrylovConfig::with_tol(spec.krylov_tol);

    let trial = |k: usize| -> Result<Vec<f64>> {
        let instance = base.reseed(spec.trial_seed(k));
        let mut out = Vec::with_capacity(times.len());
        evolve_with(&instance, &psi0, &times, &cfg, |_, _, psi| {
            let g = decoherence_factor(std::slice::from_ref(psi), &pointer.basis, pair, BRANCH_PURITY_TOL)?;
            out.push(g[0].norm_sqr());
            Ok(())
        })?;
        Ok(out)
    };

    #[cfg(feature = "parallel")]
    let per_trial: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        let work = || (0..spec.trials).into_par_iter().map(trial).collect::<Result<Vec<_>>>();
        match opts.workers {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::ResourceCap(format!("worker pool: {e}")))?
                .install(work)?,
            None => work()?,
        }
    };
    #[cfg(not(feature = "parallel"))]
    let per_trial: Vec<Vec<f64>> = {
        let _ = opts;
        (0..spec.trials).map(trial).collect::<Result<_>>()?
    };

    let n = per_trial.len() as f64;
    let mut mean_gamma_sq = Vec::with_capacity(times.len());
    let mut stderr = Vec::with_capacity(times.len());
    for i in 0..times.len() {
        let mean = per_trial.iter().map(|v| v[i]).sum::<f64>() / n;
        let se = if per_trial.len() > 1 {
            (per_trial.iter().map(|v| (v[i] - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        mean_gamma_sq.push(mean);
        stderr.push(se);
    }
    Ok(DecoherenceResult {
        model_name: model.info.name.clone(),
        pair,
        times,
        mean_gamma_sq,
        stderr,
        trials: spec.trials,
    })
}
