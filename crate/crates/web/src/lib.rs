//! WebAssembly bindings for the single-page demo in `www/`.
//!
//! Every export returns a JSON string. The plain-Rust `*_json` functions do the
//! work so they can be tested natively.

use darwinism::classifier::{classify, VerdictReport};
use darwinism::experiments::{
    default_trials, run_decoherence, run_with, ExperimentSpec, InitialStateKind, ModelSource, RunOptions,
};
use darwinism::information::{plateau_score, DEFAULT_PLATEAU_EPSILON};
use darwinism::model::{Preset, PresetParams};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Browsers get a smaller cap than the CLI so a bad input cannot hang the tab.
pub const WEB_DIM_CAP: usize = 1 << 12;
pub const WEB_MAX_TRIALS: usize = 256;

fn source(preset: &str, n_env: usize, coupling: Option<&str>) -> Result<ModelSource, String> {
    let name: Preset = preset.parse().map_err(|e: darwinism::Error| e.to_string())?;
    let mut params = PresetParams::default();
    if let Some(c) = coupling.filter(|c| !c.is_empty()) {
        params.coupling = Some(c.parse().map_err(|e: darwinism::Error| e.to_string())?);
    }
    Ok(ModelSource::Preset { name, n_env, params })
}

fn spec(src: ModelSource, trials: usize, t_max: f64, points: usize, seed: u64) -> Result<ExperimentSpec, String> {
    if trials > WEB_MAX_TRIALS {
        return Err(format!("at most {WEB_MAX_TRIALS} trials in the browser"));
    }
    let mut spec = ExperimentSpec::new(src, InitialStateKind::Preset).trials(trials).linear_times(t_max, points).seed(seed);
    spec.dim_cap = WEB_DIM_CAP;
    Ok(spec)
}

pub fn classify_json(preset: &str, n_env: usize) -> Result<String, String> {
    let src = source(preset, n_env, None)?;
    let model = src.build(WEB_DIM_CAP).map_err(|e| e.to_string())?;
    let verdict = classify(&model).map_err(|e| e.to_string())?;
    serde_json::to_string(&VerdictReport::new(&model.info.name, &verdict)).map_err(|e| e.to_string())
}

/// Normalized MI against fragment size at every time, with plateau scores.
/// `trials = 0` uses the preset's default.
pub fn profile_json(preset: &str, n_env: usize, trials: usize, t_max: f64, points: usize, seed: u64) -> Result<String, String> {
    let src = source(preset, n_env, None)?;
    let trials = match (trials, &src) {
        (0, ModelSource::Preset { name, .. }) => default_trials(*name).min(32),
        (k, _) => k,
    };
    let result = run_with(&spec(src, trials, t_max, points, seed)?, RunOptions::default()).map_err(|e| e.to_string())?;
    let slices: Vec<_> = result
        .profile
        .slices
        .iter()
        .map(|s| {
            json!({
                "time": s.time,
                "universe": s.universe,
                "sizes": s.cells.iter().map(|c| c.size).collect::<Vec<_>>(),
                "mi": s.cells.iter().map(|c| c.mean_mi_normalized).collect::<Vec<_>>(),
                "stderr": s.cells.iter().map(|c| c.stderr).collect::<Vec<_>>(),
                "plateau": plateau_score(s, DEFAULT_PLATEAU_EPSILON),
            })
        })
        .collect();
    Ok(json!({
        "model": result.model_name,
        "verdict": result.verdict.map(|v| v.verdict),
        "trials": trials,
        "slices": slices,
    })
    .to_string())
}

/// `|Γ(t)|²` between the first two pointer states.
pub fn decoherence_json(
    preset: &str,
    n_env: usize,
    coupling: &str,
    trials: usize,
    t_max: f64,
    points: usize,
    seed: u64,
) -> Result<String, String> {
    let src = source(preset, n_env, Some(coupling))?;
    let result =
        run_decoherence(&spec(src, trials.max(1), t_max, points, seed)?, (0, 1), RunOptions::default()).map_err(|e| e.to_string())?;
    Ok(json!({
        "model": result.model_name,
        "times": result.times,
        "gamma_sq": result.mean_gamma_sq,
        "stderr": result.stderr,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn classify_preset(preset: &str, n_env: usize) -> Result<String, JsValue> {
    classify_json(preset, n_env).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate_profile(preset: &str, n_env: usize, trials: usize, t_max: f64, points: usize, seed: u64) -> Result<String, JsValue> {
    profile_json(preset, n_env, trials, t_max, points, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn decoherence_curve(
    preset: &str,
    n_env: usize,
    coupling: &str,
    trials: usize,
    t_max: f64,
    points: usize,
    seed: u64,
) -> Result<String, JsValue> {
    decoherence_json(preset, n_env, coupling, trials, t_max, points, seed).map_err(|e| JsValue::from_str(&e))
}
