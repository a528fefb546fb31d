use crate::model::{Preset, PresetParams};

/// Trials averaged by default. Presets whose coefficients are all fixed are
/// deterministic and need a single trial.
pub fn default_trials(preset: Preset) -> usize {
    use Preset::*;
    match preset {
        A | B | C | D | Qubit => 100,
        E | F | G | H => 500,
        I | J | K | L | Demon | Micromaser => 1,
    }
}

/// Default end of the time grid: long enough for each preset's records to
/// settle (eight alternation periods for E-H, every collision for
/// collision models).
pub fn default_t_max(preset: Preset, n_env: usize, params: &PresetParams) -> f64 {
    use Preset::*;
    let param = |key: &str, default: f64| params.values.get(key).copied().unwrap_or(default);
    match preset {
        A | B | C | D => 6.0,
        E | F | G | H => 8.0 * param("tau", 3.0),
        I | J | K | L | Demon | Micromaser => n_env as f64 * param("tau", 1.0),
        Qubit => 20.0,
    }
}
