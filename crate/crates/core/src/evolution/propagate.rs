use std::collections::HashMap;

use super::state::StateVector;
use crate::error::{Error, Result};
use crate::linalg::{expm_action, KrylovConfig, SparseOperator};
use crate::model::ModelInstance;

/// States at a list of output times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidParameter("output times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("output times must be ascending".into()));
    }
    Ok(())
}

/// Propagate `psi0` (the state at `t = 0`) and hand the state at each output
/// time to `visit` without keeping the trajectory in memory.
///
/// Steps never cross a schedule breakpoint, so the Hamiltonian is constant on
/// each step; it is evaluated at the step midpoint and cached per set of active
/// terms.
pub fn evolve_with<F>(
    instance: &ModelInstance,
    psi0: &StateVector,
    times: &[f64],
    cfg: &KrylovConfig,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, f64, &StateVector) -> Result<()>,
{
    if psi0.layout() != instance.model().layout() {
        return Err(Error::DimensionMismatch("initial state layout differs from the model layout".into()));
    }
    check_times(times)?;
    let Some(&horizon) = times.last() else { return Ok(()) };
    let breakpoints = instance.breakpoints(horizon.max(f64::MIN_POSITIVE));
    let mut cache: HashMap<Vec<usize>, SparseOperator> = HashMap::new();
    let mut psi = psi0.clone();
    let mut t = 0.0;
    for (i, &target) in times.iter().enumerate() {
        while t < target {
            let next = breakpoints.iter().copied().find(|&b| b > t).unwrap_or(target);
            let stop = next.min(target);
            let active = instance.active_terms(0.5 * (t + stop));
            let h = cache.entry(active).or_insert_with_key(|k| instance.assemble_terms(k));
            if h.nnz() > 0 {
                let next_amps = expm_action(h, stop - t, psi.amplitudes(), cfg)?;
                *psi.amplitudes_mut() = next_amps;
            }
            t = stop;
        }
        visit(i, target, &psi)?;
    }
    Ok(())
}

pub fn evolve(instance: &ModelInstance, psi0: &StateVector, times: &[f64], cfg: &KrylovConfig) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(times.len());
    evolve_with(instance, psi0, times, cfg, |_, _, s| {
        states.push(s.clone());
        Ok(())
    })?;
    Ok(Trajectory { times: times.to_vec(), states })
}

/// `n` equally spaced times from 0 to `t_max` inclusive.
pub fn linear_grid(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_max],
        _ => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}
