use serde::{Deserialize, Serialize};

use super::{ClassifierVerdict, Overall};
use crate::linalg::dense::to_pairs;

type Pairs = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub sequence: String,
    pub sites: Vec<usize>,
    pub norm: f64,
    pub operator: Pairs,
}

/// Serializable form of a [`ClassifierVerdict`]; matrices are row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub model: String,
    pub verdict: String,
    pub overall: Overall,
    pub reason: String,
    pub pointer_observable: Option<Pairs>,
    pub pointer_spectrum: Option<Vec<f64>>,
    /// Columns are pointer states.
    pub pointer_basis: Option<Pairs>,
    pub pointer_degenerate: bool,
    pub commutant_dim: usize,
    pub mixing_free: bool,
    pub witness: Option<WitnessReport>,
    pub env_separable: bool,
    pub continuous_support: bool,
    pub schedule_prefix_cutoff: Option<f64>,
    pub warnings: Vec<String>,
    pub sample_times: Vec<f64>,
}

impl VerdictReport {
    pub fn new(model: &str, v: &ClassifierVerdict) -> Self {
        Self {
            model: model.to_string(),
            verdict: v.overall.label(),
            overall: v.overall,
            reason: v.reason.clone(),
            pointer_observable: v.pointer.as_ref().map(|p| to_pairs(&p.operator)),
            pointer_spectrum: v.pointer.as_ref().map(|p| p.spectrum.clone()),
            pointer_basis: v.pointer.as_ref().map(|p| to_pairs(&p.basis)),
            pointer_degenerate: v.pointer_degenerate(),
            commutant_dim: v.commutant_dim,
            mixing_free: v.mixing_free(),
            witness: v.mixing.witness().map(|w| WitnessReport {
                sequence: w.sequence.clone(),
                sites: w.sites.clone(),
                norm: w.norm,
                operator: to_pairs(&w.operator),
            }),
            env_separable: v.env_separable,
            continuous_support: v.continuous_support,
            schedule_prefix_cutoff: v.schedule_prefix_cutoff,
            warnings: v.warnings.clone(),
            sample_times: v.sample_times.clone(),
        }
    }
}
