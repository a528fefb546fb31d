use std::io::Write;

use serde::{Deserialize, Serialize};

use super::decoherence::{run_decoherence, DecoherenceResult};
use super::initial::InitialStateKind;
use super::run::{run_with, ExperimentResult, ExperimentSpec, ModelSource, RunOptions};
use crate::error::{Error, Result};
use crate::information::plateau_score;
use crate::model::CoefficientDistribution;

/// The quantity varied across a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values", rename_all = "snake_case")]
pub enum SweepAxis {
    InitialStateKind(Vec<InitialStateKind>),
    /// Replaces the distribution of the preset's random couplings.
    DistributionKind(Vec<CoefficientDistribution>),
    /// Index of the collision unit whose window is moved (presets J and K).
    ReplacedUnitIndex(Vec<usize>),
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::InitialStateKind(_) => "initial_state_kind",
            SweepAxis::DistributionKind(_) => "distribution_kind",
            SweepAxis::ReplacedUnitIndex(_) => "replaced_unit_index",
        }
    }

    fn len(&self) -> usize {
        match self {
            SweepAxis::InitialStateKind(v) => v.len(),
            SweepAxis::DistributionKind(v) => v.len(),
            SweepAxis::ReplacedUnitIndex(v) => v.len(),
        }
    }

    /// `base` with the `k`-th axis value applied, and a label for that value.
    fn apply(&self, base: &ExperimentSpec, k: usize) -> Result<(String, ExperimentSpec)> {
        let mut spec = base.clone();
        let label = match self {
            SweepAxis::InitialStateKind(v) => {
                spec.initial_state = v[k].clone();
                v[k].name().to_string()
            }
            SweepAxis::DistributionKind(v) => {
                preset_params(&mut spec)?.coupling = Some(v[k]);
                v[k].to_string()
            }
            SweepAxis::ReplacedUnitIndex(v) => {
                preset_params(&mut spec)?.values.insert("replaced_unit".into(), v[k] as f64);
                v[k].to_string()
            }
        };
        Ok((label, spec))
    }
}

fn preset_params(spec: &mut ExperimentSpec) -> Result<&mut crate::model::PresetParams> {
    match &mut spec.model {
        ModelSource::Preset { params, .. } => Ok(params),
        _ => Err(Error::InvalidParameter("this sweep axis needs a preset model".into())),
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepOutcome {
    Profile(Box<ExperimentResult>),
    Decoherence(DecoherenceResult),
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub label: String,
    pub spec: ExperimentSpec,
    pub outcome: SweepOutcome,
}

impl SweepEntry {
    pub fn verdict(&self) -> Option<String> {
        match &self.outcome {
            SweepOutcome::Profile(r) => r.verdict.as_ref().map(|v| v.overall.label()),
            SweepOutcome::Decoherence(_) => None,
        }
    }

    pub fn final_plateau(&self, epsilon: f64) -> Option<f64> {
        match &self.outcome {
            SweepOutcome::Profile(r) => r.profile.last().map(|s| plateau_score(s, epsilon)),
            SweepOutcome::Decoherence(_) => None,
        }
    }

    /// Highest plateau score over the time grid and the time it occurs.
    pub fn peak_plateau(&self, epsilon: f64) -> Option<(f64, f64)> {
        match &self.outcome {
            SweepOutcome::Profile(r) => r
                .profile
                .slices
                .iter()
                .map(|s| (s.time, plateau_score(s, epsilon)))
                .fold(None, |best: Option<(f64, f64)>, x| match best {
                    Some(b) if b.1 >= x.1 => Some(b),
                    _ => Some(x),
                }),
            SweepOutcome::Decoherence(_) => None,
        }
    }

    /// See [`revival_distance`].
    pub fn revival_distance(&self) -> Option<f64> {
        match &self.outcome {
            SweepOutcome::Decoherence(d) => revival_distance(&d.mean_gamma_sq),
            SweepOutcome::Profile(_) => None,
        }
    }
}

/// Closest approach of a decoherence curve to 1 after it has first dropped
/// below 1/2. `None` if it never drops that far.
pub fn revival_distance(gamma_sq: &[f64]) -> Option<f64> {
    let start = gamma_sq.iter().position(|&g| g < 0.5)?;
    gamma_sq[start..].iter().map(|g| (1.0 - g).abs()).reduce(f64::min)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub axis: String,
    pub entries: Vec<SweepEntry>,
}

/// What each sweep point measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMeasure {
    Profile,
    /// Decoherence factor between two pointer states.
    Decoherence { pair: (usize, usize) },
}

pub fn run_sweep(base: &ExperimentSpec, axis: &SweepAxis, measure: SweepMeasure, opts: RunOptions) -> Result<SweepResult> {
    if axis.len() == 0 {
        return Err(Error::InvalidParameter("sweep axis has no values".into()));
    }
    let mut entries = Vec::with_capacity(axis.len());
    for k in 0..axis.len() {
        let (label, spec) = axis.apply(base, k)?;
        let outcome = match measure {
            SweepMeasure::Profile => SweepOutcome::Profile(Box::new(run_with(&spec, opts)?)),
            SweepMeasure::Decoherence { pair } => SweepOutcome::Decoherence(run_decoherence(&spec, pair, opts)?),
        };
        entries.push(SweepEntry { label, spec, outcome });
    }
    Ok(SweepResult { axis: axis.name().to_string(), entries })
}

/// Comparison table, one row per axis value. Columns that do not apply to the
/// measured quantity are left empty.
pub fn write_sweep_summary<W: Write>(result: &SweepResult, epsilon: f64, out: W) -> Result<()> {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        result.axis.as_str(),
        "verdict",
        "final_plateau_score",
        "peak_plateau_score",
        "peak_plateau_time",
        "revival_distance",
    ])?;
    for e in &result.entries {
        let peak = e.peak_plateau(epsilon);
        w.write_record([
            e.label.clone(),
            e.verdict().unwrap_or_default(),
            opt(e.final_plateau(epsilon)),
            opt(peak.map(|p| p.1)),
            opt(peak.map(|p| p.0)),
            opt(e.revival_distance()),
        ])?;
    }
    w.flush()?;
    Ok(())
}
