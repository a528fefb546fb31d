use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::decoherence::DecoherenceResult;
use super::run::{ExperimentResult, ModelSource};
use crate::error::Result;
use crate::information::plateau_score;

pub const PROFILE_HEADER: [&str; 7] = ["time", "fragment_size", "mean_mi", "mean_mi_normalized", "stderr", "trials", "n_env"];

/// One row of a profile CSV. `n_env` is the number of sites fragments were
/// drawn from at that time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub time: f64,
    pub fragment_size: usize,
    pub mean_mi: f64,
    pub mean_mi_normalized: f64,
    pub stderr: f64,
    pub trials: usize,
    pub n_env: usize,
}

pub fn profile_rows(result: &ExperimentResult) -> Vec<ProfileRow> {
    let trials = result.profile.trials;
    result
        .profile
        .slices
        .iter()
        .flat_map(|s| {
            s.cells.iter().map(move |c| ProfileRow {
                time: s.time,
                fragment_size: c.size,
                mean_mi: c.mean_mi,
                mean_mi_normalized: c.mean_mi_normalized,
                stderr: c.stderr,
                trials,
                n_env: s.universe,
            })
        })
        .collect()
}

pub fn write_profile_csv<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(PROFILE_HEADER)?;
    for row in profile_rows(result) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_profile_csv(path: &Path) -> Result<Vec<ProfileRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().ne(PROFILE_HEADER) {
        return Err(crate::Error::Parse(format!("unexpected profile header {headers:?}")));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// `time,plateau_score,n_env` for every output time.
pub fn write_plateau_csv<W: Write>(result: &ExperimentResult, epsilon: f64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "plateau_score", "n_env"])?;
    for s in &result.profile.slices {
        w.write_record([s.time.to_string(), plateau_score(s, epsilon).to_string(), s.universe.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_decoherence_csv<W: Write>(result: &DecoherenceResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "mean_gamma_sq", "stderr", "trials"])?;
    for i in 0..result.times.len() {
        w.write_record([
            result.times[i].to_string(),
            result.mean_gamma_sq[i].to_string(),
            result.stderr[i].to_string(),
            result.trials.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Sidecar metadata: everything needed to rerun and interpret a profile.
pub fn metadata(result: &ExperimentResult, epsilon: f64) -> serde_json::Value {
    let resolved = match &result.spec.model {
        ModelSource::Preset { name, params, .. } => params.resolve(*name).ok().map(|r| serde_json::to_value(r).unwrap_or_default()),
        _ => None,
    };
    serde_json::json!({
        "software": { "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") },
        "model": result.model_name,
        "spec": result.spec,
        "resolved_parameters": resolved,
        "seeds": {
            "master": result.spec.seed,
            "state": result.spec.state_seed.unwrap_or(result.spec.seed),
        },
        "trials": result.trials,
        "verdict": result.verdict,
        "plateau": {
            "epsilon": epsilon,
            "final_score": result.profile.last().map(|s| plateau_score(s, epsilon)),
            "definition": "fraction of fragment sizes 1..N-1 whose normalized mutual information lies within epsilon of 1; an operational criterion chosen for this tool",
        },
        "wall_time": result.wall,
        "caveat": result.caveat,
    })
}

pub fn write_metadata(result: &ExperimentResult, epsilon: f64, path: &Path) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, &metadata(result, epsilon))?;
    writeln!(f)?;
    Ok(())
}
