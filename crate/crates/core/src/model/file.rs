//! JSON model definitions.
//!
//! ```json
//! {
//!   "name": "two-site example",
//!   "layout": [2, 2, 2],
//!   "system_free": [{"op": "pauli_x", "coefficient": {"kind": "constant", "value": 0.5}}],
//!   "interactions": [
//!     {"system_op": "pauli_z", "env_site": 1, "env_op": "pauli_z",
//!      "coefficient": {"kind": "normal", "mean": 0.0, "sigma": 1.0}},
//!     {"system_op": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]], "env_site": 2, "env_op": "pauli_x",
//!      "schedule": {"kind": "window", "start": 1.0, "stop": 1.95}}
//!   ]
//! }
//! ```
//!
//! Operators are names understood by [`operators::by_name`] or explicit
//! matrices of `[re, im]` pairs. Coefficients default to the constant 1 and
//! schedules to always on. `raw_terms` take a list of `{site, op}` factors and
//! may act on several environment sites. A `preset` entry starts from a named
//! model and appends whatever terms the file lists.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::distribution::CoefficientDistribution;
use super::hamiltonian::{HamiltonianModel, LocalStates};
use super::operators;
use super::presets::{preset_with_cap, Preset, PresetParams};
use super::schedule::Schedule;
use crate::error::{Error, Result};
use crate::layout::{SubsystemLayout, DEFAULT_DIM_CAP};
use crate::linalg::dense::{from_pairs, ComplexMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Name(String),
    Matrix(Vec<Vec<[f64; 2]>>),
}

impl OperatorSpec {
    pub fn resolve(&self, dim: usize) -> Result<ComplexMatrix> {
        let m = match self {
            OperatorSpec::Name(name) => operators::by_name(name, dim)?,
            OperatorSpec::Matrix(rows) => from_pairs(rows)?,
        };
        if m.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!("operator of shape {:?} on a site of dimension {dim}", m.shape())));
        }
        Ok(m)
    }
}

fn constant_one() -> CoefficientDistribution {
    CoefficientDistribution::constant(1.0)
}

fn always_on() -> Schedule {
    Schedule::AlwaysOn
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeTermSpec {
    pub op: OperatorSpec,
    #[serde(default = "constant_one")]
    pub coefficient: CoefficientDistribution,
    #[serde(default = "always_on")]
    pub schedule: Schedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvFreeTermSpec {
    pub site: usize,
    pub op: OperatorSpec,
    #[serde(default = "constant_one")]
    pub coefficient: CoefficientDistribution,
    #[serde(default = "always_on")]
    pub schedule: Schedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionSpec {
    pub system_op: OperatorSpec,
    pub env_site: usize,
    pub env_op: OperatorSpec,
    #[serde(default = "constant_one")]
    pub coefficient: CoefficientDistribution,
    #[serde(default = "always_on")]
    pub schedule: Schedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub site: usize,
    pub op: OperatorSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTermSpec {
    pub factors: Vec<FactorSpec>,
    #[serde(default = "constant_one")]
    pub coefficient: CoefficientDistribution,
    #[serde(default = "always_on")]
    pub schedule: Schedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetRef {
    pub name: String,
    pub n_env: Option<usize>,
    #[serde(default)]
    pub params: PresetParams,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub layout: Option<Vec<usize>>,
    #[serde(default)]
    pub preset: Option<PresetRef>,
    #[serde(default)]
    pub system_free: Vec<FreeTermSpec>,
    #[serde(default)]
    pub env_free: Vec<EnvFreeTermSpec>,
    #[serde(default)]
    pub interactions: Vec<InteractionSpec>,
    #[serde(default)]
    pub raw_terms: Vec<RawTermSpec>,
    /// Suggested product initial state: one local vector of `[re, im]` pairs per site.
    #[serde(default)]
    pub initial_state: Option<Vec<Vec<[f64; 2]>>>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("model file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<HamiltonianModel> {
        self.build_with_cap(DEFAULT_DIM_CAP)
    }

    pub fn build_with_cap(&self, dim_cap: usize) -> Result<HamiltonianModel> {
        let base = match &self.preset {
            Some(p) => {
                let name: Preset = p.name.parse()?;
                Some(preset_with_cap(name, p.n_env.unwrap_or(name.default_n_env()), &p.params, dim_cap)?)
            }
            None => None,
        };
        let layout = match (&self.layout, &base) {
            (Some(dims), Some(m)) if dims.as_slice() != m.layout().dims() => {
                return Err(Error::InvalidLayout(format!(
                    "layout {dims:?} disagrees with the preset layout {:?}",
                    m.layout().dims()
                )))
            }
            (_, Some(m)) => m.layout().clone(),
            (Some(dims), None) => SubsystemLayout::with_cap(dims.clone(), dim_cap)?,
            (None, None) => return Err(Error::Parse("model file needs a layout or a preset".into())),
        };

        let mut b = HamiltonianModel::builder(layout.clone());
        if let Some(m) = &base {
            b = b.name(m.info.name.clone());
            if let Some(s) = &m.info.suggested_state {
                b = b.suggested_state(s.clone());
            }
            for note in &m.info.notes {
                b = b.note(note.clone());
            }
            for t in m.system_free() {
                b = b.system_free(t.op.clone(), t.coefficient, t.schedule);
            }
            for t in m.env_free() {
                b = b.env_free(t.site, t.term.op.clone(), t.term.coefficient, t.term.schedule);
            }
            for t in m.interactions() {
                b = b.interaction(t.system_op.clone(), t.env_site, t.env_op.clone(), t.coefficient, t.schedule);
            }
            for t in m.raw_terms() {
                b = b.raw_term(t.factors.clone(), t.coefficient, t.schedule);
            }
        }
        if let Some(name) = &self.name {
            b = b.name(name.clone());
        }
        let dim = |site: usize| -> Result<usize> {
            layout.check_site(site)?;
            Ok(layout.dim(site))
        };
        for t in &self.system_free {
            b = b.system_free(t.op.resolve(layout.system_dim())?, t.coefficient, t.schedule);
        }
        for t in &self.env_free {
            b = b.env_free(t.site, t.op.resolve(dim(t.site)?)?, t.coefficient, t.schedule);
        }
        for t in &self.interactions {
            b = b.interaction(
                t.system_op.resolve(layout.system_dim())?,
                t.env_site,
                t.env_op.resolve(dim(t.env_site)?)?,
                t.coefficient,
                t.schedule,
            );
        }
        for t in &self.raw_terms {
            let factors =
                t.factors.iter().map(|f| Ok((f.site, f.op.resolve(dim(f.site)?)?))).collect::<Result<Vec<_>>>()?;
            b = b.raw_term(factors, t.coefficient, t.schedule);
        }
        if let Some(state) = &self.initial_state {
            let locals: LocalStates = state
                .iter()
                .map(|v| v.iter().map(|[re, im]| num_complex::Complex64::new(*re, *im)).collect())
                .collect();
            b = b.suggested_state(locals);
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{check_env_separability, classify, Overall};

    #[test]
    fn parses_documented_example() {
        let text = r#"{
          "name": "two-site example",
          "layout": [2, 2, 2],
          "system_free": [{"op": "pauli_x", "coefficient": {"kind": "constant", "value": 0.5}}],
          "interactions": [
            {"system_op": "pauli_z", "env_site": 1, "env_op": "pauli_z",
             "coefficient": {"kind": "normal", "mean": 0.0, "sigma": 1.0}},
            {"system_op": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]], "env_site": 2, "env_op": "pauli_x",
             "schedule": {"kind": "window", "start": 1.0, "stop": 1.95}}
          ]
        }"#;
        let m = ModelFile::from_json(text).unwrap().build().unwrap();
        assert_eq!(m.interactions().len(), 2);
        assert_eq!(m.info.name, "two-site example");
        assert!(m.has_windows());
    }

    #[test]
    fn raw_terms_and_separability() {
        let coupled = r#"{"layout": [2, 2, 2], "raw_terms": [{"factors": [{"site": 1, "op": "z"}, {"site": 2, "op": "z"}]}]}"#;
        let m = ModelFile::from_json(coupled).unwrap().build().unwrap();
        assert!(!check_env_separability(&m));
        assert_eq!(classify(&m).unwrap().overall, Overall::FailsMixing);

        let ok = r#"{"layout": [2, 2], "raw_terms": [{"factors": [{"site": 0, "op": "z"}, {"site": 1, "op": "z"}],
                     "coefficient": {"kind": "normal", "mean": 0, "sigma": 1}}]}"#;
        let m = ModelFile::from_json(ok).unwrap().build().unwrap();
        assert!(check_env_separability(&m));
        assert_eq!(classify(&m).unwrap().overall, Overall::SupportsQd);
    }

    #[test]
    fn preset_with_extra_terms() {
        let text = r#"{"preset": {"name": "A", "n_env": 3},
                       "interactions": [{"system_op": "gellmann_4", "env_site": 2, "env_op": "pauli_x",
                                          "coefficient": {"kind": "normal", "mean": 0, "sigma": 1}}]}"#;
        let m = ModelFile::from_json(text).unwrap().build().unwrap();
        assert_eq!(m.interactions().len(), 4);
        assert_ne!(classify(&m).unwrap().overall, Overall::SupportsQd);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(ModelFile::from_json("{\"layout\": [2], \"bogus\": 1}").is_err());
        assert!(ModelFile::from_json("{}").unwrap().build().is_err());
        let wrong_dim = r#"{"layout": [2, 3], "interactions": [{"system_op": "z", "env_site": 1, "env_op": "pauli_z"}]}"#;
        assert!(ModelFile::from_json(wrong_dim).unwrap().build().is_err());
    }
}
