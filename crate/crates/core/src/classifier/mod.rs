//! Static analysis of a [`HamiltonianModel`]: pointer observable, induced
//! intra-environment mixing, environment separability, coupling support, and
//! the collision-model state-preparation prefix.

pub mod closure;
pub mod commutant;
pub mod initial_state;
pub mod report;

use serde::{Deserialize, Serialize};

pub use closure::{mixing_closure, MixingOutcome, MixingWitness, TaggedOp};
pub use commutant::{commutant, pointer_observable, CommutantBasis, PointerObservable};
pub use initial_state::{check_initial_state, check_initial_state_for_model};
pub use report::VerdictReport;

use crate::error::Result;
use crate::linalg::dense::{commutator, hs_norm, identity, max_abs, trace, ComplexMatrix};
use crate::model::{CoefficientDistribution, HamiltonianModel, Schedule};

/// A system-side operator of the model together with what switches it on.
#[derive(Debug, Clone)]
struct SystemTerm {
    op: ComplexMatrix,
    site: Option<usize>,
    schedule: Schedule,
    coefficient: CoefficientDistribution,
    label: String,
}

fn traceless_part(op: &ComplexMatrix) -> ComplexMatrix {
    let d = op.nrows();
    op - identity(d) * (trace(op) / d as f64)
}

fn is_scalar(op: &ComplexMatrix) -> bool {
    hs_norm(&traceless_part(op)) <= 1e-12 * max_abs(op).max(1.0)
}

struct Structure {
    terms: Vec<SystemTerm>,
    /// Descriptions of terms acting on two or more environment sites.
    env_couplings: Vec<String>,
}

fn extract(model: &HamiltonianModel) -> Structure {
    let d = model.layout().system_dim();
    let mut terms = Vec::new();
    let mut env_couplings = Vec::new();
    for t in model.system_free() {
        let op = traceless_part(&t.op);
        if !is_scalar(&t.op) {
            terms.push(SystemTerm {
                op,
                site: None,
                schedule: t.schedule,
                coefficient: t.coefficient,
                label: "H_S".into(),
            });
        }
    }
    let mut per_site = std::collections::BTreeMap::<usize, usize>::new();
    let mut site_label = |site: usize| {
        let k = per_site.entry(site).or_insert(0);
        *k += 1;
        format!("S{site}.{k}")
    };
    for t in model.interactions() {
        terms.push(SystemTerm {
            op: t.system_op.clone(),
            site: Some(t.env_site),
            schedule: t.schedule,
            coefficient: t.coefficient,
            label: site_label(t.env_site),
        });
    }
    for (idx, t) in model.raw_terms().iter().enumerate() {
        let sys = t.factors.iter().find(|(s, _)| *s == 0).map(|(_, op)| op.clone()).unwrap_or_else(|| identity(d));
        let env: Vec<&(usize, ComplexMatrix)> = t.factors.iter().filter(|(s, op)| *s > 0 && !is_scalar(op)).collect();
        // A factor proportional to the identity acts trivially on its site.
        let env_scalar: crate::linalg::C64 = t
            .factors
            .iter()
            .filter(|(s, op)| *s > 0 && is_scalar(op))
            .map(|(_, op)| trace(op) / op.nrows() as f64)
            .product();
        match env.len() {
            0 => {
                if !is_scalar(&sys) {
                    terms.push(SystemTerm {
                        op: traceless_part(&sys) * env_scalar,
                        site: None,
                        schedule: t.schedule,
                        coefficient: t.coefficient,
                        label: format!("H_S(raw {idx})"),
                    });
                }
            }
            1 => {
                let (site, env_op) = env[0];
                let sys_traceless = traceless_part(&sys) * env_scalar;
                if hs_norm(&sys_traceless) > 1e-12 {
                    // tr(env_op) != 0 leaves a pure system part alongside the coupling.
                    let env_trace = trace(env_op) / env_op.nrows() as f64;
                    if env_trace.norm() > 1e-12 {
                        terms.push(SystemTerm {
                            op: &sys_traceless * env_trace,
                            site: None,
                            schedule: t.schedule,
                            coefficient: t.coefficient,
                            label: format!("H_S(raw {idx})"),
                        });
                    }
                    terms.push(SystemTerm {
                        op: sys_traceless,
                        site: Some(*site),
                        schedule: t.schedule,
                        coefficient: t.coefficient,
                        label: site_label(*site),
                    });
                }
            }
            _ => {
                let sites: Vec<String> = env.iter().map(|(s, _)| s.to_string()).collect();
                env_couplings.push(format!("raw term {idx} acts on environment sites {}", sites.join(", ")));
            }
        }
    }
    Structure { terms, env_couplings }
}

/// One interior time per schedule phase over a window covering every period
/// and collision window of the model, plus one time after all windows close.
pub fn default_sample_times(model: &HamiltonianModel) -> Vec<f64> {
    let mut horizon: f64 = 0.0;
    for s in model.schedules() {
        match *s {
            Schedule::AlwaysOn => {}
            Schedule::Alternating { .. } => horizon = horizon.max(s.period().unwrap_or(0.0)),
            Schedule::Window { stop, .. } => horizon = horizon.max(stop),
        }
    }
    if horizon == 0.0 {
        horizon = 1.0;
    }
    let bps = model.breakpoints(horizon);
    let mut times: Vec<f64> = bps.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    times.push(horizon + 0.5);
    times
}

/// Generators active at any of `times`. Free terms with fixed coefficients are
/// summed into one `H_S(t)` per time; free terms with random coefficients and
/// every interaction enter separately.
fn generators(terms: &[&SystemTerm], times: &[f64]) -> Vec<TaggedOp> {
    let mut out: Vec<TaggedOp> = Vec::new();
    let mut seen = vec![false; terms.len()];
    let mut fixed_hs: Vec<ComplexMatrix> = Vec::new();
    for &t in times {
        let mut h_s: Option<ComplexMatrix> = None;
        for (k, term) in terms.iter().enumerate() {
            if !term.schedule.is_active(t) {
                continue;
            }
            match (&term.coefficient, term.site) {
                (CoefficientDistribution::Constant { value }, None) => {
                    let add = term.op.scale(*value);
                    h_s = Some(match h_s {
                        Some(h) => h + add,
                        None => add,
                    });
                }
                _ => {
                    if !seen[k] {
                        seen[k] = true;
                        out.push(TaggedOp { op: term.op.clone(), site: term.site, label: term.label.clone() });
                    }
                }
            }
        }
        if let Some(h) = h_s {
            let norm = hs_norm(&h);
            if norm > 1e-12 && !fixed_hs.iter().any(|f| hs_norm(&(f - &h)) <= 1e-12 * norm) {
                fixed_hs.push(h.clone());
                out.push(TaggedOp { op: h, site: None, label: "H_S".into() });
            }
        }
    }
    // Put free terms first so witnesses read in the usual order.
    out.sort_by_key(|g| g.site.is_some());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Overall {
    SupportsQd,
    FailsNoPointer,
    FailsMixing,
    FailsSupport,
    StatePrepPrefix { cutoff: f64 },
}

impl Overall {
    pub fn label(&self) -> String {
        match self {
            Overall::SupportsQd => "supports_QD".into(),
            Overall::FailsNoPointer => "fails_no_pointer".into(),
            Overall::FailsMixing => "fails_mixing".into(),
            Overall::FailsSupport => "fails_support".into(),
            Overall::StatePrepPrefix { cutoff } => format!("state_prep_prefix({cutoff})"),
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Overall::FailsNoPointer | Overall::FailsMixing | Overall::FailsSupport)
    }
}

#[derive(Debug, Clone)]
pub struct ClassifierVerdict {
    pub pointer: Option<PointerObservable>,
    pub commutant_dim: usize,
    pub mixing: MixingOutcome,
    pub env_separable: bool,
    pub continuous_support: bool,
    pub schedule_prefix_cutoff: Option<f64>,
    pub overall: Overall,
    pub reason: String,
    pub warnings: Vec<String>,
    pub sample_times: Vec<f64>,
}

impl ClassifierVerdict {
    pub fn pointer_degenerate(&self) -> bool {
        self.pointer.as_ref().is_some_and(|p| p.degenerate)
    }

    pub fn mixing_free(&self) -> bool {
        self.mixing.is_free()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ClassifyOptions {
    /// Defaults to [`default_sample_times`].
    pub sample_times: Option<Vec<f64>>,
    /// Independent operators kept per site during the closure; defaults to `d^2`.
    pub max_ops: Option<usize>,
}

struct Analysis {
    commutant: CommutantBasis,
    pointer: Option<PointerObservable>,
    mixing: MixingOutcome,
}

impl Analysis {
    fn passes(&self) -> bool {
        self.pointer.is_some() && self.mixing.is_free()
    }
}

fn analyze(gens: &[TaggedOp], d: usize, max_ops: usize) -> Result<Analysis> {
    let ops: Vec<ComplexMatrix> = gens.iter().map(|g| g.op.clone()).collect();
    let commutant = commutant(&ops, d)?;
    let pointer = pointer_observable(&commutant)?;
    let mixing = mixing_closure(gens, max_ops)?;
    Ok(Analysis { commutant, pointer, mixing })
}

/// True iff every interaction that is not confined to a collision window draws
/// its coefficient from a distribution with continuous support.
pub fn check_support(model: &HamiltonianModel) -> bool {
    let s = extract(model);
    s.terms
        .iter()
        .filter(|t| t.site.is_some() && !t.schedule.is_window())
        .all(|t| t.coefficient.support_is_continuous())
}

/// True iff no term couples two environment sites.
pub fn check_env_separability(model: &HamiltonianModel) -> bool {
    extract(model).env_couplings.is_empty()
}

pub fn classify(model: &HamiltonianModel) -> Result<ClassifierVerdict> {
    classify_with(model, &ClassifyOptions::default())
}

pub fn classify_with(model: &HamiltonianModel, opts: &ClassifyOptions) -> Result<ClassifierVerdict> {
    let d = model.layout().system_dim();
    let max_ops = opts.max_ops.unwrap_or(d * d);
    let sample_times = opts.sample_times.clone().unwrap_or_else(|| default_sample_times(model));
    let structure = extract(model);
    let all: Vec<&SystemTerm> = structure.terms.iter().collect();
    let gens = generators(&all, &sample_times);
    let full = analyze(&gens, d, max_ops)?;

    let mut warnings = Vec::new();
    let conflicts = same_site_conflicts(&gens);
    if full.mixing.is_free() && !conflicts.is_empty() {
        warnings.push(format!(
            "environment sites {conflicts:?} couple through non-commuting system operators; \
             each such site behaves as part of the system rather than as a record"
        ));
    }
    let env_separable = structure.env_couplings.is_empty();
    let continuous_support = check_support(model);

    let mut prefix: Option<(f64, Analysis)> = None;
    if env_separable && !full.passes() {
        prefix = find_prefix(&structure.terms, &sample_times, d, max_ops)?;
    }

    let (overall, reason) = if !env_separable {
        (Overall::FailsMixing, format!("environment is not separable: {}", structure.env_couplings.join("; ")))
    } else if let Some((cutoff, _)) = &prefix {
        (
            Overall::StatePrepPrefix { cutoff: *cutoff },
            format!("interactions before t = {cutoff} act as state preparation; the remaining collisions support redundancy"),
        )
    } else if full.pointer.is_none() {
        (Overall::FailsNoPointer, "no time-independent pointer observable".to_string())
    } else if let Some(w) = full.mixing.witness() {
        (Overall::FailsMixing, format!("induced mixing between sites {:?}: {} != 0", w.sites, w.sequence))
    } else if !continuous_support {
        (
            Overall::FailsSupport,
            "a persistent interaction has couplings without continuous support, so decoherence can revive".to_string(),
        )
    } else {
        (Overall::SupportsQd, "all criteria satisfied".to_string())
    };

    if !model.info.notes.is_empty() {
        warnings.extend(model.info.notes.iter().cloned());
    }

    let (shown, cutoff) = match prefix {
        Some((cutoff, suffix)) => (suffix, Some(cutoff)),
        None => (full, None),
    };
    Ok(ClassifierVerdict {
        commutant_dim: shown.commutant.dim(),
        pointer: shown.pointer,
        mixing: shown.mixing,
        env_separable,
        continuous_support,
        schedule_prefix_cutoff: cutoff,
        overall,
        reason,
        warnings,
        sample_times,
    })
}

/// Collision models: look for the earliest unit after which all remaining
/// collisions (together with the persistent terms) pass the pointer and mixing
/// checks. Everything before it is then a state-preparation stage. The
/// compatible suffix has to contain at least two units and at least half of
/// them; a model that only settles down in its last collision has no
/// meaningful redundancy-building stage.
fn find_prefix(terms: &[SystemTerm], times: &[f64], d: usize, max_ops: usize) -> Result<Option<(f64, Analysis)>> {
    let mut starts: Vec<f64> = terms
        .iter()
        .filter(|t| t.site.is_some())
        .filter_map(|t| if t.schedule.is_window() { t.schedule.opens_at() } else { None })
        .collect();
    starts.sort_by(f64::total_cmp);
    starts.dedup();
    let n_units = starts.len();
    let min_suffix = 2.max(n_units.div_ceil(2));
    for (k, &cutoff) in starts.iter().enumerate().skip(1) {
        let kept: Vec<&SystemTerm> = terms
            .iter()
            .filter(|t| t.site.is_none() || !t.schedule.is_window() || t.schedule.opens_at().is_some_and(|s| s >= cutoff))
            .collect();
        let gens = generators(&kept, times);
        let a = analyze(&gens, d, max_ops)?;
        if a.passes() {
            return Ok((n_units - k >= min_suffix).then_some((cutoff, a)));
        }
    }
    Ok(None)
}

/// Environment sites coupled through two or more non-commuting system operators.
fn same_site_conflicts(gens: &[TaggedOp]) -> Vec<usize> {
    let mut sites = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            let Some(site) = a.site else { continue };
            if b.site == Some(site) && !sites.contains(&site) {
                let c = commutator(&a.op, &b.op).expect("same system dimension");
                if hs_norm(&c) > closure::VANISHING_TOL * hs_norm(&a.op) * hs_norm(&b.op) {
                    sites.push(site);
                }
            }
        }
    }
    sites.sort_unstable();
    sites
}
