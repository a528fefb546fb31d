use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::distribution::CoefficientDistribution;
use super::schedule::Schedule;
use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::linalg::dense::{is_hermitian, max_abs, trace, ComplexMatrix, HERMITIAN_TOL};
use crate::linalg::sparse::{embed, embed_product, SparseOperator};
use crate::rng::{stream_rng, Stream};

const TRACELESS_TOL: f64 = 1e-12;

/// A single-site Hermitian operator with its coefficient and schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeTerm {
    pub op: ComplexMatrix,
    pub coefficient: CoefficientDistribution,
    pub schedule: Schedule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvFreeTerm {
    pub site: usize,
    pub term: FreeTerm,
}

/// `coefficient * schedule(t) * system_op ⊗ env_op` with `env_op` on `env_site`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTerm {
    pub system_op: ComplexMatrix,
    pub env_site: usize,
    pub env_op: ComplexMatrix,
    pub coefficient: CoefficientDistribution,
    pub schedule: Schedule,
}

/// Arbitrary Hermitian tensor string, only produced when ingesting model files.
/// Unlike the structured terms it can couple environment sites to each other.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTerm {
    pub factors: Vec<(usize, ComplexMatrix)>,
    pub coefficient: CoefficientDistribution,
    pub schedule: Schedule,
}

/// Product state suggested by a preset: one (unnormalized) local vector per site.
pub type LocalStates = Vec<Vec<C64>>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelInfo {
    pub name: String,
    pub suggested_state: Option<LocalStates>,
    pub notes: Vec<String>,
}

/// System-environment Hamiltonian
/// `H(t) = H_S(t) + sum_j H_{E_j}(t) + sum S_jk(t) ⊗ E_jk(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianModel {
    layout: SubsystemLayout,
    system_free: Vec<FreeTerm>,
    env_free: Vec<EnvFreeTerm>,
    interactions: Vec<InteractionTerm>,
    raw_terms: Vec<RawTerm>,
    pub info: ModelInfo,
}

fn check_local(op: &ComplexMatrix, dim: usize, what: &str) -> Result<()> {
    if op.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch(format!(
            "{what}: operator shape {:?}, site dimension {dim}",
            op.shape()
        )));
    }
    if !is_hermitian(op, HERMITIAN_TOL) {
        return Err(Error::NotHermitian { deviation: crate::linalg::dense::hermiticity_deviation(op) });
    }
    Ok(())
}

fn check_traceless(op: &ComplexMatrix, what: &str) -> Result<()> {
    let tr = trace(op).norm();
    if tr > TRACELESS_TOL * max_abs(op).max(1.0) {
        return Err(Error::NotTraceless { trace: tr, context: what.to_string() });
    }
    Ok(())
}

impl HamiltonianModel {
    pub fn builder(layout: SubsystemLayout) -> ModelBuilder {
        ModelBuilder {
            model: HamiltonianModel {
                layout,
                system_free: Vec::new(),
                env_free: Vec::new(),
                interactions: Vec::new(),
                raw_terms: Vec::new(),
                info: ModelInfo::default(),
            },
        }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn n_env(&self) -> usize {
        self.layout.n_env()
    }

    pub fn system_free(&self) -> &[FreeTerm] {
        &self.system_free
    }

    pub fn env_free(&self) -> &[EnvFreeTerm] {
        &self.env_free
    }

    pub fn interactions(&self) -> &[InteractionTerm] {
        &self.interactions
    }

    pub fn raw_terms(&self) -> &[RawTerm] {
        &self.raw_terms
    }

    pub fn n_terms(&self) -> usize {
        self.system_free.len() + self.env_free.len() + self.interactions.len() + self.raw_terms.len()
    }

    /// Schedules of every term, in instance coefficient order.
    pub fn schedules(&self) -> impl Iterator<Item = &Schedule> {
        self.system_free
            .iter()
            .map(|t| &t.schedule)
            .chain(self.env_free.iter().map(|t| &t.term.schedule))
            .chain(self.interactions.iter().map(|t| &t.schedule))
            .chain(self.raw_terms.iter().map(|t| &t.schedule))
    }

    /// Distributions of every term, in instance coefficient order.
    pub fn distributions(&self) -> impl Iterator<Item = &CoefficientDistribution> {
        self.system_free
            .iter()
            .map(|t| &t.coefficient)
            .chain(self.env_free.iter().map(|t| &t.term.coefficient))
            .chain(self.interactions.iter().map(|t| &t.coefficient))
            .chain(self.raw_terms.iter().map(|t| &t.coefficient))
    }

    pub fn has_windows(&self) -> bool {
        self.schedules().any(Schedule::is_window)
    }

    /// Sorted discontinuities of all schedules in `[0, horizon]`, with both ends.
    pub fn breakpoints(&self, horizon: f64) -> Vec<f64> {
        let mut points = vec![0.0, horizon];
        for s in self.schedules() {
            points.extend(s.breakpoints(horizon));
        }
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * horizon.abs().max(1.0));
        points
    }

    /// Earliest time each environment site takes part in a windowed interaction.
    /// Sites coupled through any non-windowed term are present from `t = 0`;
    /// sites that never interact give `None`.
    pub fn site_opening_times(&self) -> Vec<Option<f64>> {
        let mut opens: Vec<Option<f64>> = vec![None; self.layout.n_sites()];
        let mut note = |site: usize, s: &Schedule| {
            let t = s.opens_at().unwrap_or(0.0);
            opens[site] = Some(opens[site].map_or(t, |o: f64| o.min(t)));
        };
        for term in &self.interactions {
            note(term.env_site, &term.schedule);
        }
        for term in &self.raw_terms {
            for (site, _) in &term.factors {
                if *site > 0 {
                    note(*site, &term.schedule);
                }
            }
        }
        opens.remove(0);
        opens
    }

    /// A copy with every coefficient distribution replaced by `f(old)`.
    pub fn map_distributions(&self, f: impl Fn(&CoefficientDistribution) -> CoefficientDistribution) -> Self {
        let mut out = self.clone();
        for t in &mut out.system_free {
            t.coefficient = f(&t.coefficient);
        }
        for t in &mut out.env_free {
            t.term.coefficient = f(&t.term.coefficient);
        }
        for t in &mut out.interactions {
            t.coefficient = f(&t.coefficient);
        }
        for t in &mut out.raw_terms {
            t.coefficient = f(&t.coefficient);
        }
        out
    }
}

pub struct ModelBuilder {
    model: HamiltonianModel,
}

impl ModelBuilder {
    pub fn name(mut self, name: impl Into<String>) -> Self {
        self.model.info.name = name.into();
        self
    }

    pub fn suggested_state(mut self, states: LocalStates) -> Self {
        self.model.info.suggested_state = Some(states);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.model.info.notes.push(note.into());
        self
    }

    pub fn system_free(mut self, op: ComplexMatrix, coefficient: CoefficientDistribution, schedule: Schedule) -> Self {
        self.model.system_free.push(FreeTerm { op, coefficient, schedule });
        self
    }

    pub fn env_free(
        mut self,
        site: usize,
        op: ComplexMatrix,
        coefficient: CoefficientDistribution,
        schedule: Schedule,
    ) -> Self {
        self.model.env_free.push(EnvFreeTerm { site, term: FreeTerm { op, coefficient, schedule } });
        self
    }

    pub fn interaction(
        mut self,
        system_op: ComplexMatrix,
        env_site: usize,
        env_op: ComplexMatrix,
        coefficient: CoefficientDistribution,
        schedule: Schedule,
    ) -> Self {
        self.model.interactions.push(InteractionTerm { system_op, env_site, env_op, coefficient, schedule });
        self
    }

    pub fn raw_term(
        mut self,
        factors: Vec<(usize, ComplexMatrix)>,
        coefficient: CoefficientDistribution,
        schedule: Schedule,
    ) -> Self {
        self.model.raw_terms.push(RawTerm { factors, coefficient, schedule });
        self
    }

    pub fn build(self) -> Result<HamiltonianModel> {
        let m = self.model;
        let layout = &m.layout;
        for t in &m.system_free {
            check_local(&t.op, layout.system_dim(), "system free term")?;
        }
        for t in &m.env_free {
            if t.site == 0 {
                return Err(Error::InvalidParameter("environment free term on the system site".into()));
            }
            layout.check_site(t.site)?;
            check_local(&t.term.op, layout.dim(t.site), "environment free term")?;
        }
        for t in &m.interactions {
            if t.env_site == 0 {
                return Err(Error::InvalidParameter("interaction with env_site 0".into()));
            }
            layout.check_site(t.env_site)?;
            check_local(&t.system_op, layout.system_dim(), "interaction system operator")?;
            check_local(&t.env_op, layout.dim(t.env_site), "interaction environment operator")?;
            check_traceless(&t.system_op, "interaction system operator")?;
            check_traceless(&t.env_op, &format!("interaction operator on site {}", t.env_site))?;
        }
        for t in &m.raw_terms {
            if t.factors.is_empty() {
                return Err(Error::InvalidParameter("raw term without factors".into()));
            }
            let mut sites: Vec<usize> = t.factors.iter().map(|(s, _)| *s).collect();
            sites.sort_unstable();
            if sites.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter("raw term repeats a site".into()));
            }
            for (site, op) in &t.factors {
                layout.check_site(*site)?;
                check_local(op, layout.dim(*site), "raw term factor")?;
            }
        }
        for s in m.schedules() {
            s.validate()?;
        }
        for d in m.distributions() {
            d.validate()?;
        }
        Ok(m)
    }
}

/// A model with every random coefficient drawn. The joint-space embedding of
/// each term is computed once and shared by all assemblies.
#[derive(Debug, Clone)]
pub struct ModelInstance {
    model: Arc<HamiltonianModel>,
    seed: u64,
    coefficients: Vec<f64>,
    embedded: Arc<Vec<SparseOperator>>,
}

impl ModelInstance {
    pub fn new(model: Arc<HamiltonianModel>, seed: u64) -> Result<Self> {
        let mut rng = stream_rng(seed, Stream::Coefficients, &[]);
        let coefficients = model.distributions().map(|d| d.sample(&mut rng)).collect();
        let embedded = Arc::new(Self::embed_terms(&model)?);
        Ok(Self { model, seed, coefficients, embedded })
    }

    /// Same model and embeddings, fresh coefficients.
    pub fn reseed(&self, seed: u64) -> Self {
        let mut rng = stream_rng(seed, Stream::Coefficients, &[]);
        let coefficients = self.model.distributions().map(|d| d.sample(&mut rng)).collect();
        Self { model: Arc::clone(&self.model), seed, coefficients, embedded: Arc::clone(&self.embedded) }
    }

    fn embed_terms(model: &HamiltonianModel) -> Result<Vec<SparseOperator>> {
        let layout = model.layout();
        let mut out = Vec::with_capacity(model.n_terms());
        for t in model.system_free() {
            out.push(embed(&t.op, 0, layout)?);
        }
        for t in model.env_free() {
            out.push(embed(&t.term.op, t.site, layout)?);
        }
        for t in model.interactions() {
            out.push(embed_product(&[(0, &t.system_op), (t.env_site, &t.env_op)], layout)?);
        }
        for t in model.raw_terms() {
            let factors: Vec<(usize, &ComplexMatrix)> = t.factors.iter().map(|(s, op)| (*s, op)).collect();
            let op = embed_product(&factors, layout)?;
            if !op.is_hermitian(HERMITIAN_TOL) {
                return Err(Error::NotHermitian { deviation: op.hermiticity_deviation() });
            }
            out.push(op);
        }
        Ok(out)
    }

    pub fn model(&self) -> &HamiltonianModel {
        &self.model
    }

    pub fn model_arc(&self) -> &Arc<HamiltonianModel> {
        &self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Indices of the terms switched on at time `t`.
    pub fn active_terms(&self, t: f64) -> Vec<usize> {
        self.model
            .schedules()
            .enumerate()
            .filter(|(k, s)| s.is_active(t) && self.coefficients[*k] != 0.0)
            .map(|(k, _)| k)
            .collect()
    }

    /// `H(t)` as a sparse joint-space operator.
    pub fn assemble(&self, t: f64) -> SparseOperator {
        self.assemble_terms(&self.active_terms(t))
    }

    pub fn assemble_terms(&self, terms: &[usize]) -> SparseOperator {
        let dim = self.model.layout().total_dim();
        let triplets = terms.iter().flat_map(|&k| {
            let c = C64::new(self.coefficients[k], 0.0);
            self.embedded[k].iter().map(move |(r, col, v)| (r, col, v * c))
        });
        SparseOperator::from_triplets(dim, triplets).expect("embedded terms share the joint dimension")
    }

    pub fn breakpoints(&self, horizon: f64) -> Vec<f64> {
        self.model.breakpoints(horizon)
    }
}
