use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::StateVector;
use crate::layout::SubsystemLayout;
use crate::model::HamiltonianModel;
use crate::rng::{stream_rng, Stream};

/// Families of initial states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialStateKind {
    /// `(|0> + |1> + |2>)/sqrt(3)` on a qutrit system, `|+>` on every qubit.
    QutritProduct,
    /// `(|0> + i|1>)/sqrt(2)` on every qubit.
    YProduct,
    /// `|+>` on every qubit.
    XProduct,
    /// Haar-random joint state.
    Ent,
    /// Haar-random system state times a Haar-random joint environment state.
    Sep,
    /// Haar-random state on every site independently.
    Prod,
    /// Equal-weight branches `|n> (x) prod_i u_i^(n)|0>` with Haar-random local states.
    Sbf,
    /// Demon `|A> + |B> + 2i|C>` and units `|0> + 2i|1>`, normalized.
    Demon,
    /// The product state the model suggests.
    Preset,
    /// Explicit joint amplitudes as `[re, im]` pairs; normalized on construction.
    Explicit { amplitudes: Vec<[f64; 2]> },
}

impl InitialStateKind {
    pub fn name(&self) -> &'static str {
        match self {
            InitialStateKind::QutritProduct => "qutrit_product",
            InitialStateKind::YProduct => "y_product",
            InitialStateKind::XProduct => "x_product",
            InitialStateKind::Ent => "ent",
            InitialStateKind::Sep => "sep",
            InitialStateKind::Prod => "prod",
            InitialStateKind::Sbf => "sbf",
            InitialStateKind::Demon => "demon",
            InitialStateKind::Preset => "preset",
            InitialStateKind::Explicit { .. } => "explicit",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "qutrit_product" => InitialStateKind::QutritProduct,
            "y_product" => InitialStateKind::YProduct,
            "x_product" => InitialStateKind::XProduct,
            "ent" => InitialStateKind::Ent,
            "sep" => InitialStateKind::Sep,
            "prod" => InitialStateKind::Prod,
            "sbf" => InitialStateKind::Sbf,
            "demon" => InitialStateKind::Demon,
            "preset" => InitialStateKind::Preset,
            _ => return Err(Error::Parse(format!("unknown initial state {name:?}"))),
        })
    }
}

/// Uniformly random unit vector: normalized i.i.d. complex Gaussians, which is
/// the first column of a Haar-random unitary.
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let n = crate::evolution::state::norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn require(ok: bool, kind: &InitialStateKind, layout: &SubsystemLayout) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::IncompatibleState(format!("{} does not fit layout {:?}", kind.name(), layout.dims())))
    }
}

fn qubit_env(layout: &SubsystemLayout) -> bool {
    layout.dims()[1..].iter().all(|&d| d == 2)
}

/// Build a state of `kind` on `layout`. Random families draw from the Haar
/// stream of `seed`, independently of the coefficient seeds.
pub fn make_initial_state(kind: &InitialStateKind, layout: &SubsystemLayout, seed: u64) -> Result<StateVector> {
    let n_env = layout.n_env();
    let c = |re, im| C64::new(re, im);
    let mut rng = stream_rng(seed, Stream::HaarStates, &[]);
    match kind {
        InitialStateKind::QutritProduct => {
            require(layout.system_dim() == 3 && qubit_env(layout), kind, layout)?;
            let mut locals = vec![vec![c(1.0, 0.0); 3]];
            locals.extend(vec![vec![c(1.0, 0.0); 2]; n_env]);
            StateVector::product(layout.clone(), &locals)
        }
        InitialStateKind::YProduct | InitialStateKind::XProduct => {
            require(layout.dims().iter().all(|&d| d == 2), kind, layout)?;
            let local = if *kind == InitialStateKind::YProduct { c(0.0, 1.0) } else { c(1.0, 0.0) };
            StateVector::product(layout.clone(), &vec![vec![c(1.0, 0.0), local]; n_env + 1])
        }
        InitialStateKind::Demon => {
            require(layout.system_dim() == 3 && qubit_env(layout), kind, layout)?;
            let mut locals = vec![vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)]];
            locals.extend(vec![vec![c(1.0, 0.0), c(0.0, 2.0)]; n_env]);
            StateVector::product(layout.clone(), &locals)
        }
        InitialStateKind::Ent => StateVector::normalized(layout.clone(), haar_vector(layout.total_dim(), &mut rng)),
        InitialStateKind::Sep => {
            let s = haar_vector(layout.system_dim(), &mut rng);
            let e = haar_vector(layout.total_dim() / layout.system_dim(), &mut rng);
            StateVector::normalized(layout.clone(), kron_vec(&s, &e))
        }
        InitialStateKind::Prod => {
            let locals: Vec<Vec<C64>> = layout.dims().iter().map(|&d| haar_vector(d, &mut rng)).collect();
            StateVector::product(layout.clone(), &locals)
        }
        InitialStateKind::Sbf => {
            let d_s = layout.system_dim();
            let d_e = layout.total_dim() / d_s;
            let mut amps = Vec::with_capacity(layout.total_dim());
            for _ in 0..d_s {
                let mut branch = vec![c(1.0, 0.0)];
                for &d in &layout.dims()[1..] {
                    branch = kron_vec(&branch, &haar_vector(d, &mut rng));
                }
                debug_assert_eq!(branch.len(), d_e);
                amps.extend(branch);
            }
            StateVector::normalized(layout.clone(), amps)
        }
        InitialStateKind::Preset => Err(Error::IncompatibleState("the preset state needs a model".into())),
        InitialStateKind::Explicit { amplitudes } => {
            StateVector::normalized(layout.clone(), amplitudes.iter().map(|[re, im]| c(*re, *im)).collect())
        }
    }
}

/// Like [`make_initial_state`], resolving `Preset` from the model's suggestion.
pub fn initial_state_for(kind: &InitialStateKind, model: &HamiltonianModel, seed: u64) -> Result<StateVector> {
    match kind {
        InitialStateKind::Preset => {
            let locals = model
                .info
                .suggested_state
                .as_ref()
                .ok_or_else(|| Error::IncompatibleState("the model suggests no initial state".into()))?;
            StateVector::product(model.layout().clone(), locals)
        }
        other => make_initial_state(other, model.layout(), seed),
    }
}
