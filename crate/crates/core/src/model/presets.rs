//! Named models: the qutrit models A-D, the alternating qubit models E-H, the
//! collision models I-L, the three-level demon, the parallel qubit model, and a
//! truncated micromaser.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::distribution::CoefficientDistribution;
use super::hamiltonian::{HamiltonianModel, LocalStates, ModelBuilder};
use super::operators::{annihilation, gellmann_x01, gellmann_x02, gellmann_z2, pauli_x, pauli_y, pauli_z};
use super::schedule::{AltGroup, Schedule};
use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::linalg::dense::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Preset {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
    L,
    #[serde(rename = "demon")]
    Demon,
    #[serde(rename = "qubit")]
    Qubit,
    #[serde(rename = "micromaser")]
    Micromaser,
}

impl Preset {
    pub const ALL: [Preset; 15] = [
        Preset::A,
        Preset::B,
        Preset::C,
        Preset::D,
        Preset::E,
        Preset::F,
        Preset::G,
        Preset::H,
        Preset::I,
        Preset::J,
        Preset::K,
        Preset::L,
        Preset::Demon,
        Preset::Qubit,
        Preset::Micromaser,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::A => "A",
            Preset::B => "B",
            Preset::C => "C",
            Preset::D => "D",
            Preset::E => "E",
            Preset::F => "F",
            Preset::G => "G",
            Preset::H => "H",
            Preset::I => "I",
            Preset::J => "J",
            Preset::K => "K",
            Preset::L => "L",
            Preset::Demon => "demon",
            Preset::Qubit => "qubit",
            Preset::Micromaser => "micromaser",
        }
    }

    /// Environment size used when none is requested.
    pub fn default_n_env(&self) -> usize {
        match self {
            Preset::A | Preset::B | Preset::C | Preset::D | Preset::Qubit => 10,
            Preset::E | Preset::F | Preset::G | Preset::H => 11,
            _ => 12,
        }
    }

    /// Parameters the preset reads, with their defaults.
    pub fn parameters(&self) -> &'static [(&'static str, f64)] {
        match self {
            Preset::A | Preset::E | Preset::Qubit => &[("sigma_j", 1.0)],
            Preset::B | Preset::C | Preset::D => &[("sigma_j", 1.0), ("sigma_k", 1.0)],
            Preset::F | Preset::G | Preset::H => {
                &[("sigma_j", 1.0), ("sigma_k", 1.0), ("tau", 3.0), ("guard", super::schedule::DEFAULT_GUARD)]
            }
            Preset::I | Preset::L => &[("tau", 1.0), ("delta", 0.95)],
            Preset::J => &[("tau", 1.0), ("delta", 0.95), ("replaced_unit", 1.0)],
            Preset::K => &[("tau", 1.0), ("delta", 0.95), ("replaced_unit", 5.0)],
            Preset::Demon => &[("tau", 1.0), ("delta", 0.95), ("gamma", 4.0 / 3.0)],
            Preset::Micromaser => {
                &[("tau", 1.0), ("delta", 0.95), ("levels", 4.0), ("omega", 1.0), ("detuning", 1.0), ("g", 1.0)]
            }
        }
    }

    /// Whether the preset draws random couplings that `PresetParams::coupling` replaces.
    pub fn has_random_couplings(&self) -> bool {
        matches!(
            self,
            Preset::A | Preset::B | Preset::C | Preset::D | Preset::E | Preset::F | Preset::G | Preset::H | Preset::Qubit
        )
    }

    /// Local system dimension, which for the micromaser depends on `levels`.
    pub fn system_dim(&self, params: &PresetParams) -> Result<usize> {
        Ok(match self {
            Preset::A | Preset::B | Preset::C | Preset::D | Preset::Demon => 3,
            Preset::Micromaser => params.resolve(*self)?.levels()?,
            _ => 2,
        })
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Overrides for a preset's parameters. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PresetParams {
    #[serde(default)]
    pub values: BTreeMap<String, f64>,
    /// Replaces the distribution of every random coupling.
    #[serde(default)]
    pub coupling: Option<CoefficientDistribution>,
}

impl PresetParams {
    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn with_coupling(mut self, coupling: CoefficientDistribution) -> Self {
        self.coupling = Some(coupling);
        self
    }

    /// Defaults merged with overrides, after checking every override is known.
    pub fn resolve(&self, preset: Preset) -> Result<Resolved> {
        let known = preset.parameters();
        for key in self.values.keys() {
            if !known.iter().any(|(k, _)| k == key) {
                return Err(Error::InvalidParameter(format!("preset {preset} has no parameter {key:?}")));
            }
        }
        if self.coupling.is_some() && !preset.has_random_couplings() {
            return Err(Error::InvalidParameter(format!("preset {preset} has no random couplings to replace")));
        }
        if let Some(c) = &self.coupling {
            c.validate()?;
        }
        let values = known
            .iter()
            .map(|(k, d)| (k.to_string(), self.values.get(*k).copied().unwrap_or(*d)))
            .collect();
        Ok(Resolved { values, coupling: self.coupling })
    }
}

/// Every parameter of a preset, defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub values: BTreeMap<String, f64>,
    pub coupling: Option<CoefficientDistribution>,
}

impl Resolved {
    fn get(&self, key: &str) -> Result<f64> {
        self.values.get(key).copied().ok_or_else(|| Error::MissingParameter(key.to_string()))
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let v = self.get(key)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InvalidParameter(format!("{key} must be positive, got {v}")))
        }
    }

    fn normal(&self, key: &str) -> Result<CoefficientDistribution> {
        match self.coupling {
            Some(c) => Ok(c),
            None => CoefficientDistribution::normal(0.0, self.positive(key)?),
        }
    }

    fn levels(&self) -> Result<usize> {
        let v = self.get("levels")?;
        if v >= 2.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(Error::InvalidParameter(format!("levels must be an integer >= 2, got {v}")))
        }
    }

    fn unit(&self, key: &str, n_env: usize) -> Result<usize> {
        let v = self.get(key)?;
        if v >= 1.0 && v.fract() == 0.0 && (v as usize) <= n_env {
            Ok(v as usize)
        } else {
            Err(Error::InvalidParameter(format!("{key} must be a unit index in 1..={n_env}, got {v}")))
        }
    }

    fn collision_window(&self, n: usize) -> Result<Schedule> {
        let (tau, delta) = (self.positive("tau")?, self.positive("delta")?);
        if delta > tau {
            return Err(Error::InvalidParameter(format!("delta ({delta}) must not exceed tau ({tau})")));
        }
        Ok(Schedule::collision(n, tau, delta))
    }

    fn alternating(&self, group: AltGroup) -> Result<Schedule> {
        let s = Schedule::Alternating { tau: self.positive("tau")?, guard: self.get("guard")?, group };
        s.validate()?;
        Ok(s)
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn repeat(n: usize, v: Vec<C64>) -> Vec<Vec<C64>> {
    vec![v; n]
}

fn qutrit_product(n_env: usize) -> LocalStates {
    let mut s = vec![vec![c(1.0, 0.0); 3]];
    s.extend(repeat(n_env, vec![c(1.0, 0.0), c(1.0, 0.0)]));
    s
}

fn y_product(n_env: usize) -> LocalStates {
    repeat(n_env + 1, vec![c(1.0, 0.0), c(0.0, 1.0)])
}

fn x_product(n_env: usize) -> LocalStates {
    repeat(n_env + 1, vec![c(1.0, 0.0), c(1.0, 0.0)])
}

/// `|a><b| + |b><a|` on a qutrit.
fn x_pair(a: usize, b: usize) -> ComplexMatrix {
    super::operators::sym_offdiag(3, a, b)
}

/// `-i|a><b| + i|b><a|` on a qutrit.
fn y_pair(a: usize, b: usize) -> ComplexMatrix {
    super::operators::asym_offdiag(3, a, b)
}

pub fn preset(name: Preset, n_env: usize, params: &PresetParams) -> Result<HamiltonianModel> {
    preset_with_cap(name, n_env, params, crate::layout::DEFAULT_DIM_CAP)
}

pub fn preset_with_cap(name: Preset, n_env: usize, params: &PresetParams, dim_cap: usize) -> Result<HamiltonianModel> {
    if n_env == 0 {
        return Err(Error::InvalidParameter("n_env must be at least 1".into()));
    }
    let p = params.resolve(name)?;
    let d = name.system_dim(params)?;
    let layout = SubsystemLayout::with_cap(std::iter::once(d).chain(std::iter::repeat_n(2, n_env)).collect(), dim_cap)?;
    let b = HamiltonianModel::builder(layout).name(name.name());
    let sites = 1..=n_env;
    let on = Schedule::AlwaysOn;
    let one = CoefficientDistribution::constant(1.0);

    let b: ModelBuilder = match name {
        Preset::A => {
            let s = gellmann_z2() + gellmann_x01();
            let j = p.normal("sigma_j")?;
            sites
                .fold(b, |b, i| b.interaction(s.clone(), i, pauli_z(), j, on))
                .suggested_state(qutrit_product(n_env))
        }
        Preset::B => {
            let (j, k) = (p.normal("sigma_j")?, p.normal("sigma_k")?);
            sites
                .fold(b, |b, i| {
                    b.interaction(gellmann_z2(), i, pauli_z(), j, on).interaction(gellmann_x01(), i, pauli_z(), k, on)
                })
                .suggested_state(qutrit_product(n_env))
        }
        Preset::C => {
            let (j, k) = (p.normal("sigma_j")?, p.normal("sigma_k")?);
            sites
                .fold(b, |b, i| {
                    b.interaction(gellmann_z2(), i, pauli_z(), j, on).interaction(gellmann_x01(), i, pauli_x(), k, on)
                })
                .suggested_state(qutrit_product(n_env))
        }
        Preset::D => {
            let (j, k) = (p.normal("sigma_j")?, p.normal("sigma_k")?);
            sites
                .fold(b, |b, i| {
                    b.interaction(gellmann_x02(), i, pauli_z(), j, on).interaction(gellmann_x01(), i, pauli_x(), k, on)
                })
                .suggested_state(qutrit_product(n_env))
        }
        Preset::E => {
            let s = pauli_z() + pauli_x();
            let j = p.normal("sigma_j")?;
            sites.fold(b, |b, i| b.interaction(s.clone(), i, pauli_z(), j, on)).suggested_state(y_product(n_env))
        }
        Preset::F | Preset::G | Preset::H => {
            let (j, k) = (p.normal("sigma_j")?, p.normal("sigma_k")?);
            let (sa, sb) = (p.alternating(AltGroup::A)?, p.alternating(AltGroup::B)?);
            let (sys_b, env_b) = match name {
                Preset::F => (pauli_x(), pauli_z()),
                Preset::G => (pauli_x(), pauli_x()),
                _ => (pauli_z(), pauli_x()),
            };
            sites
                .fold(b, |b, i| {
                    b.interaction(pauli_z(), i, pauli_z(), j, sa).interaction(sys_b.clone(), i, env_b.clone(), k, sb)
                })
                .suggested_state(y_product(n_env))
        }
        Preset::I | Preset::J | Preset::K | Preset::L => {
            let replaced = match name {
                Preset::J | Preset::K => Some(p.unit("replaced_unit", n_env)?),
                _ => None,
            };
            let mut b = b;
            for n in sites {
                let flipped = match name {
                    Preset::L => n % 2 == 0,
                    _ => replaced == Some(n),
                };
                let s = if flipped { pauli_x() } else { pauli_z() };
                b = b.interaction(s, n, pauli_z(), one, p.collision_window(n)?);
            }
            b.suggested_state(y_product(n_env))
        }
        Preset::Demon => {
            let gamma = p.get("gamma")?;
            // gamma (|A,1><C,0| + h.c.) = (gamma / 2) (X_AC (x) sx + Y_AC (x) sy)
            let half = CoefficientDistribution::constant(gamma / 2.0);
            let mut b = b.system_free(x_pair(0, 1) + x_pair(1, 2), one, on);
            for n in sites {
                let w = p.collision_window(n)?;
                b = b.interaction(x_pair(0, 2), n, pauli_x(), half, w).interaction(y_pair(0, 2), n, pauli_y(), half, w);
            }
            let mut states = vec![vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)]];
            states.extend(repeat(n_env, vec![c(1.0, 0.0), c(0.0, 2.0)]));
            b.suggested_state(states)
        }
        Preset::Qubit => {
            let j = p.normal("sigma_j")?;
            sites.fold(b, |b, i| b.interaction(pauli_z(), i, pauli_z(), j, on)).suggested_state(x_product(n_env))
        }
        Preset::Micromaser => {
            let levels = p.levels()?;
            let a = annihilation(levels);
            let number = a.adjoint() * &a;
            // g (s a^dag + s^dag a) = (g / 2) ((a + a^dag) (x) sx + i (a^dag - a) (x) sy) with s = |0><1|.
            let quad_x = &a + a.adjoint();
            let quad_p = (a.adjoint() - &a) * c(0.0, 1.0);
            let half_g = CoefficientDistribution::constant(p.get("g")? / 2.0);
            let mut b = b
                .system_free(number, CoefficientDistribution::constant(p.get("omega")?), on)
                .note(format!("oscillator truncated to {levels} levels; the verdict holds for this truncation only"));
            for n in sites {
                let w = p.collision_window(n)?;
                b = b
                    .env_free(n, pauli_z(), CoefficientDistribution::constant(p.get("detuning")? / 2.0), on)
                    .interaction(quad_x.clone(), n, pauli_x(), half_g, w)
                    .interaction(quad_p.clone(), n, pauli_y(), half_g, w);
            }
            let mut states = vec![{
                let mut v = vec![c(0.0, 0.0); levels];
                v[0] = c(1.0, 0.0);
                v
            }];
            states.extend(repeat(n_env, vec![c(0.0, 0.0), c(1.0, 0.0)]));
            b.suggested_state(states)
        }
    };
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{dyad, hs_norm, kron};

    fn term_sum(model: &HamiltonianModel, unit: usize) -> ComplexMatrix {
        let mut sum = ComplexMatrix::zeros(model.layout().system_dim() * 2, model.layout().system_dim() * 2);
        for t in model.interactions().iter().filter(|t| t.env_site == unit) {
            sum += kron(&t.system_op, &t.env_op) * C64::new(t.coefficient.sample(&mut crate::rng::stream_rng(0, crate::rng::Stream::Coefficients, &[])), 0.0);
        }
        sum
    }

    #[test]
    fn demon_interaction_matches_transition_form() {
        let m = preset(Preset::Demon, 2, &PresetParams::default()).unwrap();
        let gamma = 4.0 / 3.0;
        // |A,1> is index 0 * 2 + 1, |C,0> is index 2 * 2 + 0.
        let expect = (dyad(6, 1, 4) + dyad(6, 4, 1)) * C64::new(gamma, 0.0);
        assert!(hs_norm(&(term_sum(&m, 1) - expect)) < 1e-12);
    }

    #[test]
    fn micromaser_interaction_matches_jaynes_cummings() {
        let params = PresetParams::default().with("g", 0.7).with("levels", 3.0);
        let m = preset(Preset::Micromaser, 1, &params).unwrap();
        let a = annihilation(3);
        let lower = dyad(2, 0, 1);
        let expect = (kron(&a.adjoint(), &lower) + kron(&a, &lower.adjoint())) * C64::new(0.7, 0.0);
        assert!(hs_norm(&(term_sum(&m, 1) - expect)) < 1e-12);
    }

    #[test]
    fn names_round_trip_and_unknown_keys_fail() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!(matches!("Z".parse::<Preset>(), Err(Error::UnknownPreset(_))));
        let bad = PresetParams::default().with("gamma", 1.0);
        assert!(preset(Preset::A, 3, &bad).is_err());
        let bad = PresetParams::default().with_coupling(CoefficientDistribution::constant(1.0));
        assert!(preset(Preset::I, 3, &bad).is_err());
    }

    #[test]
    fn replaced_unit_is_validated() {
        let p = PresetParams::default().with("replaced_unit", 13.0);
        assert!(preset(Preset::K, 12, &p).is_err());
        assert!(preset(Preset::K, 4, &PresetParams::default()).is_err());
    }

    #[test]
    fn layouts() {
        let m = preset(Preset::Demon, 12, &PresetParams::default()).unwrap();
        assert_eq!(m.layout().total_dim(), 3 * 4096);
        let m = preset(Preset::A, 10, &PresetParams::default()).unwrap();
        assert_eq!(m.layout().dims()[0], 3);
        assert_eq!(m.n_env(), 10);
    }
}
