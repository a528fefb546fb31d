use num_complex::Complex64 as C64;

use super::state::{norm, StateVector};
use crate::error::{Error, Result};
use crate::information::partial_trace;
use crate::layout::SubsystemLayout;
use crate::linalg::dense::ComplexMatrix;

/// Branches with `|c_n|^2` below this are dropped.
pub const MIN_BRANCH_WEIGHT: f64 = 1e-14;

/// Default purity slack for "each conditional site state is pure".
pub const BRANCH_PURITY_TOL: f64 = 1e-8;

/// One term `c_n |n> (x) |phi_n>` of a branch decomposition.
#[derive(Debug, Clone)]
pub struct Branch {
    /// Pointer-basis columns spanning this branch (one unless the pointer
    /// observable is degenerate).
    pub pointer_indices: Vec<usize>,
    /// `|c_n|`; any phase stays in `state`.
    pub weight: f64,
    /// Normalized conditional state. Over the environment layout for a single
    /// pointer state, otherwise over `[block size, environment...]`.
    pub state: StateVector,
}

#[derive(Debug, Clone)]
pub struct BranchDecomposition {
    pub branches: Vec<Branch>,
}

impl BranchDecomposition {
    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(|b| b.weight * b.weight).sum()
    }
}

/// `sum_s conj(basis[s, col]) psi[s, e]` stacked over the columns of a block.
fn project(psi: &StateVector, basis: &ComplexMatrix, cols: &[usize]) -> Vec<C64> {
    let d_s = psi.layout().system_dim();
    let d_e = psi.layout().total_dim() / d_s;
    let amps = psi.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); cols.len() * d_e];
    for (b, &col) in cols.iter().enumerate() {
        let target = &mut out[b * d_e..(b + 1) * d_e];
        for s in 0..d_s {
            let w = basis[(s, col)].conj();
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, a) in target.iter_mut().zip(&amps[s * d_e..(s + 1) * d_e]) {
                *o += w * a;
            }
        }
    }
    out
}

fn check_basis(psi: &StateVector, basis: &ComplexMatrix) -> Result<SubsystemLayout> {
    let d_s = psi.layout().system_dim();
    if basis.shape() != (d_s, d_s) {
        return Err(Error::DimensionMismatch(format!("pointer basis {:?} for system dimension {d_s}", basis.shape())));
    }
    psi.layout().environment().ok_or_else(|| Error::InvalidLayout("state has no environment".into()))
}

/// Split `psi` along the columns of `pointer_basis` (grouped by `blocks` when the
/// pointer observable is degenerate; one block per column otherwise).
pub fn branch_decompose(
    psi: &StateVector,
    pointer_basis: &ComplexMatrix,
    blocks: Option<&[Vec<usize>]>,
) -> Result<BranchDecomposition> {
    let env = check_basis(psi, pointer_basis)?;
    let singles: Vec<Vec<usize>>;
    let blocks = match blocks {
        Some(b) => b,
        None => {
            singles = (0..pointer_basis.ncols()).map(|c| vec![c]).collect();
            &singles
        }
    };
    let mut branches = Vec::new();
    for block in blocks {
        let phi = project(psi, pointer_basis, block);
        let w = norm(&phi);
        if w * w < MIN_BRANCH_WEIGHT {
            continue;
        }
        let layout = if block.len() == 1 {
            env.clone()
        } else {
            let mut dims = vec![block.len()];
            dims.extend_from_slice(env.dims());
            SubsystemLayout::new(dims)?
        };
        let state = StateVector::normalized(layout, phi)?;
        branches.push(Branch { pointer_indices: block.clone(), weight: w, state });
    }
    Ok(BranchDecomposition { branches })
}

/// Smallest single-site purity over sites `first..` of a conditional state.
/// Pass `first = 1` for degenerate branches, whose site 0 is the pointer block.
pub fn min_site_purity(state: &StateVector, first: usize) -> Result<f64> {
    let mut min: f64 = 1.0;
    for site in first..state.layout().n_sites() {
        let rho = partial_trace(state, &[site])?;
        let purity: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
        min = min.min(purity);
    }
    Ok(min)
}

impl Branch {
    /// Smallest single-site purity of the conditional environment state.
    pub fn min_env_purity(&self) -> Result<f64> {
        min_site_purity(&self.state, usize::from(self.pointer_indices.len() > 1))
    }
}

/// Overlap `<phi_n(t)|phi_m(t)>` of two branch-conditioned environment states
/// at every trajectory time. Every conditional state must be a product over
/// environment sites (single-site purity at least `1 - purity_tol`), which is
/// what makes the overlap factorize over sites.
pub fn decoherence_factor(
    states: &[StateVector],
    pointer_basis: &ComplexMatrix,
    pair: (usize, usize),
    purity_tol: f64,
) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(states.len());
    for psi in states {
        let env = check_basis(psi, pointer_basis)?;
        let mut conditionals = Vec::with_capacity(2);
        for n in [pair.0, pair.1] {
            if n >= pointer_basis.ncols() {
                return Err(Error::InvalidParameter(format!("pointer index {n} out of range")));
            }
            let phi = project(psi, pointer_basis, &[n]);
            let w = norm(&phi);
            if w * w < MIN_BRANCH_WEIGHT {
                return Err(Error::InvalidParameter(format!("branch {n} carries no weight")));
            }
            let state = StateVector::normalized(env.clone(), phi)?;
            let purity = min_site_purity(&state, 0)?;
            if purity < 1.0 - purity_tol {
                return Err(Error::NotBranching(format!(
                    "conditional state of branch {n} has a site purity of {purity:.3e}"
                )));
            }
            conditionals.push(state);
        }
        out.push(conditionals[0].inner(&conditionals[1])?);
    }
    Ok(out)
}
