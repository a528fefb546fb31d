use super::classify;
use crate::error::{Error, Result};
use crate::evolution::{branch_decompose, StateVector};
use crate::linalg::dense::ComplexMatrix;
use crate::model::HamiltonianModel;

/// True iff `state` is singly branching in `pointer_basis`: conditioned on each
/// pointer state (or degenerate block), every environment site is left in a
/// pure state, up to a purity deficit of `tol`.
pub fn check_initial_state(
    state: &StateVector,
    pointer_basis: &ComplexMatrix,
    blocks: Option<&[Vec<usize>]>,
    tol: f64,
) -> Result<bool> {
    let decomposition = branch_decompose(state, pointer_basis, blocks)?;
    for branch in &decomposition.branches {
        if branch.min_env_purity()? < 1.0 - tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// [`check_initial_state`] in the pointer basis inferred by classifying `model`.
pub fn check_initial_state_for_model(state: &StateVector, model: &HamiltonianModel, tol: f64) -> Result<bool> {
    let verdict = classify(model)?;
    let pointer = verdict
        .pointer
        .ok_or_else(|| Error::IncompatibleState("the model has no pointer observable to branch in".into()))?;
    let blocks = pointer.degenerate.then_some(pointer.blocks.as_slice());
    check_initial_state(state, &pointer.basis, blocks, tol)
}
