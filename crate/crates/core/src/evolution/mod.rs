pub mod branch;
pub mod propagate;
pub mod state;

pub use branch::{branch_decompose, decoherence_factor, Branch, BranchDecomposition, BRANCH_PURITY_TOL};
pub use propagate::{evolve, evolve_with, linear_grid, Trajectory};
pub use state::StateVector;
