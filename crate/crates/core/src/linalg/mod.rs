//! Dense and sparse complex-matrix primitives.

pub mod dense;
pub mod expm;
pub mod sparse;

pub use dense::{
    commutator, hermitian_eig, hermitian_eigenvalues, hs_inner, hs_norm, identity, is_hermitian, kron,
    ComplexMatrix,
};
pub use expm::{expm_action, KrylovConfig};
pub use num_complex::Complex64 as C64;
pub use sparse::{embed, embed_product, SparseOperator};
