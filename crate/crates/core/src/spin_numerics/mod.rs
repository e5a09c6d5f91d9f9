//! Exact half-integer bookkeeping and the dense complex linear algebra used
//! throughout the crate.

mod halfint;
mod linalg;

pub use halfint::HalfInt;
pub use linalg::{
    adjoint_action, anticommutator, block_structure, c, canonical_span_basis, commutator,
    distance_up_to_scalar, eig_hermitian, eigvals_hermitian, fit_operator_expansion, fix_phase,
    hermitian_deviation, kernel_basis, kron, numerical_rank, range_basis, span_projector,
    unit_vector, vectorize, CMatrix, CVector, HermitianEigen, OperatorExpansion, Settings,
    ToleranceConfig, C64, DEFAULT_DIM_CAP,
};
