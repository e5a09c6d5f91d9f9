//! Matrix product representations of valence-bond states.
//!
//! The crate builds spherical tensor operators of arbitrary integer or
//! half-integer rank on the `s ⊕ 0` auxiliary space, uses them as the
//! matrices of periodic matrix product states (fully dimerized, alternating,
//! symmetry-breaking and VBS chains), and derives rotation-invariant parent
//! Hamiltonians from the null spaces of the reduced density matrices.
//!
//! Everything is dense and exact up to floating-point tolerances; the intended
//! scale is a few thousand basis states, where every claim can be checked by
//! brute force.
//!
//! ```
//! use valence_mps::prelude::*;
//!
//! let a = canonical_tensor(HalfInt::HALF).unwrap();
//! let check = verify_spherical(&a, &a.generators(), 1e-12).unwrap();
//! assert!(check.passed);
//! ```

pub mod angular_momentum;
pub mod cli_reports;
pub mod error;
pub mod mps_engine;
pub mod parent_hamiltonian;
pub mod spherical_tensors;
pub mod spin_numerics;
pub mod valence_bond;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::angular_momentum::{
        casimir_projectors, direct_sum_generators, irrep_generators, multiplet_from_top,
        total_spin_operators, GeneratorTriple, Multiplet, RepSpec, SiteSystem,
    };
    pub use crate::error::{Error, Result};
    pub use crate::mps_engine::{
        amplitude, expand_state, reduced_density_matrix, transfer_normalization,
        window_expectation, MpsChain, SiteTensor, Window,
    };
    pub use crate::parent_hamiltonian::{
        assemble_hamiltonian, classify_multiplets, local_hamiltonian, null_space,
        spin1_coupling_table, vbs_parent, verify_ground_state, CouplingSpec, LocalHamiltonian,
        NullSpaceResult, Spin1Couplings,
    };
    pub use crate::spherical_tensors::{
        aklt_rank1_tensor, canonical_tensor, fusion_spectrum, vbs_tensor, verify_spherical,
        SphericalTensorFamily,
    };
    pub use crate::spin_numerics::{
        eig_hermitian, fit_operator_expansion, kernel_basis, CMatrix, CVector, HalfInt,
        OperatorExpansion, Settings, ToleranceConfig, C64,
    };
    pub use crate::valence_bond::{
        alternating_dimer_state, analytic_predictions, contraction_identity_check, dimer_state,
        mg_state, singlet, symmetry_breaking_state, DimerCovering, SymmetryBreakingSpec,
    };
}
