//! Exact diagonalization of the spin model.

pub mod eigen;
pub mod hamiltonian;
pub mod sector;
pub mod symmetry;

pub use eigen::{
    ground_states, lowest_eigenpairs, multiplets, solve, EigenOptions, EigenResult, LinearOperator, RawEigen, SolverMethod,
};
pub use hamiltonian::{
    build_hamiltonian, effective_couplings, two_vortex_hamiltonian, CouplingParams, EffectiveCouplings,
    IdentityCheck, SparseOperator, TwoVortex, ED_CEILING,
};
pub use sector::{
    holonomy_loops, resolved_ground, sector_ground, wp_profile, ResolvedGround, SectorMethod, SectorResult, WpProfile,
};
pub use symmetry::{ReducedOperator, SectorBasis};
