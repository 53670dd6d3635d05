//! Numerical laboratory for the Kitaev honeycomb model: lattice geometry,
//! Pauli-string algebra, exact diagonalization, the free-fermion gauge-sector
//! solution and an ancilla-assisted braiding protocol.

pub mod braid;
pub mod error;
pub mod lattice;
pub mod majorana;
pub mod pauli;
pub mod spin_ed;
pub mod state;

pub use error::{Error, Result};
pub use lattice::{build_lattice, Bond, Boundary, HoneycombLattice, LinkType, Plaquette, Site, Sublattice};
pub use pauli::{plaquette_operator, Pauli, PauliString, Phase};
pub use spin_ed::{CouplingParams, EigenOptions, SparseOperator};
pub use state::{StateVector, C64};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
