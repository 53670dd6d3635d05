//! Conditional vortex creation, loop braiding and ancilla readout.

pub mod matrices;
pub mod protocol;
pub mod script;

pub use matrices::{
    projected_braid, reference_braid_matrix, statistics_discriminator, BraidMatrix, DiscriminatorOptions,
    ProjectedBraid, Statistics,
};
pub use protocol::{
    apply_step, attach_ancilla, braid_loop, controlled_pauli, run_protocol, run_protocol_from_state, wrap_phase,
    BraidReport, Readout,
};
pub use script::{check_loop_sites, loop_string, ProtocolGeometry, ProtocolScript, Step};
