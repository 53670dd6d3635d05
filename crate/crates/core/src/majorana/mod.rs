//! Free-fermion solution of the zero-field model per gauge sector.

pub mod gauge;
pub mod phase;
pub mod spectrum;

pub use gauge::{gauge_from_flux, GaugeConfig};
pub use phase::{
    bulk_gap_estimate, classify_phase, flux_sector_energy, ground_energy, phase_diagram, vortex_gap, FluxSectorEnergy,
    Phase, PhaseRow,
};
pub use spectrum::{
    majorana_matrix, pfaffian_sign, sector_spectrum, single_particle_energies, ParityNote, SectorSpectrum, SkewMatrix,
};
