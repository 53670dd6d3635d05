//! Shared fixtures for the benchmarks.

use kitaev_core::{build_lattice, Boundary, CouplingParams, HoneycombLattice};

pub fn torus(l: usize) -> HoneycombLattice {
    build_lattice(l, l, Boundary::Torus).expect("valid torus")
}

pub fn isotropic() -> CouplingParams {
    CouplingParams::new(1.0, 1.0, 1.0)
}
