//! Sector energies, vortex gaps and the A/B phase diagram.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, HoneycombLattice};
use crate::majorana::gauge::{gauge_from_flux, GaugeConfig};
use crate::majorana::spectrum::{majorana_matrix, sector_spectrum, single_particle_energies, SectorSpectrum};
use crate::spin_ed::hamiltonian::CouplingParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "A")]
    AGapped,
    #[serde(rename = "B")]
    BGapless,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::AGapped => "A",
            Phase::BGapless => "B",
        })
    }
}

/// B when each `|J_α|` is at most the sum of the other two (equality included).
pub fn classify_phase(params: &CouplingParams) -> Phase {
    let (x, y, z) = (params.jx.abs(), params.jy.abs(), params.jz.abs());
    if x <= y + z && y <= z + x && z <= x + y {
        Phase::BGapless
    } else {
        Phase::AGapped
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FluxSectorEnergy {
    pub flux: Vec<i8>,
    pub energy: f64,
    /// Holonomy variant (0..4 on a torus) attaining the minimum.
    pub holonomy: usize,
    pub spectrum: SectorSpectrum,
}

fn reject_field(params: &CouplingParams) -> Result<()> {
    if params.has_field() {
        return Err(Error::Domain("the free-fermion solution requires zero field".into()));
    }
    Ok(())
}

/// Lowest physical energy with the given fluxes, minimized over holonomies.
pub fn flux_sector_energy(lattice: &HoneycombLattice, params: &CouplingParams, flux: &[i8]) -> Result<FluxSectorEnergy> {
    reject_field(params)?;
    let base = gauge_from_flux(lattice, flux)?;
    let mut best: Option<FluxSectorEnergy> = None;
    for (i, gauge) in base.holonomy_variants(lattice).iter().enumerate() {
        let spectrum = sector_spectrum(&majorana_matrix(lattice, gauge, params))?;
        if best.as_ref().is_none_or(|b| spectrum.ground_energy < b.energy - 1e-12) {
            best = Some(FluxSectorEnergy { flux: flux.to_vec(), energy: spectrum.ground_energy, holonomy: i, spectrum });
        }
    }
    best.ok_or_else(|| Error::Numeric("no gauge configuration evaluated".into()))
}

/// Lowest physical energy over all flux sectors. Exhaustive, so limited to
/// lattices with at most 16 plaquettes.
pub fn ground_energy(lattice: &HoneycombLattice, params: &CouplingParams) -> Result<FluxSectorEnergy> {
    reject_field(params)?;
    let n_p = lattice.n_plaquettes();
    if n_p > 16 {
        return Err(Error::Resource { spins: lattice.n_sites(), ceiling: 32 });
    }
    let mut best: Option<FluxSectorEnergy> = None;
    for mask in 0u32..1 << n_p {
        if lattice.boundary == Boundary::Torus && mask.count_ones() % 2 == 1 {
            continue;
        }
        let flux: Vec<i8> = (0..n_p).map(|p| if mask >> p & 1 == 1 { -1 } else { 1 }).collect();
        let e = flux_sector_energy(lattice, params, &flux)?;
        if best.as_ref().is_none_or(|b| e.energy < b.energy - 1e-12) {
            best = Some(e);
        }
    }
    best.ok_or_else(|| Error::Numeric("no flux sector evaluated".into()))
}

/// `E(flux) − E(vortex-free)`, each minimized over holonomies.
pub fn vortex_gap(lattice: &HoneycombLattice, params: &CouplingParams, flux: &[i8]) -> Result<f64> {
    let excited = flux_sector_energy(lattice, params, flux)?;
    let free = flux_sector_energy(lattice, params, &vec![1; lattice.n_plaquettes()])?;
    Ok(excited.energy - free.energy)
}

/// Smallest single-particle energy of the vortex-free, untwisted sector on
/// `L×L` tori. Sizes divisible by 3 put the gapless points on the momentum grid.
pub fn bulk_gap_estimate(params: &CouplingParams, sizes: &[usize]) -> Result<Vec<(usize, f64)>> {
    reject_field(params)?;
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("sizes must be strictly ascending".into()));
    }
    sizes
        .iter()
        .map(|&l| {
            let lat = HoneycombLattice::new(l, l, Boundary::Torus)?;
            let eps = single_particle_energies(&lat, &GaugeConfig::vortex_free(&lat), params);
            Ok((l, eps[0]))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub phase: Phase,
    pub gap: f64,
}

/// Simplex grid `Jx + Jy + Jz = 1` with spacing `step`, rows ordered by
/// `(Jx, Jy)` grid index. Gaps are measured on an `L×L` torus.
pub fn phase_diagram(step: f64, size: usize) -> Result<Vec<PhaseRow>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Domain("step must lie in (0, 1]".into()));
    }
    let n = (1.0 / step).round() as usize;
    if ((n as f64) * step - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("step must divide 1".into()));
    }
    let lat = HoneycombLattice::new(size, size, Boundary::Torus)?;
    let gauge = GaugeConfig::vortex_free(&lat);
    let mut rows = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            let k = n - i - j;
            let params = CouplingParams::new(i as f64 / n as f64, j as f64 / n as f64, k as f64 / n as f64);
            let gap = single_particle_energies(&lat, &gauge, &params)[0];
            rows.push(PhaseRow { jx: params.jx, jy: params.jy, jz: params.jz, phase: classify_phase(&params), gap });
        }
    }
    Ok(rows)
}
