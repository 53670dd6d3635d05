//! Protocol scripts: ordered steps acting on spins plus one ancilla.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::HoneycombLattice;
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    PrepareAncillaPlus,
    /// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ σ^axis_site`.
    ControlledPauli { site: usize, axis: Pauli },
    UnconditionalPauli { site: usize, axis: Pauli },
    /// Six hexagon sites in the 1..6 order; applies the controlled loop string.
    BraidLoop { sites: [usize; 6] },
    /// Readout along `(|0⟩ + e^{iθ}|1⟩)/√2`; reported, never collapsed.
    MeasureAncilla { angle: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolScript {
    pub steps: Vec<Step>,
}

/// Letters of the loop string on hexagon sites 1..6, applied in the order
/// 6, 1, 2, 3, 4, 5.
pub const LOOP_LETTERS: [Pauli; 6] = [Pauli::Z, Pauli::Y, Pauli::X, Pauli::Z, Pauli::Y, Pauli::X];
pub const LOOP_ORDER: [usize; 6] = [5, 0, 1, 2, 3, 4];

impl ProtocolScript {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        let script = Self { steps };
        script.validate()?;
        Ok(script)
    }

    pub fn validate(&self) -> Result<()> {
        let prepares = self.steps.iter().filter(|s| matches!(s, Step::PrepareAncillaPlus)).count();
        if prepares != 1 || !matches!(self.steps.first(), Some(Step::PrepareAncillaPlus)) {
            return Err(Error::Protocol("a script starts with exactly one PrepareAncillaPlus".into()));
        }
        let measures: Vec<usize> = self
            .steps
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Step::MeasureAncilla { .. }))
            .map(|(i, _)| i)
            .collect();
        if measures.len() > 1 || measures.iter().any(|&i| i + 1 != self.steps.len()) {
            return Err(Error::Protocol("MeasureAncilla may only appear once, as the last step".into()));
        }
        Ok(())
    }

    /// Number of `BraidLoop` steps.
    pub fn loops(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::BraidLoop { .. })).count()
    }

    /// The inverse sequence: unitary steps in reverse order, each replaced by
    /// its inverse (every step here is an involution). Preparation and
    /// measurement are dropped.
    pub fn reversed(&self) -> Vec<Step> {
        self.steps
            .iter()
            .rev()
            .filter(|s| !matches!(s, Step::PrepareAncillaPlus | Step::MeasureAncilla { .. }))
            .cloned()
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("script serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let script: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        script.validate()?;
        Ok(script)
    }
}

/// Sites used by the interferometric protocol around hexagon `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolGeometry {
    pub plaquette: usize,
    pub loop_sites: [usize; 6],
    /// Hexagon site 3: its σ^z creates the first vortex pair.
    pub creation_site: usize,
    /// Hexagon site 6: its controlled σ^z creates the second pair.
    pub control_site: usize,
    /// Fluxes with both pairs present.
    pub four_vortex_flux: Vec<i8>,
}

impl ProtocolGeometry {
    pub fn new(lattice: &HoneycombLattice, q: usize) -> Result<Self> {
        let plaq = lattice.plaquette(q)?;
        let loop_sites = plaq.sites.map(|s| s.index);
        let creation_site = loop_sites[2];
        let control_site = loop_sites[5];
        let mut flux = vec![1i8; lattice.n_plaquettes()];
        for site in [creation_site, control_site] {
            let z = PauliString::single(site, Pauli::Z);
            for (p, w) in flux.iter_mut().enumerate() {
                if !z.commutes(&crate::pauli::plaquette_operator(lattice, p)?) {
                    *w = -*w;
                }
            }
        }
        Ok(Self { plaquette: q, loop_sites, creation_site, control_site, four_vortex_flux: flux })
    }

    /// `Prepare, σ^z_3, C-σ^z_6, loop × n, C-σ^z_6, σ^z_3`, plus an optional readout.
    pub fn script(&self, loops: usize, readout: Option<f64>) -> ProtocolScript {
        let mut steps = vec![
            Step::PrepareAncillaPlus,
            Step::UnconditionalPauli { site: self.creation_site, axis: Pauli::Z },
            Step::ControlledPauli { site: self.control_site, axis: Pauli::Z },
        ];
        steps.extend((0..loops).map(|_| Step::BraidLoop { sites: self.loop_sites }));
        steps.push(Step::ControlledPauli { site: self.control_site, axis: Pauli::Z });
        steps.push(Step::UnconditionalPauli { site: self.creation_site, axis: Pauli::Z });
        if let Some(angle) = readout {
            steps.push(Step::MeasureAncilla { angle });
        }
        ProtocolScript { steps }
    }

    pub fn loop_string(&self) -> PauliString {
        loop_string_unchecked(&self.loop_sites)
    }
}

/// Checks that `sites` is a hexagon of `lattice` in the 1..6 order.
pub fn check_loop_sites(lattice: &HoneycombLattice, sites: &[usize; 6]) -> Result<usize> {
    lattice
        .plaquettes
        .iter()
        .find(|p| p.sites.map(|s| s.index) == *sites)
        .map(|p| p.label)
        .ok_or_else(|| Error::Geometry(format!("sites {sites:?} are not a hexagon in the 1..6 order")))
}

/// The loop string on a validated hexagon.
pub fn loop_string(lattice: &HoneycombLattice, sites: &[usize; 6]) -> Result<PauliString> {
    check_loop_sites(lattice, sites)?;
    Ok(loop_string_unchecked(sites))
}

fn loop_string_unchecked(sites: &[usize; 6]) -> PauliString {
    PauliString::from_letters(LOOP_ORDER.iter().map(|&i| (sites[i], LOOP_LETTERS[i])))
}
