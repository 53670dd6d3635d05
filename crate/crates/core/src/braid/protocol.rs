//! Ancilla-assisted interferometry on the spin register.
//!
//! The joint state is always `|0⟩_a ⊗ a₀ + |1⟩_a ⊗ a₁` with the ancilla as the
//! highest bit. Controlled gates act on `a₁` only; the ancilla density matrix
//! follows from the two branches without forming the full `ρ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::braid::script::{check_loop_sites, ProtocolScript, Step, LOOP_LETTERS, LOOP_ORDER};
use crate::error::{Error, Result};
use crate::lattice::HoneycombLattice;
use crate::pauli::{Pauli, PauliString};
use crate::spin_ed::eigen::EigenOptions;
use crate::spin_ed::hamiltonian::{build_hamiltonian, CouplingParams};
use crate::spin_ed::sector::resolved_ground;
use crate::state::{apply_pauli_raw, dot, StateVector, C64};

/// Norm drift tolerated across a whole script.
pub const NORM_DRIFT_TOLERANCE: f64 = 1e-12;

/// Leakage above this in either branch marks the run's diagnostics as poor.
pub const LEAKAGE_FLAG: f64 = 0.5;

/// `|+⟩_a ⊗ ψ`.
pub fn attach_ancilla(psi: &StateVector) -> Result<StateVector> {
    psi.with_ancilla_plus()
}

fn spin_pauli(psi: &StateVector, site: usize, axis: Pauli) -> Result<PauliString> {
    if site >= psi.n_spins() {
        return Err(Error::Register(format!("site {site} outside {} spins", psi.n_spins())));
    }
    Ok(PauliString::single(site, axis))
}

/// Applies `σ^axis_site` on the ancilla-`|1⟩` branch only.
pub fn controlled_pauli(psi: &StateVector, site: usize, axis: Pauli) -> Result<StateVector> {
    let mut out = psi.clone();
    controlled_in_place(&mut out, &spin_pauli(psi, site, axis)?)?;
    Ok(out)
}

fn controlled_in_place(psi: &mut StateVector, p: &PauliString) -> Result<()> {
    let (_, one) = psi.branches_mut()?;
    apply_pauli_raw(p, one);
    Ok(())
}

/// The six controlled gates of one loop, applied in the order
/// `U_6^x, U_1^z, U_2^y, U_3^x, U_4^z, U_5^y`.
pub fn braid_loop(lattice: &HoneycombLattice, psi: &StateVector, sites: &[usize; 6]) -> Result<StateVector> {
    check_loop_sites(lattice, sites)?;
    let mut out = psi.clone();
    for i in LOOP_ORDER {
        controlled_in_place(&mut out, &spin_pauli(psi, sites[i], LOOP_LETTERS[i])?)?;
    }
    Ok(out)
}

/// Applies one unitary step. `PrepareAncillaPlus` attaches the ancilla;
/// `MeasureAncilla` leaves the state untouched.
pub fn apply_step(lattice: &HoneycombLattice, psi: &StateVector, step: &Step) -> Result<StateVector> {
    match step {
        Step::PrepareAncillaPlus => attach_ancilla(psi),
        Step::ControlledPauli { site, axis } => controlled_pauli(psi, *site, *axis),
        Step::UnconditionalPauli { site, axis } => psi.apply(&spin_pauli(psi, *site, *axis)?),
        Step::BraidLoop { sites } => braid_loop(lattice, psi, sites),
        Step::MeasureAncilla { .. } => {
            psi.branches()?;
            Ok(psi.clone())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Readout {
    pub angle: f64,
    /// Probability of `(|0⟩ + e^{iθ}|1⟩)/√2`.
    pub probability: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BraidReport {
    pub loops: usize,
    /// `ρ_ij = ⟨i|ρ_a|j⟩`.
    pub rho_ancilla: [[C64; 2]; 2],
    /// `|ρ_01|`.
    pub coherence: f64,
    /// Relative phase of the `|1⟩_a` branch, `arg⟨ψ₀|ψ₁⟩ ∈ (−π, π]`.
    pub phase: f64,
    pub abs_phase: f64,
    /// `1 − |⟨ψ_init|ψ_b⟩|²` for branch `b = 0, 1`.
    pub leakage: [f64; 2],
    pub norm_drift: f64,
    pub diagnostics_ok: bool,
    pub notes: Vec<String>,
    pub readout: Option<Readout>,
    pub script_echo: ProtocolScript,
}

impl BraidReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Runs `script` from the vortex-free ground state (zero field only). On a
/// torus the state also has definite loop eigenvalues.
pub fn run_protocol(
    lattice: &HoneycombLattice,
    params: &CouplingParams,
    script: &ProtocolScript,
    opts: &EigenOptions,
) -> Result<BraidReport> {
    let h = build_hamiltonian(lattice, params)?;
    let gs = resolved_ground(lattice, &h, &vec![1; lattice.n_plaquettes()], opts)?;
    run_protocol_from_state(lattice, &gs.state, script)
}

/// Runs `script` from a given spin state (no ancilla).
pub fn run_protocol_from_state(
    lattice: &HoneycombLattice,
    initial: &StateVector,
    script: &ProtocolScript,
) -> Result<BraidReport> {
    script.validate()?;
    if initial.n_ancilla() != 0 {
        return Err(Error::Protocol("the initial state must not carry an ancilla".into()));
    }
    if initial.n_spins() != lattice.n_sites() {
        return Err(Error::Register("initial state and lattice sizes differ".into()));
    }
    let mut psi = initial.clone();
    let mut readout_angle = None;
    for step in &script.steps {
        if let Step::MeasureAncilla { angle } = step {
            readout_angle = Some(*angle);
        }
        psi = apply_step(lattice, &psi, step)?;
    }
    let norm_drift = (psi.norm() - 1.0).abs();
    if norm_drift > NORM_DRIFT_TOLERANCE {
        return Err(Error::Numeric(format!("norm drifted by {norm_drift:.3e}")));
    }

    let (a0, a1) = psi.branches()?;
    let p0 = dot(a0, a0).re;
    let p1 = dot(a1, a1).re;
    let overlap = dot(a0, a1);
    let rho = [[C64::new(p0, 0.0), overlap.conj()], [overlap, C64::new(p1, 0.0)]];
    let coherence = overlap.norm();
    let phase = if coherence > 0.0 { wrap_phase(overlap.arg()) } else { 0.0 };

    let init = initial.amplitudes();
    let leak = |branch: &[C64], weight: f64| {
        if weight <= 0.0 {
            1.0
        } else {
            (1.0 - dot(init, branch).norm_sqr() / weight).max(0.0)
        }
    };
    let leakage = [leak(a0, p0), leak(a1, p1)];
    let mut notes = Vec::new();
    let diagnostics_ok = leakage.iter().all(|&l| l <= LEAKAGE_FLAG);
    if !diagnostics_ok {
        notes.push(format!(
            "leakage {:.3} / {:.3} exceeds {LEAKAGE_FLAG}: the branches left the initial state",
            leakage[0], leakage[1]
        ));
    }
    let readout = readout_angle.map(|angle| {
        let e = C64::from_polar(1.0, angle);
        let probability = 0.5 * (p0 + p1 + 2.0 * (e * rho[0][1]).re);
        Readout { angle, probability }
    });
    Ok(BraidReport {
        loops: script.loops(),
        rho_ancilla: rho,
        coherence,
        phase,
        abs_phase: phase.abs(),
        leakage,
        norm_drift,
        diagnostics_ok,
        notes,
        readout,
        script_echo: script.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::script::ProtocolGeometry;
    use crate::lattice::{build_lattice, Boundary};

    #[test]
    fn ancilla_on_basis_state() {
        let psi = StateVector::basis(2, 0).unwrap();
        let out = attach_ancilla(&psi).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0].re - s).abs() < 1e-15);
        assert!((out.amplitudes()[4].re - s).abs() < 1e-15);
        assert!(attach_ancilla(&out).is_err());
    }

    #[test]
    fn control_acts_on_one_branch() {
        let psi = attach_ancilla(&StateVector::basis(2, 0).unwrap()).unwrap();
        let out = controlled_pauli(&psi, 1, Pauli::X).unwrap();
        let (a0, a1) = out.branches().unwrap();
        assert!(a0[0].norm() > 0.7 && a1[2].norm() > 0.7 && a1[0].norm() == 0.0);
        let back = controlled_pauli(&out, 1, Pauli::X).unwrap();
        assert_eq!(back, psi);
        assert!(controlled_pauli(&StateVector::basis(2, 0).unwrap(), 0, Pauli::Z).is_err());
    }

    #[test]
    fn loop_equals_controlled_string() {
        let lat = build_lattice(2, 2, Boundary::Torus).unwrap();
        let g = ProtocolGeometry::new(&lat, 0).unwrap();
        let psi = attach_ancilla(&StateVector::random(8, 3).unwrap()).unwrap();
        let out = braid_loop(&lat, &psi, &g.loop_sites).unwrap();
        let (_, b1) = out.branches().unwrap();
        let (_, p1) = psi.branches().unwrap();
        let mut expect = p1.to_vec();
        apply_pauli_raw(&g.loop_string(), &mut expect);
        assert!(b1.iter().zip(&expect).all(|(a, b)| (a - b).norm() < 1e-14));
        let twice = braid_loop(&lat, &out, &g.loop_sites).unwrap();
        assert!(twice.amplitudes().iter().zip(psi.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn zero_loops_recombine() {
        let lat = build_lattice(2, 2, Boundary::Torus).unwrap();
        let g = ProtocolGeometry::new(&lat, 0).unwrap();
        let psi = StateVector::random(8, 9).unwrap();
        let r = run_protocol_from_state(&lat, &psi, &g.script(0, Some(0.0))).unwrap();
        assert!(r.phase.abs() < 1e-12);
        assert!((r.coherence - 0.5).abs() < 1e-12);
        assert!(r.leakage.iter().all(|&l| l < 1e-12));
        assert!((r.readout.unwrap().probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wrap_phase_range() {
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }
}
