//! Flux-sector resolved ground states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, HoneycombLattice, Sublattice};
use crate::pauli::{plaquette_operator, Pauli, PauliString};
use crate::spin_ed::eigen::{lowest_eigenpairs, multiplets, solve, EigenOptions, EigenResult, SolverMethod};
use crate::spin_ed::hamiltonian::SparseOperator;
use crate::spin_ed::symmetry::SectorBasis;
use crate::state::{apply_pauli_raw, expectation_raw, StateVector, C64};

/// `|⟨W_p⟩|` below this marks the plaquette as not in a definite sector.
pub const MIXED_THRESHOLD: f64 = 0.99;

/// Tolerance on `⟨W_p⟩ = w_p` for states returned by [`sector_ground`].
pub const SECTOR_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WpProfile {
    pub values: Vec<f64>,
    pub mixed: Vec<bool>,
}

impl WpProfile {
    pub fn is_definite(&self) -> bool {
        !self.mixed.iter().any(|&m| m)
    }

    /// Rounded sector labels, `None` where the plaquette is mixed.
    pub fn signs(&self) -> Vec<Option<i8>> {
        self.values
            .iter()
            .zip(&self.mixed)
            .map(|(&v, &m)| if m { None } else if v > 0.0 { Some(1) } else { Some(-1) })
            .collect()
    }
}

/// `⟨W_p⟩` for every plaquette. Ancilla qubits, if any, are traced over.
pub fn wp_profile(lattice: &HoneycombLattice, state: &StateVector) -> Result<WpProfile> {
    if state.n_spins() != lattice.n_sites() {
        return Err(Error::Register(format!(
            "state has {} spins, lattice has {}",
            state.n_spins(),
            lattice.n_sites()
        )));
    }
    let mut values = Vec::with_capacity(lattice.n_plaquettes());
    for p in 0..lattice.n_plaquettes() {
        let w = plaquette_operator(lattice, p)?;
        values.push(state.expectation(&w)?.re);
    }
    let mixed = values.iter().map(|v| v.abs() < MIXED_THRESHOLD).collect();
    Ok(WpProfile { values, mixed })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
#[derive(Default)]
pub enum SectorMethod {
    /// Diagonalizes the restriction to a symmetry-adapted basis of the sector.
    #[default]
    Reduced,
    /// Iterates are projected onto the sector after every expansion.
    Projection,
    /// `H + c Σ_p (1 − w_p W_p)`; `None` picks `c = 10 Σ|coefficients|`.
    Penalty { strength: Option<f64> },
}


#[derive(Debug, Clone)]
pub struct SectorResult {
    pub flux: Vec<i8>,
    pub energies: Vec<f64>,
    pub states: Vec<StateVector>,
    pub residuals: Vec<f64>,
    /// `(energy, multiplicity, spread)` groups of `energies`.
    pub multiplets: Vec<(f64, usize, f64)>,
    pub profile: WpProfile,
    pub solver: SolverMethod,
}

/// Lowest `k` states of `h` inside the flux sector `W_p = flux[p]`.
pub fn sector_ground(
    lattice: &HoneycombLattice,
    h: &SparseOperator,
    flux: &[i8],
    k: usize,
    method: SectorMethod,
    opts: &EigenOptions,
) -> Result<SectorResult> {
    let n_p = lattice.n_plaquettes();
    if flux.len() != n_p {
        return Err(Error::Constraint(format!("{} flux values for {n_p} plaquettes", flux.len())));
    }
    if flux.iter().any(|&w| w != 1 && w != -1) {
        return Err(Error::Constraint("flux values must be +1 or -1".into()));
    }
    if h.n_qubits() != lattice.n_sites() {
        return Err(Error::Register("Hamiltonian and lattice sizes differ".into()));
    }
    if lattice.boundary == Boundary::Torus && flux.iter().filter(|&&w| w < 0).count() % 2 == 1 {
        return Err(Error::Constraint("the product of all plaquette fluxes on a torus is +1".into()));
    }
    let plaquettes: Vec<PauliString> =
        (0..n_p).map(|p| plaquette_operator(lattice, p)).collect::<Result<_>>()?;
    for (c, term) in h.terms() {
        for (p, w) in plaquettes.iter().enumerate() {
            if !term.commutes(w) {
                return Err(Error::UnsupportedSector(format!(
                    "term {c} {term} does not commute with plaquette {p}"
                )));
            }
        }
    }

    let signed: Vec<(f64, &PauliString)> = flux.iter().map(|&w| w as f64).zip(plaquettes.iter()).collect();
    let project = |v: &mut [C64]| {
        for &(w, wp) in &signed {
            let mut image = v.to_vec();
            apply_pauli_raw(wp, &mut image);
            v.iter_mut().zip(&image).for_each(|(a, b)| *a = (*a + b * w) * 0.5);
        }
    };

    let res = match method {
        SectorMethod::Reduced => {
            let gens: Vec<(PauliString, i8)> = plaquettes.iter().cloned().zip(flux.iter().copied()).collect();
            reduced_solve(lattice.n_sites(), h, &gens, k, opts)?
        }
        SectorMethod::Projection => lowest_eigenpairs(h, k, opts, Some(&project))?,
        SectorMethod::Penalty { strength } => {
            let c = strength.unwrap_or(10.0 * h.scale());
            if !(c > 0.0) {
                return Err(Error::Domain("penalty strength must be positive".into()));
            }
            let mut terms: Vec<(f64, PauliString)> = h.terms().to_vec();
            terms.push((c * n_p as f64, PauliString::identity()));
            for &(w, wp) in &signed {
                terms.push((-c * w, wp.clone()));
            }
            let penalized = SparseOperator::from_terms(h.n_qubits(), terms)?;
            lowest_eigenpairs(&penalized, k, opts, None)?
        }
    };

    for state in &res.eigenvectors {
        for &(w, wp) in &signed {
            let got = expectation_raw(wp, state.amplitudes()).re;
            if (got - w).abs() > SECTOR_TOLERANCE {
                return Err(Error::Numeric(format!(
                    "returned state has <W_p> = {got:.3e}, expected {w}; raise the penalty strength"
                )));
            }
        }
    }
    let profile = wp_profile(lattice, &res.eigenvectors[0])?;
    Ok(SectorResult {
        flux: flux.to_vec(),
        multiplets: multiplets(&res.eigenvalues, 1e-8),
        energies: res.eigenvalues,
        states: res.eigenvectors,
        residuals: res.residuals,
        profile,
        solver: res.method,
    })
}

fn reduced_solve(
    n_sites: usize,
    h: &SparseOperator,
    generators: &[(PauliString, i8)],
    k: usize,
    opts: &EigenOptions,
) -> Result<EigenResult> {
    let basis = SectorBasis::new(n_sites, generators)?;
    let reduced = basis.restrict(h)?;
    let raw = solve(&reduced, k, opts, None)?;
    let eigenvectors = raw
        .vectors
        .iter()
        .map(|v| StateVector::from_amplitudes(n_sites, 0, basis.lift(v)?))
        .collect::<Result<_>>()?;
    Ok(EigenResult {
        eigenvalues: raw.eigenvalues,
        eigenvectors,
        residuals: raw.residuals,
        method: raw.method,
        matvecs: raw.matvecs,
    })
}

/// Non-contractible loop operators of a torus: `Π_c Y_A(0,c) Y_B(0,c)` along
/// A-row 0 and `Π_r X_A(r,0) X_B(r,0)` along A-column 0. Both commute with
/// the zero-field Hamiltonian and with every plaquette operator.
pub fn holonomy_loops(lattice: &HoneycombLattice) -> Result<[PauliString; 2]> {
    if lattice.boundary != Boundary::Torus {
        return Err(Error::Geometry("loop operators need periodic boundaries".into()));
    }
    let row = PauliString::from_letters((0..lattice.lx).flat_map(|c| {
        [Sublattice::A, Sublattice::B].map(|s| (lattice.site_index(0, c, s), Pauli::Y))
    }));
    let col = PauliString::from_letters((0..lattice.ly).flat_map(|r| {
        [Sublattice::A, Sublattice::B].map(|s| (lattice.site_index(r, 0, s), Pauli::X))
    }));
    Ok([row, col])
}

/// A ground state with definite fluxes and, on a torus, definite loop
/// eigenvalues. The lowest of the (up to four) loop sectors is chosen, the
/// first in `(+,+), (+,−), (−,+), (−,−)` order on ties.
#[derive(Debug, Clone)]
pub struct ResolvedGround {
    pub state: StateVector,
    pub energy: f64,
    pub residual: f64,
    pub holonomy: Option<[i8; 2]>,
    /// Lowest energy in each loop sector that is not empty.
    pub holonomy_energies: Vec<([i8; 2], f64)>,
}

pub fn resolved_ground(
    lattice: &HoneycombLattice,
    h: &SparseOperator,
    flux: &[i8],
    opts: &EigenOptions,
) -> Result<ResolvedGround> {
    if lattice.boundary != Boundary::Torus {
        let r = sector_ground(lattice, h, flux, 1, SectorMethod::Reduced, opts)?;
        let state = r.states.into_iter().next().expect("one state requested");
        return Ok(ResolvedGround {
            state,
            energy: r.energies[0],
            residual: r.residuals[0],
            holonomy: None,
            holonomy_energies: Vec::new(),
        });
    }
    // Validates the flux pattern and the Hamiltonian's symmetry.
    sector_ground(lattice, h, flux, 1, SectorMethod::Reduced, opts)?;
    let loops = holonomy_loops(lattice)?;
    let mut gens: Vec<(PauliString, i8)> = (0..lattice.n_plaquettes())
        .map(|p| plaquette_operator(lattice, p))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .zip(flux.iter().copied())
        .collect();
    gens.extend(loops.iter().cloned().map(|l| (l, 1)));
    let n = gens.len();
    let mut best: Option<(StateVector, f64, f64, [i8; 2])> = None;
    let mut energies = Vec::new();
    for hol in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
        gens[n - 2].1 = hol[0];
        gens[n - 1].1 = hol[1];
        let res = match reduced_solve(lattice.n_sites(), h, &gens, 1, opts) {
            Ok(r) => r,
            Err(Error::Constraint(_)) => continue,
            Err(e) => return Err(e),
        };
        let e = res.eigenvalues[0];
        energies.push((hol, e));
        if best.as_ref().is_none_or(|b| e < b.1 - 1e-9) {
            let state = res.eigenvectors.into_iter().next().expect("one state requested");
            best = Some((state, e, res.residuals[0], hol));
        }
    }
    let (state, energy, residual, hol) =
        best.ok_or_else(|| Error::Constraint("no loop sector is compatible with the fluxes".into()))?;
    Ok(ResolvedGround { state, energy, residual, holonomy: Some(hol), holonomy_energies: energies })
}
