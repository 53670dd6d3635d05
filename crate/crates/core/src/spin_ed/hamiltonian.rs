use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{HoneycombLattice, LinkType};
use crate::pauli::{Pauli, PauliString};
use crate::state::{accumulate_pauli, C64};

/// Largest spin count accepted for exact diagonalization.
pub const ED_CEILING: usize = 20;

/// Bond couplings `J` and Zeeman field `h`, in common energy units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    #[serde(default)]
    pub hx: f64,
    #[serde(default)]
    pub hy: f64,
    #[serde(default)]
    pub hz: f64,
}

impl CouplingParams {
    pub fn new(jx: f64, jy: f64, jz: f64) -> Self {
        Self { jx, jy, jz, hx: 0.0, hy: 0.0, hz: 0.0 }
    }

    pub fn with_field(mut self, hx: f64, hy: f64, hz: f64) -> Self {
        self.hx = hx;
        self.hy = hy;
        self.hz = hz;
        self
    }

    pub fn j(&self, link: LinkType) -> f64 {
        match link {
            LinkType::X => self.jx,
            LinkType::Y => self.jy,
            LinkType::Z => self.jz,
        }
    }

    pub fn h(&self, axis: Pauli) -> f64 {
        match axis {
            Pauli::X => self.hx,
            Pauli::Y => self.hy,
            Pauli::Z => self.hz,
        }
    }

    pub fn has_field(&self) -> bool {
        self.hx != 0.0 || self.hy != 0.0 || self.hz != 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.jx, self.jy, self.jz, self.hx, self.hy, self.hz];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("couplings must be finite".into()));
        }
        if self.jx == 0.0 && self.jy == 0.0 && self.jz == 0.0 {
            return Err(Error::Domain("at least one bond coupling must be nonzero".into()));
        }
        Ok(())
    }
}

/// Real-weighted sum of Hermitian Pauli strings, kept canonical: strings have
/// phase `+1`, appear once, are sorted, and carry nonzero weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl SparseOperator {
    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliString)>,
    {
        let mut merged: BTreeMap<Vec<(usize, Pauli)>, f64> = BTreeMap::new();
        for (coeff, string) in terms {
            if !string.is_hermitian() {
                return Err(Error::Domain(format!("term '{string}' is not Hermitian")));
            }
            if let Some(s) = string.max_site() {
                if s >= n_qubits {
                    return Err(Error::Register(format!("term '{string}' outside {n_qubits} qubits")));
                }
            }
            let sign = if string.phase() == crate::pauli::Phase::ONE { 1.0 } else { -1.0 };
            *merged.entry(string.letters().to_vec()).or_insert(0.0) += sign * coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|(letters, c)| (c, PauliString::from_letters(letters)))
            .collect();
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ |c|`, an upper bound on the operator norm.
    pub fn scale(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    pub fn coefficient(&self, string: &PauliString) -> f64 {
        self.terms
            .iter()
            .find(|(_, s)| s.letters() == string.letters())
            .map(|&(c, ref s)| if s.phase() == string.phase() { c } else { -c })
            .unwrap_or(0.0)
    }

    /// `self + other`, canonicalized.
    pub fn add(&self, other: &SparseOperator) -> Result<SparseOperator> {
        let n = self.n_qubits.max(other.n_qubits);
        Self::from_terms(n, self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn scaled(&self, factor: f64) -> SparseOperator {
        Self::from_terms(self.n_qubits, self.terms.iter().map(|(c, s)| (c * factor, s.clone())))
            .expect("scaling keeps terms valid")
    }

    /// `U H U†` for a Hermitian Pauli string `U`: anticommuting terms flip sign.
    pub fn conjugate_by(&self, u: &PauliString) -> SparseOperator {
        let terms = self
            .terms
            .iter()
            .map(|(c, s)| if s.commutes(u) { (*c, s.clone()) } else { (-c, s.clone()) });
        Self::from_terms(self.n_qubits, terms).expect("conjugation keeps terms valid")
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (c, s) in &self.terms {
            accumulate_pauli(s, *c, x, y);
        }
    }
}

/// `H = −Σ_ν J_ν Σ_{ν-links} σ^ν σ^ν − Σ_j (h_x σ_j^x + h_y σ_j^y + h_z σ_j^z)`.
///
/// Terms with zero weight are dropped.
pub fn build_hamiltonian(lattice: &HoneycombLattice, params: &CouplingParams) -> Result<SparseOperator> {
    params.validate()?;
    let n = lattice.n_sites();
    if n > ED_CEILING {
        return Err(Error::Resource { spins: n, ceiling: ED_CEILING });
    }
    let bond_terms = lattice.bonds.iter().map(|bond| {
        let axis = Pauli::from(bond.link);
        let string = PauliString::from_letters([(bond.a.index, axis), (bond.b.index, axis)]);
        (-params.j(bond.link), string)
    });
    let field_terms = (0..n).flat_map(|j| {
        [Pauli::X, Pauli::Y, Pauli::Z]
            .into_iter()
            .map(move |axis| (-params.h(axis), PauliString::single(j, axis)))
    });
    SparseOperator::from_terms(n, bond_terms.chain(field_terms))
}

/// Outcome of comparing `σ_i^z H σ_i^z` with the two-vortex identity.
#[derive(Debug, Clone, PartialEq)]
pub enum IdentityCheck {
    Holds,
    /// Difference left after subtracting the predicted terms.
    Fails(SparseOperator),
    Skipped(String),
}

#[derive(Debug, Clone)]
pub struct TwoVortex {
    pub hamiltonian: SparseOperator,
    pub identity: IdentityCheck,
}

/// `H_{2v} = σ_i^z H σ_i^z`, checked term-by-term against
/// `H + 2J_x σ_i^x σ_j^x + 2J_y σ_i^y σ_k^y` with `j`, `k` the x- and y-neighbours of `i`.
pub fn two_vortex_hamiltonian(
    lattice: &HoneycombLattice,
    params: &CouplingParams,
    h: &SparseOperator,
    site: usize,
) -> Result<TwoVortex> {
    if site >= lattice.n_sites() {
        return Err(Error::Lookup { kind: "site", index: site });
    }
    let flipped = h.conjugate_by(&PauliString::single(site, Pauli::Z));
    if params.hx != 0.0 || params.hy != 0.0 {
        return Ok(TwoVortex {
            hamiltonian: flipped,
            identity: IdentityCheck::Skipped(
                "transverse field present: conjugation also flips h_x, h_y at the site".into(),
            ),
        });
    }
    let mut predicted = vec![];
    for (link, axis) in [(LinkType::X, Pauli::X), (LinkType::Y, Pauli::Y)] {
        if let Some(other) = lattice.neighbor(site, link) {
            predicted.push((
                2.0 * params.j(link),
                PauliString::from_letters([(site, axis), (other, axis)]),
            ));
        }
    }
    let expected = h.add(&SparseOperator::from_terms(h.n_qubits(), predicted)?)?;
    let identity = if expected == flipped {
        IdentityCheck::Holds
    } else {
        IdentityCheck::Fails(flipped.add(&expected.scaled(-1.0))?)
    };
    Ok(TwoVortex { hamiltonian: flipped, identity })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCouplings {
    pub params: CouplingParams,
    /// Set when some `t_ν / U` exceeds 0.1, where the perturbative map is doubtful.
    pub regime_note: Option<String>,
}

/// Superexchange map `J_ν = t_ν² / (2U)`, `h_ν = 4 t_ν² / U`.
pub fn effective_couplings(t_plus: [f64; 3], u: f64) -> Result<EffectiveCouplings> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::Domain(format!("interaction U must be positive, got {u}")));
    }
    if t_plus.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::Domain("tunnelling amplitudes must be non-negative".into()));
    }
    let j = t_plus.map(|t| t * t / (2.0 * u));
    let h = t_plus.map(|t| 4.0 * t * t / u);
    let worst = t_plus.iter().fold(0.0f64, |m, t| m.max(t / u));
    let regime_note = (worst > 0.1)
        .then(|| format!("t/U = {worst:.3} > 0.1: second-order exchange estimate is outside its regime"));
    Ok(EffectiveCouplings {
        params: CouplingParams { jx: j[0], jy: j[1], jz: j[2], hx: h[0], hy: h[1], hz: h[2] },
        regime_note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, Boundary};
    use crate::pauli::plaquette_operator;

    #[test]
    fn isotropic_term_count() {
        let lat = build_lattice(2, 2, Boundary::Torus).unwrap();
        let h = build_hamiltonian(&lat, &CouplingParams::new(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(h.len(), 12);
        assert!(h.terms().iter().all(|(c, s)| *c == -1.0 && s.weight() == 2));

        let hf = build_hamiltonian(&lat, &CouplingParams::new(1.0, 1.0, 1.0).with_field(0.0, 0.0, 0.1))
            .unwrap();
        assert_eq!(hf.len(), 20);
        let full = CouplingParams::new(1.0, 1.0, 1.0).with_field(0.1, 0.2, 0.3);
        assert_eq!(build_hamiltonian(&lat, &full).unwrap().len(), 12 + 3 * 8);
    }

    #[test]
    fn ceiling_enforced() {
        let lat = build_lattice(4, 3, Boundary::Torus).unwrap();
        let err = build_hamiltonian(&lat, &CouplingParams::new(1.0, 1.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::Resource { spins: 24, .. }));
        assert!(err.to_string().contains("Majorana"));
    }

    #[test]
    fn couplings_validated() {
        let lat = build_lattice(2, 2, Boundary::Torus).unwrap();
        assert!(build_hamiltonian(&lat, &CouplingParams::new(0.0, 0.0, 0.0)).is_err());
        assert!(build_hamiltonian(&lat, &CouplingParams::new(f64::NAN, 1.0, 0.0)).is_err());
    }

    #[test]
    fn bond_terms_commute_with_plaquettes_only_at_zero_field() {
        let lat = build_lattice(3, 3, Boundary::Torus).unwrap();
        let h = build_hamiltonian(&lat, &CouplingParams::new(0.7, 1.1, 0.4)).unwrap();
        for q in 0..lat.n_plaquettes() {
            let w = plaquette_operator(&lat, q).unwrap();
            assert!(h.terms().iter().all(|(_, s)| s.commutes(&w)));
        }
        let hx = build_hamiltonian(&lat, &CouplingParams::new(1.0, 1.0, 1.0).with_field(0.1, 0.0, 0.0))
            .unwrap();
        let w0 = plaquette_operator(&lat, 0).unwrap();
        assert!(hx.terms().iter().any(|(_, s)| !s.commutes(&w0)));
    }

    #[test]
    fn two_vortex_identity() {
        let lat = build_lattice(2, 2, Boundary::Torus).unwrap();
        let params = CouplingParams::new(1.0, 1.0, 1.0);
        let h = build_hamiltonian(&lat, &params).unwrap();
        for i in 0..lat.n_sites() {
            let tv = two_vortex_hamiltonian(&lat, &params, &h, i).unwrap();
            assert_eq!(tv.identity, IdentityCheck::Holds);
        }
        let zonly = CouplingParams::new(0.0, 0.0, 1.0);
        let hz = build_hamiltonian(&lat, &zonly).unwrap();
        assert_eq!(two_vortex_hamiltonian(&lat, &zonly, &hz, 3).unwrap().hamiltonian, hz);
    }

    #[test]
    fn two_vortex_skipped_with_transverse_field() {
        let lat = build_lattice(2, 2, Boundary::Torus).unwrap();
        let params = CouplingParams::new(1.0, 1.0, 1.0).with_field(0.1, 0.0, 0.0);
        let h = build_hamiltonian(&lat, &params).unwrap();
        let tv = two_vortex_hamiltonian(&lat, &params, &h, 0).unwrap();
        assert!(matches!(tv.identity, IdentityCheck::Skipped(_)));
        assert!(two_vortex_hamiltonian(&lat, &params, &h, 99).is_err());
    }

    #[test]
    fn superexchange_map() {
        let e = effective_couplings([0.1, 0.1, 0.1], 1.0).unwrap();
        for (j, h) in [(e.params.jx, e.params.hx), (e.params.jy, e.params.hy), (e.params.jz, e.params.hz)] {
            assert!((j - 0.005).abs() < 1e-15);
            assert!((h - 0.04).abs() < 1e-15);
            assert!((h / j - 8.0).abs() < 1e-12);
        }
        assert!(e.regime_note.is_none());
        let zero = effective_couplings([0.0; 3], 2.0).unwrap();
        assert_eq!(zero.params, CouplingParams::new(0.0, 0.0, 0.0));
        assert!(effective_couplings([0.5, 0.1, 0.1], 1.0).unwrap().regime_note.is_some());
        assert!(matches!(effective_couplings([0.1; 3], 0.0), Err(Error::Domain(_))));
        assert!(effective_couplings([0.1; 3], -1.0).is_err());
    }
}
