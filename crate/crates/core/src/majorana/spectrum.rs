//! Quadratic Majorana Hamiltonians `H = (i/4) Σ A_jk c_j c_k` per gauge sector.
//!
//! With `A` real antisymmetric, `iA` has eigenvalues `±ε_m` and the free
//! fermion ground energy is `−½ Σ ε_m`. Not every free-fermion state is a spin
//! state: on a torus the projection onto `D_j = b^x_j b^y_j b^z_j c_j = 1`
//! fixes the parity of the `c` modes relative to `Π u`. The ground state of
//! `A` has `(−i)^{N/2} c_0⋯c_{N−1} = sign Pf(A)`; when that disagrees with the
//! required value the lowest physical level costs an extra `ε_min`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, HoneycombLattice, LinkType, Sublattice};
use crate::majorana::gauge::GaugeConfig;
use crate::spin_ed::hamiltonian::CouplingParams;
use crate::state::C64;

/// Tolerance on the `±ε` pairing of the spectrum of `iA`.
pub const PAIRING_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    a: DMatrix<f64>,
    /// Required `sign Pf` of a physical ground state, when the boundary fixes one.
    required_pf_sign: Option<i8>,
}

impl SkewMatrix {
    /// Wraps an antisymmetric matrix without a parity constraint.
    pub fn from_dense(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Size("skew matrix must be square".into()));
        }
        if a.nrows() % 2 == 1 {
            return Err(Error::Size("skew matrix must have even dimension".into()));
        }
        if (&a + a.transpose()).iter().any(|&v| v != 0.0) {
            return Err(Error::Domain("matrix is not exactly antisymmetric".into()));
        }
        Ok(Self { a, required_pf_sign: None })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn required_pf_sign(&self) -> Option<i8> {
        self.required_pf_sign
    }

    pub fn nonzeros(&self) -> usize {
        self.a.iter().filter(|&&v| v != 0.0).count()
    }
}

/// `A_jk = 2 J_α u_jk` (j on sublattice A), `A_kj = −A_jk`. Field components
/// are ignored; callers that care should check [`CouplingParams::has_field`].
pub fn majorana_matrix(lattice: &HoneycombLattice, gauge: &GaugeConfig, params: &CouplingParams) -> SkewMatrix {
    let n = lattice.n_sites();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, bond) in lattice.bonds.iter().enumerate() {
        let (j, k) = bond.endpoints();
        let v = 2.0 * params.j(bond.link) * gauge.u(i) as f64;
        a[(j, k)] += v;
        a[(k, j)] -= v;
    }
    let required_pf_sign = match lattice.boundary {
        Boundary::Torus => {
            let half = if (n / 2).is_multiple_of(2) { 1 } else { -1 };
            Some(half * label_order_sign(lattice) * gauge.product())
        }
        Boundary::Open => None,
    };
    SkewMatrix { a, required_pf_sign }
}

/// Sign of the permutation taking the Majorana labels
/// `[(b^α_j, b^α_k) per bond] ++ [c_0 … c_{N−1}]` to ascending order, with
/// `b^x_j, b^y_j, b^z_j, c_j = 4j, 4j+1, 4j+2, 4j+3`.
fn label_order_sign(lattice: &HoneycombLattice) -> i8 {
    let slot = |l: LinkType| match l {
        LinkType::X => 0,
        LinkType::Y => 1,
        LinkType::Z => 2,
    };
    let mut labels: Vec<usize> = Vec::with_capacity(4 * lattice.n_sites());
    for bond in &lattice.bonds {
        debug_assert_eq!(bond.a.sublattice, Sublattice::A);
        labels.push(4 * bond.a.index + slot(bond.link));
        labels.push(4 * bond.b.index + slot(bond.link));
    }
    labels.extend((0..lattice.n_sites()).map(|j| 4 * j + 3));
    permutation_sign(&labels)
}

fn permutation_sign(values: &[usize]) -> i8 {
    // Parity from cycle decomposition of the ranking permutation.
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by_key(|&i| values[i]);
    let mut seen = vec![false; values.len()];
    let mut sign = 1i8;
    for start in 0..values.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = order[cur];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// `(sign, ln|Pf|)` by skew `LTLᵀ` elimination with partial pivoting. A
/// singular matrix gives sign 0.
pub fn pfaffian_sign(a: &DMatrix<f64>) -> (i8, f64) {
    let n = a.nrows();
    if n % 2 == 1 {
        return (0, f64::NEG_INFINITY);
    }
    let mut m = a.clone();
    let mut sign = 1i8;
    let mut log_abs = 0.0;
    let mut k = 0;
    while k + 1 < n {
        let (mut kp, mut best) = (k + 1, m[(k + 1, k)].abs());
        for r in k + 2..n {
            if m[(r, k)].abs() > best {
                best = m[(r, k)].abs();
                kp = r;
            }
        }
        if kp != k + 1 {
            m.swap_rows(k + 1, kp);
            m.swap_columns(k + 1, kp);
            sign = -sign;
        }
        let pivot = m[(k, k + 1)];
        if pivot == 0.0 {
            return (0, f64::NEG_INFINITY);
        }
        if pivot < 0.0 {
            sign = -sign;
        }
        log_abs += pivot.abs().ln();
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|j| m[(k, j)] / pivot).collect();
            let col: Vec<f64> = (k + 2..n).map(|i| m[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    m[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    (sign, log_abs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityNote {
    /// The free-fermion ground state is physical (or no constraint applies).
    Physical,
    /// The lowest physical state has the lowest mode occupied.
    Flipped,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectorSpectrum {
    /// Ascending, non-negative, length `N/2`.
    pub epsilons: Vec<f64>,
    pub ground_energy: f64,
    pub parity_note: ParityNote,
    /// Largest deviation from exact `±ε` pairing in the spectrum of `iA`.
    pub pairing_error: f64,
}

impl SectorSpectrum {
    /// `−½ Σ ε`, ignoring the parity projection.
    pub fn free_energy(&self) -> f64 {
        -0.5 * self.epsilons.iter().sum::<f64>()
    }
}

/// Single-particle spectrum and lowest physical energy of `A`.
pub fn sector_spectrum(a: &SkewMatrix) -> Result<SectorSpectrum> {
    let n = a.dim();
    if n == 0 || n % 2 == 1 {
        return Err(Error::Size("skew matrix must have positive even dimension".into()));
    }
    let h = a.a.map(|v| C64::new(0.0, v));
    let eig = h.symmetric_eigen();
    let mut lambdas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if lambdas.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite eigenvalue of iA".into()));
    }
    lambdas.sort_by(f64::total_cmp);
    let pairing_error = (0..n / 2).map(|i| (lambdas[i] + lambdas[n - 1 - i]).abs()).fold(0.0, f64::max);
    let scale = lambdas.iter().map(|v| v.abs()).fold(1.0, f64::max);
    if pairing_error > PAIRING_TOLERANCE * scale {
        return Err(Error::Numeric(format!("spectrum of iA is not ±paired (error {pairing_error:.3e})")));
    }
    let mut epsilons: Vec<f64> = (0..n / 2).map(|i| 0.5 * (lambdas[n - 1 - i] - lambdas[i])).collect();
    epsilons.sort_by(f64::total_cmp);
    let free = -0.5 * epsilons.iter().sum::<f64>();

    let parity_note = match a.required_pf_sign {
        None => ParityNote::Physical,
        Some(required) => {
            let (sign, _) = pfaffian_sign(&a.a);
            // A zero mode makes both parities degenerate.
            if sign == 0 || sign == required {
                ParityNote::Physical
            } else {
                ParityNote::Flipped
            }
        }
    };
    let ground_energy = match parity_note {
        ParityNote::Physical => free,
        ParityNote::Flipped => free + epsilons[0],
    };
    Ok(SectorSpectrum { epsilons, ground_energy, parity_note, pairing_error })
}

/// Singular values of the A→B coupling block, i.e. the `ε_m`, without
/// forming `iA`. Much cheaper than [`sector_spectrum`] on large lattices.
pub fn single_particle_energies(lattice: &HoneycombLattice, gauge: &GaugeConfig, params: &CouplingParams) -> Vec<f64> {
    let half = lattice.n_sites() / 2;
    let mut m = DMatrix::<f64>::zeros(half, half);
    for (i, bond) in lattice.bonds.iter().enumerate() {
        let (j, k) = bond.endpoints();
        m[(j / 2, k / 2)] += 2.0 * params.j(bond.link) * gauge.u(i) as f64;
    }
    let mut eps: Vec<f64> = m.singular_values().iter().copied().collect();
    eps.sort_by(f64::total_cmp);
    eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;

    #[test]
    fn single_z_dimer() {
        let lat = build_lattice(1, 1, Boundary::Open).unwrap();
        let a = majorana_matrix(&lat, &GaugeConfig::vortex_free(&lat), &CouplingParams::new(0.0, 0.0, 1.0));
        let s = sector_spectrum(&a).unwrap();
        assert_eq!(s.epsilons.len(), 1);
        assert!((s.epsilons[0] - 2.0).abs() < 1e-12);
        assert!((s.ground_energy + 1.0).abs() < 1e-12);
    }

    #[test]
    fn torus_matrix_entries() {
        let lat = build_lattice(2, 2, Boundary::Torus).unwrap();
        let a = majorana_matrix(&lat, &GaugeConfig::vortex_free(&lat), &CouplingParams::new(1.0, 1.0, 1.0));
        assert_eq!(a.nonzeros(), 24);
        assert!(a.matrix().iter().all(|&v| v == 0.0 || v.abs() == 2.0));
        assert!((a.matrix() + a.matrix().transpose()).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn decoupled_dimers() {
        let lat = build_lattice(3, 3, Boundary::Torus).unwrap();
        let a = majorana_matrix(&lat, &GaugeConfig::vortex_free(&lat), &CouplingParams::new(0.0, 0.0, 1.0));
        let s = sector_spectrum(&a).unwrap();
        assert!(s.epsilons.iter().all(|e| (e - 2.0).abs() < 1e-12));
    }

    #[test]
    fn pfaffian_of_small_matrices() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -3.0, 3.0, 0.0]);
        assert_eq!(pfaffian_sign(&a).0, -1);
        // Pf of the 4x4 case is a01 a23 − a02 a13 + a03 a12.
        let (a01, a02, a03, a12, a13, a23) = (1.0, 2.0, -0.5, 0.3, 4.0, -1.5);
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[0.0, a01, a02, a03, -a01, 0.0, a12, a13, -a02, -a12, 0.0, a23, -a03, -a13, -a23, 0.0],
        );
        let exact: f64 = a01 * a23 - a02 * a13 + a03 * a12;
        let (sign, log_abs) = pfaffian_sign(&m);
        assert_eq!(sign as f64, exact.signum());
        assert!((log_abs - exact.abs().ln()).abs() < 1e-12);
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[2, 0, 1]), 1);
    }

    #[test]
    fn svd_matches_hermitian_path() {
        let lat = build_lattice(3, 2, Boundary::Torus).unwrap();
        let g = GaugeConfig::vortex_free(&lat);
        let p = CouplingParams::new(0.7, -1.2, 0.4);
        let full = sector_spectrum(&majorana_matrix(&lat, &g, &p)).unwrap();
        let fast = single_particle_energies(&lat, &g, &p);
        for (a, b) in full.epsilons.iter().zip(&fast) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
