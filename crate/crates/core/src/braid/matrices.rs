//! Exchange matrices: the reference representation, the loop operator
//! projected onto a degenerate multiplet, and the statistics discriminator.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::Mul;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::braid::protocol::{wrap_phase, BraidReport};
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::state::{expectation_raw, StateVector, C64};

/// `R = (1/√2)[[1, −i], [−i, 1]] = exp(−iπσ^x/4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BraidMatrix {
    pub entries: [[C64; 2]; 2],
    /// `Some(n mod 8)` when the matrix is exactly `Rⁿ`.
    pub exponent: Option<u8>,
}

/// `(cos(nπ/4), sin(nπ/4))` without rounding the exact cases.
fn eighth_turn(n: u8) -> (f64, f64) {
    let r = FRAC_1_SQRT_2;
    match n % 8 {
        0 => (1.0, 0.0),
        1 => (r, r),
        2 => (0.0, 1.0),
        3 => (-r, r),
        4 => (-1.0, 0.0),
        5 => (-r, -r),
        6 => (0.0, -1.0),
        _ => (r, -r),
    }
}

/// `Rⁿ = cos(nπ/4) I − i sin(nπ/4) σ^x`; negative `n` are clockwise exchanges.
pub fn reference_braid_matrix(n: i64) -> BraidMatrix {
    let k = n.rem_euclid(8) as u8;
    let (c, s) = eighth_turn(k);
    let diag = C64::new(c, 0.0);
    let off = C64::new(0.0, -s);
    BraidMatrix { entries: [[diag, off], [off, diag]], exponent: Some(k) }
}

impl BraidMatrix {
    pub fn from_entries(entries: [[C64; 2]; 2]) -> Self {
        Self { entries, exponent: None }
    }

    pub fn identity() -> Self {
        reference_braid_matrix(0)
    }

    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self {
            entries: [[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]],
            exponent: self.exponent.map(|k| (8 - k) % 8),
        }
    }

    /// `‖M†M − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().numeric_mul(self);
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.entries[i][j] - target).norm());
            }
        }
        worst
    }

    fn numeric_mul(&self, o: &BraidMatrix) -> BraidMatrix {
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.entries[i][0] * o.entries[0][j] + self.entries[i][1] * o.entries[1][j];
            }
        }
        BraidMatrix::from_entries(out)
    }
}

impl Mul for BraidMatrix {
    type Output = BraidMatrix;

    /// Powers of `R` compose exactly through their exponents.
    fn mul(self, o: BraidMatrix) -> BraidMatrix {
        match (self.exponent, o.exponent) {
            (Some(a), Some(b)) => reference_braid_matrix(i64::from(a) + i64::from(b)),
            _ => self.numeric_mul(&o),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectedBraid {
    /// `M_ab = ⟨a|S|b⟩`, row-major.
    pub matrix: Vec<Vec<C64>>,
    /// `‖M†M − I‖_max`; small means the multiplet is closed under `S`.
    pub unitarity_defect: f64,
    /// Eigenvalues of `M` (ascending) when `S` is Hermitian.
    pub eigenvalues: Vec<f64>,
    /// `max |tr(M† V T V†)| / dim` over unitaries `V`, with
    /// `T = I ⊗ R²` for four states or `R²` for two, up to a global phase.
    pub reference_fidelity: Option<f64>,
    /// `⟨basis_0|S|basis_0⟩`.
    pub vacuum_expectation: C64,
    /// Largest off-diagonal magnitude over largest diagonal magnitude.
    pub off_diagonal_ratio: f64,
}

/// Restriction of a Pauli string to the span of an orthonormal basis.
pub fn projected_braid(basis: &[StateVector], loop_string: &PauliString) -> Result<ProjectedBraid> {
    let d = basis.len();
    if d == 0 {
        return Err(Error::Domain("empty basis".into()));
    }
    for (i, a) in basis.iter().enumerate() {
        if loop_string.max_site().is_some_and(|s| s >= a.n_qubits()) {
            return Err(Error::Register("loop string outside the register".into()));
        }
        for (j, b) in basis.iter().enumerate().take(i + 1) {
            let g = a.inner(b)?;
            let target = if i == j { 1.0 } else { 0.0 };
            if (g - target).norm() > 1e-8 {
                return Err(Error::Domain(format!("basis is not orthonormal: <{i}|{j}> = {g}")));
            }
        }
    }
    let images: Vec<StateVector> = basis.iter().map(|b| b.apply(loop_string)).collect::<Result<_>>()?;
    let m = DMatrix::from_fn(d, d, |a, b| basis[a].inner(&images[b]).expect("same register"));
    let defect = (m.adjoint() * &m - DMatrix::<C64>::identity(d, d)).iter().map(|v| v.norm()).fold(0.0, f64::max);

    let (eigenvalues, reference_fidelity) = if loop_string.is_hermitian() {
        let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        // R² = −iσ^x: up to the phase −i its eigenvalues are ±1.
        let target: Option<Vec<f64>> = match d {
            2 => Some(vec![-1.0, 1.0]),
            4 => Some(vec![-1.0, -1.0, 1.0, 1.0]),
            _ => None,
        };
        let fid = target.map(|t| best_alignment(&ev, &t) / d as f64);
        (ev, fid)
    } else {
        (Vec::new(), None)
    };
    let diag = (0..d).map(|i| m[(i, i)].norm()).fold(0.0, f64::max);
    let off = (0..d)
        .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].norm())
        .fold(0.0, f64::max);
    let vacuum_expectation = expectation_raw(loop_string, basis[0].amplitudes());
    Ok(ProjectedBraid {
        matrix: (0..d).map(|i| (0..d).map(|j| m[(i, j)]).collect()).collect(),
        unitarity_defect: defect,
        eigenvalues,
        reference_fidelity,
        vacuum_expectation,
        off_diagonal_ratio: if diag > 0.0 { off / diag } else { f64::INFINITY },
    })
}

/// `max_π |Σ_i a_i t_π(i)|` over permutations; for Hermitian matrices this
/// is the best `|tr(A V T V†)|` over unitaries `V`.
fn best_alignment(a: &[f64], t: &[f64]) -> f64 {
    let mut idx: Vec<usize> = (0..t.len()).collect();
    let mut best: f64 = 0.0;
    permute(&mut idx, 0, &mut |perm| {
        let s: f64 = a.iter().zip(perm).map(|(x, &j)| x * t[j]).sum();
        best = best.max(s.abs());
    });
    best
}

fn permute(idx: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == idx.len() {
        f(idx);
        return;
    }
    for i in k..idx.len() {
        idx.swap(k, i);
        permute(idx, k + 1, f);
        idx.swap(k, i);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistics {
    NonAbelianConsistent,
    AbelianConsistent,
    TrivialConsistent,
}

impl std::fmt::Display for Statistics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Statistics::NonAbelianConsistent => "non-abelian-consistent",
            Statistics::AbelianConsistent => "abelian-consistent",
            Statistics::TrivialConsistent => "trivial-consistent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminatorOptions {
    /// Phase tolerance in radians.
    pub phase_tolerance: f64,
    /// Reports with coherence below this are unusable.
    pub min_coherence: f64,
}

impl Default for DiscriminatorOptions {
    fn default() -> Self {
        Self { phase_tolerance: 0.2, min_coherence: 0.05 }
    }
}

fn near(phase: f64, target: f64, tol: f64) -> bool {
    wrap_phase(phase - target).abs() <= tol
}

/// Classifies the phases after one and two loops:
/// `±π/2` after one loop is non-Abelian, `(π, 0)` Abelian, `(0, 0)` trivial.
pub fn statistics_discriminator(reports: &[BraidReport], opts: &DiscriminatorOptions) -> Result<Statistics> {
    let find = |n: usize| {
        reports
            .iter()
            .find(|r| r.loops == n)
            .ok_or_else(|| Error::Inconclusive(format!("no report with {n} loop(s)")))
    };
    let (one, two) = (find(1)?, find(2)?);
    for r in [one, two] {
        if r.coherence < opts.min_coherence {
            return Err(Error::Inconclusive(format!(
                "coherence {:.3e} after {} loop(s) is below {}",
                r.coherence, r.loops, opts.min_coherence
            )));
        }
    }
    let tol = opts.phase_tolerance;
    if near(one.phase, PI / 2.0, tol) || near(one.phase, -PI / 2.0, tol) {
        Ok(Statistics::NonAbelianConsistent)
    } else if near(one.phase, PI, tol) && near(two.phase, 0.0, tol) {
        Ok(Statistics::AbelianConsistent)
    } else if near(one.phase, 0.0, tol) && near(two.phase, 0.0, tol) {
        Ok(Statistics::TrivialConsistent)
    } else {
        Err(Error::Inconclusive(format!(
            "phases ({:.4}, {:.4}) match no statistics class",
            one.phase, two.phase
        )))
    }
}
