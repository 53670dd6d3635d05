//! Symmetry-adapted bases for joint eigenspaces of commuting Pauli strings.
//!
//! Given commuting Hermitian generators `g_i` with eigenvalues `λ_i`, the
//! signed elements `λ_i g_i` generate an abelian group `G` that acts on basis
//! states as signed bit flips. Its flip masks span a subspace `V`; in reduced
//! echelon form every orbit `b ⊕ V` has a unique representative with zeros on
//! the pivot bits. The diagonal subgroup `K` (flip mask zero) decides which
//! representatives survive. Each surviving `r` labels the normalized state
//! `√(|G|/|K|) P|r⟩`, `P = |G|⁻¹ Σ_g g`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::spin_ed::eigen::LinearOperator;
use crate::spin_ed::hamiltonian::SparseOperator;
use crate::state::C64;

/// `i^k X^x Z^z`: acts as `|b⟩ ↦ i^k (−1)^{|b∧z|} |b⊕x⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct MaskPauli {
    x: usize,
    z: usize,
    k: u8,
}

impl MaskPauli {
    const IDENTITY: MaskPauli = MaskPauli { x: 0, z: 0, k: 0 };

    fn from_string(p: &PauliString) -> Self {
        let (x, z, factor) = p.action();
        let k = if factor.re > 0.5 {
            0
        } else if factor.im > 0.5 {
            1
        } else if factor.re < -0.5 {
            2
        } else {
            3
        };
        MaskPauli { x, z, k }
    }

    fn mul(self, o: MaskPauli) -> MaskPauli {
        let swap = 2 * ((self.z & o.x).count_ones() % 2) as u8;
        MaskPauli { x: self.x ^ o.x, z: self.z ^ o.z, k: (self.k + o.k + swap) % 4 }
    }

    fn negate(self) -> MaskPauli {
        MaskPauli { k: (self.k + 2) % 4, ..self }
    }

    fn act(self, b: usize) -> (usize, u8) {
        let k = (self.k + 2 * ((b & self.z).count_ones() % 2) as u8) % 4;
        (b ^ self.x, k)
    }
}

fn unit(k: u8) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

#[derive(Debug, Clone)]
pub struct SectorBasis {
    n_qubits: usize,
    /// `(pivot bit, group element)` in reduced echelon form.
    pivots: Vec<(usize, MaskPauli)>,
    pivot_mask: usize,
    reps: Vec<usize>,
    index: HashMap<usize, usize>,
}

impl SectorBasis {
    /// Basis of `{ψ : g_i ψ = λ_i ψ}`. Fails with `Constraint` if the
    /// eigenvalues are inconsistent, which leaves the space empty.
    pub fn new(n_qubits: usize, generators: &[(PauliString, i8)]) -> Result<Self> {
        for (i, (a, _)) in generators.iter().enumerate() {
            if !a.is_hermitian() {
                return Err(Error::Domain(format!("generator {a} is not Hermitian")));
            }
            if a.max_site().is_some_and(|s| s >= n_qubits) {
                return Err(Error::Register(format!("generator {a} outside {n_qubits} qubits")));
            }
            for (b, _) in &generators[..i] {
                if !a.commutes(b) {
                    return Err(Error::Domain(format!("generators {a} and {b} do not commute")));
                }
            }
        }
        let mut pivots: Vec<(usize, MaskPauli)> = Vec::new();
        let mut diagonal: Vec<MaskPauli> = Vec::new();
        for (g, lambda) in generators {
            let mut m = MaskPauli::from_string(g);
            if *lambda < 0 {
                m = m.negate();
            }
            for &(bit, p) in &pivots {
                if m.x >> bit & 1 == 1 {
                    m = m.mul(p);
                }
            }
            if m.x == 0 {
                if m.z == 0 {
                    if m.k != 0 {
                        return Err(Error::Constraint(
                            "the requested eigenvalues contradict a product identity among the generators".into(),
                        ));
                    }
                    continue;
                }
                diagonal.push(m);
                continue;
            }
            let bit = usize::BITS as usize - 1 - m.x.leading_zeros() as usize;
            for entry in pivots.iter_mut() {
                if entry.1.x >> bit & 1 == 1 {
                    entry.1 = entry.1.mul(m);
                }
            }
            pivots.push((bit, m));
        }
        let pivot_mask = pivots.iter().fold(0, |acc, &(bit, _)| acc | 1 << bit);
        let reps: Vec<usize> = (0..1usize << n_qubits)
            .filter(|&b| b & pivot_mask == 0)
            .filter(|&b| diagonal.iter().all(|d| d.act(b).1 == 0))
            .collect();
        if reps.is_empty() {
            return Err(Error::Constraint("the requested joint eigenspace is empty".into()));
        }
        let index = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        Ok(Self { n_qubits, pivots, pivot_mask, reps, index })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Orbit representative of `b` and a group element `h` with `h|r⟩ ∝ |b⟩`.
    fn reduce(&self, mut b: usize) -> (usize, MaskPauli) {
        let mut h = MaskPauli::IDENTITY;
        if b & self.pivot_mask == 0 {
            return (b, h);
        }
        for &(bit, p) in &self.pivots {
            if b >> bit & 1 == 1 {
                b ^= p.x;
                h = h.mul(p);
            }
        }
        (b, h)
    }

    /// Restriction of `h` to the sector. `h` must commute with every generator.
    pub fn restrict(&self, h: &SparseOperator) -> Result<ReducedOperator> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::Register("operator and sector registers differ".into()));
        }
        let terms: Vec<(f64, MaskPauli)> = h.terms().iter().map(|(c, p)| (*c, MaskPauli::from_string(p))).collect();
        let mut columns = Vec::with_capacity(self.reps.len());
        for &r in &self.reps {
            let mut col: Vec<(usize, C64)> = Vec::new();
            for &(c, t) in &terms {
                let (b, k1) = t.act(r);
                let (rp, hp) = self.reduce(b);
                let Some(&row) = self.index.get(&rp) else {
                    return Err(Error::UnsupportedSector("operator leaves the sector".into()));
                };
                let (_, k2) = hp.act(rp);
                let val = unit(k1) * unit(k2).conj() * c;
                match col.iter_mut().find(|(i, _)| *i == row) {
                    Some(entry) => entry.1 += val,
                    None => col.push((row, val)),
                }
            }
            col.retain(|(_, v)| v.norm() > 0.0);
            columns.push(col);
        }
        Ok(ReducedOperator { dim: self.reps.len(), columns, scale: h.scale().max(f64::MIN_POSITIVE) })
    }

    /// Full-register amplitudes of the sector vector with coordinates `v`.
    pub fn lift(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::Register(format!("expected {} sector coordinates", self.dim())));
        }
        let weight = (0.5f64).powf(self.pivots.len() as f64 / 2.0);
        let mut out = vec![C64::new(0.0, 0.0); 1usize << self.n_qubits];
        for (b, amp) in out.iter_mut().enumerate() {
            let (r, h) = self.reduce(b);
            if let Some(&i) = self.index.get(&r) {
                let (_, k) = h.act(r);
                *amp = v[i] * unit(k) * weight;
            }
        }
        Ok(out)
    }
}

/// Sparse column-stored restriction produced by [`SectorBasis::restrict`].
#[derive(Debug, Clone)]
pub struct ReducedOperator {
    dim: usize,
    columns: Vec<Vec<(usize, C64)>>,
    scale: f64,
}

impl LinearOperator for ReducedOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (col, &xc) in self.columns.iter().zip(x) {
            for &(row, val) in col {
                y[row] += val * xc;
            }
        }
    }

    fn scale(&self) -> f64 {
        self.scale
    }
}
