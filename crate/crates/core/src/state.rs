//! Dense state vectors over the spin register plus an optional ancilla.
//!
//! Qubit `j` of the register is bit `j` of the basis index (site `j` of the
//! lattice). The ancilla, when present, is the highest-order bit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

pub type C64 = Complex64;

/// Normalization tolerance enforced on construction.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_spins: usize,
    n_ancilla: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Computational basis state `|index⟩` on `n_spins` spins.
    pub fn basis(n_spins: usize, index: usize) -> Result<Self> {
        let dim = register_dim(n_spins, 0)?;
        if index >= dim {
            return Err(Error::Register(format!("basis index {index} outside dimension {dim}")));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { n_spins, n_ancilla: 0, amplitudes })
    }

    /// Wraps amplitudes after normalizing them. Zero vectors are rejected.
    pub fn from_amplitudes(n_spins: usize, n_ancilla: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let dim = register_dim(n_spins, n_ancilla)?;
        if amplitudes.len() != dim {
            return Err(Error::Register(format!(
                "expected {dim} amplitudes for {n_spins} spins + {n_ancilla} ancilla, got {}",
                amplitudes.len()
            )));
        }
        let norm = norm(&amplitudes);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Numeric("cannot normalize a zero or non-finite vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n_spins, n_ancilla, amplitudes })
    }

    /// Haar-like random state from a seeded Gaussian draw.
    pub fn random(n_spins: usize, seed: u64) -> Result<Self> {
        let dim = register_dim(n_spins, 0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amplitudes = (0..dim)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        Self::from_amplitudes(n_spins, 0, amplitudes)
    }

    /// Equal superposition of all spin basis states.
    pub fn uniform(n_spins: usize) -> Result<Self> {
        let dim = register_dim(n_spins, 0)?;
        Self::from_amplitudes(n_spins, 0, vec![C64::new(1.0, 0.0); dim])
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn n_qubits(&self) -> usize {
        self.n_spins + self.n_ancilla
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() || self.n_ancilla != other.n_ancilla {
            return Err(Error::Register("inner product of mismatched registers".into()));
        }
        Ok(dot(&self.amplitudes, &other.amplitudes))
    }

    fn check_support(&self, p: &PauliString) -> Result<()> {
        match p.max_site() {
            Some(s) if s >= self.n_qubits() => Err(Error::Register(format!(
                "site {s} outside register of {} qubits",
                self.n_qubits()
            ))),
            _ => Ok(()),
        }
    }

    /// `P|ψ⟩` as a new vector.
    pub fn apply(&self, p: &PauliString) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_in_place(p)?;
        Ok(out)
    }

    /// In-place `P|ψ⟩` by amplitude permutation and sign masks.
    pub fn apply_in_place(&mut self, p: &PauliString) -> Result<()> {
        self.check_support(p)?;
        apply_pauli_raw(p, &mut self.amplitudes);
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, p: &PauliString) -> Result<C64> {
        self.check_support(p)?;
        Ok(expectation_raw(p, &self.amplitudes))
    }

    /// Adds an ancilla in `|+⟩` as the highest-order qubit.
    pub(crate) fn with_ancilla_plus(&self) -> Result<StateVector> {
        if self.n_ancilla != 0 {
            return Err(Error::Protocol("ancilla already attached".into()));
        }
        register_dim(self.n_spins, 1)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let half: Vec<C64> = self.amplitudes.iter().map(|a| a * s).collect();
        let mut amplitudes = half.clone();
        amplitudes.extend(half);
        Ok(StateVector { n_spins: self.n_spins, n_ancilla: 1, amplitudes })
    }

    /// Splits an ancilla-bearing state into its `|0⟩_a` and `|1⟩_a` branch amplitudes.
    pub fn branches(&self) -> Result<(&[C64], &[C64])> {
        if self.n_ancilla != 1 {
            return Err(Error::Protocol("state has no ancilla".into()));
        }
        Ok(self.amplitudes.split_at(self.amplitudes.len() / 2))
    }

    pub(crate) fn branches_mut(&mut self) -> Result<(&mut [C64], &mut [C64])> {
        if self.n_ancilla != 1 {
            return Err(Error::Protocol("state has no ancilla".into()));
        }
        let half = self.amplitudes.len() / 2;
        Ok(self.amplitudes.split_at_mut(half))
    }
}

/// Ancilla-free product `P x` accumulated into `y` scaled by `coeff`.
pub(crate) fn accumulate_pauli(p: &PauliString, coeff: f64, x: &[C64], y: &mut [C64]) {
    let (xm, zm, factor) = p.action();
    let f = factor * coeff;
    for (b, &a) in x.iter().enumerate() {
        y[b ^ xm] += signed(f, b & zm) * a;
    }
}

/// In-place Pauli action on a raw amplitude slice (no register check).
pub(crate) fn apply_pauli_raw(p: &PauliString, amps: &mut [C64]) {
    let (x, z, factor) = p.action();
    if x == 0 {
        for (b, a) in amps.iter_mut().enumerate() {
            *a *= signed(factor, b & z);
        }
        return;
    }
    let top = 1usize << (usize::BITS - 1 - x.leading_zeros());
    for b in 0..amps.len() {
        if b & top != 0 {
            continue;
        }
        let c = b ^ x;
        let ab = amps[b];
        let ac = amps[c];
        amps[c] = signed(factor, b & z) * ab;
        amps[b] = signed(factor, c & z) * ac;
    }
}

pub(crate) fn expectation_raw(p: &PauliString, amps: &[C64]) -> C64 {
    let (xm, zm, factor) = p.action();
    let mut acc = C64::new(0.0, 0.0);
    for (b, &a) in amps.iter().enumerate() {
        acc += amps[b ^ xm].conj() * signed(factor, b & zm) * a;
    }
    acc
}

#[inline]
fn signed(f: C64, bits: usize) -> C64 {
    if bits.count_ones() % 2 == 1 {
        -f
    } else {
        f
    }
}

fn register_dim(n_spins: usize, n_ancilla: usize) -> Result<usize> {
    let n = n_spins + n_ancilla;
    if n > 30 {
        return Err(Error::Register(format!("{n} qubits is too many for a dense state vector")));
    }
    Ok(1usize << n)
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
