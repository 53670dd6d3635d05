//! Low-lying eigenpairs of Hermitian operators.
//!
//! Small registers go through a dense Hermitian eigensolver. Larger ones use a
//! block Krylov method with explicit Rayleigh–Ritz, full reorthogonalization and
//! thick restart: the basis is grown by the residuals of the lowest Ritz pairs
//! (a block Lanczos step), and when it fills up it is compressed onto the
//! lowest Ritz vectors. Block starts resolve exact degeneracies up to the block
//! size, which a single-vector Lanczos run cannot.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin_ed::hamiltonian::SparseOperator;
use crate::state::{dot, norm, StateVector, C64};

pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y = A x`; `y` is overwritten.
    fn apply(&self, x: &[C64], y: &mut [C64]);

    /// Upper bound on `‖A‖`, used to scale tolerances.
    fn scale(&self) -> f64;
}

impl LinearOperator for SparseOperator {
    fn dim(&self) -> usize {
        SparseOperator::dim(self)
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        SparseOperator::apply(self, x, y)
    }

    fn scale(&self) -> f64 {
        SparseOperator::scale(self).max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMethod {
    Dense,
    Krylov,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Relative residual target: `‖Hv − λv‖ ≤ tol · scale(H)`.
    pub tol: f64,
    pub seed: u64,
    /// Operators up to this dimension are diagonalized densely.
    pub dense_max_dim: usize,
    /// Cap on matrix-vector products before giving up.
    pub max_matvecs: usize,
    /// Krylov basis size before a thick restart.
    pub max_basis: usize,
    /// Force a method regardless of size.
    pub method: Option<SolverMethod>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            seed: 0x5eed,
            dense_max_dim: 256,
            max_matvecs: 20_000,
            max_basis: 48,
            method: None,
        }
    }
}

/// Eigenpairs as plain amplitude vectors, for operators that are not
/// defined on a qubit register.
#[derive(Debug, Clone)]
pub struct RawEigen {
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
    pub residuals: Vec<f64>,
    pub method: SolverMethod,
    pub matvecs: usize,
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<StateVector>,
    /// `‖Hv − λv‖` recomputed for every returned pair.
    pub residuals: Vec<f64>,
    pub method: SolverMethod,
    pub matvecs: usize,
}

/// Lowest `k` eigenpairs of `h` with the default options and residual target `tol`.
pub fn ground_states(h: &SparseOperator, k: usize, tol: f64) -> Result<EigenResult> {
    let opts = EigenOptions { tol, ..EigenOptions::default() };
    lowest_eigenpairs(h, k, &opts, None)
}

/// Projector applied in place to keep iterates inside an invariant subspace.
pub type Projector<'a> = &'a dyn Fn(&mut [C64]);

/// Lowest `k` eigenpairs of a Pauli-sum operator, optionally restricted to
/// the range of a projector that commutes with it.
pub fn lowest_eigenpairs(
    h: &SparseOperator,
    k: usize,
    opts: &EigenOptions,
    projector: Option<Projector<'_>>,
) -> Result<EigenResult> {
    let raw = solve(h, k, opts, projector)?;
    let eigenvectors = raw
        .vectors
        .into_iter()
        .map(|v| StateVector::from_amplitudes(h.n_qubits(), 0, v))
        .collect::<Result<_>>()?;
    Ok(EigenResult {
        eigenvalues: raw.eigenvalues,
        eigenvectors,
        residuals: raw.residuals,
        method: raw.method,
        matvecs: raw.matvecs,
    })
}

/// Lowest `k` eigenpairs of any Hermitian operator.
pub fn solve(
    op: &dyn LinearOperator,
    k: usize,
    opts: &EigenOptions,
    projector: Option<Projector<'_>>,
) -> Result<RawEigen> {
    let dim = op.dim();
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if k > dim {
        return Err(Error::Domain(format!("k = {k} exceeds dimension {dim}")));
    }
    let method = opts.method.unwrap_or(if dim <= opts.dense_max_dim {
        SolverMethod::Dense
    } else {
        SolverMethod::Krylov
    });
    match method {
        SolverMethod::Dense => dense(op, k, projector),
        SolverMethod::Krylov => krylov(op, k, opts, projector),
    }
}

fn dense(op: &dyn LinearOperator, k: usize, projector: Option<Projector<'_>>) -> Result<RawEigen> {
    let dim = op.dim();
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    let mut e = vec![C64::new(0.0, 0.0); dim];
    let mut col = vec![C64::new(0.0, 0.0); dim];
    for j in 0..dim {
        e.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        e[j] = C64::new(1.0, 0.0);
        op.apply(&e, &mut col);
        m.column_mut(j).iter_mut().zip(&col).for_each(|(dst, src)| *dst = *src);
    }
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut pairs = Vec::with_capacity(k);
    if let Some(project) = projector {
        // Rotate each degenerate multiplet so its overlap with the subspace is
        // concentrated, then keep vectors that live inside it.
        let mut start = 0;
        while start < dim && pairs.len() < k {
            let mut end = start + 1;
            let scale = eig.eigenvalues[order[start]].abs().max(1.0);
            while end < dim
                && (eig.eigenvalues[order[end]] - eig.eigenvalues[order[start]]).abs() < 1e-9 * scale
            {
                end += 1;
            }
            // Eigenvectors are unit norm, so a tiny projected norm means the
            // vector lies outside the subspace up to rounding.
            let mut block: Vec<Vec<C64>> = (start..end)
                .map(|i| {
                    let mut v: Vec<C64> = eig.eigenvectors.column(order[i]).iter().copied().collect();
                    project(&mut v);
                    v
                })
                .filter(|v| norm(v) > 1e-6)
                .collect();
            let kept = orthonormalize_in_place(&mut block, &[], 1e-6);
            for v in kept {
                if pairs.len() < k {
                    pairs.push((eig.eigenvalues[order[start]], v));
                }
            }
            start = end;
        }
    } else {
        for &i in order.iter().take(k) {
            pairs.push((eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()));
        }
    }
    if pairs.len() < k {
        return Err(Error::Domain(format!(
            "subspace holds only {} states, {k} requested",
            pairs.len()
        )));
    }
    finish(op, pairs, SolverMethod::Dense, dim)
}

fn krylov(
    op: &dyn LinearOperator,
    k: usize,
    opts: &EigenOptions,
    projector: Option<Projector<'_>>,
) -> Result<RawEigen> {
    let dim = op.dim();
    let block = (k + 2).min(dim);
    let max_basis = opts.max_basis.max(3 * block).min(dim);
    let target = opts.tol * op.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let zero = C64::new(0.0, 0.0);

    let project = |v: &mut [C64]| {
        if let Some(p) = projector {
            p(v)
        }
    };

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(max_basis);
    let mut images: Vec<Vec<C64>> = Vec::with_capacity(max_basis);
    let mut matvecs = 0usize;

    let mut fresh: Vec<Vec<C64>> = Vec::new();
    for _ in 0..block {
        let mut v = random_vector(&mut rng, dim);
        project(&mut v);
        fresh.push(v);
    }
    let mut pending = orthonormalize_in_place(&mut fresh, &basis, 1e-8);
    if pending.is_empty() {
        return Err(Error::Constraint("projected start block is empty".into()));
    }
    // Rayleigh quotient matrix, grown as the basis grows.
    let mut t: Vec<Vec<C64>> = Vec::new();
    let mut last_residuals;
    let mut exhausted = false;

    loop {
        for v in pending.drain(..) {
            let mut w = vec![zero; dim];
            op.apply(&v, &mut w);
            matvecs += 1;
            basis.push(v);
            images.push(w);
            let n = basis.len();
            for row in t.iter_mut() {
                row.push(zero);
            }
            t.push(vec![zero; n]);
            for i in 0..n {
                let val = dot(&basis[i], &images[n - 1]);
                t[i][n - 1] = val;
                t[n - 1][i] = val.conj();
            }
        }

        let n = basis.len();
        let tm = DMatrix::from_fn(n, n, |i, j| (t[i][j] + t[j][i].conj()) * 0.5);
        let eig = tm.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let n_ritz = block.min(n);
        let ritz: Vec<(f64, Vec<C64>)> = order
            .iter()
            .take(n_ritz)
            .map(|&i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
            .collect();

        let mut residual_vecs = Vec::with_capacity(n_ritz);
        let mut residual_norms = Vec::with_capacity(n_ritz);
        for (theta, y) in &ritz {
            let mut r = combine(&images, y, dim);
            let u = combine(&basis, y, dim);
            r.iter_mut().zip(&u).for_each(|(ri, ui)| *ri -= ui * *theta);
            residual_norms.push(norm(&r));
            residual_vecs.push(r);
        }
        last_residuals = residual_norms.clone();

        let converged = n >= k && residual_norms.iter().take(k).all(|&r| r <= target);
        if exhausted && n < k {
            return Err(Error::Domain(format!("subspace holds only {n} states, {k} requested")));
        }
        if converged || exhausted || n == dim {
            let pairs = ritz
                .into_iter()
                .take(k)
                .map(|(theta, y)| (theta, combine(&basis, &y, dim)))
                .collect();
            return finish(op, pairs, SolverMethod::Krylov, matvecs);
        }
        if matvecs >= opts.max_matvecs {
            let max_residual = last_residuals.iter().take(k).cloned().fold(0.0, f64::max);
            return Err(Error::Convergence {
                iterations: matvecs,
                max_residual,
                residuals: last_residuals,
            });
        }

        let mut candidates: Vec<Vec<C64>> = residual_vecs
            .into_iter()
            .zip(&residual_norms)
            .filter(|(_, &r)| r > target * 1e-3)
            .map(|(mut r, _)| {
                project(&mut r);
                r
            })
            .collect();

        if n + candidates.len() > max_basis {
            let keep = (max_basis / 3).max(block + k).min(n);
            let ys: Vec<Vec<C64>> = order
                .iter()
                .take(keep)
                .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
                .collect();
            let thetas: Vec<f64> = order.iter().take(keep).map(|&i| eig.eigenvalues[i]).collect();
            basis = ys.iter().map(|y| combine(&basis, y, dim)).collect();
            images = ys.iter().map(|y| combine(&images, y, dim)).collect();
            t = (0..keep)
                .map(|i| (0..keep).map(|j| if i == j { C64::new(thetas[i], 0.0) } else { zero }).collect())
                .collect();
        }

        pending = orthonormalize_in_place(&mut candidates, &basis, 1e-10);
        if pending.is_empty() {
            let mut v = random_vector(&mut rng, dim);
            project(&mut v);
            pending = orthonormalize_in_place(&mut vec![v], &basis, 1e-10);
            if pending.is_empty() {
                // The projected space is exhausted, so the Ritz pairs are exact.
                exhausted = true;
            }
        }
    }
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    (0..dim).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect()
}

fn combine(vectors: &[Vec<C64>], coeffs: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for (v, &c) in vectors.iter().zip(coeffs) {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        out.iter_mut().zip(v).for_each(|(o, x)| *o += x * c);
    }
    out
}

/// Gram–Schmidt (two passes) of `candidates` against `against` and each other.
/// Returns the surviving normalized vectors; those whose norm falls below
/// `rel_cutoff` of their original norm are dropped as dependent.
fn orthonormalize_in_place(candidates: &mut Vec<Vec<C64>>, against: &[Vec<C64>], rel_cutoff: f64) -> Vec<Vec<C64>> {
    let mut accepted: Vec<Vec<C64>> = Vec::new();
    for mut v in candidates.drain(..) {
        let original = norm(&v);
        if original == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in against.iter().chain(accepted.iter()) {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= b * c);
            }
        }
        let nrm = norm(&v);
        if nrm > rel_cutoff * original {
            v.iter_mut().for_each(|a| *a /= nrm);
            accepted.push(v);
        }
    }
    accepted
}

fn finish(
    op: &dyn LinearOperator,
    pairs: Vec<(f64, Vec<C64>)>,
    method: SolverMethod,
    matvecs: usize,
) -> Result<RawEigen> {
    let dim = op.dim();
    let mut eigenvalues = Vec::with_capacity(pairs.len());
    let mut vectors = Vec::with_capacity(pairs.len());
    let mut residuals = Vec::with_capacity(pairs.len());
    let mut hv = vec![C64::new(0.0, 0.0); dim];
    for (lambda, mut v) in pairs {
        let nrm = norm(&v);
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(Error::Numeric("eigensolver produced a degenerate vector".into()));
        }
        v.iter_mut().for_each(|a| *a /= nrm);
        op.apply(&v, &mut hv);
        let r = hv.iter().zip(&v).map(|(a, b)| (a - b * lambda).norm_sqr()).sum::<f64>().sqrt();
        eigenvalues.push(lambda);
        vectors.push(v);
        residuals.push(r);
    }
    Ok(RawEigen { eigenvalues, vectors, residuals, method, matvecs })
}

/// Groups ascending eigenvalues into multiplets: neighbours closer than
/// `rel_tol · max(1, |λ|)` share a multiplet. Returns `(mean, multiplicity, spread)`.
pub fn multiplets(eigenvalues: &[f64], rel_tol: f64) -> Vec<(f64, usize, f64)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        let split = i == eigenvalues.len()
            || (eigenvalues[i] - eigenvalues[i - 1]).abs() > rel_tol * eigenvalues[i - 1].abs().max(1.0);
        if split {
            let group = &eigenvalues[start..i];
            let mean = group.iter().sum::<f64>() / group.len() as f64;
            out.push((mean, group.len(), group[group.len() - 1] - group[0]));
            start = i;
        }
    }
    out
}
