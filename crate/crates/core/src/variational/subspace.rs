use nalgebra::DMatrix;
use num_complex::Complex;
use serde::Serialize;

use super::ansatz::AnsatzProgram;
use super::solver::VariationalResult;
use crate::error::{domain, Result};
use crate::pauli::PauliSum;
use crate::sim::{inner_product, CompiledObservable, StateVector};

/// Overlap eigenvalues below this are treated as linear dependence.
const OVERLAP_CUTOFF: f64 = 1e-10;

/// Rayleigh-Ritz values on the span of the variational states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubspaceRefinement {
    /// Ascending; each is an upper bound on the exact level of the same index.
    pub energies: Vec<f64>,
    /// Rank of the overlap matrix.
    pub rank: usize,
}

/// Diagonalizes `H` in the span of the prepared level states, which
/// recovers hybridized levels when the optimizer settles on a
/// near-degenerate pair of unmixed states.
pub fn subspace_refine(h: &PauliSum<f64>, ansatz: &AnsatzProgram, result: &VariationalResult) -> Result<SubspaceRefinement> {
    if result.levels.is_empty() {
        return domain("no variational levels to refine");
    }
    let obs = CompiledObservable::new(h)?;
    let states: Vec<StateVector<f64>> =
        result.levels.iter().map(|l| ansatz.prepare(&l.parameters)).collect::<Result<_>>()?;
    let n = states.len();
    let mut h_states = Vec::with_capacity(n);
    for s in &states {
        let mut out = vec![Complex::new(0.0, 0.0); s.dim()];
        obs.apply(s.amplitudes(), &mut out);
        h_states.push(out);
    }
    let mut hm = DMatrix::<Complex<f64>>::zeros(n, n);
    let mut sm = DMatrix::<Complex<f64>>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            sm[(i, j)] = inner_product(&states[i], &states[j])?;
            hm[(i, j)] = states[i].amplitudes().iter().zip(&h_states[j]).map(|(a, b)| a.conj() * b).sum();
        }
    }
    let hm = (&hm + hm.adjoint()) * Complex::new(0.5, 0.0);
    let sm = (&sm + sm.adjoint()) * Complex::new(0.5, 0.0);
    let eig = sm.symmetric_eigen();
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > OVERLAP_CUTOFF).collect();
    let x = DMatrix::from_fn(n, keep.len(), |r, c| {
        let k = keep[c];
        eig.eigenvectors[(r, k)] / eig.eigenvalues[k].sqrt()
    });
    let reduced = x.adjoint() * hm * &x;
    let mut energies: Vec<f64> = reduced.symmetric_eigen().eigenvalues.iter().copied().collect();
    energies.sort_by(f64::total_cmp);
    Ok(SubspaceRefinement { energies, rank: keep.len() })
}
