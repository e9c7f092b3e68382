use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::sim::{check_orthonormal, haar_coefficients, inner_product, RandomSeed, StateVector};

/// Mean and spread of a sampled quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub mean: f64,
    /// Sample standard deviation (0 for a single sample).
    pub std: f64,
    pub samples: usize,
}

impl SampleStats {
    pub fn from_values(v: &[f64]) -> Result<Self> {
        if v.is_empty() {
            return domain("at least one sample required");
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std = if v.len() > 1 { (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
        Ok(Self { mean, std, samples: v.len() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub mean: f64,
    pub std: f64,
    pub samples: usize,
    pub seed: RandomSeed,
}

impl FidelityReport {
    fn new(stats: SampleStats, seed: RandomSeed) -> Self {
        Self { mean: stats.mean, std: stats.std, samples: stats.samples, seed }
    }
}

fn check_ideal(ideal: &DMatrix<Complex<f64>>, n: usize) -> Result<()> {
    if ideal.nrows() != n || ideal.ncols() != n {
        return domain(format!("ideal gate is {}x{}, subspace has dimension {n}", ideal.nrows(), ideal.ncols()));
    }
    let dev = (ideal.adjoint() * ideal - DMatrix::identity(n, n)).norm();
    if dev > 1e-10 {
        return domain(format!("ideal gate is not unitary (deviation {dev:e})"));
    }
    Ok(())
}

fn combine(basis: &[StateVector<f64>], c: &[Complex<f64>]) -> Result<StateVector<f64>> {
    let mut amps = vec![Complex::new(0.0, 0.0); basis[0].dim()];
    for (cj, v) in c.iter().zip(basis) {
        for (a, b) in amps.iter_mut().zip(v.amplitudes()) {
            *a += cj * b;
        }
    }
    StateVector::from_amplitudes(amps)
}

/// Haar-averaged `|⟨U_des ψ|E(ψ)⟩|²` over the span of `basis`, applying the
/// channel to every sample. Sample `i` draws from `seed.derive(i)`.
pub fn average_gate_fidelity<F>(
    channel: F,
    ideal: &DMatrix<Complex<f64>>,
    basis: &[StateVector<f64>],
    samples: usize,
    seed: RandomSeed,
) -> Result<FidelityReport>
where
    F: Fn(&StateVector<f64>) -> Result<StateVector<f64>> + Sync,
{
    if samples == 0 {
        return domain("at least one sample required");
    }
    if basis.is_empty() {
        return domain("subspace basis is empty");
    }
    check_orthonormal(basis)?;
    check_ideal(ideal, basis.len())?;
    let vals: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let c = haar_coefficients(basis.len(), seed.derive(i as u64));
            let psi = combine(basis, &c)?;
            let target_c: Vec<Complex<f64>> = (ideal * nalgebra::DVector::from_vec(c)).iter().copied().collect();
            let target = combine(basis, &target_c)?;
            let out = channel(&psi)?;
            Ok(inner_product(&target, &out)?.norm_sqr())
        })
        .collect::<Result<_>>()?;
    Ok(FidelityReport::new(SampleStats::from_values(&vals)?, seed))
}

/// `G[i][j] = ⟨a_i|b_j⟩`.
pub fn gram_matrix(a: &[StateVector<f64>], b: &[StateVector<f64>]) -> Result<DMatrix<Complex<f64>>> {
    let mut g = DMatrix::zeros(a.len(), b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            g[(i, j)] = inner_product(x, y)?;
        }
    }
    Ok(g)
}

/// Statistics of `|c† G c|²` over Haar coefficient vectors `c`. For linear
/// maps `A`, `B` with `G = ⟨A e_i|B e_j⟩` this is `|⟨Aψ|Bψ⟩|²` for
/// `ψ = Σ c_j e_j`, so whole channels are sampled at subspace cost.
pub fn haar_overlap_samples(gram: &DMatrix<Complex<f64>>, samples: usize, seed: RandomSeed) -> Result<Vec<f64>> {
    if samples == 0 {
        return domain("at least one sample required");
    }
    let n = gram.nrows();
    if gram.ncols() != n {
        return domain("overlap matrix must be square");
    }
    Ok((0..samples)
        .into_par_iter()
        .map(|i| {
            let c = nalgebra::DVector::from_vec(haar_coefficients(n, seed.derive(i as u64)));
            (c.adjoint() * gram * &c)[(0, 0)].norm_sqr()
        })
        .collect())
}

/// Average fidelity of a linear channel known through its action on the
/// subspace basis: `outputs[j] = E(basis[j])`.
pub fn subspace_fidelity(
    basis: &[StateVector<f64>],
    outputs: &[StateVector<f64>],
    ideal: &DMatrix<Complex<f64>>,
    samples: usize,
    seed: RandomSeed,
) -> Result<FidelityReport> {
    if basis.is_empty() || basis.len() != outputs.len() {
        return domain("basis and outputs must be non-empty and of equal length");
    }
    check_orthonormal(basis)?;
    check_ideal(ideal, basis.len())?;
    let m = gram_matrix(basis, outputs)?;
    let g = ideal.adjoint() * m;
    let vals = haar_overlap_samples(&g, samples, seed)?;
    Ok(FidelityReport::new(SampleStats::from_values(&vals)?, seed))
}

/// Closed-form Haar average `(tr(M†M) + |tr(U†M)|²) / (d(d+1))` for the
/// subspace block `M` of a possibly leaky channel.
pub fn analytic_average_fidelity(m: &DMatrix<Complex<f64>>, ideal: &DMatrix<Complex<f64>>) -> f64 {
    let d = m.nrows() as f64;
    let tr = (ideal.adjoint() * m).trace();
    let mm = (m.adjoint() * m).trace().re;
    (mm + tr.norm_sqr()) / (d * (d + 1.0))
}
