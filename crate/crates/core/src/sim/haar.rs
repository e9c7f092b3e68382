use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::state::{inner_product, StateVector};
use crate::error::{domain, Result};
use crate::scalar::Real;

/// `(seed, stream_id)` key of a ChaCha20 stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct RandomSeed {
    pub seed: u64,
    pub stream_id: u64,
}

impl RandomSeed {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Key for the `index`-th independent sub-stream.
    pub fn derive(&self, index: u64) -> Self {
        Self { seed: self.seed, stream_id: self.stream_id.wrapping_add(index) }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Standard complex Gaussian coefficients, normalized.
pub fn haar_coefficients(dim: usize, seed: RandomSeed) -> Vec<Complex<f64>> {
    let mut rng = seed.rng();
    loop {
        let c: Vec<Complex<f64>> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex::new(re, im)
            })
            .collect();
        let n: f64 = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            return c.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Checks mutual orthonormality to `1e-10` (machine-limited for `f32`).
pub fn check_orthonormal<T: Real>(basis: &[StateVector<T>]) -> Result<()> {
    let tol = T::tol(1e-10);
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let ip = inner_product(a, b)?;
            let target = if i == j { T::one() } else { T::zero() };
            if (ip.re - target).abs() > tol || ip.im.abs() > tol {
                return domain(format!("basis vectors {i} and {j} are not orthonormal (⟨{i}|{j}⟩ = {}{:+}i)", ip.re, ip.im));
            }
        }
    }
    Ok(())
}

/// Uniformly distributed unit vector in the span of an orthonormal basis.
pub fn haar_random_in_subspace<T: Real>(basis: &[StateVector<T>], seed: RandomSeed) -> Result<StateVector<T>> {
    if basis.is_empty() {
        return domain("subspace basis is empty");
    }
    check_orthonormal(basis)?;
    let c = haar_coefficients(basis.len(), seed);
    let mut amps = vec![Complex::new(T::zero(), T::zero()); basis[0].dim()];
    for (cj, v) in c.iter().zip(basis) {
        let cj = Complex::new(T::from_f64(cj.re), T::from_f64(cj.im));
        for (a, b) in amps.iter_mut().zip(v.amplitudes()) {
            *a += cj * *b;
        }
    }
    StateVector::from_unnormalized(amps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_key() {
        let basis = vec![StateVector::<f64>::basis(2, 0), StateVector::basis(2, 3)];
        let a = haar_random_in_subspace(&basis, RandomSeed::new(7, 1)).unwrap();
        let b = haar_random_in_subspace(&basis, RandomSeed::new(7, 1)).unwrap();
        let c = haar_random_in_subspace(&basis, RandomSeed::new(7, 2)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.probability(1) + a.probability(2), 0.0);
    }

    #[test]
    fn one_dimensional_subspace() {
        let v = StateVector::<f64>::basis(3, 5);
        let s = haar_random_in_subspace(&[v.clone()], RandomSeed::new(1, 0)).unwrap();
        assert!((inner_product(&v, &s).unwrap().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_orthonormal_rejected() {
        let a = StateVector::<f64>::basis(1, 0);
        assert!(haar_random_in_subspace(&[a.clone(), a], RandomSeed::new(1, 0)).is_err());
    }
}
