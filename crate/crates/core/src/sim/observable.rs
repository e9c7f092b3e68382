use std::collections::BTreeMap;

use num_complex::Complex;

use super::gates::accumulate_pauli;
use super::state::{dot, StateVector};
use crate::error::{domain, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::scalar::Real;

/// `Σ cᵢ⟨ψ|Pᵢ|ψ⟩`; the sum must be Hermitian.
pub fn expectation<T: Real>(state: &StateVector<T>, observable: &PauliSum<T>) -> Result<T> {
    if observable.num_qubits() != state.num_qubits() {
        return domain(format!(
            "observable width {} does not match state width {}",
            observable.num_qubits(),
            state.num_qubits()
        ));
    }
    let terms = observable.real_terms(T::tol(1e-12))?;
    let amps = state.amplitudes();
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); amps.len()];
    let mut total = T::zero();
    for (c, p) in terms {
        scratch.iter_mut().for_each(|a| *a = Complex::new(T::zero(), T::zero()));
        accumulate_pauli(amps, p.x_mask(), p.z_mask(), Complex::new(T::one(), T::zero()), &mut scratch);
        total += c * dot(amps, &scratch).re;
    }
    Ok(total)
}

/// Hermitian Pauli sum pre-grouped by X mask: each group is a diagonal
/// vector `D_x` with `H = Σ_x X^x·D_x`, so `H|ψ⟩` costs one pass per group.
#[derive(Clone, Debug)]
pub struct CompiledObservable<T: Real = f64> {
    num_qubits: usize,
    groups: Vec<(usize, Vec<Complex<T>>)>,
}

impl<T: Real> CompiledObservable<T> {
    pub fn new(observable: &PauliSum<T>) -> Result<Self> {
        let terms = observable.real_terms(T::tol(1e-12))?;
        let k = observable.num_qubits();
        if k > 30 {
            return domain(format!("{k} qubits is too wide for a compiled observable"));
        }
        let dim = 1usize << k;
        let mut by_x: BTreeMap<u64, Vec<(T, PauliString)>> = BTreeMap::new();
        for (c, p) in terms {
            by_x.entry(p.x_mask()).or_default().push((c, p));
        }
        let groups = by_x
            .into_iter()
            .map(|(x, ts)| {
                // (X^x D)[b^x, b] = D[b] = Σ c·i^ny·(−1)^{|z&b|}
                let mut diag = vec![Complex::new(T::zero(), T::zero()); dim];
                for (c, p) in ts {
                    let ny = p.y_count();
                    for (b, d) in diag.iter_mut().enumerate() {
                        *d += crate::pauli::i_pow::<T>(ny + 2 * (p.z_mask() & b as u64).count_ones()) * c;
                    }
                }
                (x as usize, diag)
            })
            .collect();
        Ok(Self { num_qubits: k, groups })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// `out = H|ψ⟩`.
    pub fn apply(&self, amps: &[Complex<T>], out: &mut [Complex<T>]) {
        out.iter_mut().for_each(|a| *a = Complex::new(T::zero(), T::zero()));
        for (x, diag) in &self.groups {
            for (b, (a, d)) in amps.iter().zip(diag).enumerate() {
                out[b ^ x] += *d * *a;
            }
        }
    }

    pub fn expectation(&self, state: &StateVector<T>) -> T {
        let amps = state.amplitudes();
        let mut total = T::zero();
        for (x, diag) in &self.groups {
            for (b, (a, d)) in amps.iter().zip(diag).enumerate() {
                let v = *d * *a;
                let bra = amps[b ^ x];
                total += bra.re * v.re + bra.im * v.im;
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_on_zero_state() {
        let s = StateVector::<f64>::zero_state(1);
        let z = PauliSum::from_real_terms(&[(1.0, "Z")]).unwrap();
        assert_eq!(expectation(&s, &z).unwrap(), 1.0);
    }

    #[test]
    fn xx_on_plus_plus() {
        let amps: Vec<Complex<f64>> = (0..4).map(|_| Complex::new(0.5, 0.0)).collect();
        let s = StateVector::from_amplitudes(amps).unwrap();
        let xx = PauliSum::from_real_terms(&[(1.0, "XX")]).unwrap();
        assert!((expectation(&s, &xx).unwrap() - 1.0).abs() < 1e-15);
        assert!((CompiledObservable::new(&xx).unwrap().expectation(&s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_rejected() {
        let s = StateVector::<f64>::zero_state(1);
        let mut p = PauliSum::<f64>::zero(1);
        p.add_term(Complex::new(0.0, 1.0), PauliString::from_axes("Z").unwrap());
        assert!(expectation(&s, &p).is_err());
        assert!(CompiledObservable::new(&p).is_err());
    }
}
