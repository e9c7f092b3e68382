use std::f64::consts::FRAC_PI_2;

use num_complex::Complex;

use super::ansatz::AnsatzProgram;
use crate::error::{domain, Result};
use crate::pauli::PauliSum;
use crate::sim::{inner_product, pauli_braket, rotate, CompiledObservable, StateVector};

/// `⟨ψ_θ|H|ψ_θ⟩ + Σ βᵢ|⟨ψᵢ|ψ_θ⟩|²` for a fixed ansatz and reference state.
#[derive(Clone, Debug)]
pub struct Objective<'a> {
    ansatz: &'a AnsatzProgram,
    hamiltonian: CompiledObservable<f64>,
    reference: StateVector<f64>,
    penalties: Vec<(f64, StateVector<f64>)>,
}

impl<'a> Objective<'a> {
    pub fn new(h: &PauliSum<f64>, ansatz: &'a AnsatzProgram, reference: Option<StateVector<f64>>) -> Result<Self> {
        if h.num_qubits() != ansatz.num_qubits {
            return domain(format!("Hamiltonian has {} qubits, ansatz {}", h.num_qubits(), ansatz.num_qubits));
        }
        let reference = reference.unwrap_or_else(|| StateVector::zero_state(ansatz.num_qubits));
        if reference.num_qubits() != ansatz.num_qubits {
            return domain("reference state width does not match the ansatz");
        }
        Ok(Self { ansatz, hamiltonian: CompiledObservable::new(h)?, reference, penalties: Vec::new() })
    }

    /// Adds `β·|⟨state|ψ_θ⟩|²`.
    pub fn add_penalty(&mut self, beta: f64, state: StateVector<f64>) -> Result<()> {
        if state.num_qubits() != self.ansatz.num_qubits {
            return domain("penalty state width does not match the ansatz");
        }
        self.penalties.push((beta, state));
        Ok(())
    }

    pub fn ansatz(&self) -> &AnsatzProgram {
        self.ansatz
    }

    pub fn prepare(&self, params: &[f64]) -> Result<StateVector<f64>> {
        let mut s = self.reference.clone();
        self.ansatz.apply(params, &mut s)?;
        Ok(s)
    }

    fn value_of_state(&self, s: &StateVector<f64>) -> f64 {
        let mut v = self.hamiltonian.expectation(s);
        for (beta, p) in &self.penalties {
            v += beta * inner_product(p, s).map(|z| z.norm_sqr()).unwrap_or(0.0);
        }
        v
    }

    pub fn value(&self, params: &[f64]) -> Result<f64> {
        Ok(self.value_of_state(&self.prepare(params)?))
    }

    /// `⟨H⟩` without penalties.
    pub fn energy(&self, params: &[f64]) -> Result<f64> {
        Ok(self.hamiltonian.expectation(&self.prepare(params)?))
    }

    /// Exact gradient from `∂E/∂θ = ½[E(θ+π/2) − E(θ−π/2)]`.
    pub fn parameter_shift_gradient(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        let value = self.value(params)?;
        let mut shifted = params.to_vec();
        let mut grad = vec![0.0; params.len()];
        for (i, g) in grad.iter_mut().enumerate() {
            shifted[i] = params[i] + FRAC_PI_2;
            let plus = self.value(&shifted)?;
            shifted[i] = params[i] - FRAC_PI_2;
            let minus = self.value(&shifted)?;
            shifted[i] = params[i];
            *g = 0.5 * (plus - minus);
        }
        Ok((value, grad))
    }

    /// Reverse-mode gradient: one forward pass, then back-propagates the
    /// state and `A|ψ⟩` through each gate. Agrees with the parameter-shift
    /// rule to rounding error.
    pub fn adjoint_gradient(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut psi = self.prepare(params)?;
        let dim = psi.dim();
        let mut lambda = vec![Complex::new(0.0, 0.0); dim];
        self.hamiltonian.apply(psi.amplitudes(), &mut lambda);
        for (beta, p) in &self.penalties {
            let ov = inner_product(p, &psi)?;
            for (l, a) in lambda.iter_mut().zip(p.amplitudes()) {
                *l += a * ov * *beta;
            }
        }
        let value = psi.amplitudes().iter().zip(&lambda).map(|(a, l)| (a.conj() * l).re).sum();
        let mut grad = vec![0.0; params.len()];
        let amps = psi.amplitudes_mut();
        for i in (0..self.ansatz.gates.len()).rev() {
            let gate = self.ansatz.bound_gate(i, params);
            let (x, z) = gate.generator_masks();
            // dE/dθ = 2·Re⟨λ|(−i/2)G|ψ⟩ = Im⟨λ|G|ψ⟩
            grad[self.ansatz.gates[i].param] += pauli_braket(&lambda, amps, x, z).im;
            rotate(amps, x, z, -gate.theta());
            rotate(&mut lambda, x, z, -gate.theta());
        }
        Ok((value, grad))
    }
}

/// Energy and parameter-shift gradient of `⟨H⟩`.
pub fn vqe_objective(
    params: &[f64],
    h: &PauliSum<f64>,
    ansatz: &AnsatzProgram,
    reference: Option<StateVector<f64>>,
) -> Result<(f64, Vec<f64>)> {
    Objective::new(h, ansatz, reference)?.parameter_shift_gradient(params)
}
