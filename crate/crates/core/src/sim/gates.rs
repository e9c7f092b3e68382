use num_complex::Complex;

use super::state::StateVector;
use crate::error::{domain, Result};
use crate::pauli::{PauliString, PauliTerm};
use crate::scalar::Real;

/// Half-angle rotation gates: `exp(−iθG/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateOp<T: Real = f64> {
    RX { theta: T, qubit: usize },
    RZ { theta: T, qubit: usize },
    XX { theta: T, q1: usize, q2: usize },
    PauliRotation { theta: T, string: PauliString },
}

impl<T: Real> GateOp<T> {
    /// Rotation about a term with unit-modulus real coefficient; the sign is folded into `θ`.
    pub fn from_term(theta: T, term: &PauliTerm<T>) -> Result<Self> {
        let c = term.coefficient;
        let tol = T::tol(1e-12);
        if c.im.abs() > tol || (c.re.abs() - T::one()).abs() > tol {
            return domain(format!("rotation term must have coefficient ±1, got {}{:+}i", c.re, c.im));
        }
        Ok(Self::PauliRotation { theta: theta * c.re.signum(), string: term.string })
    }

    pub fn theta(&self) -> T {
        match *self {
            Self::RX { theta, .. } | Self::RZ { theta, .. } | Self::XX { theta, .. } | Self::PauliRotation { theta, .. } => {
                theta
            }
        }
    }

    pub fn with_theta(&self, theta: T) -> Self {
        let mut g = *self;
        match &mut g {
            Self::RX { theta: t, .. } | Self::RZ { theta: t, .. } | Self::XX { theta: t, .. } | Self::PauliRotation { theta: t, .. } => {
                *t = theta
            }
        }
        g
    }

    pub fn is_two_qubit(&self) -> bool {
        match self {
            Self::XX { .. } => true,
            Self::PauliRotation { string, .. } => string.weight() == 2,
            _ => false,
        }
    }

    /// `(x_mask, z_mask)` of the generator.
    pub fn generator_masks(&self) -> (u64, u64) {
        match *self {
            Self::RX { qubit, .. } => (1 << qubit, 0),
            Self::RZ { qubit, .. } => (0, 1 << qubit),
            Self::XX { q1, q2, .. } => ((1 << q1) | (1 << q2), 0),
            Self::PauliRotation { string, .. } => (string.x_mask(), string.z_mask()),
        }
    }

    fn check(&self, k: usize) -> Result<()> {
        let bad = |q: usize| q >= k;
        match *self {
            Self::RX { qubit, .. } | Self::RZ { qubit, .. } if bad(qubit) => {
                domain(format!("qubit {qubit} out of range for {k} qubits"))
            }
            Self::XX { q1, q2, .. } if bad(q1) || bad(q2) || q1 == q2 => {
                domain(format!("invalid XX qubit pair ({q1}, {q2}) for {k} qubits"))
            }
            Self::PauliRotation { string, .. } if string.num_qubits() != k => {
                domain(format!("rotation string width {} does not match {k} qubits", string.num_qubits()))
            }
            _ => Ok(()),
        }
    }
}

pub fn apply_gate<T: Real>(state: &mut StateVector<T>, gate: &GateOp<T>) -> Result<()> {
    gate.check(state.num_qubits())?;
    let (x, z) = gate.generator_masks();
    rotate(state.amplitudes_mut(), x, z, gate.theta());
    Ok(())
}

#[inline]
fn i_pow_times<T: Real>(k: u32, a: Complex<T>) -> Complex<T> {
    match k & 3 {
        0 => a,
        1 => Complex::new(-a.im, a.re),
        2 => Complex::new(-a.re, -a.im),
        _ => Complex::new(a.im, -a.re),
    }
}

/// In-place `exp(−iθP/2)` for the Pauli string with masks `(x, z)`.
pub fn rotate<T: Real>(amps: &mut [Complex<T>], x: u64, z: u64, theta: T) {
    let half = theta * T::from_f64(0.5);
    let (s, c) = half.sin_cos();
    let ny = (x & z).count_ones();
    if x == 0 {
        // diagonal: phase e^{∓iθ/2} by Z-parity
        let plus = Complex::new(c, -s);
        let minus = Complex::new(c, s);
        let zu = z as usize;
        for (b, a) in amps.iter_mut().enumerate() {
            *a = *a * if (zu & b).count_ones() & 1 == 0 { plus } else { minus };
        }
        return;
    }
    let xu = x as usize;
    let zu = z as usize;
    let top = 1usize << (63 - x.leading_zeros());
    let ms = Complex::new(T::zero(), -s);
    for b in 0..amps.len() {
        if b & top != 0 {
            continue;
        }
        let bp = b ^ xu;
        let (a0, a1) = (amps[b], amps[bp]);
        // P|bp⟩ = phase(bp)|b⟩, P|b⟩ = phase(b)|bp⟩
        let k_bp = (ny + 2 * (zu & bp).count_ones()) & 3;
        let k_b = (ny + 2 * (zu & b).count_ones()) & 3;
        amps[b] = a0 * c + ms * i_pow_times(k_bp, a1);
        amps[bp] = a1 * c + ms * i_pow_times(k_b, a0);
    }
}

/// `P|ψ⟩` accumulated with weight `w` into `out`.
pub(crate) fn accumulate_pauli<T: Real>(amps: &[Complex<T>], x: u64, z: u64, w: Complex<T>, out: &mut [Complex<T>]) {
    let ny = (x & z).count_ones();
    let (xu, zu) = (x as usize, z as usize);
    for (b, a) in amps.iter().enumerate() {
        let k = (ny + 2 * (zu & b).count_ones()) & 3;
        out[b ^ xu] += w * i_pow_times(k, *a);
    }
}

/// `⟨bra|P|ket⟩` for the Pauli string with masks `(x, z)`.
pub fn pauli_braket<T: Real>(bra: &[Complex<T>], ket: &[Complex<T>], x: u64, z: u64) -> Complex<T> {
    let ny = (x & z).count_ones();
    let (xu, zu) = (x as usize, z as usize);
    let mut acc = Complex::new(T::zero(), T::zero());
    for (b, a) in ket.iter().enumerate() {
        let k = (ny + 2 * (zu & b).count_ones()) & 3;
        acc += bra[b ^ xu].conj() * i_pow_times(k, *a);
    }
    acc
}
