//! Computer-aided design of superconducting transmon devices.
//!
//! Builds truncated circuit Hamiltonians ([`device`]), encodes them as qubit
//! Pauli sums ([`pauli`]), simulates circuits on a statevector engine
//! ([`sim`]), estimates spectra variationally ([`variational`]) and
//! simulates gate pulses exactly and by Trotterization ([`dynamics`]).
//!
//! The linear-algebra layers are generic over [`Real`] (`f32` or `f64`);
//! the aliases below fix the common double-precision instances.

pub mod device;
pub mod dynamics;
mod error;
pub mod pauli;
mod scalar;
pub mod sim;
pub mod variational;

pub use error::{Error, Result};
pub use scalar::Real;

pub type DenseOperatorF64 = device::DenseOperator<f64>;
pub type DenseOperatorF32 = device::DenseOperator<f32>;
pub type PauliSumF64 = pauli::PauliSum<f64>;
pub type PauliSumF32 = pauli::PauliSum<f32>;
pub type StateVectorF64 = sim::StateVector<f64>;
pub type StateVectorF32 = sim::StateVector<f32>;
pub type SpectrumF64 = device::SpectrumResult<f64>;
