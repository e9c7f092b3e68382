//! Statevector engine: gate kernels, expectations and Haar sampling.

mod gates;
mod haar;
mod observable;
mod state;

pub use gates::{apply_gate, GateOp};
pub use haar::{check_orthonormal, haar_coefficients, haar_random_in_subspace, RandomSeed};
pub use observable::{expectation, CompiledObservable};
pub use state::{inner_product, StateVector};

pub use gates::{pauli_braket, rotate};
