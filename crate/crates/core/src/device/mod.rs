//! Truncated charge-basis transmon Hamiltonians and their exact spectra.

mod constants;
mod model;
mod operator;
mod spectrum;

pub use constants::{PhysicalConstants, CODATA, ELECTRON_CHARGE, PLANCK_H};
pub use model::{
    build_chain_hamiltonian, build_single_hamiltonian, build_two_hamiltonian, capacitance_matrix, charging_energy,
    cosine_phase_operator, coupling_xi, number_operator, ChainSpec, ExtraCapacitance, TransmonSpec, MAX_DENSE_DIM,
};
pub use operator::{kron_all, lift_to_site, DenseOperator};
pub use spectrum::{
    exact_spectrum, label_computational_states, level_label, uncoupled_product_states, ProductState, SpectrumResult,
    StateLabel,
};
