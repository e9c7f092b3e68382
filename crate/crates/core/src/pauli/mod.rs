//! Pauli strings, weighted sums, and level encodings of truncated operators.

mod encoding;
mod string;
mod sum;

pub use encoding::{
    code_word, encode_chain_hamiltonian, encode_ketbra, encode_operator, encode_register_operator, format_listing,
    gray_code, register_codes, restrict_to_code_space, CodeWord, EncodingScheme,
};
pub use string::{PauliString, MAX_QUBITS};
pub use sum::{naive_cnot_upper_bound, PauliSum, PauliTerm, MAX_DENSE_QUBITS, PRUNE_TOLERANCE};
pub(crate) use sum::i_pow;
