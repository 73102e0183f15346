//! Entanglement forging: estimate observables of a 2N-qubit state from
//! N-qubit circuits plus classical post-processing.

pub mod bits;
pub mod clifford;
pub mod dense;
pub mod error;
pub mod hamiltonian;
pub mod heisenberg;
pub mod orchestration;
pub mod pauli;
pub mod schrodinger;
pub mod sim;
pub mod synthesis;
pub mod vqe;

pub use bits::BitString;
pub use error::{ForgeError, Result};
pub use pauli::{Letter, PauliString};
