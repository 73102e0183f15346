//! Schrödinger-picture forging: a 2N-qubit expectation assembled from
//! N-qubit bitstring and superposition states.

mod ansatz;
mod exact;
mod prep;
mod sampling;
mod spectrum;
mod terms;

pub use ansatz::{SchmidtAnsatz, LAMBDA_NORM_TOLERANCE};
pub(crate) use ansatz::check_lambdas;
pub use exact::{
    ansatz_statevector, default_options, direct_expectation, forged_expectation_exact,
    forged_expectation_product_exact, EvalOptions, ForgedStates, ProductTerm,
};
pub use prep::{
    basis_prep_circuit, product_prep_circuit, product_prep_state, product_statevector,
    superposition_prep_circuit,
};
pub use sampling::{estimate_sampled, experiments_for, sampling_budget, SampleBudget, SampledEstimate};
pub use spectrum::{schmidt_spectrum, truncation_residual};
pub use terms::{
    enumerate_forged_terms, enumerate_product_terms, one_norm_exact, one_norm_closed_form,
    product_amplification, ForgedTerm, TermPrep,
};
