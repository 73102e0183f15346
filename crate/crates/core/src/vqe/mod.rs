//! Variational driver: hop-gate ansatz, h-matrix assembly, closed-form
//! Schmidt-coefficient update and SPSA over the circuit angles.

mod config;
mod driver;
mod hmatrix;
mod spsa;

pub use config::{AnsatzConfig, HopAngle, HopEntry};
pub use driver::{vqe_run, EvalCounters, EvalMode, Evaluation, SampledOptions, VqeProblem, VqeRecord, VqeTrajectory};
pub use hmatrix::{assemble_h_matrix, exact_pieces, update_lambda, HMatrix, HPieces};
pub use spsa::{spsa_optimize, SpsaConfig, SpsaRun, SpsaStep};
