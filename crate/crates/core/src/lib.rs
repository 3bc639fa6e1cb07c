//! Deterministic quantum-programming assistant.
//!
//! Utterances are classified into one of five request kinds, parameters are
//! extracted by auditable rules, and every answer is computed by an exact
//! engine: gate algebra on dense statevectors, QUBO reductions for the
//! travelling salesperson and knapsack problems, and exact-statevector VQE
//! and QAOA solvers. Generated Qiskit code comes from curated templates.

pub mod codegen;
pub mod extraction;
pub mod format;
pub mod gates;
pub mod intent;
pub mod ket;
pub mod quantum;
pub mod qubo;
pub mod service;
pub mod variational;

