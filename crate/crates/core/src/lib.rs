//! Well-conditioned multi-product formulas for Hamiltonian simulation.
//!
//! A product formula approximates `exp(-i H t)` by splitting `H = Σ_j H_j`
//! and exponentiating the terms one at a time. A multi-product formula (MPF)
//! runs the same product formula at several Trotter exponents
//! `k_1 < ... < k_l` and classically combines the measured expectation values
//! with extrapolation weights `a_j` that cancel the leading Trotter error
//! terms. The catch is the condition number `‖a‖₁ = Σ|a_j|`: it multiplies
//! every non-algorithmic error source (sampling noise, hardware noise), so
//! exponent sequences must be chosen to keep it small.
//!
//! This crate provides:
//!
//! - [`operators`]: dense complex operators, Pauli strings, bosonic ladder
//!   operators, state vectors, and a fast Pauli-rotation path;
//! - [`hamiltonians`]: transverse-field Ising chains and truncated spin-boson
//!   models split into exponentiable terms;
//! - [`propagators`]: the exact evolution oracle and the Trotter-Suzuki
//!   formulas S₁ and S₂ᵪ with repeated-step application;
//! - [`mpf`]: exact-rational extrapolation weights, condition numbers,
//!   well-conditioned sequence search, and classical combination;
//! - [`noise`]: shot sampling, adversarial perturbations, an ill-conditioned
//!   Bernoulli sampling demo, synthetic zero-noise extrapolation with an
//!   exponential fit, and the R_ZZ twirl-set commutation check;
//! - [`resources`]: CNOT accounting for LCU versus classical combination,
//!   factorial/Lambert-W depth scaling, and empirical repetition counts.

pub mod error;
pub mod experiments;
pub mod hamiltonians;
pub mod mpf;
pub mod noise;
pub mod operators;
pub mod propagators;
pub mod resources;
pub mod util;

pub use error::{Error, Result};
pub use experiments::{ising_magnetization_demo, IsingDemo, IsingDemoParams};
pub use hamiltonians::{build_ising, build_spin_boson, HamiltonianTerm, HamiltonianTerms};
pub use mpf::{
    amplified_error_bound, combine_expectations, condition_number, search_sequences, solve_weights,
    ExpectationRecord, ExponentSequence, SearchObjective, SequenceSearch, WeightReport,
    WeightVector,
};
pub use noise::{
    bernoulli_mpf_demo, commutes_with_rzz, inject_perturbation, sample_expectation,
    synth_noisy_expectation, twirl_set_check, zne_fit, zne_round_trip, ShotModel, ZneCurve,
};
pub use operators::{
    apply_pauli_exponential, boson_ladder, pauli_matrix, BosonicMode, DenseOperator, Pauli,
    PauliString, StateVector,
};
pub use propagators::{
    exact_expectation, exact_state, exact_unitary, operator_distance, ProductFormula,
};
pub use resources::{
    classical_cnot_count, lambert_w, lcu_cnot_count, mpf_depth_scaling, pf_repetitions_to_accuracy,
    DepthScaling, ErrorMetric, GateCostTable, ScalingQuery,
};
