//! End-to-end experiment pipelines shared by the CLI and the browser demo.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::build_ising;
use crate::mpf::{combine_expectations, solve_weights, ExpectationRecord, ExponentSequence};
use crate::noise::inject_perturbation;
use crate::operators::{pauli_matrix, PauliString, StateVector};
use crate::propagators::{exact_expectation, ProductFormula};
use crate::util::log_log_slope;

/// Default condition-number threshold for S₁-based MPFs.
pub const S1_THRESHOLD: f64 = 3.0;
/// Default condition-number threshold for symmetric (S₂-based) MPFs.
pub const S2_THRESHOLD: f64 = 1.7;

/// Per-qubit tilt of the default initial state `(cos θ|0⟩ + sin θ|1⟩)^⊗n`.
///
/// A plain computational-basis start suppresses the first-order Trotter
/// error of the magnetization, giving k⁻² convergence instead of the
/// generic k⁻¹; the tilt restores the generic behaviour.
pub const DEFAULT_INITIAL_TILT: f64 = 0.2;

/// Parameters of the five-spin Ising magnetization experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsingDemoParams {
    pub n_spins: usize,
    pub coupling: f64,
    pub field: f64,
    pub time: f64,
    /// Product-formula sweep covers `k = 1..=k_max`.
    pub k_max: u64,
    /// Perturbation magnitude for the noisy MPF rows.
    pub eps_prime: f64,
    /// Initial-state tilt angle.
    pub initial_tilt: f64,
    /// Sequences to combine; solved against the S₁ sweep.
    pub sequences: Vec<Vec<u64>>,
}

impl Default for IsingDemoParams {
    fn default() -> Self {
        Self {
            n_spins: 5,
            coupling: 0.5,
            field: 1.0,
            time: 0.5,
            k_max: 10,
            eps_prime: 1e-3,
            initial_tilt: DEFAULT_INITIAL_TILT,
            sequences: vec![
                vec![1, 2],
                vec![1, 3],
                vec![2, 4],
                vec![2, 5],
                vec![1, 2, 6],
                vec![1, 2, 7],
                vec![6, 7],
            ],
        }
    }
}

/// One product-formula sweep point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PfRow {
    pub k: u64,
    pub expectation: f64,
    pub rel_error: f64,
}

/// One classical combination, at a given injected perturbation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MpfRow {
    pub k: Vec<u64>,
    pub norm1: f64,
    pub well_conditioned: bool,
    pub eps_prime: f64,
    pub combined: f64,
    pub rel_error: f64,
}

/// Result of the magnetization experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsingDemo {
    pub exact: f64,
    pub pf: Vec<PfRow>,
    pub mpf: Vec<MpfRow>,
    /// Log-log slope of the PF relative error against k.
    pub slope: Option<f64>,
}

/// Run the local-magnetization pipeline: exact oracle, S₁ sweep over
/// `k = 1..=k_max`, and classical combinations of the swept expectation
/// values with `ε' ∈ {0, eps_prime}` (sign-aligned injection).
pub fn ising_magnetization_demo(params: &IsingDemoParams) -> Result<IsingDemo> {
    if params.k_max == 0 {
        return Err(Error::InvalidInput("k_max must be >= 1".into()));
    }
    let h = build_ising(params.n_spins, params.coupling, params.field)?;
    let psi0 = StateVector::tilted_product(params.n_spins, params.initial_tilt)?;
    let z0_label: String = std::iter::once('Z')
        .chain(std::iter::repeat_n('I', params.n_spins - 1))
        .collect();
    let z0 = pauli_matrix(&PauliString::new(&z0_label, 1.0)?)?;

    let exact = exact_expectation(&h, params.time, &psi0, &z0)?;
    if exact == 0.0 {
        return Err(Error::Numerical(
            "exact magnetization vanishes; relative errors undefined".into(),
        ));
    }

    let pf = ProductFormula::S1;
    let mut sweep = Vec::with_capacity(params.k_max as usize);
    for k in 1..=params.k_max {
        let expectation = pf.expectation(&h, params.time, k, &psi0, &z0)?;
        sweep.push(PfRow {
            k,
            expectation,
            rel_error: (expectation - exact).abs() / exact.abs(),
        });
    }
    let ks: Vec<f64> = sweep.iter().map(|r| r.k as f64).collect();
    let errs: Vec<f64> = sweep.iter().map(|r| r.rel_error).collect();
    let slope = log_log_slope(&ks, &errs);

    let expectation_for = |k: u64| -> Result<f64> {
        if let Some(row) = sweep.iter().find(|r| r.k == k) {
            Ok(row.expectation)
        } else {
            pf.expectation(&h, params.time, k, &psi0, &z0)
        }
    };

    let mut mpf_rows = Vec::new();
    for kvec in &params.sequences {
        let seq = ExponentSequence::new(kvec.clone(), pf)?;
        let w = solve_weights(&seq)?;
        let records: Vec<ExpectationRecord> = seq
            .exponents()
            .iter()
            .map(|&k| Ok(ExpectationRecord::exact(k, expectation_for(k)?)))
            .collect::<Result<_>>()?;
        for eps in [0.0, params.eps_prime] {
            let noisy: Vec<ExpectationRecord> = records
                .iter()
                .zip(w.weights_f64())
                .map(|(rec, a)| ExpectationRecord {
                    value: inject_perturbation(rec.value, a, eps),
                    epsilon_prime: eps,
                    ..rec.clone()
                })
                .collect();
            let combined = combine_expectations(&seq, &w, &noisy)?;
            mpf_rows.push(MpfRow {
                k: kvec.clone(),
                norm1: w.norm1_f64(),
                well_conditioned: w.norm1_f64() <= S1_THRESHOLD,
                eps_prime: eps,
                combined,
                rel_error: (combined - exact).abs() / exact.abs(),
            });
        }
    }

    Ok(IsingDemo {
        exact,
        pf: sweep,
        mpf: mpf_rows,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_pipeline_matches_figure_texture() {
        let demo = ising_magnetization_demo(&IsingDemoParams::default()).unwrap();
        let slope = demo.slope.unwrap();
        assert!((slope + 1.0).abs() < 0.15, "slope {slope}");
        assert_eq!(demo.pf.len(), 10);
        assert_eq!(demo.mpf.len(), 14);
        // noiseless well-conditioned rows all beat the deepest PF point
        let k10 = demo.pf.last().unwrap().rel_error;
        for row in demo
            .mpf
            .iter()
            .filter(|r| r.eps_prime == 0.0 && r.well_conditioned)
        {
            assert!(row.rel_error < k10, "{:?} rel {}", row.k, row.rel_error);
        }
    }

    #[test]
    fn commuting_configuration_has_tiny_errors() {
        let params = IsingDemoParams {
            coupling: 0.0,
            sequences: vec![vec![1, 2]],
            ..Default::default()
        };
        let demo = ising_magnetization_demo(&params).unwrap();
        for row in &demo.pf {
            assert!(row.rel_error < 1e-12, "k={} err={}", row.k, row.rel_error);
        }
    }

    #[test]
    fn rejects_zero_sweep() {
        let params = IsingDemoParams {
            k_max: 0,
            ..Default::default()
        };
        assert!(ising_magnetization_demo(&params).is_err());
    }
}
