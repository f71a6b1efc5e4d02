//! Gate-count and depth-scaling estimators.
//!
//! Compares the CNOT cost of an `l = 3` MPF implemented as a linear
//! combination of unitaries (LCU) against the classical combination of
//! expectation values, for the five-spin Ising circuit layout (four R_ZZ
//! gates per Trotter layer). Also solves the factorial depth-scaling
//! inequality `N_q/(2l+1)! < ε_t` by brute force and by its Lambert-W
//! closed form, and searches for the minimal Trotter exponent reaching a
//! target accuracy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::HamiltonianTerms;
use crate::operators::{DenseOperator, StateVector};
use crate::propagators::{exact_expectation, exact_unitary, operator_distance, ProductFormula};

/// CNOT cost of each gate kind, as transpiled to the native gate set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCostTable {
    pub rzz: u64,
    pub ctrl_rzz: u64,
    pub ctrl_single_qubit: u64,
    pub double_ctrl_rzz: u64,
    pub double_ctrl_rx: u64,
}

impl Default for GateCostTable {
    fn default() -> Self {
        Self {
            rzz: 1,
            ctrl_rzz: 8,
            ctrl_single_qubit: 2,
            double_ctrl_rzz: 20,
            double_ctrl_rx: 7,
        }
    }
}

/// How often each gate kind appears in the `l = 3` LCU circuit for the
/// five-spin Ising layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcuGateCounts {
    pub ctrl_rzz: u64,
    pub ctrl_single_qubit: u64,
    pub double_ctrl_rzz: u64,
    pub double_ctrl_rx: u64,
}

/// Gate multiplicities of the `l = 3` LCU circuit: `4k₃` singly-controlled
/// R_ZZ, `4k₃ + 2` singly-controlled single-qubit gates, and `4(k₁+k₂)` each
/// of doubly-controlled R_ZZ and R_X.
pub fn lcu_gate_counts(k: &[u64]) -> Result<LcuGateCounts> {
    if k.len() != 3 {
        return Err(Error::Unsupported(format!(
            "the LCU gate accounting is derived only for l = 3, got l = {}",
            k.len()
        )));
    }
    let (k1, k2, k3) = (k[0], k[1], k[2]);
    Ok(LcuGateCounts {
        ctrl_rzz: 4 * k3,
        ctrl_single_qubit: 4 * k3 + 2,
        double_ctrl_rzz: 4 * (k1 + k2),
        double_ctrl_rx: 4 * (k1 + k2),
    })
}

/// CNOT count of an `l = 3` MPF implemented as an LCU on the five-spin Ising
/// layout. With the default costs this is `108(k₁+k₂) + 40k₃ + 4`.
pub fn lcu_cnot_count(k: &[u64], costs: &GateCostTable) -> Result<u64> {
    let counts = lcu_gate_counts(k)?;
    Ok(counts.ctrl_rzz * costs.ctrl_rzz
        + counts.ctrl_single_qubit * costs.ctrl_single_qubit
        + counts.double_ctrl_rzz * costs.double_ctrl_rzz
        + counts.double_ctrl_rx * costs.double_ctrl_rx)
}

/// CNOT count of the deepest circuit in a classical combination:
/// `(n_spins - 1) · k_l` R_ZZ gates at one CNOT each.
pub fn classical_cnot_count(k: &[u64], n_spins: usize) -> Result<u64> {
    if k.is_empty() {
        return Err(Error::InvalidInput("empty exponent sequence".into()));
    }
    if n_spins < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 spins, got {n_spins}"
        )));
    }
    let k_l = *k.iter().max().expect("non-empty");
    Ok((n_spins as u64 - 1) * k_l)
}

/// Inputs for the asymptotic depth-scaling estimate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScalingQuery {
    pub n_qubits: u64,
    pub eps_target: f64,
    pub t: f64,
}

impl ScalingQuery {
    pub fn new(n_qubits: u64, eps_target: f64, t: f64) -> Result<Self> {
        if n_qubits < 1 {
            return Err(Error::InvalidInput("qubit count must be >= 1".into()));
        }
        if !(eps_target > 0.0 && eps_target < 1.0) {
            return Err(Error::InvalidInput(format!(
                "target accuracy must lie in (0, 1), got {eps_target}"
            )));
        }
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "evolution time must be positive, got {t}"
            )));
        }
        Ok(Self {
            n_qubits,
            eps_target,
            t,
        })
    }
}

/// Result of the depth-scaling estimate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DepthScaling {
    /// Smallest `l` with `N_q/(2l+1)! < ε_t` (brute-force factorial search).
    pub l: u64,
    /// Closed-form estimate `((ln y)/W(ln y / e) - 1)/2` with `y = N_q/ε_t`.
    pub l_lambert: f64,
    /// Deepest Trotter exponent `k_l = ⌈α l²⌉` with `α = t`.
    pub k_deepest: u64,
}

/// Extrapolation points and deepest exponent needed for a target accuracy.
pub fn mpf_depth_scaling(q: &ScalingQuery) -> Result<DepthScaling> {
    let y = q.n_qubits as f64 / q.eps_target;

    let mut l: u64 = 1;
    let mut factorial = 6.0; // (2l+1)! at l = 1
    while factorial <= y {
        l += 1;
        let x = 2 * l + 1;
        factorial *= (x - 1) as f64 * x as f64;
        if l > 1000 {
            return Err(Error::BudgetExceeded(
                "factorial depth search exceeded l = 1000".into(),
            ));
        }
    }

    let ln_y = y.ln();
    let l_lambert = if ln_y > 0.0 {
        (ln_y / lambert_w(ln_y / std::f64::consts::E)? - 1.0) / 2.0
    } else {
        0.0
    };

    let k_deepest = (q.t * (l * l) as f64).ceil() as u64;
    Ok(DepthScaling {
        l,
        l_lambert,
        k_deepest,
    })
}

/// Principal branch of the Lambert W function for `z >= 0`, by Newton
/// iteration on `w e^w = z`.
pub fn lambert_w(z: f64) -> Result<f64> {
    if z.is_nan() || z < 0.0 {
        return Err(Error::InvalidInput(format!(
            "lambert_w implemented for z >= 0, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let mut w = (1.0 + z).ln();
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - z;
        let step = f / (ew * (w + 1.0));
        w -= step;
        if step.abs() < 1e-15 * w.abs().max(1.0) {
            return Ok(w);
        }
    }
    Err(Error::Numerical(format!(
        "lambert_w failed to converge for z = {z}"
    )))
}

/// Error metric for the repetition search.
#[derive(Clone, Debug)]
pub enum ErrorMetric {
    /// Spectral norm `‖ S^k(t/k) - e^{-iHt} ‖₂` (dense, small dimensions).
    OperatorNorm,
    /// `| ⟨O⟩_PF - ⟨O⟩_exact |` for a fixed initial state and observable.
    Observable {
        state: StateVector,
        observable: DenseOperator,
    },
}

const MAX_TROTTER_EXPONENT: u64 = 1_000_000;

/// Minimal repetitions (counted as individual `exp(-i H_j ·)` factors in the
/// deepest circuit) for the product formula to reach `eps_target` under the
/// chosen metric.
///
/// The minimal exponent is bracketed by doubling and then bisected. Trotter
/// error is assumed monotone in `k`; this is spot-checked at the bracket and
/// the search falls back to a linear scan if violated.
pub fn pf_repetitions_to_accuracy(
    h: &HamiltonianTerms,
    t: f64,
    pf: ProductFormula,
    eps_target: f64,
    metric: &ErrorMetric,
) -> Result<u64> {
    if !eps_target.is_finite() || eps_target <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "target accuracy must be positive, got {eps_target}"
        )));
    }
    // The exact reference is k-independent; compute it once.
    let exact_u = match metric {
        ErrorMetric::OperatorNorm => Some(exact_unitary(h, t)?),
        ErrorMetric::Observable { .. } => None,
    };
    let exact_e = match metric {
        ErrorMetric::Observable { state, observable } => {
            Some(exact_expectation(h, t, state, observable)?)
        }
        ErrorMetric::OperatorNorm => None,
    };
    let evaluate = |k: u64| -> Result<f64> {
        match metric {
            ErrorMetric::OperatorNorm => {
                let approx = pf.steps_matrix(h, t, k)?;
                operator_distance(&approx, exact_u.as_ref().expect("computed above"))
            }
            ErrorMetric::Observable { state, observable } => {
                let approx = pf.expectation(h, t, k, state, observable)?;
                Ok((approx - exact_e.expect("computed above")).abs())
            }
        }
    };

    let k_min = minimal_exponent(eps_target, &evaluate)?;
    Ok(k_min * pf.factors_per_step(h.n_terms()))
}

fn minimal_exponent(eps: f64, evaluate: &dyn Fn(u64) -> Result<f64>) -> Result<u64> {
    if evaluate(1)? < eps {
        return Ok(1);
    }
    let mut hi = 1u64;
    loop {
        hi = hi.saturating_mul(2);
        if hi > MAX_TROTTER_EXPONENT {
            return Err(Error::BudgetExceeded(format!(
                "no Trotter exponent below {MAX_TROTTER_EXPONENT} reaches the target accuracy"
            )));
        }
        if evaluate(hi)? < eps {
            break;
        }
    }
    let mut lo = hi / 2; // error(lo) >= eps, error(hi) < eps

    // Monotonicity spot check at the bracket; fall back to a linear scan when
    // the Trotter error is not locally monotone.
    if evaluate(lo)? < evaluate(hi)? {
        for k in lo + 1..=hi {
            if evaluate(k)? < eps {
                return Ok(k);
            }
        }
        return Ok(hi);
    }

    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if evaluate(mid)? < eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{build_ising, build_spin_boson};
    use crate::operators::{pauli_matrix, PauliString};
    use approx::assert_abs_diff_eq;

    #[test]
    fn lcu_reference_example() {
        let costs = GateCostTable::default();
        let lcu = lcu_cnot_count(&[1, 2, 7], &costs).unwrap();
        let classical = classical_cnot_count(&[1, 2, 7], 5).unwrap();
        assert_eq!(lcu, 608);
        assert_eq!(classical, 28);
        let ratio = lcu as f64 / classical as f64;
        assert_eq!(ratio.round() as u64, 22);
    }

    #[test]
    fn lcu_formula_matches_table_multiplicities() {
        let costs = GateCostTable::default();
        assert_eq!(lcu_cnot_count(&[1, 2, 3], &costs).unwrap(), 448);
        assert_eq!(classical_cnot_count(&[1, 2, 3], 5).unwrap(), 12);
        // closed form 108(k1+k2) + 40 k3 + 4 equals the direct gate-by-gate sum
        let k = [3, 5, 9];
        let counts = lcu_gate_counts(&k).unwrap();
        let direct = counts.ctrl_rzz * 8
            + counts.ctrl_single_qubit * 2
            + counts.double_ctrl_rzz * 20
            + counts.double_ctrl_rx * 7;
        assert_eq!(direct, 108 * (3 + 5) + 40 * 9 + 4);
        assert_eq!(lcu_cnot_count(&k, &costs).unwrap(), direct);
    }

    #[test]
    fn lcu_zero_cost_table() {
        let costs = GateCostTable {
            rzz: 0,
            ctrl_rzz: 0,
            ctrl_single_qubit: 0,
            double_ctrl_rzz: 0,
            double_ctrl_rx: 0,
        };
        assert_eq!(lcu_cnot_count(&[1, 2, 7], &costs).unwrap(), 0);
    }

    #[test]
    fn lcu_requires_three_points() {
        let costs = GateCostTable::default();
        assert!(matches!(
            lcu_cnot_count(&[1, 2], &costs),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn ratio_grows_with_shallow_prefix() {
        // (k₁+k₂)/k₃ up → LCU/classical ratio up
        let costs = GateCostTable::default();
        let ratio = |k: &[u64]| {
            lcu_cnot_count(k, &costs).unwrap() as f64 / classical_cnot_count(k, 5).unwrap() as f64
        };
        assert!(ratio(&[5, 6, 7]) > ratio(&[1, 2, 7]));
    }

    #[test]
    fn factorial_search_examples() {
        let q = ScalingQuery::new(11, 1e-4, 10.0).unwrap();
        let s = mpf_depth_scaling(&q).unwrap();
        // y = 110000: 7! = 5040 < y, 9! = 362880 > y ⇒ l = 4
        assert_eq!(s.l, 4);
        assert_eq!(s.k_deepest, 160);

        let q = ScalingQuery::new(3, 1e-2, 1.0).unwrap();
        let s = mpf_depth_scaling(&q).unwrap();
        // y = 300: 5! = 120 < y, 7! = 5040 > y ⇒ l = 3
        assert_eq!(s.l, 3);
    }

    #[test]
    fn lambert_w_reference_value() {
        let w = lambert_w(1.0).unwrap();
        assert_abs_diff_eq!(w, 0.5671432904097838, epsilon = 1e-12);
        let residual = w * w.exp() - 1.0;
        assert!(residual.abs() < 1e-12);
        assert_abs_diff_eq!(lambert_w(0.0).unwrap(), 0.0);
    }

    #[test]
    fn brute_force_and_lambert_agree_within_one() {
        for n_q in 3..=11u64 {
            for eps in [1e-2, 1e-3, 1e-4] {
                let s = mpf_depth_scaling(&ScalingQuery::new(n_q, eps, 1.0).unwrap()).unwrap();
                let rounded = s.l_lambert.round() as i64;
                assert!(
                    (s.l as i64 - rounded).abs() <= 1,
                    "N_q={n_q} eps={eps}: brute {} vs lambert {}",
                    s.l,
                    s.l_lambert
                );
            }
        }
    }

    #[test]
    fn invalid_scaling_queries_rejected() {
        assert!(ScalingQuery::new(0, 1e-2, 1.0).is_err());
        assert!(ScalingQuery::new(3, 1.0, 1.0).is_err());
        assert!(ScalingQuery::new(3, 1e-2, 0.0).is_err());
    }

    #[test]
    fn commuting_hamiltonian_single_step() {
        // h = 0 makes the splitting exact: one step suffices, so the
        // repetition count equals the term count.
        let h = build_ising(3, 0.8, 0.0).unwrap();
        let reps = pf_repetitions_to_accuracy(
            &h,
            1.0,
            ProductFormula::S1,
            1e-10,
            &ErrorMetric::OperatorNorm,
        )
        .unwrap();
        assert_eq!(reps, 2);
    }

    #[test]
    fn repetitions_monotone_in_accuracy() {
        let h = build_ising(2, 0.5, 1.0).unwrap();
        let reps = |eps: f64| {
            pf_repetitions_to_accuracy(&h, 1.0, ProductFormula::S1, eps, &ErrorMetric::OperatorNorm)
                .unwrap()
        };
        let (r2, r3, r4) = (reps(1e-2), reps(1e-3), reps(1e-4));
        assert!(r2 <= r3 && r3 <= r4, "{r2} {r3} {r4}");
    }

    #[test]
    fn spin_boson_s2_shallower_than_s1() {
        let h = build_spin_boson(1, 1, 1.0, -1.0, 0.0, 0.5).unwrap();
        let t = 10.0;
        let eps = 1e-2;
        let s1 =
            pf_repetitions_to_accuracy(&h, t, ProductFormula::S1, eps, &ErrorMetric::OperatorNorm)
                .unwrap();
        let s2 =
            pf_repetitions_to_accuracy(&h, t, ProductFormula::S2, eps, &ErrorMetric::OperatorNorm)
                .unwrap();
        assert!(s2 < s1, "S2 repetitions {s2} vs S1 {s1}");
    }

    #[test]
    fn observable_metric_runs() {
        let h = build_ising(2, 0.5, 1.0).unwrap();
        let state = StateVector::basis(4, 0).unwrap();
        let observable = pauli_matrix(&PauliString::new("ZI", 1.0).unwrap()).unwrap();
        let reps = pf_repetitions_to_accuracy(
            &h,
            0.5,
            ProductFormula::S1,
            1e-3,
            &ErrorMetric::Observable { state, observable },
        )
        .unwrap();
        assert!(reps >= 2);
    }
}
