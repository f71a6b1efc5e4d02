//! Multi-product formula engine: exact extrapolation weights, condition
//! numbers, well-conditioned sequence search, and the classical combination
//! of expectation values.
//!
//! For Trotter exponents `k_1 < ... < k_l` and a base formula of order χ the
//! weights solve the square linear system
//!
//!   Σ_j a_j = 1
//!   Σ_j a_j / k_j^η = 0   for  n = 0..l-2,
//!
//! with `η = χ + 2n` for symmetric base formulas and `η = χ + n` otherwise.
//! The system is a Vandermonde system in `1/k_j^stride`, hence nonsingular
//! for distinct exponents, and is solved exactly over arbitrary-precision
//! rationals; the condition number `‖a‖₁ = Σ|a_j|` falls out exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagators::ProductFormula;

/// A strictly increasing vector of Trotter exponents with its base formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentSequence {
    k: Vec<u64>,
    base: ProductFormula,
}

impl ExponentSequence {
    pub fn new(k: Vec<u64>, base: ProductFormula) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::InvalidInput("empty exponent sequence".into()));
        }
        if k[0] == 0 {
            return Err(Error::InvalidInput("Trotter exponents must be >= 1".into()));
        }
        if !k.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!(
                "Trotter exponents must be strictly increasing, got {k:?}"
            )));
        }
        Ok(Self { k, base })
    }

    pub fn exponents(&self) -> &[u64] {
        &self.k
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn base(&self) -> ProductFormula {
        self.base
    }

    /// Deepest exponent `k_l` (the circuit-depth proxy).
    pub fn deepest(&self) -> u64 {
        *self.k.last().expect("sequence is never empty")
    }

    /// Multiply every exponent by `alpha` (time rescaling for `t > 1`).
    pub fn rescaled(&self, alpha: u64) -> Result<Self> {
        if alpha == 0 {
            return Err(Error::InvalidInput("rescaling factor must be >= 1".into()));
        }
        Self::new(self.k.iter().map(|k| k * alpha).collect(), self.base)
    }

    /// The error-series exponent `η` for cancellation row `n`.
    fn eta(&self, n: u32) -> u32 {
        let chi = self.base.order();
        if self.base.is_symmetric() {
            chi + 2 * n
        } else {
            chi + n
        }
    }
}

/// Exact extrapolation weights with their condition number.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    a: Vec<BigRational>,
    norm1: BigRational,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.a
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.a.iter().map(rational_to_f64).collect()
    }

    /// Condition number `‖a‖₁` as an exact rational.
    pub fn norm1(&self) -> &BigRational {
        &self.norm1
    }

    pub fn norm1_f64(&self) -> f64 {
        rational_to_f64(&self.norm1)
    }

    /// Weights as `"p/q"` strings (reduced, denominator always printed).
    pub fn weights_strings(&self) -> Vec<String> {
        self.a.iter().map(rational_string).collect()
    }

    pub fn norm1_string(&self) -> String {
        rational_string(&self.norm1)
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational magnitude representable as f64")
}

fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Solve the weight constraints exactly for the given sequence.
///
/// All `l` cancellation sums run over the full index range; residuals of
/// every constraint are verified to be exactly zero before returning.
pub fn solve_weights(seq: &ExponentSequence) -> Result<WeightVector> {
    let l = seq.len();

    // Row 0: Σ a_j = 1. Rows n+1: Σ a_j / k_j^η(n) = 0 for n = 0..l-2.
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(l);
    let mut rhs: Vec<BigRational> = Vec::with_capacity(l);
    rows.push(vec![BigRational::one(); l]);
    rhs.push(BigRational::one());
    for n in 0..l.saturating_sub(1) {
        let eta = seq.eta(n as u32);
        let row = seq
            .k
            .iter()
            .map(|&k| BigRational::new(BigInt::one(), BigInt::from(k).pow(eta)))
            .collect();
        rows.push(row);
        rhs.push(BigRational::zero());
    }

    let a = solve_exact(rows.clone(), rhs.clone())?;

    // Exact residual verification: zero, not tolerance-based.
    for (row, want) in rows.iter().zip(&rhs) {
        let lhs: BigRational = row.iter().zip(&a).map(|(c, x)| c * x).sum();
        if &lhs != want {
            return Err(Error::Internal(format!(
                "weight constraint residual is non-zero for k={:?}",
                seq.k
            )));
        }
    }

    let norm1: BigRational = a.iter().map(|x| x.abs()).sum();
    Ok(WeightVector { a, norm1 })
}

/// Gaussian elimination with partial (largest-magnitude) pivoting over exact
/// rationals.
fn solve_exact(mut m: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Result<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .max_by(|&r1, &r2| m[r1][col].abs().cmp(&m[r2][col].abs()))
            .ok_or_else(|| {
                Error::Internal(
                    "singular weight system; cannot occur for distinct exponents".into(),
                )
            })?;
        m.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot_tail: Vec<BigRational> = m[col][col..n].to_vec();
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] / &pivot_tail[0];
            for (j, pivot_val) in (col..n).zip(&pivot_tail) {
                let delta = &factor * pivot_val;
                m[row][j] -= delta;
            }
            let delta = &factor * &b[col];
            b[row] -= delta;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for j in row + 1..n {
            acc -= &m[row][j] * &x[j];
        }
        x[row] = acc / &m[row][row];
    }
    Ok(x)
}

/// `‖a‖₁` of a solved weight vector.
pub fn condition_number(w: &WeightVector) -> f64 {
    w.norm1_f64()
}

/// A measured (or simulated) expectation value for one Trotter exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationRecord {
    pub k: u64,
    pub value: f64,
    /// `None` marks an exact (noise-free) evaluation.
    pub shots: Option<u64>,
    /// Magnitude of any injected non-algorithmic perturbation.
    pub epsilon_prime: f64,
}

impl ExpectationRecord {
    pub fn exact(k: u64, value: f64) -> Self {
        Self {
            k,
            value,
            shots: None,
            epsilon_prime: 0.0,
        }
    }
}

/// Classically combine per-exponent expectation values: `Σ_j a_j E_j`.
///
/// Records must match the sequence exponents one-to-one, in order.
pub fn combine_expectations(
    seq: &ExponentSequence,
    w: &WeightVector,
    records: &[ExpectationRecord],
) -> Result<f64> {
    if w.len() != seq.len() {
        return Err(Error::InvalidInput(format!(
            "weight count {} does not match sequence length {}",
            w.len(),
            seq.len()
        )));
    }
    if records.len() != seq.len() {
        return Err(Error::InvalidInput(format!(
            "got {} expectation records for a sequence of length {}",
            records.len(),
            seq.len()
        )));
    }
    for (rec, &k) in records.iter().zip(seq.exponents()) {
        if rec.k != k {
            return Err(Error::InvalidInput(format!(
                "expectation record for k={} does not match sequence exponent {}",
                rec.k, k
            )));
        }
    }
    Ok(w.weights_f64()
        .iter()
        .zip(records)
        .map(|(a, rec)| a * rec.value)
        .sum())
}

/// Worst-case non-algorithmic error contribution `‖a‖₁ · ε'`.
pub fn amplified_error_bound(w: &WeightVector, eps_prime: f64) -> Result<f64> {
    if eps_prime < 0.0 {
        return Err(Error::InvalidInput(format!(
            "perturbation magnitude must be non-negative, got {eps_prime}"
        )));
    }
    Ok(w.norm1_f64() * eps_prime)
}

/// Ranking objective for the sequence search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchObjective {
    /// Smallest condition number first.
    MinNorm1,
    /// Shallowest deepest-circuit first, among sequences under the threshold.
    MinDepth,
}

impl std::str::FromStr for SearchObjective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "norm1" | "min-norm1" => Ok(SearchObjective::MinNorm1),
            "depth" | "min-depth" => Ok(SearchObjective::MinDepth),
            other => Err(Error::InvalidInput(format!(
                "unknown search objective '{other}' (expected 'norm1' or 'depth')"
            ))),
        }
    }
}

/// Parameters for [`search_sequences`].
#[derive(Clone, Debug)]
pub struct SequenceSearch {
    pub length: usize,
    pub base: ProductFormula,
    pub k_min: u64,
    pub k_max: u64,
    pub threshold: f64,
    pub objective: SearchObjective,
}

/// Enumeration guard for the search space size.
const MAX_SEARCH_CANDIDATES: u128 = 1_000_000;

/// Enumerate all strictly increasing sequences in `[k_min, k_max]`, solve
/// their weights exactly, keep those with `‖a‖₁ <= threshold`, and rank them
/// by the chosen objective (ties broken by smaller `k_l`, then
/// lexicographically).
///
/// An empty result is not an error: no sequence passed the threshold.
pub fn search_sequences(params: &SequenceSearch) -> Result<Vec<(ExponentSequence, WeightVector)>> {
    if params.length == 0 {
        return Err(Error::InvalidInput("sequence length must be >= 1".into()));
    }
    if params.k_min == 0 {
        return Err(Error::InvalidInput("k_min must be >= 1".into()));
    }
    if params.k_max < params.k_min {
        return Err(Error::InvalidInput(format!(
            "empty exponent range [{}, {}]",
            params.k_min, params.k_max
        )));
    }
    let range = (params.k_max - params.k_min + 1) as usize;
    if range < params.length {
        return Err(Error::InvalidInput(format!(
            "range [{}, {}] holds fewer than l={} distinct exponents",
            params.k_min, params.k_max, params.length
        )));
    }
    if binomial(range as u128, params.length as u128) > MAX_SEARCH_CANDIDATES {
        return Err(Error::InvalidInput(format!(
            "search space C({range}, {}) exceeds the {MAX_SEARCH_CANDIDATES} candidate bound",
            params.length
        )));
    }
    if !(params.threshold.is_finite() && params.threshold > 0.0) {
        return Err(Error::InvalidInput(format!(
            "threshold must be positive and finite, got {}",
            params.threshold
        )));
    }

    let threshold = BigRational::from_float(params.threshold).ok_or_else(|| {
        Error::InvalidInput(format!("threshold {} is not finite", params.threshold))
    })?;

    let mut accepted = Vec::new();
    let mut indices: Vec<u64> = (0..params.length as u64)
        .map(|i| params.k_min + i)
        .collect();
    loop {
        let seq = ExponentSequence::new(indices.clone(), params.base)?;
        let w = solve_weights(&seq)?;
        if *w.norm1() <= threshold {
            accepted.push((seq, w));
        }
        if !advance(&mut indices, params.k_max) {
            break;
        }
    }

    match params.objective {
        SearchObjective::MinNorm1 => accepted.sort_by(|(sa, wa), (sb, wb)| {
            wa.norm1()
                .cmp(wb.norm1())
                .then(sa.deepest().cmp(&sb.deepest()))
                .then_with(|| sa.exponents().cmp(sb.exponents()))
        }),
        SearchObjective::MinDepth => accepted.sort_by(|(sa, wa), (sb, wb)| {
            sa.deepest()
                .cmp(&sb.deepest())
                .then(wa.norm1().cmp(wb.norm1()))
                .then_with(|| sa.exponents().cmp(sb.exponents()))
        }),
    }
    Ok(accepted)
}

/// Advance a strictly increasing combination in place; false when exhausted.
fn advance(indices: &mut [u64], k_max: u64) -> bool {
    let l = indices.len();
    let mut i = l;
    while i > 0 {
        i -= 1;
        let cap = k_max - (l - 1 - i) as u64;
        if indices[i] < cap {
            indices[i] += 1;
            for j in i + 1..l {
                indices[j] = indices[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result.saturating_mul(n - i) / (i + 1);
    }
    result
}

/// JSON-friendly view of a solved sequence: exact `"p/q"` weights plus float
/// shadows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightReport {
    pub k: Vec<u64>,
    pub base: String,
    pub symmetric: bool,
    pub weights_exact: Vec<String>,
    pub weights: Vec<f64>,
    pub norm1_exact: String,
    pub norm1: f64,
}

impl WeightReport {
    pub fn new(seq: &ExponentSequence, w: &WeightVector) -> Self {
        Self {
            k: seq.exponents().to_vec(),
            base: seq.base().name(),
            symmetric: seq.base().is_symmetric(),
            weights_exact: w.weights_strings(),
            weights: w.weights_f64(),
            norm1_exact: w.norm1_string(),
            norm1: w.norm1_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn seq(k: &[u64], base: ProductFormula) -> ExponentSequence {
        ExponentSequence::new(k.to_vec(), base).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn single_point_is_the_formula_itself() {
        let w = solve_weights(&seq(&[5], ProductFormula::S1)).unwrap();
        assert_eq!(w.weights(), &[rat(1, 1)]);
        assert_eq!(w.norm1(), &rat(1, 1));
    }

    type PairCase = (&'static [u64], &'static [(i64, i64)], (i64, i64));

    #[test]
    fn reference_s1_pairs() {
        let cases: &[PairCase] = &[
            (&[1, 2], &[(-1, 1), (2, 1)], (3, 1)),
            (&[1, 3], &[(-1, 2), (3, 2)], (2, 1)),
            (&[2, 4], &[(-1, 1), (2, 1)], (3, 1)),
            (&[2, 5], &[(-2, 3), (5, 3)], (7, 3)),
            (&[6, 7], &[(-6, 1), (7, 1)], (13, 1)),
        ];
        for (k, want, norm) in cases {
            let w = solve_weights(&seq(k, ProductFormula::S1)).unwrap();
            let expect: Vec<BigRational> = want.iter().map(|&(n, d)| rat(n, d)).collect();
            assert_eq!(w.weights(), expect.as_slice(), "k={k:?}");
            assert_eq!(w.norm1(), &rat(norm.0, norm.1), "k={k:?}");
        }
    }

    #[test]
    fn reference_s1_triples() {
        let w = solve_weights(&seq(&[1, 2, 6], ProductFormula::S1)).unwrap();
        assert_eq!(
            w.weights(),
            &[rat(1, 5), rat(-1, 1), rat(9, 5)],
            "[1,2,6] weights"
        );
        assert_eq!(w.norm1(), &rat(3, 1));

        let w = solve_weights(&seq(&[1, 2, 7], ProductFormula::S1)).unwrap();
        assert_eq!(w.weights(), &[rat(1, 6), rat(-4, 5), rat(49, 30)]);
        assert_eq!(w.norm1(), &rat(13, 5));
        assert_abs_diff_eq!(w.norm1_f64(), 2.6, epsilon = 1e-15);
    }

    #[test]
    fn reference_ill_conditioned_runs() {
        // Middle weight is 625/4: it is the unique value with exactly zero
        // constraint residuals, and it implies ‖a‖₁ = 1555/3 ≈ 518.33.
        let w = solve_weights(&seq(&[3, 4, 5, 6, 7], ProductFormula::S1)).unwrap();
        assert_eq!(
            w.weights(),
            &[
                rat(27, 8),
                rat(-128, 3),
                rat(625, 4),
                rat(-216, 1),
                rat(2401, 24)
            ]
        );
        assert_eq!(w.norm1(), &rat(1555, 3));
        assert_abs_diff_eq!(w.norm1_f64(), 518.3333333333334, epsilon = 1e-10);

        let w = solve_weights(&seq(&[1, 2, 3, 4, 5, 6, 7], ProductFormula::S1)).unwrap();
        assert_eq!(
            w.weights(),
            &[
                rat(1, 720),
                rat(-8, 15),
                rat(243, 16),
                rat(-1024, 9),
                rat(15625, 48),
                rat(-1944, 5),
                rat(117649, 720)
            ]
        );
        // ‖a‖₁ = 9065/9 ≈ 1007.22 exactly
        assert_eq!(w.norm1(), &rat(9065, 9));
    }

    #[test]
    fn s2_base_uses_even_powers() {
        // k=[1,2], S2: a1 + a2 = 1, a1 + a2/4 = 0
        let w = solve_weights(&seq(&[1, 2], ProductFormula::S2)).unwrap();
        assert_eq!(w.weights(), &[rat(-1, 3), rat(4, 3)]);
        assert_eq!(w.norm1(), &rat(5, 3));
    }

    #[test]
    fn weights_scale_invariant() {
        // The constraint system is homogeneous in k, so [m, 2m] shares the
        // weights of [1, 2].
        for m in [1u64, 2, 3, 5] {
            let w = solve_weights(&seq(&[m, 2 * m], ProductFormula::S1)).unwrap();
            assert_eq!(w.weights(), &[rat(-1, 1), rat(2, 1)]);
        }
    }

    #[test]
    fn rejects_non_increasing() {
        assert!(ExponentSequence::new(vec![2, 2], ProductFormula::S1).is_err());
        assert!(ExponentSequence::new(vec![3, 1], ProductFormula::S1).is_err());
        assert!(ExponentSequence::new(vec![0, 1], ProductFormula::S1).is_err());
        assert!(ExponentSequence::new(vec![], ProductFormula::S1).is_err());
    }

    #[test]
    fn condition_number_values() {
        let w = solve_weights(&seq(&[1], ProductFormula::S1)).unwrap();
        assert_abs_diff_eq!(condition_number(&w), 1.0);
        let w = solve_weights(&seq(&[6, 7], ProductFormula::S1)).unwrap();
        assert_abs_diff_eq!(condition_number(&w), 13.0);
    }

    #[test]
    fn harmonic_condition_number_grows() {
        for base in [ProductFormula::S1, ProductFormula::S2] {
            let mut prev = BigRational::zero();
            for l in 1..=7u64 {
                let k: Vec<u64> = (1..=l).collect();
                let w = solve_weights(&seq(&k, base)).unwrap();
                assert!(
                    w.norm1() > &prev,
                    "‖a‖₁ not strictly increasing at l={l} for {}",
                    base.name()
                );
                prev = w.norm1().clone();
            }
        }
    }

    #[test]
    fn combine_passes_constants_through() {
        let s = seq(&[1, 2, 7], ProductFormula::S1);
        let w = solve_weights(&s).unwrap();
        let records: Vec<ExpectationRecord> = s
            .exponents()
            .iter()
            .map(|&k| ExpectationRecord::exact(k, 0.7))
            .collect();
        let combined = combine_expectations(&s, &w, &records).unwrap();
        assert_abs_diff_eq!(combined, 0.7, epsilon = 1e-14);
    }

    #[test]
    fn combine_rejects_mismatches() {
        let s = seq(&[1, 2], ProductFormula::S1);
        let w = solve_weights(&s).unwrap();
        let short = vec![ExpectationRecord::exact(1, 0.5)];
        assert!(combine_expectations(&s, &w, &short).is_err());
        let wrong_k = vec![
            ExpectationRecord::exact(1, 0.5),
            ExpectationRecord::exact(3, 0.5),
        ];
        assert!(combine_expectations(&s, &w, &wrong_k).is_err());
    }

    #[test]
    fn amplified_bound_examples() {
        let w = solve_weights(&seq(&[1, 2], ProductFormula::S1)).unwrap();
        assert_abs_diff_eq!(amplified_error_bound(&w, 1e-3).unwrap(), 3e-3);
        let w1 = solve_weights(&seq(&[4], ProductFormula::S1)).unwrap();
        assert_abs_diff_eq!(amplified_error_bound(&w1, 0.37).unwrap(), 0.37);
        assert!(amplified_error_bound(&w1, -1.0).is_err());
    }

    #[test]
    fn search_range_one_to_five() {
        let results = search_sequences(&SequenceSearch {
            length: 2,
            base: ProductFormula::S1,
            k_min: 1,
            k_max: 5,
            threshold: 3.0,
            objective: SearchObjective::MinNorm1,
        })
        .unwrap();
        let seqs: Vec<&[u64]> = results.iter().map(|(s, _)| s.exponents()).collect();
        for want in [&[1, 2][..], &[1, 3], &[2, 4], &[2, 5]] {
            assert!(seqs.contains(&want), "missing {want:?} in {seqs:?}");
        }
        // Ranked by ‖a‖₁ with k_l tie-break: [1,2] (3) precedes [2,4] (3).
        let pos = |k: &[u64]| seqs.iter().position(|s| *s == k).unwrap();
        assert!(pos(&[1, 2]) < pos(&[2, 4]));
        // [1,3] (norm 2) comes before every norm-3 pair.
        assert!(pos(&[1, 3]) < pos(&[1, 2]));
    }

    #[test]
    fn search_ill_conditioned_range_is_empty() {
        let results = search_sequences(&SequenceSearch {
            length: 2,
            base: ProductFormula::S1,
            k_min: 6,
            k_max: 7,
            threshold: 3.0,
            objective: SearchObjective::MinNorm1,
        })
        .unwrap();
        assert!(results.is_empty());
    }

    #[test]
    fn harmonic_s2_triple_fails_symmetric_threshold() {
        // k_j = j with an S2 base is already ill-conditioned at l = 3
        // against the 1.7 threshold used for symmetric formulas.
        let results = search_sequences(&SequenceSearch {
            length: 3,
            base: ProductFormula::S2,
            k_min: 1,
            k_max: 3,
            threshold: 1.7,
            objective: SearchObjective::MinNorm1,
        })
        .unwrap();
        assert!(results.is_empty());
        let w = solve_weights(&seq(&[1, 2, 3], ProductFormula::S2)).unwrap();
        assert!(w.norm1_f64() > 1.7);
    }

    #[test]
    fn search_rejects_undersized_range() {
        assert!(search_sequences(&SequenceSearch {
            length: 3,
            base: ProductFormula::S1,
            k_min: 1,
            k_max: 2,
            threshold: 3.0,
            objective: SearchObjective::MinNorm1,
        })
        .is_err());
    }

    #[test]
    fn rescaling_multiplies_exponents() {
        let s = seq(&[1, 2], ProductFormula::S1);
        let scaled = s.rescaled(3).unwrap();
        assert_eq!(scaled.exponents(), &[3, 6]);
        assert!(s.rescaled(0).is_err());
    }

    #[test]
    fn order_boost_over_base_formula() {
        // Scaling the whole sequence [m, 2m] and combining exact expectation
        // values must steepen the error slope over the base PF by >= l-1.
        use crate::build_ising;
        use crate::operators::{pauli_matrix, PauliString, StateVector};
        use crate::propagators::exact_expectation;
        use crate::util::log_log_slope;

        let h = build_ising(2, 0.5, 1.0).unwrap();
        let t = 0.5;
        let psi0 = StateVector::tilted_product(2, 0.2).unwrap();
        let z0 = pauli_matrix(&PauliString::new("ZI", 1.0).unwrap()).unwrap();
        let exact = exact_expectation(&h, t, &psi0, &z0).unwrap();
        let pf = ProductFormula::S1;

        let scales: Vec<u64> = (1..=6).collect();
        let mut pf_errs = Vec::new();
        let mut mpf_errs = Vec::new();
        for &m in &scales {
            pf_errs.push((pf.expectation(&h, t, m, &psi0, &z0).unwrap() - exact).abs());
            let s = seq(&[m, 2 * m], pf);
            let w = solve_weights(&s).unwrap();
            let records: Vec<ExpectationRecord> = s
                .exponents()
                .iter()
                .map(|&k| {
                    ExpectationRecord::exact(k, pf.expectation(&h, t, k, &psi0, &z0).unwrap())
                })
                .collect();
            let combined = combine_expectations(&s, &w, &records).unwrap();
            mpf_errs.push((combined - exact).abs());
        }
        let xs: Vec<f64> = scales.iter().map(|&m| m as f64).collect();
        let s_pf = log_log_slope(&xs, &pf_errs).unwrap();
        let s_mpf = log_log_slope(&xs, &mpf_errs).unwrap();
        // l = 2: the combination gains at least one order
        assert!(
            s_pf - s_mpf >= 1.0 - 0.15,
            "boost {} too small (pf {s_pf}, mpf {s_mpf})",
            s_pf - s_mpf
        );
    }

    #[test]
    fn report_round_trips_to_json() {
        let s = seq(&[1, 2, 7], ProductFormula::S1);
        let w = solve_weights(&s).unwrap();
        let report = WeightReport::new(&s, &w);
        let json = serde_json::to_string(&report).unwrap();
        let back: WeightReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.k, vec![1, 2, 7]);
        assert_eq!(back.weights_exact, vec!["1/6", "-4/5", "49/30"]);
        assert_eq!(back.norm1_exact, "13/5");
        assert_abs_diff_eq!(back.norm1, 2.6, epsilon = 1e-15);
    }

    proptest! {
        /// Constraints hold exactly (zero residual) for arbitrary sequences.
        #[test]
        fn weight_constraints_exact(
            start in 1u64..20,
            gaps in proptest::collection::vec(1u64..5, 0..5),
            symmetric in proptest::bool::ANY,
        ) {
            let mut k = vec![start];
            for g in gaps {
                k.push(k.last().unwrap() + g);
            }
            let base = if symmetric { ProductFormula::S2 } else { ProductFormula::S1 };
            let s = ExponentSequence::new(k, base).unwrap();
            let w = solve_weights(&s).unwrap();

            let sum: BigRational = w.weights().iter().sum();
            prop_assert_eq!(sum, BigRational::one());
            for n in 0..s.len().saturating_sub(1) {
                let eta = s.eta(n as u32);
                let resid: BigRational = w
                    .weights()
                    .iter()
                    .zip(s.exponents())
                    .map(|(a, &kj)| a / BigRational::from_integer(BigInt::from(kj).pow(eta)))
                    .sum();
                prop_assert_eq!(resid, BigRational::zero());
            }
        }

        /// Combining identical records returns the record value (Σa = 1).
        #[test]
        fn combine_affine_identity(value in -1.0f64..1.0) {
            let s = seq(&[1, 3, 4], ProductFormula::S2);
            let w = solve_weights(&s).unwrap();
            let records: Vec<ExpectationRecord> = s
                .exponents()
                .iter()
                .map(|&k| ExpectationRecord::exact(k, value))
                .collect();
            let combined = combine_expectations(&s, &w, &records).unwrap();
            prop_assert!((combined - value).abs() < 1e-12);
        }
    }
}
