//! Dense complex linear algebra substrate: Pauli strings, truncated bosonic
//! ladder operators, state vectors, expectation values, and a fast path for
//! applying Pauli-rotation exponentials to states.
//!
//! Tensor convention: qubit 0 is the *leftmost* tensor factor, i.e. the most
//! significant bit of a computational basis index. `pauli_matrix("ZI")` is
//! `diag(1, 1, -1, -1)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on dense matrix / state dimension (11 qubits plus margin).
pub const MAX_DENSE_DIM: usize = 4096;

/// Tolerance for Hermiticity checks: `max |A - A^H|`.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Tolerance for unitarity checks: `max |A^H A - I|`.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidInput(format!(
                "unknown Pauli character '{other}' (expected one of I, X, Y, Z)"
            ))),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A weighted Pauli product `c * P_0 ⊗ P_1 ⊗ ... ⊗ P_{n-1}`.
///
/// The coefficient is real, so every `PauliString` is Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    paulis: Vec<Pauli>,
    coefficient: f64,
}

impl PauliString {
    pub fn new(label: &str, coefficient: f64) -> Result<Self> {
        if label.is_empty() {
            return Err(Error::InvalidInput("empty Pauli label".into()));
        }
        if !coefficient.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite Pauli coefficient {coefficient}"
            )));
        }
        if label.len() > MAX_DENSE_DIM.trailing_zeros() as usize {
            return Err(Error::Capacity(format!(
                "{}-qubit Pauli string exceeds the dense cap of {} dimensions",
                label.len(),
                MAX_DENSE_DIM
            )));
        }
        let paulis = label.chars().map(Pauli::from_char).collect::<Result<_>>()?;
        Ok(Self {
            paulis,
            coefficient,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.paulis.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.paulis.len()
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn paulis(&self) -> &[Pauli] {
        &self.paulis
    }

    pub fn label(&self) -> String {
        self.paulis.iter().map(|p| p.as_char()).collect()
    }

    /// Action on a computational basis state: `P |col⟩ = phase * |row⟩`.
    ///
    /// The phase excludes the coefficient.
    fn map_basis(&self, col: usize) -> (usize, Complex64) {
        let n = self.paulis.len();
        let mut row = col;
        let mut phase = Complex64::new(1.0, 0.0);
        for (q, p) in self.paulis.iter().enumerate() {
            let bit_pos = n - 1 - q;
            let bit = (col >> bit_pos) & 1;
            match p {
                Pauli::I => {}
                Pauli::X => {
                    row ^= 1 << bit_pos;
                }
                Pauli::Y => {
                    row ^= 1 << bit_pos;
                    // Y|0⟩ = i|1⟩, Y|1⟩ = -i|0⟩
                    phase *= if bit == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    };
                }
                Pauli::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        (row, phase)
    }

    /// `P |ψ⟩` including the coefficient.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "Pauli string acts on dimension {} but state has dimension {}",
                self.dim(),
                state.dim()
            )));
        }
        let mut out = DVector::zeros(state.dim());
        for col in 0..state.dim() {
            let (row, phase) = self.map_basis(col);
            out[row] += phase * self.coefficient * state.amps[col];
        }
        Ok(StateVector { amps: out })
    }

    /// Two Pauli strings commute iff they anti-commute on an even number of sites.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.n_qubits(), other.n_qubits());
        let anti = self
            .paulis
            .iter()
            .zip(&other.paulis)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }
}

/// Build the dense matrix of a weighted Pauli product.
pub fn pauli_matrix(p: &PauliString) -> Result<DenseOperator> {
    let dim = p.dim();
    check_dense_dim(dim)?;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let (row, phase) = p.map_basis(col);
        m[(row, col)] = phase * p.coefficient;
    }
    DenseOperator::from_matrix(m)
}

/// A square dense complex operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    m: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidInput(format!(
                "operator must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidInput("zero-dimensional operator".into()));
        }
        check_dense_dim(m.nrows())?;
        Ok(Self { m })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dense_dim(dim)?;
        Ok(Self {
            m: DMatrix::identity(dim, dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    /// Largest entry magnitude, `max_{ij} |A_ij|`.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A^H|`, zero for exactly Hermitian matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.m.adjoint();
        (&self.m - adj).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max |A^H A - I|`, zero for exactly unitary matrices.
    pub fn unitarity_defect(&self) -> f64 {
        let dim = self.dim();
        let prod = self.m.adjoint() * &self.m;
        (prod - DMatrix::<Complex64>::identity(dim, dim))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITICITY_TOL
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= UNITARITY_TOL
    }

    /// Spectral norm (largest singular value) via the Hermitian
    /// eigendecomposition of `A^H A`.
    pub fn spectral_norm(&self) -> f64 {
        let gram = self.m.adjoint() * &self.m;
        let eig = gram.symmetric_eigen();
        eig.eigenvalues
            .iter()
            .cloned()
            .fold(0.0f64, f64::max)
            .max(0.0)
            .sqrt()
    }

    /// Eigendecomposition of a Hermitian operator: `A = V diag(λ) V^H`
    /// with real eigenvalues.
    pub fn hermitian_eigen(&self) -> Result<(DVector<f64>, DMatrix<Complex64>)> {
        if !self.is_hermitian() {
            return Err(Error::InvalidInput(format!(
                "operator is not Hermitian (defect {:.3e})",
                self.hermiticity_defect()
            )));
        }
        let eig = self.m.clone().symmetric_eigen();
        Ok((eig.eigenvalues, eig.eigenvectors))
    }

    /// `A |ψ⟩` without normalization.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "operator dimension {} does not match state dimension {}",
                self.dim(),
                state.dim()
            )));
        }
        Ok(StateVector {
            amps: &self.m * &state.amps,
        })
    }
}

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dense_dim(dim)?;
        if index >= dim {
            return Err(Error::InvalidInput(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Wrap amplitudes that are already normalized (within 1e-12).
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        check_dense_dim(amps.len())?;
        let v = DVector::from_vec(amps);
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "state is not normalized: |ψ| = {norm}"
            )));
        }
        Ok(Self { amps: v })
    }

    /// Product state with every qubit tilted off the pole:
    /// `(cos θ |0⟩ + sin θ |1⟩)^⊗n`.
    ///
    /// Breaks the computational-basis symmetries that would otherwise
    /// suppress the leading Trotter error term in magnetization dynamics.
    pub fn tilted_product(n_qubits: usize, theta: f64) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidInput("need at least one qubit".into()));
        }
        let dim = 1usize
            .checked_shl(n_qubits as u32)
            .ok_or_else(|| Error::Capacity("qubit count overflows".into()))?;
        check_dense_dim(dim)?;
        let (cos_t, sin_t) = (theta.cos(), theta.sin());
        let amps: Vec<Complex64> = (0..dim)
            .map(|i| {
                let mut a = 1.0f64;
                for q in 0..n_qubits {
                    let bit = (i >> (n_qubits - 1 - q)) & 1;
                    a *= if bit == 0 { cos_t } else { sin_t };
                }
                Complex64::new(a, 0.0)
            })
            .collect();
        Self::from_amplitudes(amps)
    }

    /// Normalize arbitrary amplitudes; errors on the zero vector.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        check_dense_dim(amps.len())?;
        let mut v = DVector::from_vec(amps);
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidInput(
                "cannot normalize the zero vector".into(),
            ));
        }
        v /= Complex64::new(norm, 0.0);
        Ok(Self { amps: v })
    }

    /// Wrap amplitudes known to be normalized by construction (unitary maps
    /// of an already-normalized state). Skips the norm gate so rounding drift
    /// over long products cannot spuriously reject a state; the norm
    /// invariant is enforced at the propagator level by tests.
    pub(crate) fn from_dvector_unchecked(amps: DVector<Complex64>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest amplitude difference to another state.
    pub fn max_amp_diff(&self, other: &StateVector) -> f64 {
        (&self.amps - &other.amps)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// `⟨ψ| O |ψ⟩` for a Hermitian observable.
    ///
    /// The imaginary part must vanish below 1e-10 and is then discarded.
    pub fn expectation(&self, obs: &DenseOperator) -> Result<f64> {
        if obs.dim() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "observable dimension {} does not match state dimension {}",
                obs.dim(),
                self.dim()
            )));
        }
        if !obs.is_hermitian() {
            return Err(Error::InvalidInput(format!(
                "observable is not Hermitian (defect {:.3e})",
                obs.hermiticity_defect()
            )));
        }
        let val: Complex64 = self.amps.dotc(&(obs.matrix() * &self.amps));
        if val.im.abs() >= 1e-10 {
            return Err(Error::Numerical(format!(
                "expectation value has imaginary part {:.3e}",
                val.im
            )));
        }
        Ok(val.re)
    }
}

/// A bosonic mode truncated at occupation `n_max` (dimension `n_max + 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BosonicMode {
    n_max: usize,
}

impl BosonicMode {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }
}

/// Truncated ladder operators `(a, a†)` with `a|n⟩ = √n |n-1⟩` and `a|0⟩ = 0`.
pub fn boson_ladder(mode: BosonicMode) -> (DenseOperator, DenseOperator) {
    let dim = mode.dim();
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let a_dag = a.transpose();
    (DenseOperator { m: a }, DenseOperator { m: a_dag })
}

/// Apply `exp(-i θ P)` to a state along the analytic fast path
/// `cos(θ)|ψ⟩ - i sin(θ) P|ψ⟩`, valid because `P² = I` for a unit-coefficient
/// Pauli string. Norm is preserved exactly up to rounding.
pub fn apply_pauli_exponential(
    state: &StateVector,
    p: &PauliString,
    angle: f64,
) -> Result<StateVector> {
    if (p.coefficient().abs() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "Pauli exponential fast path requires |coefficient| = 1, got {}; \
             fold the magnitude into the angle",
            p.coefficient()
        )));
    }
    if state.dim() != p.dim() {
        return Err(Error::InvalidInput(format!(
            "Pauli string acts on dimension {} but state has dimension {}",
            p.dim(),
            state.dim()
        )));
    }
    Ok(rotate_by_pauli(state, p, angle * p.coefficient()))
}

/// `exp(-i θ P₁)|ψ⟩` for the unit-coefficient string underlying `p`.
///
/// Internal engine path: the weighted term `exp(-i c P τ)` is applied with
/// `θ = c τ`. Dimensions must already match.
pub(crate) fn rotate_by_pauli(state: &StateVector, p: &PauliString, theta: f64) -> StateVector {
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let mut out = state.amps.map(|c| c * cos_t);
    let minus_i_sin = Complex64::new(0.0, -sin_t);
    for col in 0..state.dim() {
        let (row, phase) = p.map_basis(col);
        out[row] += minus_i_sin * phase * state.amps[col];
    }
    StateVector { amps: out }
}

pub(crate) fn check_dense_dim(dim: usize) -> Result<()> {
    if dim > MAX_DENSE_DIM {
        return Err(Error::Capacity(format!(
            "dimension {dim} exceeds the dense cap of {MAX_DENSE_DIM}"
        )));
    }
    Ok(())
}

/// Kronecker product, `A ⊗ B`.
pub(crate) fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_z_matrix() {
        let p = PauliString::new("Z", 1.0).unwrap();
        let m = pauli_matrix(&p).unwrap();
        assert_eq!(m.entry(0, 0), c(1.0, 0.0));
        assert_eq!(m.entry(1, 1), c(-1.0, 0.0));
        assert_eq!(m.entry(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn pauli_zi_qubit_zero_leftmost() {
        let p = PauliString::new("ZI", 1.0).unwrap();
        let m = pauli_matrix(&p).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m.entry(i, i).re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn pauli_xx_antidiagonal() {
        let p = PauliString::new("XX", -0.5).unwrap();
        let m = pauli_matrix(&p).unwrap();
        for i in 0..4 {
            assert_eq!(m.entry(i, 3 - i), c(-0.5, 0.0));
            assert_eq!(m.entry(i, i), c(0.0, 0.0));
        }
    }

    #[test]
    fn pauli_y_matrix() {
        let p = PauliString::new("Y", 1.0).unwrap();
        let m = pauli_matrix(&p).unwrap();
        assert_eq!(m.entry(0, 1), c(0.0, -1.0));
        assert_eq!(m.entry(1, 0), c(0.0, 1.0));
    }

    #[test]
    fn empty_label_rejected() {
        assert!(matches!(
            PauliString::new("", 1.0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn real_coefficient_strings_are_hermitian() {
        for label in ["XYZ", "YY", "ZXZY", "IXYI"] {
            let m = pauli_matrix(&PauliString::new(label, -1.75).unwrap()).unwrap();
            assert!(m.hermiticity_defect() <= 1e-12, "label {label}");
        }
    }

    #[test]
    fn ladder_two_level() {
        let (a, _) = boson_ladder(BosonicMode::new(1));
        assert_eq!(a.entry(0, 1), c(1.0, 0.0));
        assert_eq!(a.entry(0, 0), c(0.0, 0.0));
        assert_eq!(a.entry(1, 0), c(0.0, 0.0));
        assert_eq!(a.entry(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn ladder_sqrt_rule_and_number_operator() {
        let (a, a_dag) = boson_ladder(BosonicMode::new(2));
        assert_abs_diff_eq!(a.entry(0, 1).re, 1.0);
        assert_abs_diff_eq!(a.entry(1, 2).re, 2.0f64.sqrt());
        let n_op = a_dag.matrix() * a.matrix();
        for (i, expect) in [0.0, 1.0, 2.0].iter().enumerate() {
            assert_abs_diff_eq!(n_op[(i, i)].re, *expect, epsilon = 1e-15);
        }
        // a_dag is the real transpose of a
        assert_eq!(a_dag.matrix(), &a.matrix().transpose());
    }

    #[test]
    fn number_operator_eigenvalues_exact() {
        let n_max = 5;
        let (a, a_dag) = boson_ladder(BosonicMode::new(n_max));
        let n_op = DenseOperator::from_matrix(a_dag.matrix() * a.matrix()).unwrap();
        let (vals, _) = n_op.hermitian_eigen().unwrap();
        let mut v: Vec<f64> = vals.iter().cloned().collect();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (i, val) in v.iter().enumerate() {
            assert_abs_diff_eq!(*val, i as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn exponential_identity_at_zero_angle() {
        let psi = random_state(3, 7);
        let p = PauliString::new("XYZ", 1.0).unwrap();
        let out = apply_pauli_exponential(&psi, &p, 0.0).unwrap();
        assert!(psi.max_amp_diff(&out) < 1e-15);
    }

    #[test]
    fn exponential_eigenstate_phase() {
        let psi = StateVector::basis(2, 0).unwrap();
        let p = PauliString::new("Z", 1.0).unwrap();
        let out = apply_pauli_exponential(&psi, &p, std::f64::consts::FRAC_PI_2).unwrap();
        // exp(-i π/2 Z)|0⟩ = -i|0⟩
        assert!((out.amplitude(0) - c(0.0, -1.0)).norm() < 1e-15);
        assert!(out.amplitude(1).norm() < 1e-15);
    }

    #[test]
    fn exponential_dimension_mismatch() {
        let psi = StateVector::basis(4, 0).unwrap();
        let p = PauliString::new("Z", 1.0).unwrap();
        assert!(matches!(
            apply_pauli_exponential(&psi, &p, 0.3),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn exponential_requires_unit_coefficient() {
        let psi = StateVector::basis(2, 0).unwrap();
        let p = PauliString::new("Z", 0.5).unwrap();
        assert!(apply_pauli_exponential(&psi, &p, 0.3).is_err());
    }

    fn random_state(n_qubits: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<Complex64> = (0..1usize << n_qubits)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        StateVector::normalized(amps).unwrap()
    }

    /// Dense oracle: exp(-iθP) via the Hermitian eigendecomposition of P.
    fn dense_exponential_oracle(p: &PauliString, theta: f64, psi: &StateVector) -> StateVector {
        let m = pauli_matrix(p).unwrap();
        let (vals, vecs) = m.hermitian_eigen().unwrap();
        let coeffs = vecs.adjoint() * psi.amplitudes();
        let phased = DVector::from_iterator(
            vals.len(),
            vals.iter()
                .zip(coeffs.iter())
                .map(|(lam, co)| co * Complex64::new(0.0, -lam * theta).exp()),
        );
        let amps = vecs * phased;
        StateVector::from_amplitudes(amps.iter().cloned().collect()).unwrap()
    }

    #[test]
    fn fast_path_matches_dense_oracle() {
        let labels = ["X", "Z", "XY", "ZZ", "XYZ", "YIZ", "XXYZ"];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut worst = 0.0f64;
        for trial in 0..100 {
            let label = labels[trial % labels.len()];
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let p = PauliString::new(label, sign).unwrap();
            let theta = 4.0 * (rng.random::<f64>() - 0.5);
            let psi = random_state(label.len(), 1000 + trial as u64);
            let fast = apply_pauli_exponential(&psi, &p, theta).unwrap();
            let slow = dense_exponential_oracle(&p, theta, &psi);
            worst = worst.max(fast.max_amp_diff(&slow));
            assert!((fast.norm() - 1.0).abs() < 1e-12);
        }
        assert!(worst < 1e-10, "max amplitude error {worst:e}");
    }

    #[test]
    fn expectation_identity_is_one() {
        let psi = random_state(2, 3);
        let id = DenseOperator::identity(4).unwrap();
        assert_abs_diff_eq!(psi.expectation(&id).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn expectation_z_eigenstates() {
        let z = pauli_matrix(&PauliString::new("Z", 1.0).unwrap()).unwrap();
        let one = StateVector::basis(2, 1).unwrap();
        assert_abs_diff_eq!(one.expectation(&z).unwrap(), -1.0);
        let plus = StateVector::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(plus.expectation(&z).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn expectation_rejects_non_hermitian() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let op = DenseOperator::from_matrix(m).unwrap();
        let psi = StateVector::basis(2, 0).unwrap();
        assert!(matches!(psi.expectation(&op), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn capacity_cap_enforced() {
        assert!(matches!(
            StateVector::basis(MAX_DENSE_DIM * 2, 0),
            Err(Error::Capacity(_))
        ));
    }
}
