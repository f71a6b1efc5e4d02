//! Exact evolution and Trotter-Suzuki product formulas.
//!
//! `ProductFormula` covers the first-order (Lie-Trotter) splitting and the
//! symmetric formulas of even order built by the Suzuki recursion
//!
//!   S₂(t)  = ∏_j exp(-i H_j t/2) · ∏_{j reversed} exp(-i H_j t/2)
//!   S₂ᵪ(t) = S₂ᵪ₋₂(s t)² · S₂ᵪ₋₂((1-4s) t) · S₂ᵪ₋₂(s t)²
//!
//! with `s = s_χ = (4 - 4^{1/(2χ-1)})^{-1}`.
//!
//! Matrix convention: `∏_{j=1}^{J} E_j = E_1 E_2 ⋯ E_J`, so the state-vector
//! path applies `E_J` first. Dense unitaries are only materialized up to
//! dimension [`MAX_UNITARY_DIM`]; state application works up to the dense cap.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonians::HamiltonianTerms;
use crate::operators::{DenseOperator, StateVector};

/// Cap on the dimension for which full dense unitaries are materialized.
pub const MAX_UNITARY_DIM: usize = 256;

/// A product formula of order 1 (Lie-Trotter) or even order 2χ (Suzuki).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductFormula {
    order: u32,
}

impl ProductFormula {
    pub const S1: ProductFormula = ProductFormula { order: 1 };
    pub const S2: ProductFormula = ProductFormula { order: 2 };
    pub const S4: ProductFormula = ProductFormula { order: 4 };

    pub fn new(order: u32) -> Result<Self> {
        if order == 1 || (order >= 2 && order.is_multiple_of(2)) {
            Ok(Self { order })
        } else {
            Err(Error::InvalidInput(format!(
                "product formula order must be 1 or even, got {order}"
            )))
        }
    }

    /// The order χ controlling the one-step error `O(t (t/k)^χ)`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_symmetric(&self) -> bool {
        self.order.is_multiple_of(2)
    }

    pub fn name(&self) -> String {
        format!("s{}", self.order)
    }

    /// Suzuki recursion constant `s_p = (4 - 4^{1/(2p-1)})^{-1}`.
    pub fn suzuki_constant(p: u32) -> f64 {
        1.0 / (4.0 - 4.0f64.powf(1.0 / (2.0 * p as f64 - 1.0)))
    }

    /// Number of `exp(-i H_j ·)` factors in one step of this formula for a
    /// `J`-term splitting: `J` for S₁ and `2J·5^{χ-1}` for S₂ᵪ.
    pub fn factors_per_step(&self, n_terms: usize) -> u64 {
        if self.order == 1 {
            n_terms as u64
        } else {
            2 * n_terms as u64 * 5u64.pow(self.order / 2 - 1)
        }
    }

    /// One formula step `S(τ)` applied to a state.
    pub fn apply(
        &self,
        h: &HamiltonianTerms,
        tau: f64,
        state: &StateVector,
    ) -> Result<StateVector> {
        if state.dim() != h.dim() {
            return Err(Error::InvalidInput(format!(
                "Hamiltonian dimension {} does not match state dimension {}",
                h.dim(),
                state.dim()
            )));
        }
        self.apply_inner(h, tau, state.clone())
    }

    fn apply_inner(
        &self,
        h: &HamiltonianTerms,
        tau: f64,
        state: StateVector,
    ) -> Result<StateVector> {
        match self.order {
            1 => {
                let mut out = state;
                for term in h.terms().iter().rev() {
                    out = term.apply_exponential(&out, tau)?;
                }
                Ok(out)
            }
            2 => {
                let half = tau / 2.0;
                let mut out = state;
                for term in h.terms() {
                    out = term.apply_exponential(&out, half)?;
                }
                for term in h.terms().iter().rev() {
                    out = term.apply_exponential(&out, half)?;
                }
                Ok(out)
            }
            order => {
                let inner = ProductFormula { order: order - 2 };
                let mut out = state;
                for sub in suzuki_subtimes(tau, order / 2) {
                    out = inner.apply_inner(h, sub, out)?;
                }
                Ok(out)
            }
        }
    }

    /// One formula step `S(τ)` as a dense unitary.
    pub fn matrix(&self, h: &HamiltonianTerms, tau: f64) -> Result<DenseOperator> {
        if h.dim() > MAX_UNITARY_DIM {
            return Err(Error::Capacity(format!(
                "dense unitaries are materialized only up to dimension {MAX_UNITARY_DIM}, \
                 got {}; use the state-application path",
                h.dim()
            )));
        }
        match self.order {
            1 => {
                let mut m = DMatrix::<Complex64>::identity(h.dim(), h.dim());
                for term in h.terms() {
                    m *= term.exponential_matrix(tau).matrix();
                }
                DenseOperator::from_matrix(m)
            }
            2 => {
                let half = tau / 2.0;
                let mut m = DMatrix::<Complex64>::identity(h.dim(), h.dim());
                for term in h.terms() {
                    m *= term.exponential_matrix(half).matrix();
                }
                for term in h.terms().iter().rev() {
                    m *= term.exponential_matrix(half).matrix();
                }
                DenseOperator::from_matrix(m)
            }
            order => {
                let inner = ProductFormula { order: order - 2 };
                let mut m = DMatrix::<Complex64>::identity(h.dim(), h.dim());
                for sub in suzuki_subtimes(tau, order / 2) {
                    m *= inner.matrix(h, sub)?.matrix();
                }
                DenseOperator::from_matrix(m)
            }
        }
    }

    /// `[S(t/k)]^k` applied to a state.
    pub fn apply_steps(
        &self,
        h: &HamiltonianTerms,
        t: f64,
        k: u64,
        state: &StateVector,
    ) -> Result<StateVector> {
        if k == 0 {
            return Err(Error::InvalidInput(
                "Trotter exponent k must be >= 1".into(),
            ));
        }
        let tau = t / k as f64;
        let mut out = state.clone();
        for _ in 0..k {
            out = self.apply_inner(h, tau, out)?;
        }
        Ok(out)
    }

    /// `[S(t/k)]^k` as a dense unitary (power by squaring).
    pub fn steps_matrix(&self, h: &HamiltonianTerms, t: f64, k: u64) -> Result<DenseOperator> {
        if k == 0 {
            return Err(Error::InvalidInput(
                "Trotter exponent k must be >= 1".into(),
            ));
        }
        let step = self.matrix(h, t / k as f64)?;
        let mut result = DMatrix::<Complex64>::identity(h.dim(), h.dim());
        let mut base = step.into_matrix();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        DenseOperator::from_matrix(result)
    }

    /// Evolve `ψ₀` with `[S(t/k)]^k` and measure `obs`.
    pub fn expectation(
        &self,
        h: &HamiltonianTerms,
        t: f64,
        k: u64,
        psi0: &StateVector,
        obs: &DenseOperator,
    ) -> Result<f64> {
        let evolved = self.apply_steps(h, t, k, psi0)?;
        evolved.expectation(obs)
    }
}

impl std::str::FromStr for ProductFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let digits = lower
            .strip_prefix('s')
            .ok_or_else(|| Error::InvalidInput(format!("unknown product formula '{s}'")))?;
        let order: u32 = digits
            .parse()
            .map_err(|_| Error::InvalidInput(format!("unknown product formula '{s}'")))?;
        ProductFormula::new(order)
    }
}

/// The five sub-times of the Suzuki recursion at level `p`; they sum to `t`.
fn suzuki_subtimes(t: f64, p: u32) -> [f64; 5] {
    let s = ProductFormula::suzuki_constant(p);
    let st = s * t;
    [st, st, (1.0 - 4.0 * s) * t, st, st]
}

/// Exact propagator `exp(-i H t)` via the Hermitian eigendecomposition of the
/// summed Hamiltonian. Subject to the dense-unitary cap; use [`exact_state`]
/// for larger systems.
pub fn exact_unitary(h: &HamiltonianTerms, t: f64) -> Result<DenseOperator> {
    if h.dim() > MAX_UNITARY_DIM {
        return Err(Error::Capacity(format!(
            "dense unitaries are materialized only up to dimension {MAX_UNITARY_DIM}, \
             got {}; use exact_state",
            h.dim()
        )));
    }
    let total = h.total_matrix();
    let (vals, vecs) = total.hermitian_eigen()?;
    let dim = vals.len();
    let mut phases = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, lam) in vals.iter().enumerate() {
        phases[(i, i)] = Complex64::new(0.0, -lam * t).exp();
    }
    DenseOperator::from_matrix(&vecs * phases * vecs.adjoint())
}

/// Exact time-evolved state `exp(-i H t)|ψ₀⟩`.
pub fn exact_state(h: &HamiltonianTerms, t: f64, psi0: &StateVector) -> Result<StateVector> {
    if psi0.dim() != h.dim() {
        return Err(Error::InvalidInput(format!(
            "Hamiltonian dimension {} does not match state dimension {}",
            h.dim(),
            psi0.dim()
        )));
    }
    let total = h.total_matrix();
    let (vals, vecs) = total.hermitian_eigen()?;
    let coeffs = vecs.adjoint() * psi0.amplitudes();
    let phased = nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter()
            .zip(coeffs.iter())
            .map(|(lam, co)| co * Complex64::new(0.0, -lam * t).exp()),
    );
    Ok(StateVector::from_dvector_unchecked(vecs * phased))
}

/// Exact expectation `⟨ψ₀| e^{iHt} O e^{-iHt} |ψ₀⟩`.
pub fn exact_expectation(
    h: &HamiltonianTerms,
    t: f64,
    psi0: &StateVector,
    obs: &DenseOperator,
) -> Result<f64> {
    exact_state(h, t, psi0)?.expectation(obs)
}

/// Spectral-norm distance between two operators.
pub fn operator_distance(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    DenseOperator::from_matrix(a.matrix() - b.matrix()).map(|d| d.spectral_norm())
}
