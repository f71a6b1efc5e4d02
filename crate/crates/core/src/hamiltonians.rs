//! Model Hamiltonians as ordered lists of exponentiable terms `H = Σ_j H_j`.
//!
//! Each term is either a group of mutually commuting Pauli strings (evolved
//! exactly by sequential Pauli rotations) or a dense Hermitian block (evolved
//! through its cached eigendecomposition).

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{
    boson_ladder, check_dense_dim, kron, pauli_matrix, rotate_by_pauli, BosonicMode, DenseOperator,
    PauliString, StateVector, HERMITICITY_TOL,
};

/// The operator content of a single term `H_j`.
#[derive(Clone, Debug)]
pub enum TermOperator {
    /// Mutually commuting weighted Pauli strings; their sequential rotations
    /// compose to the exact exponential of the sum.
    PauliGroup(Vec<PauliString>),
    /// Arbitrary dense Hermitian block.
    Dense(DenseOperator),
}

/// One exponentiable term of a Hamiltonian splitting.
#[derive(Debug)]
pub struct HamiltonianTerm {
    label: String,
    op: TermOperator,
    eigen: OnceLock<(DVector<f64>, DMatrix<Complex64>)>,
}

impl Clone for HamiltonianTerm {
    fn clone(&self) -> Self {
        Self {
            label: self.label.clone(),
            op: self.op.clone(),
            eigen: OnceLock::new(),
        }
    }
}

impl HamiltonianTerm {
    pub fn pauli_group(label: impl Into<String>, paulis: Vec<PauliString>) -> Result<Self> {
        if paulis.is_empty() {
            return Err(Error::InvalidInput("empty Pauli group".into()));
        }
        let n = paulis[0].n_qubits();
        for p in &paulis {
            if p.n_qubits() != n {
                return Err(Error::InvalidInput("Pauli group mixes qubit counts".into()));
            }
        }
        for (i, p) in paulis.iter().enumerate() {
            for q in &paulis[i + 1..] {
                if !p.commutes_with(q) {
                    return Err(Error::InvalidInput(format!(
                        "Pauli group members {} and {} do not commute",
                        p.label(),
                        q.label()
                    )));
                }
            }
        }
        Ok(Self {
            label: label.into(),
            op: TermOperator::PauliGroup(paulis),
            eigen: OnceLock::new(),
        })
    }

    pub fn dense(label: impl Into<String>, op: DenseOperator) -> Result<Self> {
        if op.hermiticity_defect() > HERMITICITY_TOL {
            return Err(Error::InvalidInput(format!(
                "Hamiltonian term is not Hermitian (defect {:.3e})",
                op.hermiticity_defect()
            )));
        }
        Ok(Self {
            label: label.into(),
            op: TermOperator::Dense(op),
            eigen: OnceLock::new(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn operator(&self) -> &TermOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        match &self.op {
            TermOperator::PauliGroup(ps) => ps[0].dim(),
            TermOperator::Dense(op) => op.dim(),
        }
    }

    pub fn to_matrix(&self) -> DenseOperator {
        match &self.op {
            TermOperator::PauliGroup(ps) => {
                let dim = ps[0].dim();
                let mut m = DMatrix::<Complex64>::zeros(dim, dim);
                for p in ps {
                    m += pauli_matrix(p)
                        .expect("group dim already validated")
                        .matrix();
                }
                DenseOperator::from_matrix(m).expect("dim already validated")
            }
            TermOperator::Dense(op) => op.clone(),
        }
    }

    fn cached_eigen(&self) -> &(DVector<f64>, DMatrix<Complex64>) {
        self.eigen.get_or_init(|| {
            self.to_matrix()
                .hermitian_eigen()
                .expect("term Hermiticity validated at construction")
        })
    }

    /// `exp(-i H_j τ) |ψ⟩`.
    pub fn apply_exponential(&self, state: &StateVector, tau: f64) -> Result<StateVector> {
        if state.dim() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "term dimension {} does not match state dimension {}",
                self.dim(),
                state.dim()
            )));
        }
        match &self.op {
            TermOperator::PauliGroup(ps) => {
                let mut out = state.clone();
                for p in ps {
                    out = rotate_by_pauli(&out, p, p.coefficient() * tau);
                }
                Ok(out)
            }
            TermOperator::Dense(_) => {
                let (vals, vecs) = self.cached_eigen();
                let coeffs = vecs.adjoint() * state.amplitudes();
                let phased = DVector::from_iterator(
                    vals.len(),
                    vals.iter()
                        .zip(coeffs.iter())
                        .map(|(lam, co)| co * Complex64::new(0.0, -lam * tau).exp()),
                );
                Ok(StateVector::from_dvector_unchecked(vecs * phased))
            }
        }
    }

    /// Dense `exp(-i H_j τ)`.
    pub fn exponential_matrix(&self, tau: f64) -> DenseOperator {
        let (vals, vecs) = self.cached_eigen();
        let dim = vals.len();
        let mut phases = DMatrix::<Complex64>::zeros(dim, dim);
        for (i, lam) in vals.iter().enumerate() {
            phases[(i, i)] = Complex64::new(0.0, -lam * tau).exp();
        }
        let m = vecs * phases * vecs.adjoint();
        DenseOperator::from_matrix(m).expect("dim already validated")
    }
}

/// A Hamiltonian split into ordered exponentiable terms.
#[derive(Clone, Debug)]
pub struct HamiltonianTerms {
    model: String,
    dim: usize,
    terms: Vec<HamiltonianTerm>,
}

impl HamiltonianTerms {
    pub fn new(model: impl Into<String>, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("Hamiltonian has no terms".into()));
        }
        let dim = terms[0].dim();
        check_dense_dim(dim)?;
        for t in &terms {
            if t.dim() != dim {
                return Err(Error::InvalidInput(format!(
                    "term '{}' has dimension {} but expected {}",
                    t.label(),
                    t.dim(),
                    dim
                )));
            }
        }
        Ok(Self {
            model: model.into(),
            dim,
            terms,
        })
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    /// The full Hamiltonian matrix `Σ_j H_j`.
    pub fn total_matrix(&self) -> DenseOperator {
        let mut m = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        for t in &self.terms {
            m += t.to_matrix().matrix();
        }
        DenseOperator::from_matrix(m).expect("dim already validated")
    }
}

/// Transverse-field Ising chain split into a ZZ bond term and an X field term:
/// `H₁ = -J Σ_i Z_i Z_{i+1}`, `H₂ = -h Σ_i X_i`.
pub fn build_ising(n_spins: usize, coupling: f64, field: f64) -> Result<HamiltonianTerms> {
    if n_spins < 2 {
        return Err(Error::InvalidInput(format!(
            "Ising chain needs at least 2 spins, got {n_spins}"
        )));
    }
    check_dense_dim(1usize << n_spins)?;

    let site = |q: usize, p: char| -> String {
        (0..n_spins).map(|i| if i == q { p } else { 'I' }).collect()
    };
    let bond = |q: usize| -> String {
        (0..n_spins)
            .map(|i| if i == q || i == q + 1 { 'Z' } else { 'I' })
            .collect()
    };

    let zz: Vec<PauliString> = (0..n_spins - 1)
        .map(|q| PauliString::new(&bond(q), -coupling))
        .collect::<Result<_>>()?;
    let x: Vec<PauliString> = (0..n_spins)
        .map(|q| PauliString::new(&site(q, 'X'), -field))
        .collect::<Result<_>>()?;

    HamiltonianTerms::new(
        format!("ising(n={n_spins}, J={coupling}, h={field})"),
        vec![
            HamiltonianTerm::pauli_group("zz_bonds", zz)?,
            HamiltonianTerm::pauli_group("x_field", x)?,
        ],
    )
}

/// Spin-boson model: a two-level system coupled to `M` resonant bosonic
/// modes truncated at occupation `n_max`.
///
/// `H = Σ_k ω a†_k a_k + (ω_s/2) Z + Δ X + Σ_k g X (a†_k + a_k)`
///
/// Tensor order: spin ⊗ mode 1 ⊗ ... ⊗ mode M. Terms are grouped as the free
/// boson sum, the spin block, and one coupling term per mode (in mode order).
pub fn build_spin_boson(
    modes: usize,
    n_max: usize,
    omega: f64,
    omega_s: f64,
    delta: f64,
    g: f64,
) -> Result<HamiltonianTerms> {
    if modes < 1 {
        return Err(Error::InvalidInput("need at least one bosonic mode".into()));
    }
    if n_max < 1 {
        return Err(Error::InvalidInput(
            "bosonic truncation n_max must be at least 1".into(),
        ));
    }
    let mode_dim = n_max + 1;
    let dim = 2usize
        .checked_mul(mode_dim.checked_pow(modes as u32).ok_or_else(|| {
            Error::Capacity(format!(
                "(n_max+1)^M overflows for M={modes}, n_max={n_max}"
            ))
        })?)
        .ok_or_else(|| Error::Capacity("spin-boson dimension overflows".into()))?;
    check_dense_dim(dim)?;

    let id2 = DMatrix::<Complex64>::identity(2, 2);
    let id_mode = DMatrix::<Complex64>::identity(mode_dim, mode_dim);
    let (a, a_dag) = boson_ladder(BosonicMode::new(n_max));
    let number_op = a_dag.matrix() * a.matrix();
    let x_plus = a_dag.matrix() + a.matrix();

    let z2 = pauli_matrix(&PauliString::new("Z", 1.0)?)?.into_matrix();
    let x2 = pauli_matrix(&PauliString::new("X", 1.0)?)?.into_matrix();

    // Embed a single-mode operator at mode index k (0-based), spin factor given.
    let embed = |spin_op: &DMatrix<Complex64>, mode_op: &DMatrix<Complex64>, k: usize| {
        let mut m = spin_op.clone();
        for j in 0..modes {
            m = kron(&m, if j == k { mode_op } else { &id_mode });
        }
        m
    };
    let scale = |m: DMatrix<Complex64>, s: f64| m * Complex64::new(s, 0.0);

    // Free boson: Σ_k ω a†_k a_k
    let mut free = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..modes {
        free += scale(embed(&id2, &number_op, k), omega);
    }

    // Spin: (ω_s/2) Z + Δ X, identity on every mode
    let spin =
        scale(embed(&z2, &id_mode, 0), omega_s / 2.0) + scale(embed(&x2, &id_mode, 0), delta);

    let mut terms = vec![
        HamiltonianTerm::dense("free_boson", DenseOperator::from_matrix(free)?)?,
        HamiltonianTerm::dense("spin", DenseOperator::from_matrix(spin)?)?,
    ];
    for k in 0..modes {
        let coupling = scale(embed(&x2, &x_plus, k), g);
        terms.push(HamiltonianTerm::dense(
            format!("coupling_mode_{k}"),
            DenseOperator::from_matrix(coupling)?,
        )?);
    }

    HamiltonianTerms::new(
        format!(
            "spin_boson(M={modes}, n_max={n_max}, omega={omega}, omega_s={omega_s}, delta={delta}, g={g})"
        ),
        terms,
    )
}
