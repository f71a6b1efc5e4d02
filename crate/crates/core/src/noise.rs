//! Non-algorithmic error sources and the mitigation math around them:
//! binomial shot sampling, adversarial sign-aligned perturbations, the
//! ill-conditioned Bernoulli sampling demo, synthetic zero-noise
//! extrapolation with an exponential fit, and the R_ZZ twirl-set check.
//!
//! Determinism: every stochastic routine takes an explicit seed and derives
//! one counter-based RNG stream per task, so results are bit-identical
//! across runs regardless of evaluation order.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mpf::{solve_weights, ExponentSequence};
use crate::operators::{pauli_matrix, PauliString};
use crate::propagators::ProductFormula;

/// A finite-shot measurement model with a deterministic seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotModel {
    pub shots: u64,
    pub seed: u64,
}

impl ShotModel {
    pub fn new(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidInput("shot count must be >= 1".into()));
        }
        Ok(Self { shots, seed })
    }

    /// Independent stream for a sub-task; identical `(seed, stream)` pairs
    /// reproduce identical draws.
    pub fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Sample a ±1-observable expectation with binomial shot noise:
/// `n₊ ~ Binomial(shots, (1+E)/2)`, estimate `2 n₊/shots - 1`.
pub fn sample_expectation(e_true: f64, model: ShotModel) -> Result<f64> {
    sample_expectation_stream(e_true, model, 0)
}

/// As [`sample_expectation`] on an explicit per-task stream.
pub fn sample_expectation_stream(e_true: f64, model: ShotModel, stream: u64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&e_true) {
        return Err(Error::InvalidInput(format!(
            "expectation of a ±1 observable must lie in [-1, 1], got {e_true}"
        )));
    }
    let p = (1.0 + e_true) / 2.0;
    let mut rng = model.stream(stream);
    let dist = Binomial::new(model.shots, p)
        .map_err(|e| Error::Internal(format!("binomial setup failed: {e}")))?;
    let n_plus = dist.sample(&mut rng);
    Ok(2.0 * n_plus as f64 / model.shots as f64 - 1.0)
}

/// Adversarial perturbation `E_j → E_j + sign(a_j) ε'` with `sign(0) = +1`.
pub fn inject_perturbation(e_j: f64, a_j: f64, eps_prime: f64) -> f64 {
    let sign = if a_j < 0.0 { -1.0 } else { 1.0 };
    e_j + sign * eps_prime
}

/// Outcome of one ill-conditioned Bernoulli sampling experiment.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BernoulliDemo {
    /// `|E^l(M) - p|`
    pub error: f64,
    /// Condition number of the forced `k_j = j` sequence.
    pub norm1: f64,
}

/// Estimate a Bernoulli success probability `p` through the MPF combination
/// with the ill-conditioned harmonic sequence `k_j = j`.
///
/// Each `E_j(M)` is the mean of `M` Bernoulli draws; the weighted combination
/// is unbiased but its sampling error is amplified by `‖a‖₁`.
pub fn bernoulli_mpf_demo(
    p: f64,
    samples_per_point: u64,
    l: usize,
    base: ProductFormula,
    seed: u64,
) -> Result<BernoulliDemo> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::InvalidInput(format!(
            "Bernoulli probability must lie in (0, 1), got {p}"
        )));
    }
    let seq = ExponentSequence::new((1..=l as u64).collect(), base)?;
    let w = solve_weights(&seq)?;
    let estimate = bernoulli_weighted_mean(p, samples_per_point, &w.weights_f64(), seed)?;
    Ok(BernoulliDemo {
        error: (estimate - p).abs(),
        norm1: w.norm1_f64(),
    })
}

/// Weighted combination `Σ_j a_j E_j(M)` of independent Bernoulli sample
/// means, one RNG stream per index. Uniform weights `a_j = 1/l` recover the
/// plain average of `l·M` samples.
pub fn bernoulli_weighted_mean(
    p: f64,
    samples_per_point: u64,
    weights: &[f64],
    seed: u64,
) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::InvalidInput("no combination weights".into()));
    }
    let model = ShotModel::new(samples_per_point, seed)?;
    let dist = Binomial::new(samples_per_point, p)
        .map_err(|e| Error::Internal(format!("binomial setup failed: {e}")))?;
    let mut total = 0.0;
    for (j, a_j) in weights.iter().enumerate() {
        let mut rng = model.stream(j as u64);
        let successes = dist.sample(&mut rng);
        total += a_j * successes as f64 / samples_per_point as f64;
    }
    Ok(total)
}

/// A zero-noise extrapolation curve with its exponential fit
/// `y ≈ a e^{-b c} + d` and the `c → 0` limit `a + d`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZneCurve {
    pub points: Vec<(f64, f64)>,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub extrapolated: f64,
    /// Set when the data cannot identify a decay rate (all y equal).
    pub degenerate: bool,
}

/// Fit `a e^{-b c} + d` by profiling the decay rate: `(a, d)` have a
/// closed-form least squares solution at fixed `b`, so the fit reduces to a
/// one-dimensional search over `b`, initialized on a log-spaced grid and
/// refined to the zero of the profiled-SSE gradient.
///
/// Points are sorted before fitting, so the result does not depend on input
/// order. Requires at least four distinct stretch factors; `b` is constrained
/// to be non-negative.
pub fn zne_fit(points: &[(f64, f64)]) -> Result<ZneCurve> {
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p.partial_cmp(q).expect("finite ZNE points"));
    for (c, y) in &pts {
        if !c.is_finite() || !y.is_finite() {
            return Err(Error::InvalidInput("non-finite ZNE point".into()));
        }
    }
    let mut distinct = pts.iter().map(|(c, _)| *c).collect::<Vec<_>>();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "ZNE fit needs at least 4 distinct stretch factors, got {}",
            distinct.len()
        )));
    }

    // Degenerate data: constant y leaves b unidentifiable.
    let y0 = pts[0].1;
    if pts.iter().all(|(_, y)| (*y - y0).abs() < 1e-14) {
        let mean = pts.iter().map(|(_, y)| y).sum::<f64>() / pts.len() as f64;
        return Ok(ZneCurve {
            points: pts,
            a: 0.0,
            b: 0.0,
            d: mean,
            extrapolated: mean,
            degenerate: true,
        });
    }

    // Profile SSE over b: closed-form least squares for (a, d) given b.
    let profile = |b: f64| -> Option<(f64, f64, f64)> {
        let n = pts.len() as f64;
        let mut se = 0.0;
        let mut see = 0.0;
        let mut sy = 0.0;
        let mut sey = 0.0;
        for (c, y) in &pts {
            let e = (-b * c).exp();
            se += e;
            see += e * e;
            sy += y;
            sey += e * y;
        }
        let det = see * n - se * se;
        if det.abs() < 1e-300 {
            return None;
        }
        let a = (sey * n - se * sy) / det;
        let d = (see * sy - se * sey) / det;
        let sse: f64 = pts
            .iter()
            .map(|(c, y)| {
                let r = y - a * (-b * c).exp() - d;
                r * r
            })
            .sum();
        Some((a, d, sse))
    };

    // Derivative of the profiled SSE in b. With (a, d) at their inner least
    // squares optimum the partial through them vanishes, so this is exact.
    let gradient = |b: f64| -> Option<f64> {
        let (a, d, _) = profile(b)?;
        let mut g = 0.0;
        for (c, y) in &pts {
            let e = (-b * c).exp();
            let r = y - a * e - d;
            g += r * a * c * e;
        }
        Some(g)
    };

    // 50 log-spaced decay-rate candidates in [1e-3, 10].
    let grid: Vec<f64> = (0..50)
        .map(|i| 10f64.powf(-3.0 + 4.0 * i as f64 / 49.0))
        .collect();
    let mut best_idx = 0;
    let mut best = f64::INFINITY;
    for (i, &b) in grid.iter().enumerate() {
        if let Some((_, _, sse)) = profile(b) {
            if sse < best {
                best = sse;
                best_idx = i;
            }
        }
    }

    // Refine inside the bracketing grid interval by bisecting the gradient
    // sign; the SSE minimum satisfies dSSE/db = 0.
    let mut lo = if best_idx == 0 {
        0.0
    } else {
        grid[best_idx - 1]
    };
    let mut hi = grid[(best_idx + 1).min(grid.len() - 1)];
    let mut best_b = grid[best_idx];
    match (gradient(lo), gradient(hi)) {
        (Some(glo), Some(ghi)) if glo < 0.0 && ghi > 0.0 => {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                match gradient(mid) {
                    Some(g) if g < 0.0 => lo = mid,
                    Some(_) => hi = mid,
                    None => break,
                }
                if hi - lo <= 1e-15 * hi.max(1.0) {
                    break;
                }
            }
            best_b = 0.5 * (lo + hi);
        }
        // No interior sign change: the optimum sits at (or beyond) an edge of
        // the bracket; keep whichever endpoint fits best.
        _ => {
            for b in [lo, hi] {
                if let Some((_, _, sse)) = profile(b) {
                    if sse < best {
                        best = sse;
                        best_b = b;
                    }
                }
            }
        }
    }

    let (a, d, _) = profile(best_b)
        .ok_or_else(|| Error::Numerical("ZNE linear subproblem became singular".into()))?;
    Ok(ZneCurve {
        points: pts,
        a,
        b: best_b,
        d,
        extrapolated: a + d,
        degenerate: false,
    })
}

/// Default synthetic stretch grid: 20 linearly spaced factors in
/// [0.05, 1.5]. Chosen so the extrapolation to `c = 0` stays within the
/// shot-noise budget of [`zne_round_trip`] for decay rates up to 1.
pub const DEFAULT_STRETCH_POINTS: usize = 20;
pub const DEFAULT_STRETCH_MIN: f64 = 0.05;
pub const DEFAULT_STRETCH_MAX: f64 = 1.5;

/// Generate a synthetic ZNE curve on a linear stretch grid (one RNG stream
/// per point) and fit it. The fitted `extrapolated` value estimates
/// `e_ideal`.
#[allow(clippy::too_many_arguments)]
pub fn zne_round_trip(
    e_ideal: f64,
    b: f64,
    d: f64,
    shots_per_point: u64,
    points: usize,
    c_min: f64,
    c_max: f64,
    seed: u64,
) -> Result<ZneCurve> {
    if points < 4 {
        return Err(Error::InvalidInput(
            "need at least 4 stretch points for the exponential fit".into(),
        ));
    }
    if !(c_min > 0.0 && c_max > c_min) {
        return Err(Error::InvalidInput(format!(
            "invalid stretch range [{c_min}, {c_max}]"
        )));
    }
    let model = ShotModel::new(shots_per_point, seed)?;
    let curve: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let c = c_min + (c_max - c_min) * i as f64 / (points - 1) as f64;
            let y = synth_noisy_expectation_stream(e_ideal, c, b, d, model, i as u64)?;
            Ok((c, y))
        })
        .collect::<Result<_>>()?;
    zne_fit(&curve)
}

/// Synthetic noisy expectation at stretch factor `c`: shot-sampled around
/// `(E_ideal - d) e^{-b c} + d`. A stand-in for hardware noise so the ZNE
/// pipeline is testable.
pub fn synth_noisy_expectation(
    e_ideal: f64,
    c: f64,
    b: f64,
    d: f64,
    model: ShotModel,
) -> Result<f64> {
    synth_noisy_expectation_stream(e_ideal, c, b, d, model, 0)
}

/// As [`synth_noisy_expectation`] on an explicit per-task stream.
pub fn synth_noisy_expectation_stream(
    e_ideal: f64,
    c: f64,
    b: f64,
    d: f64,
    model: ShotModel,
    stream: u64,
) -> Result<f64> {
    if c < 0.0 {
        return Err(Error::InvalidInput(format!(
            "stretch factor must be non-negative, got {c}"
        )));
    }
    let mean = (e_ideal - d) * (-b * c).exp() + d;
    sample_expectation_stream(mean, model, stream)
}

/// Verdict for one candidate twirl gate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwirlVerdict {
    pub pair: String,
    pub commutes: bool,
}

/// The two-qubit Pauli set `G_ZZ` used to twirl `R_ZZ(θ)` gates.
pub const G_ZZ: [&str; 8] = ["II", "XX", "YY", "ZZ", "XY", "YX", "ZI", "IZ"];

/// `R_ZZ(θ) = exp(-i θ/2 Z⊗Z)` as a dense matrix.
fn rzz_matrix(theta: f64) -> Result<crate::operators::DenseOperator> {
    let zz = pauli_matrix(&PauliString::new("ZZ", 1.0)?)?;
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(4, 4);
    for i in 0..4 {
        // Z⊗Z is diagonal ±1, so the exponential is the diagonal phase.
        let sign = zz.entry(i, i).re;
        m[(i, i)] = Complex64::new(0.0, -theta / 2.0 * sign).exp();
    }
    crate::operators::DenseOperator::from_matrix(m)
}

/// Does the two-qubit Pauli `pair` commute with `R_ZZ(θ)`?
///
/// Checked by matrix multiplication: `max |U R - R U| <= 1e-12`.
pub fn commutes_with_rzz(pair: &str, theta: f64) -> Result<bool> {
    if pair.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "expected a two-qubit Pauli label, got '{pair}'"
        )));
    }
    let u = pauli_matrix(&PauliString::new(pair, 1.0)?)?;
    let r = rzz_matrix(theta)?;
    let comm = u.matrix() * r.matrix() - r.matrix() * u.matrix();
    let defect = comm.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(defect <= 1e-12)
}

/// Verify the commutation of every element of `G_ZZ` with `R_ZZ(θ)`.
pub fn twirl_set_check(theta: f64) -> Result<Vec<TwirlVerdict>> {
    G_ZZ.iter()
        .map(|pair| {
            Ok(TwirlVerdict {
                pair: (*pair).to_string(),
                commutes: commutes_with_rzz(pair, theta)?,
            })
        })
        .collect()
}
