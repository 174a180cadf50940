//! State families for the two-qudit squeezing evolution: closed-form
//! targets for d = 2 and d = 3, general Schmidt states, the orthogonal
//! bases and separable states the strategies are assembled from, and the
//! noisy states used to exercise fidelity estimation.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, ATOL_NORM};

/// Bipartite pure state in Schmidt form: Σᵢ cᵢ |ii⟩ with non-negative
/// coefficients. `vector` may carry local sign/phase folds, so it equals
/// Σᵢ cᵢ|ii⟩ only up to local phases (see [`two_qubit_target`]).
#[derive(Debug, Clone)]
pub struct SchmidtState {
    /// Per-site dimension.
    pub d: usize,
    /// Non-negative Schmidt coefficients, zero-padded to length ≤ d.
    pub coeffs: Vec<f64>,
    /// The d²-dimensional state vector.
    pub vector: ComplexVector,
}

impl SchmidtState {
    fn from_signed_amplitudes(d: usize, amps: &[f64]) -> Self {
        let mut vector = ComplexVector::zeros(d * d);
        for (i, &a) in amps.iter().enumerate() {
            vector.set(i * d + i, Complex64::new(a, 0.0));
        }
        Self {
            d,
            coeffs: amps.iter().map(|a| a.abs()).collect(),
            vector,
        }
    }

    /// Density matrix |ψ⟩⟨ψ|.
    pub fn density(&self) -> ComplexMatrix {
        self.vector.projector()
    }

    /// Number of Schmidt coefficients above `tol`.
    pub fn schmidt_rank(&self, tol: f64) -> usize {
        self.coeffs.iter().filter(|c| c.abs() > tol).count()
    }

    /// Signed diagonal amplitudes ⟨ii|ψ⟩ (real by construction).
    pub fn diagonal_amplitudes(&self) -> Vec<f64> {
        (0..self.d).map(|i| self.vector.get(i * self.d + i).re).collect()
    }
}

/// Angles (θ₁, θ₂) fixing a two-qutrit Schmidt state plus the free angle θ₃
/// of its orthogonal-basis completion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

/// Phase pair (φ₁, φ₂) for the separable-state averaging; strategy sums
/// draw both from {0, 2π/3, 4π/3}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePair {
    pub phi1: f64,
    pub phi2: f64,
}

impl PhasePair {
    /// The nine third-root phase pairs used by the qutrit strategy average.
    pub fn strategy_grid() -> Vec<PhasePair> {
        let thirds = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
        let mut out = Vec::with_capacity(9);
        for &phi1 in &thirds {
            for &phi2 in &thirds {
                out.push(PhasePair { phi1, phi2 });
            }
        }
        out
    }
}

/// Two-qubit target cos τ|00⟩ + sin τ|11⟩.
///
/// Negative amplitudes are folded into the stored coefficients' signs so
/// `coeffs` stays non-negative while `vector` keeps the signed amplitudes.
pub fn two_qubit_target(tau: f64) -> SchmidtState {
    SchmidtState::from_signed_amplitudes(2, &[tau.cos(), tau.sin()])
}

/// γ(τ) = (2 cos τ + 2) √(cos²τ − 2 cos τ + 5).
pub fn gamma(tau: f64) -> f64 {
    let c = tau.cos();
    (2.0 * c + 2.0) * (c * c - 2.0 * c + 5.0).sqrt()
}

fn checked_sqrt(radicand: f64, what: &str) -> Result<f64> {
    if radicand < -ATOL_NORM {
        return Err(Error::NumericalDomain(format!(
            "{what}: radicand {radicand:.3e} below zero"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Two-qutrit squeezing-evolution target with coefficients
/// ( ¼√(2cos²τ+6+γ), ½|sin τ|, ¼√(2cos²τ+6−γ) ).
pub fn two_qutrit_target(tau: f64) -> Result<SchmidtState> {
    let c = tau.cos();
    let base = 2.0 * c * c + 6.0;
    let g = gamma(tau);
    let a = 0.25 * checked_sqrt(base + g, "two_qutrit_target |00⟩ coefficient")?;
    let b = 0.5 * tau.sin().abs();
    let cc = 0.25 * checked_sqrt(base - g, "two_qutrit_target |22⟩ coefficient")?;
    Ok(SchmidtState::from_signed_amplitudes(3, &[a, b, cc]))
}

/// Angles (θ₁, θ₂) reproducing [`two_qutrit_target`] through the general
/// parametrization sin θ₂ cos θ₁|00⟩ + sin θ₂ sin θ₁|11⟩ + cos θ₂|22⟩.
pub fn theta_params(tau: f64) -> Result<(f64, f64)> {
    let c = tau.cos();
    let base = 2.0 * c * c + 6.0;
    let g = gamma(tau);
    let theta1 = (2.0 * checked_sqrt(tau.sin().powi(2) / (base + g), "theta1 argument")?).atan();
    let arg = 0.25 * checked_sqrt(base - g, "theta2 argument")?;
    if arg > 1.0 + ATOL_NORM {
        return Err(Error::NumericalDomain(format!(
            "theta2: arccos argument {arg} outside [-1, 1]"
        )));
    }
    let theta2 = arg.clamp(-1.0, 1.0).acos();
    Ok((theta1, theta2))
}

/// The state sin θ₂ cos θ₁|00⟩ + sin θ₂ sin θ₁|11⟩ + cos θ₂|22⟩.
pub fn qutrit_state_from_angles(theta1: f64, theta2: f64) -> SchmidtState {
    SchmidtState::from_signed_amplitudes(
        3,
        &[
            theta2.sin() * theta1.cos(),
            theta2.sin() * theta1.sin(),
            theta2.cos(),
        ],
    )
}

/// Schmidt state Σᵢ cᵢ|ii⟩ from explicit coefficients, zero-padded to d.
pub fn general_schmidt(coeffs: &[f64], d: usize) -> Result<SchmidtState> {
    if coeffs.len() > d {
        return Err(Error::DimensionMismatch(format!(
            "{} Schmidt coefficients for per-site dimension {d}",
            coeffs.len()
        )));
    }
    let norm2: f64 = coeffs.iter().map(|c| c * c).sum();
    if (norm2 - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm2));
    }
    let mut amps = vec![0.0; d];
    amps[..coeffs.len()].copy_from_slice(coeffs);
    Ok(SchmidtState::from_signed_amplitudes(d, &amps))
}

/// Maximally entangled state (1/√d) Σ |kk⟩.
pub fn max_entangled(d: usize) -> SchmidtState {
    let c = 1.0 / (d as f64).sqrt();
    SchmidtState::from_signed_amplitudes(d, &vec![c; d])
}

/// Amplitudes of the first orthogonal state Ψ⊥₁(θ₁, θ₂, θ₃) in the
/// diagonal |ii⟩ span.
pub fn qutrit_orth1_amplitudes(a: &QutritAngles) -> [f64; 3] {
    let (s1, c1) = a.theta1.sin_cos();
    let (s2, c2) = a.theta2.sin_cos();
    let (s3, c3) = a.theta3.sin_cos();
    [
        c1 * c2 * c3 - s1 * s3,
        s1 * c2 * c3 + c1 * s3,
        -s2 * c3,
    ]
}

/// Amplitudes of the second orthogonal state Ψ⊥₂(θ₁, θ₂, θ₃).
pub fn qutrit_orth2_amplitudes(a: &QutritAngles) -> [f64; 3] {
    let (s1, c1) = a.theta1.sin_cos();
    let (s2, c2) = a.theta2.sin_cos();
    let (s3, c3) = a.theta3.sin_cos();
    [
        c1 * c2 * s3 + s1 * c3,
        s1 * c2 * s3 - c1 * c3,
        -s2 * s3,
    ]
}

fn diagonal_vector(amps: &[f64], d: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d * d);
    for (i, &a) in amps.iter().enumerate() {
        v.set(i * d + i, Complex64::new(a, 0.0));
    }
    v
}

/// The eight states orthogonal to the two-qutrit target: Ψ⊥₁ and Ψ⊥₂ from
/// the angle parametrization, then the six computational product states
/// |01⟩, |02⟩, |10⟩, |12⟩, |20⟩, |21⟩. Together with the target they form
/// an orthonormal basis of the 9-dimensional space.
pub fn qutrit_orthobasis(angles: &QutritAngles) -> Vec<ComplexVector> {
    let mut out = Vec::with_capacity(8);
    out.push(diagonal_vector(&qutrit_orth1_amplitudes(angles), 3));
    out.push(diagonal_vector(&qutrit_orth2_amplitudes(angles), 3));
    for (i, j) in [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)] {
        out.push(ComplexVector::basis_state(9, i * 3 + j));
    }
    out
}

/// Principal square root of a real number: √x for x ≥ 0, i√|x| otherwise.
pub(crate) fn principal_sqrt(x: f64) -> Complex64 {
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    }
}

/// Single-site separable factor built from real amplitudes `amps`: the
/// k-th entry is e^{i s·φ_k} √(amps_k) with φ₀ = 0 and the remaining
/// phases from `phases`, normalized to unit length. `sign` selects the
/// ρ-type (+1) or σ-type (−1) member of a conjugate pair.
pub(crate) fn separable_factor(amps: &[f64], phases: &[f64], sign: f64) -> Result<ComplexVector> {
    let norm2: f64 = amps.iter().map(|a| a.abs()).sum();
    if norm2 < 1e-12 {
        return Err(Error::DegenerateState(norm2));
    }
    let norm = norm2.sqrt();
    let mut v = ComplexVector::zeros(amps.len());
    for (k, &a) in amps.iter().enumerate() {
        let phase = if k == 0 { 0.0 } else { sign * phases[k - 1] };
        let amp = principal_sqrt(a) * Complex64::from_polar(1.0, phase);
        v.set(k, amp / norm);
    }
    Ok(v)
}

/// The four single-site separable states (ρ₇, σ₇, ρ₇⊥, σ₇⊥) whose tensor
/// pairs ρ₇⊗σ₇ and ρ₇⊥⊗σ₇⊥ are orthogonal to the target for every phase
/// choice: conjugate phases cancel in the diagonal amplitudes, leaving the
/// Ψ⊥ overlap with the target, which vanishes.
pub fn qutrit_separable_states(
    angles: &QutritAngles,
    phases: &PhasePair,
) -> Result<(ComplexVector, ComplexVector, ComplexVector, ComplexVector)> {
    let u = qutrit_orth1_amplitudes(angles);
    let v = qutrit_orth2_amplitudes(angles);
    let ph = [phases.phi1, phases.phi2];
    Ok((
        separable_factor(&u, &ph, 1.0)?,
        separable_factor(&u, &ph, -1.0)?,
        separable_factor(&v, &ph, 1.0)?,
        separable_factor(&v, &ph, -1.0)?,
    ))
}

const SINGULAR_TOL: f64 = 1e-12;

/// Separable two-qubit state |φ_j⟩ orthogonal to the target ψ(τ), j = 1..3.
///
/// The two factors carry phases e^{2πij/3} and e^{iπ(3−2j)/3} on |1⟩; the
/// phases sum to π so the |00⟩ and |11⟩ amplitudes come out proportional
/// to sin τ and −cos τ, which is exactly the orthogonality requirement.
pub fn two_qubit_orth_states(tau: f64, j: usize) -> Result<ComplexVector> {
    if !(1..=3).contains(&j) {
        return Err(Error::IndexOutOfRange(format!(
            "two_qubit_orth_states j = {j}"
        )));
    }
    let s = tau.sin();
    let c = tau.cos();
    if s.abs() < SINGULAR_TOL || c.abs() < SINGULAR_TOL {
        return Err(Error::SingularAngle(tau));
    }
    let phi = 2.0 * PI * (j as f64) / 3.0;
    let first = separable_qubit_factor(s, c, phi);
    let second = separable_qubit_factor(s, c, PI - phi);
    Ok(first.tensor(&second))
}

fn separable_qubit_factor(s: f64, c: f64, phase: f64) -> ComplexVector {
    let norm = (s.abs() + c.abs()).sqrt();
    let mut v = ComplexVector::zeros(2);
    v.set(0, principal_sqrt(s) / norm);
    v.set(1, principal_sqrt(c) * Complex64::from_polar(1.0, phase) / norm);
    v
}

/// Depolarized state (1−p)ρ + p·I/dim.
pub fn depolarize(rho: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "depolarizing probability {p}"
        )));
    }
    let dim = rho.rows() as f64;
    Ok(rho
        .scale(Complex64::new(1.0 - p, 0.0))
        .add(&ComplexMatrix::identity(rho.rows()).scale(Complex64::new(p / dim, 0.0))))
}

/// Erroneous state √(1−ε)|ψ⟩ + √ε|ψ⊥⟩.
pub fn mix_orthogonal(psi: &SchmidtState, perp: &ComplexVector, eps: f64) -> Result<ComplexVector> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("mixing weight {eps}")));
    }
    let overlap = perp.inner(&psi.vector).norm();
    if overlap > 1e-9 {
        return Err(Error::NotOrthogonal(overlap));
    }
    let mixed = psi
        .vector
        .scale(Complex64::new((1.0 - eps).sqrt(), 0.0))
        .add(&perp.scale(Complex64::new(eps.sqrt(), 0.0)));
    Ok(mixed.normalized())
}
