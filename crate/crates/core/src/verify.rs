//! Verification strategies Ω for bipartite qudit targets.
//!
//! A strategy is a Hermitian operator with 0 ⪯ Ω ⪯ I and Ω|ψ⟩ = |ψ⟩ whose
//! second-largest eigenvalue β bounds the acceptance probability of any
//! state orthogonal to the target. The general constructions mix a diagonal
//! projector P_Z with a phase-averaged high-rank part built from separable
//! states orthogonal to the target, and choose the mixing weight α by an
//! exact 1-D minimax over the affine acceptance curves of the orthogonal
//! basis states.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, ComplexMatrix, ComplexVector, C_ONE};
use crate::states::{
    self, two_qubit_target, two_qutrit_target, QutritAngles, SchmidtState,
};

/// Largest per-site dimension accepted by [`strategy_qudit_general`]; the
/// phase average grows as 3^(d−1) tuples.
pub const MAX_QUDIT_DIM: usize = 6;

/// How [`strategy_two_qutrit`] picks the free angle of its orthogonal-state
/// parametrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theta3Policy {
    Fixed(f64),
    Optimize,
}

/// Which construction produced a strategy; sweeps record this per row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Separable,
    Bell,
    General,
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StrategyKind::Separable => "separable",
            StrategyKind::Bell => "bell",
            StrategyKind::General => "general",
        };
        f.write_str(s)
    }
}

/// A verification operator together with its decomposition and the β values
/// extracted from its spectrum and its orthogonal test basis.
#[derive(Debug, Clone)]
pub struct Strategy {
    pub kind: StrategyKind,
    /// The full operator Ω on the d²-dimensional joint space.
    pub omega: ComplexMatrix,
    /// Mixing weight between P_Z and the high-rank part, when applicable.
    pub alpha: Option<f64>,
    /// Free angle of the orthogonal-state parametrization, when applicable.
    pub theta3: Option<f64>,
    /// Named building blocks (e.g. P_Z and the phase-averaged substrategy).
    pub components: Vec<(String, ComplexMatrix)>,
    pub target: SchmidtState,
    /// Orthogonal states whose acceptance curves drove the α minimax.
    pub test_basis: Vec<ComplexVector>,
    /// max_i ⟨Ψ⊥ᵢ|Ω|Ψ⊥ᵢ⟩ over the test basis (= beta_spectral when empty).
    pub beta_basis: f64,
    /// Second-largest eigenvalue of Ω; this is what n(ε, δ) uses, since an
    /// adversarial state may be any superposition orthogonal to the target.
    pub beta_spectral: f64,
}

/// Efficiency report: β values and the measurement count n(ε, δ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyReport {
    pub beta_basis: f64,
    pub beta_spectral: f64,
    pub n: u64,
    pub epsilon: f64,
    pub delta: f64,
}

impl Strategy {
    pub fn dim(&self) -> usize {
        self.omega.rows()
    }

    pub fn report(&self, epsilon: f64, delta: f64) -> Result<StrategyReport> {
        Ok(StrategyReport {
            beta_basis: self.beta_basis,
            beta_spectral: self.beta_spectral,
            n: n_measurements(self.beta_spectral, epsilon, delta)?,
            epsilon,
            delta,
        })
    }

    /// Eigenvector achieving beta_spectral.
    pub fn beta_eigenvector(&self) -> Result<ComplexVector> {
        let eig = hermitian_eig(&self.omega)?;
        Ok(eig.eigenvector(eig.dim() - 2))
    }

    /// Strategy soundness: Ω|ψ⟩ = |ψ⟩ within 1e-8 and spectrum ⊆ [0, 1]
    /// within 1e-9.
    pub fn validate(&self) -> Result<()> {
        let psi = &self.target.vector;
        let residual = self.omega.mul_vec(psi).add(&psi.scale(-C_ONE));
        let res_norm = residual.norm();
        if res_norm > 1e-8 {
            return Err(Error::InvalidParameter(format!(
                "target is not a fixed point of Omega (residual {res_norm:.3e})"
            )));
        }
        let eig = hermitian_eig(&self.omega)?;
        let lo = eig.eigenvalues[0];
        let hi = eig.eigenvalues[eig.dim() - 1];
        if lo < -1e-9 || hi > 1.0 + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "Omega spectrum [{lo:.3e}, {hi}] escapes [0, 1]"
            )));
        }
        Ok(())
    }
}

/// Minimize over α ∈ [0, 1] the pointwise max of affine lines
/// f_i(α) = w_i + (p_i − w_i)·α given as (w_i, p_i) = (f_i(0), f_i(1)).
/// Scans the boundary points and every pairwise intersection; ties prefer
/// the smaller α. Returns (α*, max_i f_i(α*)).
fn minimax_alpha(lines: &[(f64, f64)]) -> (f64, f64) {
    let value_at = |alpha: f64| -> f64 {
        lines
            .iter()
            .map(|&(w, p)| w + (p - w) * alpha)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut candidates = vec![0.0, 1.0];
    for (i, &(wi, pi)) in lines.iter().enumerate() {
        let si = pi - wi;
        for &(wj, pj) in &lines[i + 1..] {
            let sj = pj - wj;
            if (si - sj).abs() < 1e-14 {
                continue;
            }
            let alpha = (wj - wi) / (si - sj);
            if (0.0..=1.0).contains(&alpha) {
                candidates.push(alpha);
            }
        }
    }
    let mut best = (f64::INFINITY, f64::INFINITY); // (value, alpha)
    for &alpha in &candidates {
        let v = value_at(alpha);
        if v < best.0 - 1e-15 || (v < best.0 + 1e-15 && alpha < best.1) {
            best = (v, alpha);
        }
    }
    (best.1, best.0)
}

/// Diagonal embedding of a per-site amplitude vector: Σ_k u_k |kk⟩.
fn diagonal_embed(amps: &[f64]) -> ComplexVector {
    let d = amps.len();
    let mut v = ComplexVector::zeros(d * d);
    for (k, &a) in amps.iter().enumerate() {
        v.set(k * d + k, Complex64::new(a, 0.0));
    }
    v
}

/// All (d−1)-tuples over the third roots of unity {0, 2π/3, 4π/3}.
fn phase_tuples(count: usize) -> Vec<Vec<f64>> {
    let thirds = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..count {
        let mut next = Vec::with_capacity(out.len() * 3);
        for tuple in &out {
            for &phi in &thirds {
                let mut t = tuple.clone();
                t.push(phi);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Shared assembly for the general strategies: mixes P_Z (full diagonal
/// projector) with the phase-averaged complement of the separable pairs
/// generated by each real frame vector orthogonal to the Schmidt
/// coefficients, then picks α by minimax over the orthogonal basis.
fn assemble_general_strategy(
    target: SchmidtState,
    frame: Vec<Vec<f64>>,
    hi_name: &str,
    theta3: Option<f64>,
) -> Result<Strategy> {
    let d = target.d;
    let n = d * d;

    let mut p_z = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        p_z.set(i * d + i, i * d + i, C_ONE);
    }

    let tuples = phase_tuples(d - 1);
    let weight = Complex64::new(1.0 / tuples.len() as f64, 0.0);
    let mut averaged = ComplexMatrix::zeros(n, n);
    for phases in &tuples {
        for u in &frame {
            let rho = states::separable_factor(u, phases, 1.0)?;
            let sigma = states::separable_factor(u, phases, -1.0)?;
            averaged = averaged.add(&rho.tensor(&sigma).projector());
        }
    }
    let omega_hi = ComplexMatrix::identity(n).sub(&averaged.scale(weight));

    // orthogonal basis: the frame directions in the diagonal span plus all
    // off-diagonal product states
    let mut test_basis: Vec<ComplexVector> = frame.iter().map(|u| diagonal_embed(u)).collect();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                test_basis.push(ComplexVector::basis_state(n, i * d + j));
            }
        }
    }

    let lines: Vec<(f64, f64)> = test_basis
        .iter()
        .map(|b| {
            let w = omega_hi.expectation(b).re;
            let p = p_z.expectation(b).re;
            (w, p)
        })
        .collect();
    let (alpha, beta_basis) = minimax_alpha(&lines);

    let omega = p_z
        .scale(Complex64::new(alpha, 0.0))
        .add(&omega_hi.scale(Complex64::new(1.0 - alpha, 0.0)));
    let eig = hermitian_eig(&omega)?;
    let beta_spectral = eig.eigenvalues[eig.dim() - 2];

    Ok(Strategy {
        kind: StrategyKind::General,
        omega,
        alpha: Some(alpha),
        theta3,
        components: vec![
            ("P_Z".to_string(), p_z),
            (hi_name.to_string(), omega_hi),
        ],
        target,
        test_basis,
        beta_basis,
        beta_spectral,
    })
}

/// Rank-1 strategy |ψ⟩⟨ψ| for a separable target; β = 0.
pub fn strategy_separable(psi: &SchmidtState) -> Result<Strategy> {
    if psi.schmidt_rank(1e-9) != 1 {
        return Err(Error::NotSeparable);
    }
    let omega = psi.vector.projector();
    Ok(Strategy {
        kind: StrategyKind::Separable,
        omega: omega.clone(),
        alpha: None,
        theta3: None,
        components: vec![("P_psi".to_string(), omega)],
        target: psi.clone(),
        test_basis: vec![],
        beta_basis: 0.0,
        beta_spectral: 0.0,
    })
}

/// Bell-type strategy (Π¹+Π²+Π³)/3 for (|00⟩+|11⟩)/√2 embedded in d⊗d.
///
/// Each Π_d^i sums |Λ_d^i, k⟩⟨Λ_d^i, k| ⊗ |conj⟩⟨conj| over the k = ±1
/// eigenvectors of the embedded Pauli block. The 1/3 normalization keeps
/// Ω ⪯ I; β = 1/3.
pub fn strategy_bell_general(d: usize) -> Result<Strategy> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d, MAX_QUDIT_DIM));
    }
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let target = states::general_schmidt(&[half, half], d)?;
    let n = d * d;
    let mut components = Vec::new();
    let mut omega = ComplexMatrix::zeros(n, n);
    for i in 1..=3 {
        let lambda = crate::bases::embedded_lambda(d, i)?;
        let eig = hermitian_eig(&lambda)?;
        let mut pi = ComplexMatrix::zeros(n, n);
        for (idx, &e) in eig.eigenvalues.iter().enumerate() {
            if (e.abs() - 1.0).abs() < 1e-8 {
                let v = eig.eigenvector(idx);
                pi = pi.add(&kron(&v.projector(), &v.conj().projector()));
            }
        }
        omega = omega.add(&pi);
        components.push((format!("Pi_{i}"), pi));
    }
    let omega = omega.scale(Complex64::new(1.0 / 3.0, 0.0));
    let eig = hermitian_eig(&omega)?;
    let beta_spectral = eig.eigenvalues[eig.dim() - 2];
    Ok(Strategy {
        kind: StrategyKind::Bell,
        omega,
        alpha: None,
        theta3: None,
        components,
        target,
        test_basis: vec![],
        beta_basis: beta_spectral,
        beta_spectral,
    })
}

/// Two-qubit Bell strategy (d = 2 case of [`strategy_bell_general`]).
pub fn strategy_bell_2qubit() -> Result<Strategy> {
    strategy_bell_general(2)
}

/// Optimal-form two-qubit strategy α·P_Z + (1−α)(I − ⅓Σ|φ_j⟩⟨φ_j|) for
/// cos τ|00⟩ + sin τ|11⟩; α comes out of the minimax as
/// (2−sin 2τ)/(4+sin 2τ).
pub fn strategy_two_qubit(tau: f64) -> Result<Strategy> {
    let s = tau.sin();
    let c = tau.cos();
    if s.abs() < 1e-12 || c.abs() < 1e-12 {
        return Err(Error::SingularAngle(tau));
    }
    let target = two_qubit_target(tau);
    assemble_general_strategy(target, vec![vec![s, -c]], "Omega3", None)
}

/// General two-qutrit strategy α·P_Z + (1−α)ΣⱼΩ₇ʲ with the nine-phase
/// average and η₇ʲ = 1/9; the free angle θ₃ is fixed or optimized per the
/// policy.
pub fn strategy_two_qutrit(tau: f64, policy: Theta3Policy) -> Result<Strategy> {
    match policy {
        Theta3Policy::Fixed(theta3) => strategy_two_qutrit_fixed(tau, theta3),
        Theta3Policy::Optimize => optimize_theta3(tau).map(|(_, s)| s),
    }
}

fn strategy_two_qutrit_fixed(tau: f64, theta3: f64) -> Result<Strategy> {
    let (theta1, theta2) = states::theta_params(tau)?;
    let angles = QutritAngles {
        theta1,
        theta2,
        theta3,
    };
    let target = two_qutrit_target(tau)?;
    let frame = vec![
        states::qutrit_orth1_amplitudes(&angles).to_vec(),
        states::qutrit_orth2_amplitudes(&angles).to_vec(),
    ];
    assemble_general_strategy(target, frame, "Omega7_avg", Some(theta3))
}

/// Numerically optimal θ₃ for the two-qutrit strategy at this τ: coarse
/// 181-point grid over [0, 2π) followed by golden-section refinement to
/// 1e-6; ties break toward the smaller angle.
pub fn optimize_theta3(tau: f64) -> Result<(f64, Strategy)> {
    const GRID: usize = 181;
    let beta_at = |theta3: f64| -> Result<f64> {
        Ok(strategy_two_qutrit_fixed(tau, theta3)?.beta_spectral)
    };

    let step = 2.0 * PI / GRID as f64;
    let mut best_idx = 0;
    let mut best_beta = f64::INFINITY;
    for i in 0..GRID {
        let beta = beta_at(i as f64 * step)?;
        if beta < best_beta - 1e-15 {
            best_beta = beta;
            best_idx = i;
        }
    }

    // golden-section refinement inside the bracketing grid cells
    let mut lo = best_idx as f64 * step - step;
    let mut hi = best_idx as f64 * step + step;
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = beta_at(x1)?;
    let mut f2 = beta_at(x2)?;
    while hi - lo > 1e-6 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = beta_at(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = beta_at(x2)?;
        }
    }
    let mut theta3 = 0.5 * (lo + hi);
    let mut beta = beta_at(theta3)?;
    // prefer the smallest equivalent angle; in particular θ₃ = 0 whenever
    // the refined minimum is not a strict improvement
    let theta3_wrapped = theta3.rem_euclid(2.0 * PI);
    if beta_at(theta3_wrapped)? <= beta + 1e-15 {
        theta3 = theta3_wrapped;
    }
    let beta0 = beta_at(0.0)?;
    if beta0 <= beta + 1e-12 {
        theta3 = 0.0;
        beta = beta0;
    }
    let _ = beta;
    Ok((theta3, strategy_two_qutrit_fixed(tau, theta3)?))
}

/// Hyperspherical angles (θ₁, ..., θ_{d−1}) of a non-negative unit
/// coefficient vector: c₀ = cos θ₁ Π_{k≥2} sin θ_k, c₁ = sin θ₁ Π_{k≥2}
/// sin θ_k, c_j = cos θ_j Π_{k>j} sin θ_k. All angles land in [0, π/2].
fn hyperspherical_angles(coeffs: &[f64]) -> Vec<f64> {
    let d = coeffs.len();
    let mut thetas = vec![0.0; d - 1];
    thetas[0] = coeffs[1].atan2(coeffs[0]);
    let mut prefix = coeffs[0].hypot(coeffs[1]);
    for j in 2..d {
        thetas[j - 1] = prefix.atan2(coeffs[j]);
        prefix = prefix.hypot(coeffs[j]);
    }
    // thetas[j-1] was measured from the pole: cos θ_j = c_j
    thetas
}

/// Hyperspherical unit vector of the first `m` coordinates.
fn hyperspherical_unit(thetas: &[f64], m: usize) -> Vec<f64> {
    let mut u = vec![0.0; m];
    u[0] = thetas[0].cos();
    if m > 1 {
        u[1] = thetas[0].sin();
    }
    for j in 2..m {
        let (s, c) = thetas[j - 1].sin_cos();
        for comp in u.iter_mut().take(j) {
            *comp *= s;
        }
        u[j] = c;
    }
    u
}

/// Generalization of the qutrit construction to d ≤ [`MAX_QUDIT_DIM`]:
/// P_Z is the full diagonal projector, the high-rank part is built from the
/// d−1 tangent directions of the hyperspherical parametrization (all extra
/// angles zero) and phase-averaged over the third roots of unity per phase
/// degree of freedom, and α comes from the same minimax.
pub fn strategy_qudit_general(psi: &SchmidtState) -> Result<Strategy> {
    let d = psi.d;
    if !(2..=MAX_QUDIT_DIM).contains(&d) {
        return Err(Error::UnsupportedDimension(d, MAX_QUDIT_DIM));
    }
    let mut coeffs = psi.coeffs.clone();
    coeffs.resize(d, 0.0);
    let thetas = hyperspherical_angles(&coeffs);

    let mut frame = Vec::with_capacity(d - 1);
    // tangent along θ₁
    let mut t1 = vec![0.0; d];
    t1[0] = -thetas[0].sin();
    t1[1] = thetas[0].cos();
    frame.push(t1);
    // tangent along θ_j: (cos θ_j · u_j, −sin θ_j, 0, ...)
    for j in 2..d {
        let (s, c) = thetas[j - 1].sin_cos();
        let mut t = hyperspherical_unit(&thetas, j);
        for comp in t.iter_mut() {
            *comp *= c;
        }
        t.push(-s);
        t.resize(d, 0.0);
        frame.push(t);
    }

    assemble_general_strategy(psi.clone(), frame, "Omega_hi_avg", None)
}

/// Measurement count n(β, ε, δ) = ⌈ ln δ⁻¹ / ln[1/(1−ε(1−β))] ⌉.
pub fn n_measurements(beta: f64, epsilon: f64, delta: f64) -> Result<u64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("beta = {beta}")));
    }
    if !(0.0..1.0).contains(&epsilon) || epsilon == 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon}")));
    }
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(Error::InvalidParameter(format!("delta = {delta}")));
    }
    let denom = -(1.0 - epsilon * (1.0 - beta)).ln();
    let n = (-delta.ln()) / denom;
    Ok(n.ceil() as u64)
}

/// Acceptance probability Tr[Ω ρ].
pub fn accept_probability(strategy: &Strategy, rho: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != strategy.dim() || rho.cols() != strategy.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state is {}x{}, strategy dimension {}",
            rho.rows(),
            rho.cols(),
            strategy.dim()
        )));
    }
    let p = strategy.omega.trace_product(rho).re;
    Ok(p.clamp(0.0, 1.0))
}

/// Black-box acceptance simulation: n Bernoulli trials at Tr[Ω ρ] with an
/// explicit seed; returns the pass count.
pub fn verify_simulate(
    strategy: &Strategy,
    rho: &ComplexMatrix,
    n: u64,
    seed: u64,
) -> Result<u64> {
    let p = accept_probability(strategy, rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passes = 0;
    for _ in 0..n {
        if rng.gen_bool(p) {
            passes += 1;
        }
    }
    Ok(passes)
}
