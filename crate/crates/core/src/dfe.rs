//! Direct fidelity estimation by importance sampling the target's
//! characteristic function.
//!
//! Labels are drawn with probability |χ_target|², each drawn label (k, k′)
//! is measured mᵢ times under Born statistics, and the estimator
//! Ỹ = (1/ℓ) Σᵢ Σⱼ Mᵢⱼ/(mᵢ 𝒩(kᵢ) χ(kᵢ)) concentrates around Tr[ρ ψ] within
//! 2ε with probability at least 1−2δ. Only the Hermitian SU(d) basis is
//! simulated; Weyl-basis plans are analytic only, since measuring a Weyl
//! observable operationally needs MUB eigenbases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::HashMap;

use crate::bases::ObservablePair;
use crate::charfunc::{char_sud, fidelity_overlap, pair_normalizer, BasisKind, CharFunction};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix};

/// Labels with |χ| at or below this are left out of the plan: they carry
/// zero sampling probability and their mᵢ would diverge.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// One importance-sampling entry: a label, its target χ, the draw
/// probability χ² and the per-draw repetition count m.
#[derive(Debug, Clone, Copy)]
pub struct PlanEntry {
    pub pair: ObservablePair,
    pub chi: f64,
    pub probability: f64,
    pub m: u64,
}

/// Importance-sampling schedule for one target state.
#[derive(Debug, Clone)]
pub struct SamplingPlan {
    pub ell: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub entries: Vec<PlanEntry>,
    /// Full target characteristic function, kept for the fidelity oracle.
    pub target_chi: CharFunction,
}

/// Result of one estimation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub y_tilde: f64,
    pub true_fidelity: f64,
    pub total_single_measurements: u64,
    pub seed: u64,
}

/// Empirical coverage of the |Ỹ − F| ≤ 2ε guarantee over seeded trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageReport {
    pub trials: u64,
    pub within: u64,
    pub coverage: f64,
    /// Normal-approximation 95% confidence interval on the coverage.
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Expected draw counts and measurement totals for one plan entry.
#[derive(Debug, Clone, Copy)]
pub struct ScheduleEntry {
    pub pair: ObservablePair,
    pub probability: f64,
    pub expected_draws: f64,
    pub expected_single_measurements: f64,
}

impl SamplingPlan {
    /// Total probability mass over the plan entries (1 up to the support
    /// threshold for a pure target).
    pub fn probability_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "label": e.pair.label_string(),
                    "chi": e.chi,
                    "prob": e.probability,
                    "m": e.m,
                })
            })
            .collect();
        json!({
            "ell": self.ell,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "entries": entries,
        })
    }
}

impl EstimateReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "y_tilde": self.y_tilde,
            "true_fidelity": self.true_fidelity,
            "total_single_measurements": self.total_single_measurements,
            "seed": self.seed,
        })
    }
}

/// Build the sampling plan: ℓ = ⌈1/(ε²δ)⌉ label draws with probabilities
/// |χ|² restricted to the support, and per-label repetition counts
/// m = ⌈ 2 ln(2/δ) / (𝖭_k²𝖭_k′² ℓ ε² χ²) ⌉.
pub fn make_plan(target_chi: &CharFunction, epsilon: f64, delta: f64) -> Result<SamplingPlan> {
    if target_chi.basis != BasisKind::Sud {
        return Err(Error::BasisMismatch);
    }
    if !(0.0 < epsilon && epsilon < 1.0) || !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon}, delta = {delta}"
        )));
    }
    let purity = target_chi.purity();
    if (purity - 1.0).abs() > 1e-6 {
        return Err(Error::ImpureTarget((purity - 1.0).abs()));
    }
    let ell = (1.0 / (epsilon * epsilon * delta)).ceil() as u64;
    let log_term = (2.0 / delta).ln();
    let entries = target_chi
        .support(SUPPORT_THRESHOLD)
        .into_iter()
        .map(|s| {
            let chi = s.chi.re;
            let norm = pair_normalizer(&s.pair);
            let m = (2.0 * log_term
                / (norm * norm * ell as f64 * epsilon * epsilon * chi * chi))
                .ceil() as u64;
            PlanEntry {
                pair: s.pair,
                chi,
                probability: s.weight,
                m: m.max(1),
            }
        })
        .collect();
    Ok(SamplingPlan {
        ell,
        epsilon,
        delta,
        entries,
        target_chi: target_chi.clone(),
    })
}

/// Born-rule sampler for one observable against one true state.
struct PreparedObservable {
    outcomes: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PreparedObservable {
    fn new(rho: &ComplexMatrix, pair: &ObservablePair) -> Result<Self> {
        if matches!(pair, ObservablePair::Weyl(_, _)) {
            return Err(Error::InvalidParameter(
                "measurement simulation is only defined for the Hermitian SU(d) basis".into(),
            ));
        }
        let op = pair.matrix()?;
        if op.rows() != rho.rows() {
            return Err(Error::DimensionMismatch(format!(
                "observable dimension {} vs state dimension {}",
                op.rows(),
                rho.rows()
            )));
        }
        let eig = hermitian_eig(&op)?;
        let mut outcomes = Vec::with_capacity(eig.dim());
        let mut cumulative = Vec::with_capacity(eig.dim());
        let mut acc = 0.0;
        for i in 0..eig.dim() {
            let v = eig.eigenvector(i);
            let p = rho.expectation(&v).re.max(0.0);
            acc += p;
            outcomes.push(eig.eigenvalues[i]);
            cumulative.push(acc);
        }
        if (acc - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidDensityMatrix(format!(
                "Born probabilities sum to {acc}"
            )));
        }
        Ok(Self {
            outcomes,
            cumulative,
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let total = *self.cumulative.last().expect("nonempty spectrum");
        let u = rng.gen_range(0.0..total);
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.outcomes.len() - 1);
        self.outcomes[idx]
    }
}

/// Measure λ_k ⊗ λ_k′ m times on ρ_true under Born statistics; outcomes
/// are products of per-site eigenvalues (including zeros from the
/// Gell-Mann kernels).
pub fn measure_observable(
    rho_true: &ComplexMatrix,
    pair: &ObservablePair,
    m: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    let prepared = PreparedObservable::new(rho_true, pair)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..m).map(|_| prepared.sample(&mut rng)).collect())
}

fn estimate_with_rng(
    plan: &SamplingPlan,
    rho_true: &ComplexMatrix,
    rng: &mut ChaCha8Rng,
    seed: u64,
) -> Result<EstimateReport> {
    if plan.entries.is_empty() {
        return Err(Error::IncompleteFunction("empty sampling plan".into()));
    }
    let mut prepared: HashMap<usize, PreparedObservable> = HashMap::new();
    let mass = plan.probability_mass();
    let mut draw_cumulative = Vec::with_capacity(plan.entries.len());
    let mut acc = 0.0;
    for e in &plan.entries {
        acc += e.probability;
        draw_cumulative.push(acc);
    }

    let mut y = 0.0;
    let mut total_single = 0u64;
    for _ in 0..plan.ell {
        let u = rng.gen_range(0.0..mass);
        let idx = draw_cumulative
            .partition_point(|&c| c <= u)
            .min(plan.entries.len() - 1);
        let entry = &plan.entries[idx];
        let obs = match prepared.entry(idx) {
            std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(PreparedObservable::new(rho_true, &entry.pair)?)
            }
        };
        let norm = pair_normalizer(&entry.pair);
        let mut x = 0.0;
        for _ in 0..entry.m {
            x += obs.sample(rng);
        }
        y += x / (entry.m as f64 * norm * entry.chi);
        total_single += entry.m;
    }
    let d1 = plan.target_chi.d1;
    let d2 = plan.target_chi.d2;
    let true_fidelity = fidelity_overlap(&plan.target_chi, &char_sud(rho_true, d1, d2)?)?;
    Ok(EstimateReport {
        y_tilde: y / plan.ell as f64,
        true_fidelity,
        total_single_measurements: total_single,
        seed,
    })
}

/// Run one estimation: ℓ i.i.d. label draws, mᵢ Born-rule measurements per
/// draw, deterministic for a fixed seed.
pub fn estimate(plan: &SamplingPlan, rho_true: &ComplexMatrix, seed: u64) -> Result<EstimateReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    estimate_with_rng(plan, rho_true, &mut rng, seed)
}

/// Empirical check of Pr[|Ỹ − F| ≤ 2ε] ≥ 1 − 2δ: runs `trials` seeded
/// estimations on independent RNG streams and reports the hit fraction with
/// a 95% binomial confidence interval.
pub fn coverage_experiment(
    plan: &SamplingPlan,
    rho_true: &ComplexMatrix,
    trials: u64,
    seed: u64,
) -> Result<CoverageReport> {
    if trials < 100 {
        return Err(Error::InvalidParameter(format!(
            "coverage needs at least 100 trials, got {trials}"
        )));
    }
    let mut within = 0u64;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial + 1);
        let report = estimate_with_rng(plan, rho_true, &mut rng, seed)?;
        if (report.y_tilde - report.true_fidelity).abs() <= 2.0 * plan.epsilon {
            within += 1;
        }
    }
    let coverage = within as f64 / trials as f64;
    let half_width = 1.96 * (coverage * (1.0 - coverage) / trials as f64).sqrt();
    Ok(CoverageReport {
        trials,
        within,
        coverage,
        ci_low: (coverage - half_width).max(0.0),
        ci_high: (coverage + half_width).min(1.0),
    })
}

/// Expected per-label draw counts (ℓ·prob) and single-measurement totals
/// (ℓ·prob·m).
pub fn expected_schedule(plan: &SamplingPlan) -> Vec<ScheduleEntry> {
    plan.entries
        .iter()
        .map(|e| ScheduleEntry {
            pair: e.pair,
            probability: e.probability,
            expected_draws: plan.ell as f64 * e.probability,
            expected_single_measurements: plan.ell as f64 * e.probability * e.m as f64,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{ObservablePair, SudLabel};
    use crate::linalg::ComplexVector;
    use crate::states::{depolarize, two_qubit_target, two_qutrit_target};
    use std::f64::consts::PI;

    fn qubit_plan(tau: f64, eps: f64, delta: f64) -> SamplingPlan {
        let chi = char_sud(&two_qubit_target(tau).density(), 2, 2).unwrap();
        make_plan(&chi, eps, delta).unwrap()
    }

    #[test]
    fn plan_parameters() {
        let plan = qubit_plan(PI / 4.0, 0.01, 0.1);
        assert_eq!(plan.ell, 100_000);
        assert!((plan.probability_mass() - 1.0).abs() < 1e-10);
        for e in &plan.entries {
            if (e.chi - 0.5).abs() < 1e-12 {
                assert_eq!(e.m, 1, "m = ceil(ln20/5) = 1 for χ = 1/2 labels");
            }
        }
        // identity⊗identity carries probability 1/4 at every τ
        for &tau in &[0.2, PI / 4.0, 1.3] {
            let plan = qubit_plan(tau, 0.1, 0.2);
            let id_entry = plan
                .entries
                .iter()
                .find(|e| {
                    matches!(e.pair, ObservablePair::Sud(SudLabel { k: 0, .. }, SudLabel { k: 0, .. }))
                })
                .unwrap();
            assert!((id_entry.probability - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn plan_rejects_mixed_target() {
        let rho = depolarize(&two_qubit_target(0.5).density(), 0.3).unwrap();
        let chi = char_sud(&rho, 2, 2).unwrap();
        assert!(matches!(
            make_plan(&chi, 0.1, 0.1),
            Err(Error::ImpureTarget(_))
        ));
    }

    #[test]
    fn unified_m_matches_printed_qubit_formula() {
        // for two qubits every 𝖭 is √2, so 𝖭²𝖭′² = 4 and the unified m
        // reduces to ⌈ln(2/δ)/(2ℓε²χ²)⌉
        for &(eps, delta) in &[(0.1, 0.2), (0.05, 0.1), (0.01, 0.1)] {
            let plan = qubit_plan(0.7, eps, delta);
            for e in &plan.entries {
                let printed = ((2.0f64 / delta).ln()
                    / (2.0 * plan.ell as f64 * eps * eps * e.chi * e.chi))
                    .ceil() as u64;
                assert_eq!(e.m, printed.max(1));
            }
        }
    }

    #[test]
    fn measurement_outcomes_lie_in_spectrum() {
        let rho = two_qubit_target(0.0).density(); // |00⟩
        let pair = ObservablePair::sud(2, 3, 2, 3); // σ_z ⊗ σ_z
        let outcomes = measure_observable(&rho, &pair, 200, 7).unwrap();
        assert!(outcomes.iter().all(|&m| (m - 1.0).abs() < 1e-12));

        let pair = ObservablePair::sud(2, 0, 2, 0);
        let outcomes = measure_observable(&rho, &pair, 50, 7).unwrap();
        assert!(outcomes.iter().all(|&m| (m - 1.0).abs() < 1e-12));
    }

    #[test]
    fn diagonal_label_outcomes_are_eigenvalue_products() {
        // λ₈ spectrum is {1/√3, 1/√3, −2/√3}; joint outcomes are products
        let rho = two_qutrit_target(2.0).unwrap().density();
        let pair = ObservablePair::sud(3, 8, 3, 8);
        let s = 1.0 / 3.0f64.sqrt();
        let allowed = [s * s, -2.0 * s * s, 4.0 * s * s];
        for outcome in measure_observable(&rho, &pair, 500, 3).unwrap() {
            assert!(
                allowed.iter().any(|a| (outcome - a).abs() < 1e-10),
                "outcome {outcome} outside the joint spectrum"
            );
        }
    }

    #[test]
    fn plan_and_report_json_field_names() {
        let plan = qubit_plan(0.7, 0.1, 0.2);
        let js = plan.to_json();
        for field in ["ell", "epsilon", "delta", "entries"] {
            assert!(js.get(field).is_some(), "plan json missing {field}");
        }
        let entry = &js["entries"][0];
        for field in ["label", "chi", "prob", "m"] {
            assert!(entry.get(field).is_some(), "entry json missing {field}");
        }
        let report = estimate(&plan, &two_qubit_target(0.7).density(), 1).unwrap();
        let js = report.to_json();
        for field in ["y_tilde", "true_fidelity", "total_single_measurements", "seed"] {
            assert!(js.get(field).is_some(), "report json missing {field}");
        }
    }

    #[test]
    fn empirical_mean_matches_born_expectation() {
        let rho = two_qutrit_target(1.1).unwrap().density();
        let pair = ObservablePair::sud(3, 3, 3, 3);
        let op = pair.matrix().unwrap();
        let want = op.trace_product(&rho).re;
        let m = 100_000;
        let outcomes = measure_observable(&rho, &pair, m, 123).unwrap();
        let mean: f64 = outcomes.iter().sum::<f64>() / m as f64;
        let var: f64 =
            outcomes.iter().map(|o| (o - mean) * (o - mean)).sum::<f64>() / (m as f64 - 1.0);
        let se = (var / m as f64).sqrt();
        assert!(
            (mean - want).abs() < 5.0 * se.max(1e-6),
            "mean {mean} vs expectation {want} (se {se})"
        );
    }

    #[test]
    fn estimator_is_deterministic_and_near_unity_on_target() {
        let plan = qubit_plan(0.9, 0.1, 0.2);
        let rho = two_qubit_target(0.9).density();
        let a = estimate(&plan, &rho, 11).unwrap();
        let b = estimate(&plan, &rho, 11).unwrap();
        assert_eq!(a, b, "same seed must give identical reports");
        assert!((a.true_fidelity - 1.0).abs() < 1e-10);
        assert!((a.y_tilde - 1.0).abs() <= 2.0 * plan.epsilon);
        assert!(a.total_single_measurements >= plan.ell);
    }

    #[test]
    fn estimator_tracks_depolarized_fidelity() {
        let plan = qubit_plan(0.6, 0.1, 0.2);
        let target = two_qubit_target(0.6).density();
        let rho = depolarize(&target, 0.2).unwrap();
        let want = 0.8 + 0.2 / 4.0;
        let runs = 300;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for seed in 0..runs {
            let r = estimate(&plan, &rho, seed).unwrap();
            assert!((r.true_fidelity - want).abs() < 1e-10);
            sum += r.y_tilde;
            sq += r.y_tilde * r.y_tilde;
        }
        let mean = sum / runs as f64;
        let var = (sq / runs as f64 - mean * mean).max(0.0);
        let se = (var / runs as f64).sqrt();
        assert!(
            (mean - want).abs() < 3.0 * se.max(1e-4),
            "mean {mean} vs fidelity {want} (se {se})"
        );
    }

    #[test]
    fn coverage_bound_holds() {
        let plan = qubit_plan(0.8, 0.15, 0.2);
        let rho = two_qubit_target(0.8).density();
        let report = coverage_experiment(&plan, &rho, 200, 5).unwrap();
        assert!(
            report.coverage >= 1.0 - 2.0 * plan.delta,
            "coverage {} below bound",
            report.coverage
        );
        assert!(coverage_experiment(&plan, &rho, 50, 5).is_err());
    }

    #[test]
    fn coverage_does_not_degrade_with_smaller_delta() {
        let chi = char_sud(&two_qubit_target(0.8).density(), 2, 2).unwrap();
        let rho = depolarize(&two_qubit_target(0.8).density(), 0.4).unwrap();
        let loose = coverage_experiment(&make_plan(&chi, 0.2, 0.3).unwrap(), &rho, 150, 9).unwrap();
        let tight = coverage_experiment(&make_plan(&chi, 0.2, 0.05).unwrap(), &rho, 150, 9).unwrap();
        assert!(
            tight.coverage >= loose.coverage - 0.02,
            "coverage dropped from {} to {} as delta shrank",
            loose.coverage,
            tight.coverage
        );
    }

    #[test]
    fn unbiased_across_true_state_families() {
        let target = two_qubit_target(0.6);
        let plan = qubit_plan(0.6, 0.15, 0.2);
        let perp = ComplexVector::basis_state(4, 1);
        let perturbed = crate::states::mix_orthogonal(&target, &perp, 0.15)
            .unwrap()
            .projector();
        let mut mixed = depolarize(&target.density(), 0.5).unwrap();
        mixed = depolarize(&mixed, 0.2).unwrap();
        let states = [
            ("pure perturbed", perturbed),
            ("depolarized", depolarize(&target.density(), 0.25).unwrap()),
            ("heavily mixed", mixed),
        ];
        for (name, rho) in &states {
            let runs = 600u64;
            let mut sum = 0.0;
            let mut sq = 0.0;
            let mut fidelity = 0.0;
            for seed in 0..runs {
                let r = estimate(&plan, rho, seed).unwrap();
                sum += r.y_tilde;
                sq += r.y_tilde * r.y_tilde;
                fidelity = r.true_fidelity;
            }
            let mean = sum / runs as f64;
            let var = (sq / runs as f64 - mean * mean).max(0.0);
            let se = (var / runs as f64).sqrt().max(1e-6);
            assert!(
                (mean - fidelity).abs() < 3.0 * se,
                "{name}: mean {mean} vs fidelity {fidelity} ({:.2} SE)",
                (mean - fidelity).abs() / se
            );
        }
    }

    #[test]
    fn schedule_bookkeeping() {
        let plan = qubit_plan(PI / 4.0, 0.1, 0.2);
        let schedule = expected_schedule(&plan);
        let total_prob: f64 = schedule.iter().map(|s| s.probability).sum();
        assert!((total_prob - 1.0).abs() < 1e-9);
        for s in &schedule {
            if let ObservablePair::Sud(a, b) = s.pair {
                if (a.k, b.k) == (1, 1) {
                    // σ_x⊗σ_x expected draws = ℓ sin²(2τ)/4 = ℓ/4 at τ=π/4
                    assert!((s.expected_draws - plan.ell as f64 / 4.0).abs() < 1e-9);
                }
            }
        }

        // at τ = 0 the σ_x⊗σ_x label has no weight and is not in the plan
        let chi = char_sud(&two_qubit_target(0.0).density(), 2, 2).unwrap();
        let plan0 = make_plan(&chi, 0.1, 0.2).unwrap();
        assert!(plan0.entries.iter().all(|e| {
            !matches!(e.pair, ObservablePair::Sud(SudLabel { k: 1, .. }, SudLabel { k: 1, .. }))
        }));
    }

    #[test]
    fn diagonal_outcome_width_bound() {
        // bipartite diagonal-label outcome spread ≤ 2 for all n₁, n₂ ≤ 6
        for n1 in 2..=6u32 {
            for n2 in 2..=6u32 {
                let (n1f, n2f) = (n1 as f64, n2 as f64);
                let width = 2.0 * (n1f / ((n1f - 1.0) * n2f * (n2f - 1.0))).sqrt();
                assert!(width <= 2.0 + 1e-12, "width {width} at ({n1}, {n2})");
            }
        }
    }

    #[test]
    fn weyl_pairs_are_not_simulated() {
        let rho = two_qutrit_target(0.4).unwrap().density();
        let pair = ObservablePair::Weyl(
            crate::bases::WeylLabel { d: 3, p: 0, q: 1 },
            crate::bases::WeylLabel { d: 3, p: 1, q: 0 },
        );
        assert!(measure_observable(&rho, &pair, 10, 1).is_err());
    }

    #[test]
    fn qutrit_plan_proportions() {
        let chi = char_sud(&two_qutrit_target(2.2).unwrap().density(), 3, 3).unwrap();
        let plan = make_plan(&chi, 0.1, 0.2).unwrap();
        assert!(plan.entries.len() <= 15);
        assert!((plan.probability_mass() - 1.0).abs() < 1e-9);
        // identity⊗identity: χ = 1/3, probability 1/9 ≈ 11%
        let id = plan
            .entries
            .iter()
            .find(|e| matches!(e.pair, ObservablePair::Sud(SudLabel { k: 0, .. }, SudLabel { k: 0, .. })))
            .unwrap();
        assert!((id.probability - 1.0 / 9.0).abs() < 1e-12);
    }
}
