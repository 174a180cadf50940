//! Acceptance suite: one test per shipping criterion, each printing a
//! single PASS/FAIL line (run with `cargo test --test acceptance --
//! --nocapture` to see them). Tolerances are pinned in the assertions.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use quver_core::charfunc::{char_sud, char_weyl, fidelity_overlap, pair_normalizer, reconstruct};
use quver_core::dfe::{coverage_experiment, estimate, make_plan};
use quver_core::linalg::{negativity, ComplexMatrix, ComplexVector};
use quver_core::states::{depolarize, mix_orthogonal, two_qubit_target, two_qutrit_target};
use quver_core::verify::{
    strategy_bell_general, strategy_separable, strategy_two_qubit, strategy_two_qutrit,
    Theta3Policy,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const EPSILON: f64 = 0.01;
const DELTA: f64 = 0.1;

fn criterion(number: u32, name: &str, run: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    match run() {
        Ok(()) => println!(
            "ACCEPTANCE {number} ({name}): PASS [{:.2?}]",
            start.elapsed()
        ),
        Err(msg) => {
            println!("ACCEPTANCE {number} ({name}): FAIL - {msg}");
            panic!("acceptance criterion {number} ({name}) failed: {msg}");
        }
    }
}

fn expect(ok: bool, msg: impl Fn() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_pure(n: usize, rng: &mut StdRng) -> ComplexVector {
    ComplexVector::new(
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )
    .normalized()
}

fn random_mixed(n: usize, rng: &mut StdRng) -> ComplexMatrix {
    let mut rho = ComplexMatrix::zeros(n, n);
    let weights: Vec<f64> = (0..3).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in &weights {
        let v = random_pure(n, rng);
        rho = rho.add(&v.projector().scale(Complex64::new(w / total, 0.0)));
    }
    rho
}

#[test]
fn criterion_1_measurement_count_reproduction() {
    criterion(1, "measurement-count reproduction", || {
        let budget = Duration::from_secs(5);

        let t = Instant::now();
        let near_zero = strategy_two_qutrit(1e-4, Theta3Policy::Optimize)
            .map_err(|e| e.to_string())?;
        let n = near_zero.report(EPSILON, DELTA).map_err(|e| e.to_string())?.n;
        expect((456..=464).contains(&n), || {
            format!("general strategy near tau=0 gives n={n}, expected 460 +/- 1%")
        })?;
        expect(t.elapsed() < budget, || "tau->0 point exceeded 5 s".into())?;

        let t = Instant::now();
        let at_pi = strategy_two_qutrit(PI, Theta3Policy::Optimize).map_err(|e| e.to_string())?;
        let n = at_pi.report(EPSILON, DELTA).map_err(|e| e.to_string())?.n;
        expect((689..=701).contains(&n), || {
            format!("general strategy at tau=pi gives n={n}, expected 695 +/- 1%")
        })?;
        expect(t.elapsed() < budget, || "tau=pi point exceeded 5 s".into())?;

        let separable = strategy_separable(&two_qubit_target(0.0)).map_err(|e| e.to_string())?;
        let n = separable.report(EPSILON, DELTA).map_err(|e| e.to_string())?.n;
        expect((229..=231).contains(&n), || {
            format!("separable strategy gives n={n}, expected 230 +/- 1")
        })?;

        for d in [2usize, 3] {
            let bell = strategy_bell_general(d).map_err(|e| e.to_string())?;
            let n = bell.report(EPSILON, DELTA).map_err(|e| e.to_string())?.n;
            expect((344..=346).contains(&n), || {
                format!("Bell-type strategy at d={d} gives n={n}, expected 345 +/- 1")
            })?;
        }
        Ok(())
    });
}

#[test]
fn criterion_2_two_qubit_closed_form() {
    criterion(2, "two-qubit alpha closed form", || {
        for i in 1..=100 {
            let tau = PI / 2.0 * i as f64 / 101.0;
            let strategy = strategy_two_qubit(tau).map_err(|e| e.to_string())?;
            let alpha = strategy.alpha.ok_or("missing alpha")?;
            let closed = (2.0 - (2.0 * tau).sin()) / (4.0 + (2.0 * tau).sin());
            expect((alpha - closed).abs() < 1e-9, || {
                format!("alpha {alpha} differs from closed form {closed} at tau={tau}")
            })?;
        }
        let alpha = strategy_two_qubit(PI / 4.0)
            .map_err(|e| e.to_string())?
            .alpha
            .ok_or("missing alpha")?;
        expect((alpha - 0.2).abs() < 1e-12, || {
            format!("alpha(pi/4) = {alpha}, expected 0.2")
        })?;
        Ok(())
    });
}

#[test]
fn criterion_3_strategy_soundness_suite() {
    criterion(3, "strategy soundness", || {
        let start = Instant::now();
        let eps_error = 0.3;
        let points = 200;
        for i in 0..points {
            let tau = 2.0 * PI * i as f64 / (points - 1) as f64;

            let mut strategies = Vec::new();
            strategies.push((
                "two-qutrit",
                strategy_two_qutrit(tau, Theta3Policy::Optimize).map_err(|e| e.to_string())?,
            ));
            let qubit_target = two_qubit_target(tau);
            if qubit_target.schmidt_rank(1e-9) == 1 {
                strategies.push((
                    "separable",
                    strategy_separable(&qubit_target).map_err(|e| e.to_string())?,
                ));
            } else {
                strategies.push((
                    "two-qubit",
                    strategy_two_qubit(tau).map_err(|e| e.to_string())?,
                ));
            }

            for (kind, strategy) in strategies {
                strategy
                    .validate()
                    .map_err(|e| format!("{kind} at tau={tau}: {e}"))?;
                let beta = strategy.beta_spectral;
                expect(beta < 1.0, || format!("{kind} at tau={tau}: beta = {beta}"))?;

                let perp = strategy.beta_eigenvector().map_err(|e| e.to_string())?;
                let erroneous = mix_orthogonal(&strategy.target, &perp, eps_error)
                    .map_err(|e| e.to_string())?;
                let accept = strategy.omega.expectation(&erroneous).re;
                let predicted = 1.0 - eps_error * (1.0 - beta);
                expect((accept - predicted).abs() < 1e-9, || {
                    format!(
                        "{kind} at tau={tau}: erroneous-state acceptance {accept} vs {predicted}"
                    )
                })?;
            }
        }
        expect(start.elapsed() < Duration::from_secs(120), || {
            format!("suite took {:.1?}, budget 2 min", start.elapsed())
        })?;
        Ok(())
    });
}

#[test]
fn criterion_4_characteristic_function_suite() {
    criterion(4, "characteristic functions", || {
        let mut rng = StdRng::seed_from_u64(271828);

        // purity identity on random mixed states
        for d in [2usize, 3, 5] {
            let rho = random_mixed(d * d, &mut rng);
            let tr2 = rho.matmul(&rho).trace().re;
            let chi = char_sud(&rho, d, d).map_err(|e| e.to_string())?;
            expect((chi.purity() - tr2).abs() < 1e-10, || {
                format!("SU(d) purity mismatch at d={d}")
            })?;
            if d % 2 == 1 {
                let chi = char_weyl(&rho, d).map_err(|e| e.to_string())?;
                expect((chi.purity() - tr2).abs() < 1e-10, || {
                    format!("Weyl purity mismatch at d={d}")
                })?;
            }
        }

        // two-qutrit target: support, antisymmetries, chi(0,0) = 1/3
        for i in 0..100 {
            let tau = 0.05 + (2.0 * PI - 0.1) * i as f64 / 99.0;
            let rho = two_qutrit_target(tau).map_err(|e| e.to_string())?.density();
            let chi = char_sud(&rho, 3, 3).map_err(|e| e.to_string())?;
            expect((chi.sud_value(0, 0).re - 1.0 / 3.0).abs() < 1e-12, || {
                format!("chi(0,0) != 1/3 at tau={tau}")
            })?;
            let support = chi.support(1e-9).len();
            expect(support <= 15, || {
                format!("{support} support labels at tau={tau}")
            })?;
            for (a, b) in [(1, 2), (4, 5), (6, 7)] {
                let sum = chi.sud_value(a, a).re + chi.sud_value(b, b).re;
                expect(sum.abs() < 1e-12, || {
                    format!("chi({b},{b}) != -chi({a},{a}) at tau={tau}")
                })?;
            }
        }

        // reconstruction round trip
        for _ in 0..20 {
            let rho = random_mixed(9, &mut rng);
            for chi in [
                char_sud(&rho, 3, 3).map_err(|e| e.to_string())?,
                char_weyl(&rho, 3).map_err(|e| e.to_string())?,
            ] {
                let err = reconstruct(&chi)
                    .map_err(|e| e.to_string())?
                    .sub(&rho)
                    .frobenius_norm();
                expect(err < 1e-10, || format!("round-trip error {err}"))?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_5_fidelity_oracle_equivalence() {
    criterion(5, "fidelity oracle equivalence", || {
        let start = Instant::now();
        let mut rng = StdRng::seed_from_u64(314159);
        for d in [2usize, 3] {
            for _ in 0..100 {
                let a = random_pure(d * d, &mut rng);
                let b = random_pure(d * d, &mut rng);
                let direct = a.inner(&b).norm_sqr();
                let overlap = fidelity_overlap(
                    &char_sud(&a.projector(), d, d).map_err(|e| e.to_string())?,
                    &char_sud(&b.projector(), d, d).map_err(|e| e.to_string())?,
                )
                .map_err(|e| e.to_string())?;
                expect((overlap - direct).abs() < 1e-10, || {
                    format!("overlap {overlap} vs direct {direct} at d={d}")
                })?;
            }
        }
        for d in [3usize, 5] {
            let rho1 = random_mixed(d * d, &mut rng);
            let rho2 = random_mixed(d * d, &mut rng);
            let sud = fidelity_overlap(
                &char_sud(&rho1, d, d).map_err(|e| e.to_string())?,
                &char_sud(&rho2, d, d).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            let weyl = fidelity_overlap(
                &char_weyl(&rho1, d).map_err(|e| e.to_string())?,
                &char_weyl(&rho2, d).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            expect((sud - weyl).abs() < 1e-10, || {
                format!("basis disagreement {sud} vs {weyl} at d={d}")
            })?;
        }
        expect(start.elapsed() < Duration::from_secs(30), || {
            format!("took {:.1?}, budget 30 s", start.elapsed())
        })?;
        Ok(())
    });
}

#[test]
fn criterion_6_dfe_statistical_guarantees() {
    criterion(6, "DFE statistical guarantees", || {
        let start = Instant::now();
        let (eps, delta) = (0.1, 0.2);
        let target = two_qutrit_target(1.1).map_err(|e| e.to_string())?;
        let chi = char_sud(&target.density(), 3, 3).map_err(|e| e.to_string())?;
        let plan = make_plan(&chi, eps, delta).map_err(|e| e.to_string())?;

        let true_states = [
            ("target", target.density()),
            (
                "depolarized(0.3)",
                depolarize(&target.density(), 0.3).map_err(|e| e.to_string())?,
            ),
        ];

        for (name, rho) in &true_states {
            let report =
                coverage_experiment(&plan, rho, 500, 20260811).map_err(|e| e.to_string())?;
            expect(report.coverage >= 1.0 - 2.0 * delta, || {
                format!(
                    "coverage {} < {} for {name}",
                    report.coverage,
                    1.0 - 2.0 * delta
                )
            })?;
        }

        // unbiasedness over 1000 seeded runs
        for (name, rho) in &true_states {
            let runs = 1000u64;
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            let mut fidelity = 0.0;
            for seed in 0..runs {
                let r = estimate(&plan, rho, seed).map_err(|e| e.to_string())?;
                sum += r.y_tilde;
                sumsq += r.y_tilde * r.y_tilde;
                fidelity = r.true_fidelity;
            }
            let mean = sum / runs as f64;
            let var = (sumsq / runs as f64 - mean * mean).max(0.0);
            let se = (var / runs as f64).sqrt().max(1e-9);
            expect((mean - fidelity).abs() < 3.0 * se, || {
                format!(
                    "mean {mean} vs fidelity {fidelity} is {:.2} SE for {name}",
                    (mean - fidelity).abs() / se
                )
            })?;
        }

        expect(start.elapsed() < Duration::from_secs(300), || {
            format!("took {:.1?}, budget 5 min", start.elapsed())
        })?;
        Ok(())
    });
}

#[test]
fn criterion_7_sampling_schedule_reproduction() {
    criterion(7, "sampling schedule reproduction", || {
        use quver_core::bases::{ObservablePair, SudLabel};

        let find = |plan: &quver_core::dfe::SamplingPlan, k1: usize, k2: usize| {
            plan.entries
                .iter()
                .find(|e| {
                    matches!(e.pair, ObservablePair::Sud(SudLabel { k, .. }, SudLabel { k: kk, .. })
                        if k == k1 && kk == k2)
                })
                .map(|e| (e.probability, e.m))
        };

        for i in 1..=40 {
            let tau = PI / 2.0 * i as f64 / 41.0;
            let chi = char_sud(&two_qubit_target(tau).density(), 2, 2)
                .map_err(|e| e.to_string())?;
            let plan = make_plan(&chi, 0.1, 0.2).map_err(|e| e.to_string())?;
            let (p00, _) = find(&plan, 0, 0).ok_or("identity label missing")?;
            let (p33, _) = find(&plan, 3, 3).ok_or("sigma_z label missing")?;
            expect((p00 - 0.25).abs() < 1e-12 && (p33 - 0.25).abs() < 1e-12, || {
                format!("identity/zz probabilities {p00}, {p33} at tau={tau}")
            })?;
            let want_xx = (2.0 * tau).sin().powi(2) / 4.0;
            let (p11, _) = find(&plan, 1, 1).ok_or("sigma_x label missing")?;
            expect((p11 - want_xx).abs() < 1e-12, || {
                format!("xx probability {p11} vs {want_xx} at tau={tau}")
            })?;

            // the unified m with N^2 N'^2 = 4 is the printed qubit formula
            for e in &plan.entries {
                let printed = ((2.0f64 / plan.delta).ln()
                    / (2.0 * plan.ell as f64 * plan.epsilon.powi(2) * e.chi * e.chi))
                    .ceil() as u64;
                expect(e.m == printed.max(1), || {
                    format!("m {} vs printed qubit formula {printed}", e.m)
                })?;
            }
        }

        // N factors: sqrt(d) on the identity, sqrt(2) otherwise, products
        // 9 / 6 / 4 on two qutrits
        let p = |k1, k2| {
            pair_normalizer(&ObservablePair::sud(3, k1, 3, k2)).powi(2)
        };
        expect((p(0, 0) - 9.0).abs() < 1e-12, || "N(0,0)^2 != 9".into())?;
        expect((p(0, 4) - 6.0).abs() < 1e-12, || "N(0,k)^2 != 6".into())?;
        expect((p(2, 7) - 4.0).abs() < 1e-12, || "N(k,k')^2 != 4".into())?;

        // and the unified m on two qutrits matches the printed qutrit formula
        let chi = char_sud(
            &two_qutrit_target(2.2).map_err(|e| e.to_string())?.density(),
            3,
            3,
        )
        .map_err(|e| e.to_string())?;
        let plan = make_plan(&chi, 0.05, 0.1).map_err(|e| e.to_string())?;
        for e in &plan.entries {
            let nn = pair_normalizer(&e.pair).powi(2);
            let printed = (2.0 * (2.0f64 / plan.delta).ln()
                / (nn * plan.ell as f64 * plan.epsilon.powi(2) * e.chi * e.chi))
                .ceil() as u64;
            expect(e.m == printed.max(1), || {
                format!("qutrit m {} vs printed {printed}", e.m)
            })?;
        }
        Ok(())
    });
}

#[test]
fn criterion_8_negativity_landmarks() {
    criterion(8, "negativity landmarks", || {
        let points = 201;
        let taus: Vec<f64> = (0..points)
            .map(|i| 2.0 * PI * i as f64 / (points - 1) as f64)
            .collect();
        let values: Vec<f64> = taus
            .iter()
            .map(|&tau| {
                let rho = two_qutrit_target(tau)?.density();
                negativity(&rho, (3, 3))
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;

        expect(values[0].abs() < 1e-9, || {
            format!("N(0) = {}, expected 0", values[0])
        })?;
        let mid = points / 2; // tau = pi exactly on the odd grid
        expect((taus[mid] - PI).abs() < 1e-12, || "grid misses pi".into())?;
        expect((values[mid] - 0.5).abs() < 1e-9, || {
            format!("N(pi) = {}, expected 0.5", values[mid])
        })?;
        expect(
            values[mid] < values[mid - 1] && values[mid] < values[mid + 1],
            || {
                format!(
                    "no trough at pi: {} vs neighbors {} and {}",
                    values[mid],
                    values[mid - 1],
                    values[mid + 1]
                )
            },
        )?;
        Ok(())
    });
}

#[test]
fn criterion_9_end_to_end_determinism_and_runtime() {
    criterion(9, "end-to-end determinism and runtime", || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut outputs = Vec::new();
        for name in ["first.csv", "second.csv"] {
            let start = Instant::now();
            let out = Command::new(env!("CARGO_BIN_EXE_quver"))
                .args([
                    "sweep-verify",
                    "--d",
                    "3",
                    "--points",
                    "200",
                    "--out",
                    name,
                ])
                .current_dir(dir.path())
                .output()
                .map_err(|e| e.to_string())?;
            expect(out.status.success(), || {
                format!("sweep failed: {}", String::from_utf8_lossy(&out.stderr))
            })?;
            let elapsed = start.elapsed();
            expect(elapsed < Duration::from_secs(60), || {
                format!("sweep took {elapsed:.1?}, budget 60 s")
            })?;
            outputs.push(std::fs::read(dir.path().join(name)).map_err(|e| e.to_string())?);
        }
        expect(outputs[0] == outputs[1], || {
            "two identical configs produced different bytes".into()
        })?;

        // spot-check the sweep content: separable endpoints dispatch to the
        // rank-1 strategy, and the n column sits near the special-point
        // landmarks just inside the endpoints
        let text = String::from_utf8(outputs[0].clone()).map_err(|e| e.to_string())?;
        let rows: Vec<Vec<String>> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        expect(rows.len() == 200, || format!("{} rows", rows.len()))?;
        expect(
            rows[0][6] == "separable" && rows[0][5] == "230",
            || format!("first row {:?}", rows[0]),
        )?;
        expect(
            rows[199][6] == "separable" && rows[199][5] == "230",
            || format!("last row {:?}", rows[199]),
        )?;
        let n_first_interior: u64 = rows[1][5].parse().map_err(|_| "bad n")?;
        expect((455..=485).contains(&n_first_interior), || {
            format!("n just inside tau=0 is {n_first_interior}")
        })?;
        // rows 99 and 100 bracket tau = pi on the 200-point grid
        for idx in [99usize, 100] {
            let n_near_pi: u64 = rows[idx][5].parse().map_err(|_| "bad n")?;
            expect((685..=702).contains(&n_near_pi), || {
                format!("n near tau=pi is {n_near_pi} at row {idx}")
            })?;
        }
        Ok(())
    });
}
