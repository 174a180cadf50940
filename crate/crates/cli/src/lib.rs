//! Command implementations behind the `quver` binary: τ sweeps of
//! verification strategies, characteristic functions and negativity, DFE
//! plans and runs, and fidelity evaluation. Every command is deterministic
//! given its config (including the seed) and writes CSV or a JSON mirror
//! with fixed-precision numeric formatting.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use quver_core::bases::ObservablePair;
use quver_core::charfunc::{char_sud, char_weyl, fidelity_overlap, CharFunction};
use quver_core::dfe::{estimate, make_plan};
use quver_core::linalg::{negativity, ComplexMatrix, ComplexVector};
use quver_core::states::{
    depolarize, general_schmidt, max_entangled, mix_orthogonal, qutrit_orth1_amplitudes,
    theta_params, two_qubit_target, two_qutrit_target, QutritAngles, SchmidtState,
};
use quver_core::verify::{
    strategy_separable, strategy_two_qubit, strategy_two_qutrit, Strategy, Theta3Policy,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theta3Spec {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    None,
    Depolarize(f64),
    MixOrthogonal(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisChoice {
    Sud,
    Weyl,
}

/// Fully resolved sweep configuration; flags override config-file values,
/// which override these defaults.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub d: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    pub points: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub theta3: Theta3Spec,
    pub noise: NoiseSpec,
    pub basis: BasisChoice,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// Single evaluation point for `dfe-run`; defaults to `tau_min`.
    pub tau: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            d: 3,
            tau_min: 0.0,
            tau_max: 2.0 * PI,
            points: 200,
            epsilon: 0.01,
            delta: 0.1,
            theta3: Theta3Spec::Auto,
            noise: NoiseSpec::None,
            basis: BasisChoice::Sud,
            seed: 1234,
            out: None,
            format: OutputFormat::Csv,
            tau: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            bail!("points must be at least 2, got {}", self.points);
        }
        if !(0.0 < self.epsilon && self.epsilon < 1.0) {
            bail!("epsilon must lie in (0, 1), got {}", self.epsilon);
        }
        if !(0.0 < self.delta && self.delta < 1.0) {
            bail!("delta must lie in (0, 1), got {}", self.delta);
        }
        match self.noise {
            NoiseSpec::Depolarize(p) if !(0.0..=1.0).contains(&p) => {
                bail!("depolarizing probability must lie in [0, 1], got {p}")
            }
            NoiseSpec::MixOrthogonal(e) if !(0.0..=1.0).contains(&e) => {
                bail!("orthogonal mixing weight must lie in [0, 1], got {e}")
            }
            _ => Ok(()),
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        let step = (self.tau_max - self.tau_min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.tau_min + step * i as f64)
            .collect()
    }

    fn out_path(&self, command: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| {
            PathBuf::from(format!("{command}.{}", self.format.extension()))
        })
    }

    fn theta3_policy(&self) -> Theta3Policy {
        match self.theta3 {
            Theta3Spec::Auto => Theta3Policy::Optimize,
            Theta3Spec::Fixed(v) => Theta3Policy::Fixed(v),
        }
    }
}

pub fn parse_theta3(s: &str) -> Result<Theta3Spec> {
    if s.eq_ignore_ascii_case("auto") {
        Ok(Theta3Spec::Auto)
    } else {
        Ok(Theta3Spec::Fixed(s.parse::<f64>().with_context(|| {
            format!("theta3 must be 'auto' or a number, got '{s}'")
        })?))
    }
}

pub fn parse_noise(s: &str) -> Result<NoiseSpec> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(NoiseSpec::None);
    }
    if let Some(p) = s.strip_prefix("depol:") {
        return Ok(NoiseSpec::Depolarize(
            p.parse().with_context(|| format!("bad depol probability '{p}'"))?,
        ));
    }
    if let Some(e) = s.strip_prefix("orth:") {
        return Ok(NoiseSpec::MixOrthogonal(
            e.parse().with_context(|| format!("bad orth weight '{e}'"))?,
        ));
    }
    bail!("noise must be none, depol:<p> or orth:<eps>, got '{s}'")
}

pub fn parse_basis(s: &str) -> Result<BasisChoice> {
    match s.to_ascii_lowercase().as_str() {
        "sud" => Ok(BasisChoice::Sud),
        "weyl" => Ok(BasisChoice::Weyl),
        other => bail!("basis must be sud or weyl, got '{other}'"),
    }
}

pub fn parse_format(s: &str) -> Result<OutputFormat> {
    match s.to_ascii_lowercase().as_str() {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => bail!("format must be csv or json, got '{other}'"),
    }
}

/// Flat key = value config file (TOML table, no nesting). Keys mirror the
/// long flags with '-' or '_' accepted interchangeably.
pub fn apply_config_file(config: &mut SweepConfig, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let table: toml::Table = text
        .parse()
        .with_context(|| format!("cannot parse config file {}", path.display()))?;
    for (key, value) in table {
        let key = key.replace('-', "_");
        let bad_type = || anyhow!("config key '{key}' has unexpected type {value:?}");
        match key.as_str() {
            "d" => config.d = value.as_integer().ok_or_else(bad_type)? as usize,
            "tau_min" => config.tau_min = toml_f64(&value).ok_or_else(bad_type)?,
            "tau_max" => config.tau_max = toml_f64(&value).ok_or_else(bad_type)?,
            "tau" => config.tau = Some(toml_f64(&value).ok_or_else(bad_type)?),
            "points" => config.points = value.as_integer().ok_or_else(bad_type)? as usize,
            "epsilon" => config.epsilon = toml_f64(&value).ok_or_else(bad_type)?,
            "delta" => config.delta = toml_f64(&value).ok_or_else(bad_type)?,
            "seed" => config.seed = value.as_integer().ok_or_else(bad_type)? as u64,
            "theta3" => {
                config.theta3 = match toml_f64(&value) {
                    Some(v) => Theta3Spec::Fixed(v),
                    None => parse_theta3(value.as_str().ok_or_else(bad_type)?)?,
                }
            }
            "noise" => config.noise = parse_noise(value.as_str().ok_or_else(bad_type)?)?,
            "basis" => config.basis = parse_basis(value.as_str().ok_or_else(bad_type)?)?,
            "format" => config.format = parse_format(value.as_str().ok_or_else(bad_type)?)?,
            "out" => config.out = Some(PathBuf::from(value.as_str().ok_or_else(bad_type)?)),
            other => bail!("unknown config key '{other}'"),
        }
    }
    Ok(())
}

fn toml_f64(value: &toml::Value) -> Option<f64> {
    value.as_float().or_else(|| value.as_integer().map(|i| i as f64))
}

/// Fixed 12-significant-digit formatting for float columns.
pub fn fmt12(x: f64) -> String {
    // canonicalize -0 so identical values always render identically
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.11e}", x)
}

fn target_state(d: usize, tau: f64) -> Result<SchmidtState> {
    match d {
        2 => Ok(two_qubit_target(tau)),
        3 => Ok(two_qutrit_target(tau)?),
        other => bail!("closed-form targets exist for d = 2 or 3, got d = {other}"),
    }
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("cannot create {}", parent.display()))?;
        }
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            OutputFormat::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = serde_json::Map::new();
                        for (key, value) in self.header.iter().zip(row) {
                            let parsed = if value.is_empty() {
                                serde_json::Value::Null
                            } else if let Ok(n) = value.parse::<i64>() {
                                json!(n)
                            } else if let Ok(x) = value.parse::<f64>() {
                                json!(x)
                            } else {
                                json!(value)
                            };
                            obj.insert(key.clone(), parsed);
                        }
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let mut text =
                    serde_json::to_string_pretty(&serde_json::Value::Array(rows)).expect("json");
                text.push('\n');
                text
            }
        }
    }
}

fn build_strategy(config: &SweepConfig, tau: f64) -> Result<(Strategy, Option<f64>)> {
    let target = target_state(config.d, tau)?;
    if target.schmidt_rank(1e-9) == 1 {
        return Ok((strategy_separable(&target)?, None));
    }
    match config.d {
        2 => Ok((strategy_two_qubit(tau)?, None)),
        3 => {
            let strat = strategy_two_qutrit(tau, config.theta3_policy())?;
            let theta3 = strat.theta3;
            Ok((strat, theta3))
        }
        _ => unreachable!("target_state already restricted d"),
    }
}

/// τ sweep of the verification strategy: α, θ₃, both β values and n(ε, δ).
pub fn cmd_sweep_verify(config: &SweepConfig) -> Result<PathBuf> {
    config.validate()?;
    let header = [
        "tau",
        "alpha",
        "theta3",
        "beta_basis",
        "beta_spectral",
        "n",
        "strategy_kind",
    ]
    .map(String::from)
    .to_vec();
    let mut rows = Vec::with_capacity(config.points);
    for tau in config.grid() {
        let (strategy, theta3) = build_strategy(config, tau)?;
        strategy
            .validate()
            .with_context(|| format!("strategy invariants failed at tau = {tau}"))?;
        let report = strategy.report(config.epsilon, config.delta)?;
        rows.push(vec![
            fmt12(tau),
            strategy.alpha.map(fmt12).unwrap_or_default(),
            theta3.map(fmt12).unwrap_or_default(),
            fmt12(report.beta_basis),
            fmt12(report.beta_spectral),
            report.n.to_string(),
            strategy.kind.to_string(),
        ]);
    }
    let table = Table { header, rows };
    let path = config.out_path("sweep-verify");
    write_output(&path, &table.render(config.format))?;
    Ok(path)
}

fn sud_char_for(config: &SweepConfig, tau: f64) -> Result<CharFunction> {
    let target = target_state(config.d, tau)?;
    Ok(char_sud(&target.density(), config.d, config.d)?)
}

/// Union of support labels over the sweep, in storage order.
fn sweep_support(config: &SweepConfig, chis: &[CharFunction]) -> Vec<ObservablePair> {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for chi in chis {
        for (idx, v) in chi.values().iter().enumerate() {
            if v.norm() > 1e-9 {
                seen.insert(idx);
            }
        }
    }
    let pairs = chis
        .first()
        .map(|chi| chi.pairs())
        .unwrap_or_default();
    let _ = config;
    seen.into_iter().map(|i| pairs[i]).collect()
}

fn column_suffix(pair: &ObservablePair) -> String {
    pair.label_string().replace([',', ';'], "_")
}

/// τ sweep of the target's SU(d) characteristic function, one column per
/// support label.
pub fn cmd_sweep_charfunc(config: &SweepConfig) -> Result<PathBuf> {
    config.validate()?;
    if config.basis != BasisChoice::Sud {
        bail!("sweep-charfunc emits the SU(d) characteristic function; use --basis sud");
    }
    let grid = config.grid();
    let chis: Vec<CharFunction> = grid
        .iter()
        .map(|&tau| sud_char_for(config, tau))
        .collect::<Result<_>>()?;
    let support = sweep_support(config, &chis);
    let mut header = vec!["tau".to_string()];
    header.extend(support.iter().map(|p| format!("chi_{}", column_suffix(p))));
    let mut rows = Vec::with_capacity(grid.len());
    for (tau, chi) in grid.iter().zip(&chis) {
        let mut row = vec![fmt12(*tau)];
        for pair in &support {
            row.push(fmt12(chi.value(pair)?.re));
        }
        rows.push(row);
    }
    let table = Table { header, rows };
    let path = config.out_path("sweep-charfunc");
    write_output(&path, &table.render(config.format))?;
    Ok(path)
}

/// τ sweep of the negativity of the target state.
pub fn cmd_sweep_negativity(config: &SweepConfig) -> Result<PathBuf> {
    config.validate()?;
    let header = vec!["tau".to_string(), "negativity".to_string()];
    let mut rows = Vec::with_capacity(config.points);
    for tau in config.grid() {
        let target = target_state(config.d, tau)?;
        let n = negativity(&target.density(), (config.d, config.d))?;
        rows.push(vec![fmt12(tau), fmt12(n)]);
    }
    let table = Table { header, rows };
    let path = config.out_path("sweep-negativity");
    write_output(&path, &table.render(config.format))?;
    Ok(path)
}

/// τ sweep of the DFE sampling plan: per-label probability and m.
pub fn cmd_dfe_plan(config: &SweepConfig) -> Result<PathBuf> {
    config.validate()?;
    if config.basis != BasisChoice::Sud {
        bail!("dfe plans are built in the SU(d) basis; use --basis sud");
    }
    let grid = config.grid();
    let chis: Vec<CharFunction> = grid
        .iter()
        .map(|&tau| sud_char_for(config, tau))
        .collect::<Result<_>>()?;
    let support = sweep_support(config, &chis);
    let mut header = vec!["tau".to_string(), "ell".to_string()];
    for pair in &support {
        header.push(format!("prob_{}", column_suffix(pair)));
    }
    for pair in &support {
        header.push(format!("m_{}", column_suffix(pair)));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for (tau, chi) in grid.iter().zip(&chis) {
        let plan = make_plan(chi, config.epsilon, config.delta)?;
        let mut row = vec![fmt12(*tau), plan.ell.to_string()];
        for pair in &support {
            let entry = plan.entries.iter().find(|e| e.pair == *pair);
            row.push(entry.map(|e| fmt12(e.probability)).unwrap_or_default());
        }
        for pair in &support {
            let entry = plan.entries.iter().find(|e| e.pair == *pair);
            row.push(entry.map(|e| e.m.to_string()).unwrap_or_default());
        }
        rows.push(row);
    }
    let table = Table { header, rows };
    let path = config.out_path("dfe-plan");
    write_output(&path, &table.render(config.format))?;
    Ok(path)
}

/// True state for a run: the target, or the target under the configured
/// noise. The orthogonal admixture uses ψ⊥(τ) = sin τ|00⟩ − cos τ|11⟩ for
/// qubits and Ψ⊥₁(θ₁, θ₂, 0) for qutrits.
fn noisy_state(config: &SweepConfig, tau: f64) -> Result<ComplexMatrix> {
    let target = target_state(config.d, tau)?;
    match config.noise {
        NoiseSpec::None => Ok(target.density()),
        NoiseSpec::Depolarize(p) => Ok(depolarize(&target.density(), p)?),
        NoiseSpec::MixOrthogonal(eps) => {
            let perp = match config.d {
                2 => {
                    let mut v = ComplexVector::zeros(4);
                    v.set(0, tau.sin().into());
                    v.set(3, (-tau.cos()).into());
                    v
                }
                _ => {
                    let (t1, t2) = theta_params(tau)?;
                    let amps = qutrit_orth1_amplitudes(&QutritAngles {
                        theta1: t1,
                        theta2: t2,
                        theta3: 0.0,
                    });
                    let mut v = ComplexVector::zeros(9);
                    for (i, &a) in amps.iter().enumerate() {
                        v.set(i * 3 + i, a.into());
                    }
                    v
                }
            };
            let mixed = mix_orthogonal(&target, &perp, eps)?;
            Ok(mixed.projector())
        }
    }
}

/// One seeded DFE run at a single τ (defaults to `tau_min`); emits the
/// estimate report.
pub fn cmd_dfe_run(config: &SweepConfig) -> Result<PathBuf> {
    config.validate()?;
    if config.basis != BasisChoice::Sud {
        bail!("dfe-run simulates SU(d) measurements; use --basis sud");
    }
    let tau = config.tau.unwrap_or(config.tau_min);
    let chi = sud_char_for(config, tau)?;
    let plan = make_plan(&chi, config.epsilon, config.delta)?;
    let rho_true = noisy_state(config, tau)?;
    let report = estimate(&plan, &rho_true, config.seed)?;

    let path = config.out_path("dfe-run");
    let contents = match config.format {
        OutputFormat::Json => {
            let mut value = report.to_json();
            value["tau"] = json!(tau);
            value["epsilon"] = json!(config.epsilon);
            value["delta"] = json!(config.delta);
            value["ell"] = json!(plan.ell);
            let mut text = serde_json::to_string_pretty(&value)?;
            text.push('\n');
            text
        }
        OutputFormat::Csv => {
            let table = Table {
                header: [
                    "tau",
                    "y_tilde",
                    "true_fidelity",
                    "total_single_measurements",
                    "seed",
                ]
                .map(String::from)
                .to_vec(),
                rows: vec![vec![
                    fmt12(tau),
                    fmt12(report.y_tilde),
                    fmt12(report.true_fidelity),
                    report.total_single_measurements.to_string(),
                    report.seed.to_string(),
                ]],
            };
            table.render(OutputFormat::Csv)
        }
    };
    write_output(&path, &contents)?;
    Ok(path)
}

/// Parse a state specification: `qubit:<tau>`, `qutrit:<tau>`,
/// `maxent:<d>` or `schmidt:<d>:<c0,c1,...>`.
pub fn parse_state_spec(spec: &str) -> Result<SchmidtState> {
    let mut parts = spec.splitn(3, ':');
    let family = parts.next().unwrap_or_default();
    let arg = parts
        .next()
        .ok_or_else(|| anyhow!("state spec '{spec}' is missing an argument"))?;
    match family {
        "qubit" => Ok(two_qubit_target(
            arg.parse().with_context(|| format!("bad tau in '{spec}'"))?,
        )),
        "qutrit" => Ok(two_qutrit_target(
            arg.parse().with_context(|| format!("bad tau in '{spec}'"))?,
        )?),
        "maxent" => Ok(max_entangled(
            arg.parse().with_context(|| format!("bad dimension in '{spec}'"))?,
        )),
        "schmidt" => {
            let d: usize = arg.parse().with_context(|| format!("bad dimension in '{spec}'"))?;
            let coeffs: Vec<f64> = parts
                .next()
                .ok_or_else(|| anyhow!("schmidt spec '{spec}' needs coefficients"))?
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| anyhow!("bad coefficient '{c}': {e}")))
                .collect::<Result<_>>()?;
            Ok(general_schmidt(&coeffs, d)?)
        }
        other => bail!("unknown state family '{other}' (expected qubit, qutrit, maxent or schmidt)"),
    }
}

/// Fidelity of two states, computed as the characteristic-function overlap
/// in the chosen basis.
pub fn cmd_fidelity(spec_a: &str, spec_b: &str, basis: BasisChoice) -> Result<f64> {
    let a = parse_state_spec(spec_a)?;
    let b = parse_state_spec(spec_b)?;
    let (chi_a, chi_b) = match basis {
        BasisChoice::Sud => (
            char_sud(&a.density(), a.d, a.d)?,
            char_sud(&b.density(), b.d, b.d)?,
        ),
        BasisChoice::Weyl => (
            char_weyl(&a.density(), a.d)?,
            char_weyl(&b.density(), b.d)?,
        ),
    };
    Ok(fidelity_overlap(&chi_a, &chi_b)?)
}

/// One named self-check with its outcome.
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, run: impl FnOnce() -> Result<()>) -> CheckResult {
    match run() {
        Ok(()) => CheckResult {
            name,
            passed: true,
            detail: "ok".into(),
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Fast invariant suites over every module, for `quver check` and the
/// `--check` preflight.
pub fn run_checks() -> Vec<CheckResult> {
    use quver_core::bases::sud_generator;
    use quver_core::verify::n_measurements;

    vec![
        check("sud-generator-orthogonality", || {
            for d in 2..=4 {
                for a in 1..d * d {
                    for b in a..d * d {
                        let tr = sud_generator(d, a)?
                            .matmul(&sud_generator(d, b)?)
                            .trace();
                        let want = if a == b { 2.0 } else { 0.0 };
                        if (tr.re - want).abs() > 1e-12 || tr.im.abs() > 1e-12 {
                            bail!("Tr[λ_{a}λ_{b}] = {tr} at d = {d}");
                        }
                    }
                }
            }
            Ok(())
        }),
        check("weyl-orthogonality-d3", || {
            use quver_core::bases::weyl_d;
            for p in 0..3 {
                for q in 0..3 {
                    for p2 in 0..3 {
                        for q2 in 0..3 {
                            let tr = weyl_d(3, p, q)?
                                .adjoint()
                                .matmul(&weyl_d(3, p2, q2)?)
                                .trace();
                            let want = if (p, q) == (p2, q2) { 3.0 } else { 0.0 };
                            if (tr.re - want).abs() > 1e-12 || tr.im.abs() > 1e-12 {
                                bail!("D-orthogonality failed at ({p},{q}) vs ({p2},{q2})");
                            }
                        }
                    }
                }
            }
            Ok(())
        }),
        check("strategy-soundness", || {
            for &tau in &[0.4, 1.2, 2.5, 4.0] {
                strategy_two_qubit(tau)?.validate()?;
                strategy_two_qutrit(tau, Theta3Policy::Fixed(0.0))?.validate()?;
            }
            Ok(())
        }),
        check("two-qubit-alpha-closed-form", || {
            for i in 1..20 {
                let tau = PI / 2.0 * i as f64 / 20.0;
                let alpha = strategy_two_qubit(tau)?
                    .alpha
                    .ok_or_else(|| anyhow!("missing alpha"))?;
                let want = (2.0 - (2.0 * tau).sin()) / (4.0 + (2.0 * tau).sin());
                if (alpha - want).abs() > 1e-9 {
                    bail!("alpha {alpha} vs closed form {want} at tau = {tau}");
                }
            }
            Ok(())
        }),
        check("charfunc-purity-and-round-trip", || {
            for &tau in &[0.3, 1.9] {
                let rho = two_qutrit_target(tau)?.density();
                let chi = char_sud(&rho, 3, 3)?;
                if (chi.purity() - 1.0).abs() > 1e-10 {
                    bail!("purity {} at tau = {tau}", chi.purity());
                }
                let back = quver_core::charfunc::reconstruct(&chi)?;
                if back.sub(&rho).frobenius_norm() > 1e-10 {
                    bail!("round-trip failure at tau = {tau}");
                }
            }
            Ok(())
        }),
        check("measurement-count-landmarks", || {
            if n_measurements(0.0, 0.01, 0.1)? != 230 {
                bail!("n(beta=0) != 230");
            }
            if n_measurements(1.0 / 3.0, 0.01, 0.1)? != 345 {
                bail!("n(beta=1/3) != 345");
            }
            Ok(())
        }),
        check("dfe-plan-bookkeeping", || {
            let chi = char_sud(&two_qubit_target(PI / 4.0).density(), 2, 2)?;
            let plan = make_plan(&chi, 0.01, 0.1)?;
            if plan.ell != 100_000 {
                bail!("ell = {}", plan.ell);
            }
            if (plan.probability_mass() - 1.0).abs() > 1e-10 {
                bail!("probability mass {}", plan.probability_mass());
            }
            Ok(())
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_helpers() {
        assert_eq!(parse_theta3("auto").unwrap(), Theta3Spec::Auto);
        assert_eq!(parse_theta3("1.5").unwrap(), Theta3Spec::Fixed(1.5));
        assert!(parse_theta3("bogus").is_err());

        assert_eq!(parse_noise("none").unwrap(), NoiseSpec::None);
        assert_eq!(parse_noise("depol:0.2").unwrap(), NoiseSpec::Depolarize(0.2));
        assert_eq!(
            parse_noise("orth:0.1").unwrap(),
            NoiseSpec::MixOrthogonal(0.1)
        );
        assert!(parse_noise("what").is_err());

        assert!(parse_basis("weyl").is_ok());
        assert!(parse_basis("csv").is_err());
        assert!(parse_format("json").is_ok());
    }

    #[test]
    fn state_specs() {
        let s = parse_state_spec("qubit:0.785398").unwrap();
        assert_eq!(s.d, 2);
        let s = parse_state_spec("maxent:3").unwrap();
        assert_eq!(s.coeffs.len(), 3);
        let s = parse_state_spec("schmidt:3:0.6,0.8").unwrap();
        assert_eq!(s.d, 3);
        assert!(parse_state_spec("schmidt:3:0.6,0.9").is_err());
        assert!(parse_state_spec("qubit").is_err());
        assert!(parse_state_spec("wat:3").is_err());
    }

    #[test]
    fn fidelity_values() {
        let f = cmd_fidelity("qutrit:0", "qutrit:3.14159265358979", BasisChoice::Sud).unwrap();
        assert!((f - 0.5).abs() < 1e-10);
        let same = cmd_fidelity("qubit:0.7", "qubit:0.7", BasisChoice::Sud).unwrap();
        assert!((same - 1.0).abs() < 1e-12);
        let sud = cmd_fidelity("qutrit:1.0", "maxent:3", BasisChoice::Sud).unwrap();
        let weyl = cmd_fidelity("qutrit:1.0", "maxent:3", BasisChoice::Weyl).unwrap();
        assert!((sud - weyl).abs() < 1e-10);
        // Weyl basis rejects even dimensions
        assert!(cmd_fidelity("qubit:0.3", "qubit:0.4", BasisChoice::Weyl).is_err());
    }

    #[test]
    fn grid_is_inclusive() {
        let config = SweepConfig {
            tau_min: 0.0,
            tau_max: 1.0,
            points: 5,
            ..Default::default()
        };
        let grid = config.grid();
        assert_eq!(grid.len(), 5);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[4], 1.0);
    }

    #[test]
    fn checks_pass() {
        for result in run_checks() {
            assert!(result.passed, "{}: {}", result.name, result.detail);
        }
    }
}
