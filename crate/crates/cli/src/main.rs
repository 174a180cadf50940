use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use quver_cli::{
    apply_config_file, cmd_dfe_plan, cmd_dfe_run, cmd_fidelity, cmd_sweep_charfunc,
    cmd_sweep_negativity, cmd_sweep_verify, parse_basis, parse_format, parse_noise, parse_theta3,
    run_checks, BasisChoice, SweepConfig,
};

/// Verification strategies and direct fidelity estimation for bipartite
/// qudit states: τ sweeps, sampling plans and seeded Monte Carlo runs.
#[derive(Parser)]
#[command(name = "quver", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Flat key = value config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Per-site dimension (2 or 3 for the closed-form targets).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    /// Single evaluation point for dfe-run (defaults to tau-min).
    #[arg(long)]
    tau: Option<f64>,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// 'auto' to optimize the free angle, or a fixed value in radians.
    #[arg(long)]
    theta3: Option<String>,
    /// none | depol:<p> | orth:<eps>
    #[arg(long)]
    noise: Option<String>,
    /// sud | weyl
    #[arg(long)]
    basis: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (defaults to <command>.<format>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Run the module invariant suites before the command.
    #[arg(long, default_value_t = false)]
    check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep verification strategies over τ: α, θ₃, β and n(ε, δ).
    SweepVerify(CommonArgs),
    /// Sweep the target's SU(d) characteristic function over τ.
    SweepCharfunc(CommonArgs),
    /// Sweep the negativity of the target state over τ.
    SweepNegativity(CommonArgs),
    /// Emit the DFE importance-sampling plan (probabilities and m) per τ.
    DfePlan(CommonArgs),
    /// Run one seeded DFE estimate against a (possibly noisy) true state.
    DfeRun(CommonArgs),
    /// Print the fidelity of two states via characteristic functions.
    Fidelity {
        /// First state: qubit:<tau> | qutrit:<tau> | maxent:<d> | schmidt:<d>:<c0,c1,...>
        state_a: String,
        /// Second state, same grammar.
        state_b: String,
        /// sud | weyl
        #[arg(long, default_value = "sud")]
        basis: String,
    },
    /// Run the module invariant suites and report pass/fail per suite.
    Check,
}

fn resolve(args: &CommonArgs) -> Result<SweepConfig> {
    let mut config = SweepConfig::default();
    if let Some(path) = &args.config {
        apply_config_file(&mut config, path)?;
    }
    if let Some(d) = args.d {
        config.d = d;
    }
    if let Some(v) = args.tau_min {
        config.tau_min = v;
    }
    if let Some(v) = args.tau_max {
        config.tau_max = v;
    }
    if let Some(v) = args.tau {
        config.tau = Some(v);
    }
    if let Some(v) = args.points {
        config.points = v;
    }
    if let Some(v) = args.epsilon {
        config.epsilon = v;
    }
    if let Some(v) = args.delta {
        config.delta = v;
    }
    if let Some(s) = &args.theta3 {
        config.theta3 = parse_theta3(s)?;
    }
    if let Some(s) = &args.noise {
        config.noise = parse_noise(s)?;
    }
    if let Some(s) = &args.basis {
        config.basis = parse_basis(s)?;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(p) = &args.out {
        config.out = Some(p.clone());
    }
    if let Some(s) = &args.format {
        config.format = parse_format(s)?;
    }
    Ok(config)
}

fn preflight(args: &CommonArgs) -> Result<()> {
    if args.check {
        run_self_checks()?;
    }
    Ok(())
}

fn run_self_checks() -> Result<()> {
    let results = run_checks();
    let mut failed = 0;
    for r in &results {
        println!(
            "check {:<32} {}",
            r.name,
            if r.passed { "ok" } else { "FAILED" }
        );
        if !r.passed {
            eprintln!("  {}", r.detail);
            failed += 1;
        }
    }
    if failed > 0 {
        anyhow::bail!("{failed} invariant suite(s) failed");
    }
    Ok(())
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::SweepVerify(args) => {
            preflight(&args)?;
            let path = cmd_sweep_verify(&resolve(&args)?)?;
            println!("wrote {}", path.display());
        }
        Command::SweepCharfunc(args) => {
            preflight(&args)?;
            let path = cmd_sweep_charfunc(&resolve(&args)?)?;
            println!("wrote {}", path.display());
        }
        Command::SweepNegativity(args) => {
            preflight(&args)?;
            let path = cmd_sweep_negativity(&resolve(&args)?)?;
            println!("wrote {}", path.display());
        }
        Command::DfePlan(args) => {
            preflight(&args)?;
            let path = cmd_dfe_plan(&resolve(&args)?)?;
            println!("wrote {}", path.display());
        }
        Command::DfeRun(args) => {
            preflight(&args)?;
            let path = cmd_dfe_run(&resolve(&args)?)?;
            println!("wrote {}", path.display());
        }
        Command::Fidelity {
            state_a,
            state_b,
            basis,
        } => {
            let basis: BasisChoice = parse_basis(&basis)?;
            let f = cmd_fidelity(&state_a, &state_b, basis)?;
            println!("{f:.12}");
        }
        Command::Check => run_self_checks()?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
