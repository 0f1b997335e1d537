//! Command-line front end for the `fsl` binary: config parsing, scenario
//! dispatch, deterministic output bundles, and the selftest oracle suite.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config, RunConfig};
use crate::error::{Error, Result};
use crate::output::write_bundle;
use crate::scenarios;

#[derive(Parser)]
#[command(
    name = "fsl",
    about = "Fock-state lattice simulator: topological states of quantized light",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// JSON config file; defaults are the experimental parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the result bundle.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
    /// Comma-separated snapshot times in ns (overrides the config).
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    /// Evolve with dephasing channels instead of the closed system.
    #[arg(long)]
    open_system: bool,
    /// Seed for synthetic-noise reproducibility (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// SSH adiabatic transport of the zero-energy state (d=2).
    Transport(RunArgs),
    /// Pseudo-Landau-level spectroscopy (d=3).
    Landau(RunArgs),
    /// Valley Hall effect with a binomial initial state.
    VheBinomial(RunArgs),
    /// Valley Hall effect with coherent initial states.
    VheCoherent(RunArgs),
    /// Floquet Haldane model and chiral edge currents.
    Haldane(RunArgs),
    /// Classical-to-quantum crossover sweep.
    ClassicalQuantum(RunArgs),
    /// Run the built-in oracle checks and exit nonzero on any failure.
    Selftest,
}

/// Entry point; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let (scenario, args) = match &cli.command {
        Command::Transport(a) => ("transport", a.clone()),
        Command::Landau(a) => ("landau", a.clone()),
        Command::VheBinomial(a) => ("vhe-binomial", a.clone()),
        Command::VheCoherent(a) => ("vhe-coherent", a.clone()),
        Command::Haldane(a) => ("haldane", a.clone()),
        Command::ClassicalQuantum(a) => ("classical-quantum", a.clone()),
        Command::Selftest => {
            return match selftest(&mut std::io::stdout()) {
                Ok(true) => 0,
                Ok(false) => 1,
                Err(e) => {
                    report_error(&e);
                    1
                }
            }
        }
    };
    match run_scenario_command(scenario, &args) {
        Ok(()) => 0,
        Err(e) => {
            report_error(&e);
            match e {
                Error::Config { .. } | Error::UnknownScenario(_) => 2,
                _ => 1,
            }
        }
    }
}

fn report_error(e: &Error) {
    let record = serde_json::json!({
        "error": e.to_string(),
    });
    eprintln!("{record}");
}

fn run_scenario_command(scenario: &str, args: &RunArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let cfg = parse_config(&text)?;
            if cfg.scenario() != scenario {
                return Err(Error::Config {
                    path: "$.scenario".into(),
                    message: format!(
                        "config is for `{}` but the `{scenario}` subcommand was invoked",
                        cfg.scenario()
                    ),
                });
            }
            cfg
        }
        None => RunConfig::default_for(scenario)?,
    };
    apply_overrides(&mut config, args);
    let result = scenarios::run(&config)?;
    let dir = write_bundle(&result, &args.out)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {}", dir.display());
    for (name, value) in &result.metrics {
        println!("  {name} = {value}");
    }
    Ok(())
}

fn apply_overrides(config: &mut RunConfig, args: &RunArgs) {
    if args.open_system && !matches!(config, RunConfig::Transport(_) | RunConfig::Haldane(_)) {
        eprintln!(
            "warning: --open-system has no effect on `{}` (closed-system scenario)",
            config.scenario()
        );
    }
    match config {
        RunConfig::Transport(c) => {
            if let Some(s) = &args.snapshots {
                c.snapshot_times_ns = s.clone();
            }
            if let Some(seed) = args.seed {
                c.seed = seed;
            }
            c.open_system |= args.open_system;
        }
        RunConfig::Landau(c) => {
            if let Some(seed) = args.seed {
                c.seed = seed;
            }
        }
        RunConfig::VheBinomial(c) => {
            if let Some(s) = &args.snapshots {
                c.snapshot_times_ns = s.clone();
            }
            if let Some(seed) = args.seed {
                c.seed = seed;
            }
        }
        RunConfig::VheCoherent(c) => {
            if let Some(s) = &args.snapshots {
                c.snapshot_times_ns = s.clone();
            }
            if let Some(seed) = args.seed {
                c.seed = seed;
            }
        }
        RunConfig::Haldane(c) => {
            if let Some(seed) = args.seed {
                c.seed = seed;
            }
            c.open_system |= args.open_system;
        }
        RunConfig::ClassicalQuantum(c) => {
            if let Some(seed) = args.seed {
                c.seed = seed;
            }
        }
    }
}

/// Runs the oracle suite, printing one pass/fail line per check. Returns
/// whether every check passed.
pub fn selftest(out: &mut dyn std::io::Write) -> Result<bool> {
    use crate::analysis;
    use crate::fock;
    use crate::model;
    use crate::units::ang_mhz;

    type Check = (&'static str, Box<dyn Fn() -> Result<String>>);
    let checks: Vec<Check> = vec![
        (
            "basis dimensions (d=2: 2N+1, d=3: (N+1)^2)",
            Box::new(|| {
                for n in 0..=8u32 {
                    let d2 = fock::FockBasis::enumerate(2, n)?.dim();
                    let d3 = fock::FockBasis::enumerate(3, n)?.dim();
                    if d2 != 2 * n as usize + 1 || d3 != (n as usize + 1).pow(2) {
                        return Err(Error::Linalg(format!("dimension mismatch at N={n}")));
                    }
                }
                Ok("N <= 8".into())
            }),
        ),
        (
            "zero-mode count d=3 N=5",
            Box::new(|| {
                let g = ang_mhz(9.0);
                let b = fock::FockBasis::enumerate(3, 5)?;
                let h = model::build_jc(&model::SystemConfig::resonant(3, g), &[g, g, g], &b)?;
                let rep = analysis::diagonalize(&h)?;
                let zeros = rep
                    .eigenvalues
                    .iter()
                    .filter(|e| e.abs() / g < 1e-9)
                    .count();
                if zeros == 6 {
                    Ok("6 zero modes".into())
                } else {
                    Err(Error::Linalg(format!(
                        "expected 6 zero modes, found {zeros}"
                    )))
                }
            }),
        ),
        (
            "kappa formula (3, 50) MHz",
            Box::new(|| {
                let k = model::kappa_from_drive(3.0, 50.0)?;
                if (k + 0.54).abs() < 1e-12 {
                    Ok(format!("kappa = {k} MHz"))
                } else {
                    Err(Error::Linalg(format!("kappa = {k}, expected -0.54")))
                }
            }),
        ),
        (
            "binomial state annihilated by resonant JC",
            Box::new(|| {
                let s = 0.5f64.sqrt();
                let st = fock::binomial_state(5, s, s)?;
                let b = st.blocks()[0].basis.clone();
                let g = ang_mhz(9.0);
                let h = model::build_jc(&model::SystemConfig::resonant(2, g), &[g * s, g * s], &b)?;
                let r = h.apply(&st.blocks()[0].amp)?;
                let norm: f64 = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm < 1e-12 {
                    Ok(format!("residual {norm:.1e}"))
                } else {
                    Err(Error::Linalg(format!("residual {norm:.3e}")))
                }
            }),
        ),
        (
            "chirality commutes with resonant JC (N=4)",
            Box::new(|| {
                let g = ang_mhz(9.0);
                let b = fock::FockBasis::enumerate(3, 4)?;
                let h = model::build_jc(&model::SystemConfig::resonant(3, g), &[g, g, g], &b)?;
                let c = analysis::chirality_operator(&b)?;
                let norm = h.commutator(&c)?.scale();
                if norm < 1e-10 {
                    Ok(format!("commutator {norm:.1e}"))
                } else {
                    Err(Error::Linalg(format!("commutator {norm:.3e}")))
                }
            }),
        ),
        (
            "Lindblad dephasing matches analytic two-level decay",
            Box::new(|| {
                use crate::dynamics::*;
                use ndarray::Array2;
                let gamma = ang_mhz(0.25);
                let b = fock::FockBasis::enumerate(1, 1)?;
                let mut rho = Array2::<crate::C64>::zeros((2, 2));
                rho[[0, 0]] = crate::C64::new(0.5, 0.0);
                rho[[1, 1]] = crate::C64::new(0.5, 0.0);
                rho[[0, 1]] = crate::C64::new(0.5, 0.0);
                rho[[1, 0]] = crate::C64::new(0.5, 0.0);
                let h = TimeDependentH::from_static(fock::Operator::from_square(
                    b.clone(),
                    Array2::zeros((2, 2)),
                    true,
                )?)?;
                let st = crate::fock::QuantumState::Mixed(fock::MixedState {
                    blocks: vec![fock::MixedBlock { basis: b, rho }],
                });
                let spec = EvolutionSpec::closed(400.0, 400.0)
                    .with_step(0.5)
                    .open(vec![CollapseChannel {
                        mode: 1,
                        rate: gamma,
                    }]);
                let traj = evolve_lindblad(&[h], &st, &spec)?;
                let last = traj.states.last().unwrap().as_mixed().unwrap();
                let got = last.blocks[0].rho[[0, 1]].re;
                let expect = 0.5 * (-gamma * 400.0).exp();
                if (got - expect).abs() < 1e-9 {
                    Ok(format!("coherence {got:.6} = 0.5 e^(-gamma t)"))
                } else {
                    Err(Error::Linalg(format!("coherence {got} vs {expect}")))
                }
            }),
        ),
        (
            "swap readout inversion round trip (d=2, m=3)",
            Box::new(|| {
                use crate::readout::*;
                let cfg = ReadoutConfig::default_for(2, 3);
                let mut probs = vec![0.0; 16];
                probs[0] = 0.25;
                probs[5] = 0.25;
                probs[7] = 0.5;
                let jp = JointPopulations::new(2, 3, probs.clone())?;
                let signals = joint_swap_signal(&jp, &cfg)?;
                let inv = invert_populations(&signals, &cfg)?;
                let err = inv
                    .joint
                    .probs
                    .iter()
                    .zip(&probs)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if err < 1e-6 {
                    Ok(format!("max error {err:.1e}"))
                } else {
                    Err(Error::Linalg(format!("round-trip error {err:.3e}")))
                }
            }),
        ),
        (
            "tomography round trip on |1><1| (m=4)",
            Box::new(|| {
                use crate::readout::*;
                use ndarray::Array2;
                let plan = TomographyPlan::default_plan(4);
                let mut rho = Array2::<crate::C64>::zeros((5, 5));
                rho[[1, 1]] = crate::C64::new(1.0, 0.0);
                let mut data = Array2::<f64>::zeros((plan.betas.len(), 5));
                for (k, &beta) in plan.betas.iter().enumerate() {
                    for (n, p) in displaced_populations(&rho, beta, 4).into_iter().enumerate() {
                        data[[k, n]] = p;
                    }
                }
                let rec = tomography_reconstruct(&data, &plan)?;
                let f = state_fidelity(&rec.rho, &rho)?;
                if f > 0.999 {
                    Ok(format!("fidelity {f:.6}"))
                } else {
                    Err(Error::Linalg(format!("fidelity {f}")))
                }
            }),
        ),
        (
            "Wigner reference values (vacuum, |1>)",
            Box::new(|| {
                use ndarray::Array2;
                let grid = analysis::WignerGrid::square(1.0, 3);
                let mut vac = Array2::<crate::C64>::zeros((8, 8));
                vac[[0, 0]] = crate::C64::new(1.0, 0.0);
                let w = analysis::wigner(&vac, &grid)?;
                let v0 = w.values[[1, 1]];
                let mut one = Array2::<crate::C64>::zeros((8, 8));
                one[[1, 1]] = crate::C64::new(1.0, 0.0);
                let w1 = analysis::wigner(&one, &grid)?;
                let v1 = w1.values[[1, 1]];
                let t = 2.0 / std::f64::consts::PI;
                if (v0 - t).abs() < 1e-10 && (v1 + t).abs() < 1e-10 {
                    Ok(format!("W(0) = {v0:.4} / {v1:.4}"))
                } else {
                    Err(Error::Linalg(format!("W(0) = {v0} / {v1}")))
                }
            }),
        ),
    ];

    let mut all_ok = true;
    for (name, check) in checks {
        match check() {
            Ok(info) => writeln!(out, "ok   {name} ({info})")?,
            Err(e) => {
                all_ok = false;
                writeln!(out, "FAIL {name}: {e}")?;
            }
        }
    }
    writeln!(
        out,
        "{}",
        if all_ok {
            "selftest: all checks passed"
        } else {
            "selftest: FAILURES detected"
        }
    )?;
    Ok(all_ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        let mut buf = Vec::new();
        assert!(selftest(&mut buf).unwrap());
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("6 zero modes"), "{text}");
        assert!(text.contains("kappa = -0.54"), "{text}");
        assert!(!text.contains("FAIL"), "{text}");
    }
}
