use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gsav::config::{Init, RunConfig};
use gsav::converge::{converge, DEFAULT_TAUS, DEFAULT_TAU_REF};
use gsav::error::{HarnessError, Result};
use gsav::output::{fmt_float, DIAGNOSTICS_FILE};
use gsav::verify::{verify, Profile, VerifyOptions};
use gsav_core::{Boundary, GridSpec, Potential, Scheme, SchemeConfig, Sigma, StepMode};

#[derive(Parser)]
#[command(name = "gsav", version, about = "Bound- and energy-preserving Allen-Cahn solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Step one trajectory and write diagnostics.csv plus snapshots.
    Run {
        #[command(flatten)]
        model: ModelArgs,
        /// Abort on the first violation of the bound or the energy law.
        #[arg(long)]
        verify_invariants: bool,
    },
    /// Temporal convergence sweep against a fine-step ei2 reference.
    Converge {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated step sizes; defaults to 2^-4 .. 2^-9.
        #[arg(long, value_delimiter = ',')]
        taus: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_TAU_REF)]
        tau_ref: f64,
    },
    /// Run the lemma, oracle and invariant suites.
    Verify {
        /// Comma-separated profiles; all of them when omitted.
        #[arg(long, value_enum, value_delimiter = ',', num_args = 0..)]
        profile: Option<Vec<Profile>>,
        /// Write the machine-readable report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        grid_m: usize,
        #[arg(long, default_value_t = 2.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Trajectory κ as a multiple of the Lipschitz bound.
        #[arg(long, default_value_t = 1.0)]
        kappa_factor: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Periodic,
    Neumann,
}

#[derive(Clone, Copy, ValueEnum)]
enum PotentialArg {
    DoubleWell,
    FloryHuggins,
}

#[derive(Clone, Copy, ValueEnum)]
enum SigmaArg {
    Const,
    Exp,
    Arctan,
    Tanh,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Ei1,
    Ei2,
    Stab1,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Sine,
    Random,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 128)]
    grid_m: usize,
    #[arg(long, default_value_t = 1.0)]
    grid_l: f64,
    #[arg(long, value_enum, default_value = "periodic")]
    boundary: BoundaryArg,
    #[arg(long, value_enum, default_value = "double-well")]
    potential: PotentialArg,
    #[arg(long, default_value_t = 0.8)]
    theta: f64,
    #[arg(long, default_value_t = 1.6)]
    theta_c: f64,
    #[arg(long, value_enum, default_value = "exp")]
    sigma: SigmaArg,
    /// Rate of the exponential σ, or the value of the constant σ.
    #[arg(long, default_value_t = 1.0)]
    sigma_a: f64,
    #[arg(long, value_enum, default_value = "ei2")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    /// Stabilizing constant; defaults to the Lipschitz bound of the reaction.
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    tau: f64,
    #[arg(long)]
    adaptive: bool,
    #[arg(long, default_value_t = 1e-4)]
    tau_min: f64,
    #[arg(long, default_value_t = 0.1)]
    tau_max: f64,
    #[arg(long, default_value_t = 1e5)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    t_end: f64,
    #[arg(long, value_enum, default_value = "sine")]
    init: InitArg,
    #[arg(long, default_value_t = 0.1)]
    amplitude: f64,
    #[arg(long, default_value_t = -0.8)]
    lo: f64,
    #[arg(long, default_value_t = 0.8)]
    hi: f64,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Snapshot period in steps; 0 writes none.
    #[arg(long, default_value_t = 0)]
    snapshot_every: u64,
}

impl ModelArgs {
    fn to_config(&self, verify_invariants: bool) -> Result<RunConfig> {
        let boundary = match self.boundary {
            BoundaryArg::Periodic => Boundary::Periodic,
            BoundaryArg::Neumann => Boundary::Neumann,
        };
        let grid = GridSpec::new(self.grid_l, self.grid_m, boundary)?;
        let potential = match self.potential {
            PotentialArg::DoubleWell => Potential::double_well(),
            PotentialArg::FloryHuggins => Potential::flory_huggins(self.theta, self.theta_c)?,
        };
        let sigma = match self.sigma {
            SigmaArg::Const => Sigma::constant(self.sigma_a)?,
            SigmaArg::Exp => Sigma::exp(self.sigma_a)?,
            SigmaArg::Arctan => Sigma::ArctanShift,
            SigmaArg::Tanh => Sigma::TanhShift,
        };
        let scheme = match self.scheme {
            SchemeArg::Ei1 => Scheme::Ei1,
            SchemeArg::Ei2 => Scheme::Ei2,
            SchemeArg::Stab1 => Scheme::Stab1,
        };
        let kappa = self.kappa.unwrap_or_else(|| potential.lipschitz());
        let scheme = SchemeConfig::new(self.eps, kappa, potential, sigma, scheme)?;
        let stepping = if self.adaptive {
            StepMode::Adaptive {
                tau_min: self.tau_min,
                tau_max: self.tau_max,
                alpha: self.alpha,
            }
        } else {
            StepMode::Uniform { tau: self.tau }
        };
        let init = match self.init {
            InitArg::Sine => Init::Sine {
                amplitude: self.amplitude,
            },
            InitArg::Random => Init::Random {
                lo: self.lo,
                hi: self.hi,
                seed: self.seed,
            },
        };
        let cfg = RunConfig {
            grid,
            scheme,
            stepping,
            t_end: self.t_end,
            init,
            output: self.out.clone(),
            snapshot_every: self.snapshot_every,
            verify_invariants,
        };
        cfg.validate()?;
        if !scheme.mbp_hypothesis_holds() {
            eprintln!(
                "warning: kappa = {kappa} is below the Lipschitz bound {}; the bound is not guaranteed",
                potential.lipschitz()
            );
        }
        Ok(cfg)
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run {
            model,
            verify_invariants,
        } => {
            let cfg = model.to_config(verify_invariants)?;
            if let Some(dir) = &cfg.output {
                std::fs::create_dir_all(dir)?;
            }
            let out = gsav::run(&cfg)?;
            let last = out.rows.last().expect("initial row");
            println!(
                "steps {} t {} sup_norm {} energy {} modified_energy {}",
                last.step,
                fmt_float(last.t),
                fmt_float(last.sup_norm),
                fmt_float(last.energy),
                fmt_float(last.modified_energy)
            );
            if let Some(dir) = &cfg.output {
                println!("wrote {}", dir.join(DIAGNOSTICS_FILE).display());
            }
            Ok(())
        }
        Command::Converge { model, taus, tau_ref } => {
            let cfg = model.to_config(false)?;
            let taus = taus.unwrap_or_else(|| DEFAULT_TAUS.to_vec());
            let table = converge(&cfg, &taus, tau_ref)?;
            print!("{}", table.to_csv());
            println!("slope_l2 {:.4} slope_linf {:.4}", table.slope_l2, table.slope_linf);
            if let Some(dir) = &cfg.output {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("convergence_{}.csv", table.scheme));
                table.write(&path)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Verify {
            profile,
            report,
            seed,
            grid_m,
            t_end,
            eps,
            kappa_factor,
        } => {
            let profiles = profile.unwrap_or_else(|| vec![Profile::Lemmas, Profile::Oracles, Profile::Invariants]);
            let opts = VerifyOptions {
                seed,
                grid_m,
                t_end,
                kappa_factor,
                eps,
                ..VerifyOptions::default()
            };
            let rep = verify(&profiles, &opts);
            for c in &rep.checks {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                println!("{verdict} {:?}/{}: {}", c.profile, c.name, c.detail);
            }
            if let Some(path) = report {
                std::fs::write(&path, rep.to_json())?;
            }
            let failed = rep.failures().len();
            if failed > 0 {
                for c in rep.failures() {
                    eprintln!("failed: {}", c.name);
                }
                return Err(HarnessError::Verification {
                    failed,
                    total: rep.checks.len(),
                });
            }
            println!("all {} checks passed", rep.checks.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
