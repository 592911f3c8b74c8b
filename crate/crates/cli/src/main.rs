//! `kkp` binary.

use clap::{Parser, Subcommand};
use kkp_cli::commands::{
    cmd_kinematics, cmd_simulate, cmd_soliton, cmd_stability, cmd_verify_ansatz, cmd_verify_claws, parse_rationals,
    ratios_from_betas, ClawArgs, CliError, CliResult, KinematicsArgs, Outcome, SolitonArgs,
};
use kkp_core::diagnostics::{FTriple, LAW_COUNT};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "kkp",
    version,
    about = "Line solitons, conservation laws and spectral runs for the fifth-order KP equation"
)]
struct Cli {
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate closed-form line-soliton profiles.
    Soliton {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = vec![-1.0, -2.0, -4.0])]
        beta: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = vec![8.0, -5.0])]
        kappa: Vec<f64>,
        /// Add a sweep with ν chosen so that the background vanishes
        #[arg(long)]
        zero_background: bool,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sigma: i64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, default_value_t = -30.0, allow_hyphen_values = true)]
        xi_min: f64,
        #[arg(long, default_value_t = 30.0, allow_hyphen_values = true)]
        xi_max: f64,
        #[arg(long, default_value_t = 601)]
        points: usize,
    },
    /// Speed against propagation angle for zero-background solitons.
    Kinematics {
        /// Values of (6β/13)²
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0, 4.0, 10.0], conflicts_with = "beta")]
        ratio_sq: Vec<f64>,
        /// Derive (6β/13)² from these β instead
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        beta: Option<Vec<f64>>,
        /// Restrict to one sign; both by default
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<i64>,
        #[arg(long, default_value_t = 401)]
        theta_points: usize,
    },
    /// Exact rational check of the sech⁴ family.
    VerifyAnsatz {
        /// Comma-separated rationals, e.g. -1,-13/4
        #[arg(long, allow_hyphen_values = true)]
        betas: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        kappas: Option<String>,
    },
    /// Conservation-law convergence tables, symmetry actions and charges.
    VerifyClaws {
        /// `all` or a law number 1..5
        #[arg(long, default_value = "all")]
        claw: String,
        #[arg(long, value_delimiter = ',', default_value = "1,t,t2")]
        f: Vec<String>,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<i64>,
        #[arg(long, default_value_t = 0.6, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
        nu: f64,
        /// x,y,t
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = vec![0.7, 0.3, 0.4])]
        point: Vec<f64>,
        #[arg(long, default_value_t = 0.4)]
        h0: f64,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        #[arg(long)]
        skip_symmetries: bool,
        #[arg(long)]
        skip_charges: bool,
    },
    /// Pseudospectral run from a key = value configuration file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Symbol positivity, rescaled profile relation and the stability integral.
    Stability {
        #[arg(long, value_delimiter = ',', default_values_t = vec![100.0, 200.0])]
        lengths: Vec<f64>,
        #[arg(long, default_value_t = 40.0)]
        points_per_length: f64,
    },
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("KKP_THREADS") {
        let n: usize =
            v.trim().parse().map_err(|_| usage(format!("KKP_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(usage("KKP_THREADS must be a positive integer"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<Outcome> {
    configure_threads()?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("kkp-out"));
    match cli.command {
        Command::Soliton { beta, kappa, zero_background, sigma, mu, xi_min, xi_max, points } => cmd_soliton(
            &SolitonArgs { betas: beta, kappas: kappa, zero_background, sigma, mu, xi_min, xi_max, points },
            &out,
        ),
        Command::Kinematics { ratio_sq, beta, sigma, theta_points } => {
            let ratios = beta.map_or(ratio_sq, |b| ratios_from_betas(&b));
            cmd_kinematics(&KinematicsArgs { ratios, sigma, theta_points }, &out)
        }
        Command::VerifyAnsatz { betas, kappas } => {
            let betas = betas.as_deref().map(parse_rationals).transpose()?;
            let kappas = kappas.as_deref().map(parse_rationals).transpose()?;
            cmd_verify_ansatz(betas.as_deref(), kappas.as_deref(), &out)
        }
        Command::VerifyClaws { claw, f, beta, sigma, mu, nu, point, h0, levels, skip_symmetries, skip_charges } => {
            let laws = if claw == "all" {
                (1..=LAW_COUNT).collect()
            } else {
                vec![claw.parse().map_err(|_| usage(format!("--claw must be `all` or 1..5, got {claw:?}")))?]
            };
            let fs = f.iter().map(|s| FTriple::parse(s)).collect::<Result<Vec<_>, _>>()?;
            let [x, y, t] = point[..] else {
                return Err(usage("--point takes three values x,y,t"));
            };
            cmd_verify_claws(
                &ClawArgs {
                    laws,
                    fs,
                    beta,
                    sigma,
                    mu,
                    nu,
                    point: (x, y, t),
                    h0,
                    levels,
                    symmetries: !skip_symmetries,
                    charges: !skip_charges,
                },
                &out,
            )
        }
        Command::Simulate { config } => cmd_simulate(&config, cli.out.as_deref()),
        Command::Stability { lengths, points_per_length } => cmd_stability(&lengths, points_per_length, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            ExitCode::from(if outcome.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
