use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optomech_cli::commands::{
    print_json, run_eval, run_fractional_table, run_sensitivity, run_separability_at, run_separability_sweep,
    run_sweep,
};
use optomech_cli::config::{parse_tau, parse_tau_range};
use optomech_cli::reproduce::{reproduce, require_pass, Options};
use optomech_cli::{thread_pool, CliError, CliResult, Quantity, Scenario, Target};

#[derive(Parser)]
#[command(name = "optomech", version, about = "Fisher information of a nonlinear optomechanical gravimeter")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one quantity at one time; prints JSON.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Dimensionless time; accepts multiples of pi such as `20pi`.
        #[arg(long)]
        tau: String,
        #[arg(long)]
        safety_factor: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a quantity over a time grid and write `tau,<quantity>` CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// `start:end:points`, inclusive.
        #[arg(long)]
        tau_range: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Disentangling checks: the fractional-frequency table, or |K|^2 for a config.
    Separability {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "tau_range")]
        tau: Option<String>,
        #[arg(long)]
        tau_range: Option<String>,
        #[arg(long, default_value_t = 12)]
        s_max: i64,
        #[arg(long, default_value_t = 3)]
        q_max: u32,
        #[arg(long, default_value_t = 1.0)]
        k0: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Acceleration and strain bounds for a configured sensor at one time.
    Sensitivity {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tau: String,
        #[arg(long)]
        safety_factor: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a table or figure and check it against reference values.
    Reproduce {
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long, default_value = "reproduce_out")]
        out: PathBuf,
        /// Points per axis of the phase map.
        #[arg(long, default_value_t = 101)]
        phase_grid: usize,
    },
}

fn run(cmd: Cmd) -> CliResult<()> {
    match cmd {
        Cmd::Eval { config, quantity, tau, safety_factor, out } => {
            let s = Scenario::load(&config)?;
            print_json(&run_eval(&s, quantity, parse_tau(&tau)?, safety_factor)?, out.as_deref())
        }
        Cmd::Sweep { config, quantity, tau_range, out } => {
            let s = Scenario::load(&config)?;
            run_sweep(&s, quantity, &parse_tau_range(&tau_range)?, &out).map(|_| ())
        }
        Cmd::Separability { config: Some(config), tau, tau_range, out, .. } => {
            let s = Scenario::load(&config)?;
            match (tau, tau_range) {
                (Some(t), _) => print_json(&run_separability_at(&s, parse_tau(&t)?)?, out.as_deref()),
                (None, Some(r)) => {
                    let out = out.ok_or_else(|| CliError::Config("--tau-range needs --out".into()))?;
                    run_separability_sweep(&s, &parse_tau_range(&r)?, &out)
                }
                (None, None) => Err(CliError::Config("--config needs --tau or --tau-range".into())),
            }
        }
        Cmd::Separability { config: None, s_max, q_max, k0, out, .. } => {
            print_json(&run_fractional_table(s_max, q_max, k0)?, out.as_deref())
        }
        Cmd::Sensitivity { config, tau, safety_factor, out } => {
            let s = Scenario::load(&config)?;
            print_json(&run_sensitivity(&s, parse_tau(&tau)?, safety_factor)?, out.as_deref())
        }
        Cmd::Reproduce { target, out, phase_grid } => {
            if phase_grid < 2 {
                return Err(CliError::Config("--phase-grid: must be >= 2".into()));
            }
            let s = reproduce(target, Some(&out), &Options { phase_grid })?;
            for c in &s.checks {
                let status = if c.pass { "PASS" } else { "FAIL" };
                println!("{status} {}: computed {:e} (tolerance {:e})", c.name, c.computed, c.tolerance);
            }
            require_pass(&s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = thread_pool().and_then(|pool| pool.install(|| run(cli.cmd)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
