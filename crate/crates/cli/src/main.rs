use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use eventual_cli::{emit, execute, read_matrix, Command, RunConfig, EXIT_ERROR};
use eventual_core::Backend;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

/// Classify a real square matrix by its eventual sign and total positivity
/// properties.
#[derive(Debug, Parser)]
#[command(name = "eventual", version)]
struct Args {
    /// Matrix file (.csv or .json), or `-` for standard input.
    input: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendArg,

    /// Eigenpair residual tolerance, relative to max(1, ||A||_inf).
    #[arg(long, default_value_t = eventual_core::spectral::DEFAULT_TOL)]
    tol: f64,

    /// Relative zero threshold for float sign decisions.
    #[arg(long = "sign-tol", default_value_t = eventual_core::signs::DEFAULT_SIGN_TOL)]
    sign_tol: f64,

    /// Largest power searched.
    #[arg(long = "kmax", default_value_t = eventual_core::classify::DEFAULT_K_MAX)]
    k_max: usize,

    /// Command to run; repeatable. One of `classify`, `compound <j>`,
    /// `spectrum`, `power-index <property>`, `generate <class> <n>`.
    #[arg(long = "cmd", default_value = "classify")]
    commands: Vec<String>,

    /// Seed for `generate`.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: Args) -> Result<i32, eventual_cli::CliError> {
    let commands = args.commands.iter().map(|c| c.parse::<Command>()).collect::<Result<Vec<_>, _>>()?;
    let cfg = RunConfig {
        backend: match args.backend {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        },
        tol: args.tol,
        sign_tol: args.sign_tol,
        k_max: args.k_max,
        commands,
        output: args.out.clone(),
        seed: args.seed,
    };
    cfg.validate()?;
    let parsed = match &args.input {
        Some(path) => Some((read_matrix(path, cfg.backend)?, path.display().to_string())),
        None => None,
    };
    let outcome = execute(&cfg, parsed.as_ref().map(|(p, s)| (p, s.as_str())))?;
    emit(&outcome.document, cfg.output.as_deref())?;
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("eventual: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
