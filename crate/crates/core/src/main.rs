use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cohquant::cli::{
    cmd_finite, cmd_fock, cmd_haar, cmd_trig, cmd_verify, CliError, CommonOptions, FiniteOptions, FockOptions,
    HaarOptions, TrigOptions, EXIT_FAILURE, EXIT_USAGE,
};

/// Coherent-state quantization of finite sets, the unit interval and the plane.
#[derive(Debug, Parser)]
#[command(name = "cohquant", version)]
struct Cli {
    #[command(flatten)]
    common: CommonOptions,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the invariant suite and print a pass/fail table.
    Verify,
    /// Quantize an observable on a finite set with a vector-pair frame.
    Finite(FiniteOptions),
    /// Haar frames on [0, 1]: A_{x^p}, lower symbols, dyadic localization.
    Haar(HaarOptions),
    /// Trigonometric pair on [0, 1]: lower-symbol curve of the position operator.
    Trig(TrigOptions),
    /// Truncated Fock frame on the plane: ladder operators and commutators.
    Fock(FockOptions),
}

fn emit(common: &CommonOptions, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let common = &cli.common;
    match &cli.command {
        Command::Verify => {
            let (table, ok) = cmd_verify(common)?;
            emit(common, &table)?;
            Ok(ok)
        }
        Command::Finite(opts) => emit(common, &cmd_finite(common, opts)?).map(|_| true),
        Command::Haar(opts) => emit(common, &cmd_haar(common, opts)?).map(|_| true),
        Command::Trig(opts) => {
            let out = cmd_trig(common, opts)?;
            match &common.out {
                Some(_) => {
                    emit(common, &out.csv)?;
                    print!("{}", out.summary);
                }
                None => {
                    print!("{}", out.csv);
                    eprint!("{}", out.summary);
                }
            }
            Ok(true)
        }
        Command::Fock(opts) => emit(common, &cmd_fock(common, opts)?).map(|_| true),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
fn execute<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(&cli) {
        Ok(true) => 0,
        Ok(false) => EXIT_FAILURE,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(execute(std::env::args_os()) as u8)
}
