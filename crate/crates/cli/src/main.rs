use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use jetnoether::commands::{error_for_io, BalanceChoice, CommandKind, FluxForm, Mode, Options};
use jetnoether::run;
use jetnoether_core::system::KOptions;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Symmetries, self-adjointness and conservation laws of systems of
/// differential equations.
#[derive(Parser, Debug)]
#[command(name = "jetnoether", version)]
struct Cli {
    /// adjoint, check-sym, extend, conserve, verify or divtest.
    #[arg(value_enum)]
    command: CommandKind,
    /// Problem file.
    file: PathBuf,
    /// Generators to process (default: all).
    #[arg(long = "gen", value_delimiter = ',', value_name = "NAME")]
    generators: Vec<String>,
    /// Laws to verify (default: all).
    #[arg(long = "law", value_delimiter = ',', value_name = "NAME")]
    laws: Vec<String>,
    /// Expression for divtest.
    #[arg(long)]
    expr: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Balanced)]
    mode: Mode,
    /// Balance used for the modified Lagrangian.
    #[arg(long, value_enum, default_value_t = BalanceChoice::Declared)]
    balance: BalanceChoice,
    /// Flux tuple reported by conserve.
    #[arg(long, value_enum, default_value_t = FluxForm::Reduced)]
    fluxes: FluxForm,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Require the substituted adjoint system to be exactly -F.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set, value_name = "BOOL")]
    strict_selfadjoint: bool,
    /// Total degree cap of the K ansatz.
    #[arg(long, value_name = "N")]
    ansatz_degree: Option<u32>,
    /// Highest derivative order in K.
    #[arg(long, value_name = "N", default_value_t = 0)]
    max_k_order: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        generators: cli.generators,
        laws: cli.laws,
        expr: cli.expr,
        mode: cli.mode,
        balance: cli.balance,
        strict_selfadjoint: cli.strict_selfadjoint,
        k: KOptions {
            max_order: cli.max_k_order,
            ansatz_degree: cli.ansatz_degree,
        },
        fluxes: cli.fluxes,
    };
    let doc = match std::fs::read_to_string(&cli.file) {
        Ok(src) => run(cli.command, &src, &opts),
        Err(e) => error_for_io(cli.command, &cli.file, &e),
    };
    match cli.format {
        Format::Text => print!("{}", doc.to_text()),
        Format::Json => println!("{}", doc.to_json()),
    }
    ExitCode::from(doc.exit_code as u8)
}
