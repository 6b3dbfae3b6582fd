use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use magtrace::cli::{configure_threads, run};
use magtrace::config::{parse_config_for, Command, Format};

#[derive(Parser)]
#[command(
    name = "magtrace",
    version,
    about = "Trace and counting asymptotics for magnetic Dirichlet Laplacians"
)]
struct Args {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Bulk and boundary coefficients C0(f), C1(f) for a domain and field
    Coeffs(Common),
    /// Tables of the half-line model eigenvalues e_k(xi)
    Model1d(Common),
    /// Exact disk or rectangle spectra against the two-term predictions
    Verify(Common),
    /// Boundary shift of the counting function across an energy grid
    Kunz(Common),
    /// Both sides of the thermodynamic-limit identity along a list of L
    Thermo(Common),
}

#[derive(clap::Args)]
struct Common {
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let (command, common) = match args.command {
        Sub::Coeffs(c) => (Command::Coeffs, c),
        Sub::Model1d(c) => (Command::Model1d, c),
        Sub::Verify(c) => (Command::Verify, c),
        Sub::Kunz(c) => (Command::Kunz, c),
        Sub::Thermo(c) => (Command::Thermo, c),
    };
    let format = common.format.map(|f| match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    });
    let outcome = configure_threads()
        .and_then(|_| std::fs::read_to_string(&common.config).map_err(Into::into))
        .and_then(|text| parse_config_for(command, &text))
        .and_then(|config| run(&config, common.out.as_deref(), format));
    match outcome {
        Ok(_) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("magtrace {}: {err}", command.name());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
